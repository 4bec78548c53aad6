"""HTTP+JSON API for the operator dashboard.

Mutations go through POST /conversations/{id}/actions only; everything
else is a snapshot read. GET /events is a server-sent-event stream with
resume-from-seq so a reconnecting dashboard never misses notifications.
"""

from __future__ import annotations

import json
from datetime import datetime

from fastapi import Depends, FastAPI, HTTPException, Query, Request
from fastapi.responses import PlainTextResponse, StreamingResponse
from pydantic import BaseModel

from anansi.control_plane.service import (
    DuplicateAction,
    InvalidAction,
    NoOpenEscalation,
    OperatorAction,
    PipelineService,
    UnknownConversation,
)

REPORT_NAMES = ("attrition", "persistence", "clusters", "infra", "finance",
                "trajectories")


class ActionBody(BaseModel):
    action_id: str
    kind: str
    actor: str = "operator"
    body: str | None = None
    at: datetime | None = None


def create_app(service: PipelineService, token: str | None = None,
               static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="anansi control plane", version="0.1.0")

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/ui", StaticFiles(directory=static_dir, html=True), name="ui")

    def require_auth(request: Request) -> None:
        expected = token if token is not None else service.config.api_token
        if expected is None:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {expected}":
            raise HTTPException(status_code=401, detail="missing or bad bearer token")

    auth = Depends(require_auth)

    @app.get("/conversations", dependencies=[auth])
    def list_conversations(stage: str | None = None, platform: str | None = None):
        return service.conversation_summaries(stage=stage, platform=platform)

    @app.get("/conversations/{conversation_id}", dependencies=[auth])
    def get_conversation(conversation_id: str):
        try:
            return service.conversation_detail(conversation_id)
        except UnknownConversation:
            raise HTTPException(status_code=404, detail="unknown conversation")

    @app.post("/conversations/{conversation_id}/actions", dependencies=[auth])
    def post_action(conversation_id: str, body: ActionBody):
        action = OperatorAction(
            action_id=body.action_id,
            kind=body.kind,
            conversation_id=conversation_id,
            actor=body.actor,
            body=body.body,
            at=body.at,
        )
        try:
            return service.handle_operator_action(action)
        except UnknownConversation:
            raise HTTPException(status_code=404, detail="unknown conversation")
        except NoOpenEscalation:
            raise HTTPException(status_code=409, detail="no open escalation")
        except DuplicateAction as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except InvalidAction as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.get("/escalations", dependencies=[auth])
    def list_escalations(open: bool = Query(default=True)):
        return service.escalation_queue(open_only=open)

    @app.get("/reports/{name}", dependencies=[auth])
    def get_report(name: str, format: str = "json"):
        if name not in REPORT_NAMES:
            raise HTTPException(status_code=404, detail="unknown report")
        payload = {
            "attrition": service.report_attrition,
            "persistence": service.report_persistence,
            "clusters": service.report_clusters,
            "infra": service.report_infra,
            "finance": service.report_finance,
            "trajectories": service.report_trajectories,
        }[name]()
        if format == "csv":
            return PlainTextResponse(_to_csv(name, payload), media_type="text/csv")
        return payload

    @app.get("/events", dependencies=[auth])
    def events(from_seq: int = 0, stream: bool = True,
               limit: int | None = None, poll_seconds: float = 0.5):
        if not stream:
            return [
                {"seq": e.seq, "kind": e.kind.value, "at": e.at.isoformat()}
                for e in service.log.events(from_seq)
            ]

        def sse():
            last = from_seq
            sent = 0
            while True:
                batch = service.log.wait_for(last, timeout=poll_seconds)
                if not batch:
                    if limit is not None:
                        break
                    yield ": keepalive\n\n"
                    continue
                for event in batch:
                    doc = {"seq": event.seq, "kind": event.kind.value,
                           "at": event.at.isoformat()}
                    yield f"id: {event.seq}\ndata: {json.dumps(doc, sort_keys=True)}\n\n"
                    last = event.seq
                    sent += 1
                    if limit is not None and sent >= limit:
                        return

        return StreamingResponse(sse(), media_type="text/event-stream")

    return app


def _to_csv(name: str, payload: dict) -> str:
    if name == "finance":
        lines = ["domains,wallet,total_txns,revenue_usd"]
        for row in payload.get("rows", []):
            domains = " ".join(row["domains"]) if row["domains"] else "-"
            lines.append(f"{domains},{row['wallet']},{row['tx_count']},{row['net_usd']}")
        return "\n".join(lines) + "\n"
    if name == "persistence":
        lines = ["days,fraction"]
        for point in payload.get("points", []):
            lines.append(f"{point['days']},{point['fraction']}")
        return "\n".join(lines) + "\n"
    if name == "trajectories":
        lines = ["trajectory,count"]
        for label, count in sorted(payload.items(), key=lambda kv: (-kv[1], kv[0])):
            lines.append(f"{label},{count}")
        return "\n".join(lines) + "\n"
    if name == "attrition":
        lines = ["node,count"]
        for node in payload.get("nodes", []):
            lines.append(f"{node['name']},{node['count']}")
        return "\n".join(lines) + "\n"
    return json.dumps(payload, sort_keys=True)
