import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from anansi.control_plane.api import create_app
from anansi.control_plane.cli import main as cli_main
from anansi.control_plane.config import AppConfig, load_config
from anansi.control_plane.service import (
    DuplicateAction,
    NoOpenEscalation,
    OperatorAction,
    PipelineService,
    UnknownConversation,
)
from anansi.engagement import EngagementEngine, run_scripted_scammer, script_from_dict
from anansi.store import persist_conversation

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

ESCALATION_SCENARIO = {
    "scenario_id": "esc-demo",
    "phone": "+15553334444",
    "bait_text": "Hello! My name is Judy from Target. Flexible remote role, earn $300 daily.",
    "payloads": {},
    "turns": [
        {"trigger": "*",
         "reply": "Hello! My name is Judy from Target. Flexible remote role, earn $300 daily.",
         "stage": "initial_contact"},
        {"trigger": "interested",
         "reply": "Before training, send a photo of your driver's license to verify."},
    ],
}


def make_service(tmp_path, **overrides) -> PipelineService:
    config = AppConfig(store_path=tmp_path / "events.jsonl", **overrides)
    return PipelineService(config)


def seed_escalated_conversation(service: PipelineService) -> str:
    run = run_scripted_scammer(script_from_dict(ESCALATION_SCENARIO),
                               engine=EngagementEngine())
    assert run.escalated
    persist_conversation(service.log, run.conversation,
                         persona_seed=run.conversation.persona.seed)
    return run.conversation.conversation_id


def test_ingest_file(tmp_path):
    service = make_service(tmp_path)
    summary = service.ingest_file(FIXTURES / "portal_reports.csv", "portal_csv")
    assert summary["parsed"] == 3
    assert summary["ingested"] == 3
    # idempotent re-ingest
    again = service.ingest_file(FIXTURES / "portal_reports.csv", "portal_csv")
    assert again["ingested"] == 0


def test_simulate_persists_and_skips_on_rerun(tmp_path):
    service = make_service(tmp_path, scenario_dir=FIXTURES / "scenarios")
    summary = service.simulate(count=6)
    assert summary["completed"] == 6
    snap = service.log.snapshot()
    assert len(snap.conversations) == 6
    assert all(c.stage.value == "closed" for c in snap.conversations.values())
    rerun = service.simulate(count=6)
    assert rerun["skipped"] == 6 and rerun["completed"] == 0


def test_operator_approve_flow(tmp_path):
    service = make_service(tmp_path)
    cid = seed_escalated_conversation(service)
    snap = service.log.snapshot()
    assert snap.open_escalations()

    action = OperatorAction("act-1", "approve_draft", cid, actor="op1")
    result = service.handle_operator_action(action)
    assert not result["replayed"]
    assert len(result["seqs"]) == 2  # message + resolution

    snap = service.log.snapshot()
    conv = snap.conversations[cid]
    assert conv.open_escalation() is None
    assert conv.messages[-1].responder.value == "operator"
    assert conv.messages[-1].text  # the withheld draft went out

    # idempotent replay: same token, same payload, no new events
    watermark = service.log.watermark
    replay = service.handle_operator_action(action)
    assert replay["replayed"] and replay["seqs"] == result["seqs"]
    assert service.log.watermark == watermark

    with pytest.raises(DuplicateAction):
        service.handle_operator_action(
            OperatorAction("act-1", "reject_draft", cid, actor="op1"))


def test_operator_errors(tmp_path):
    service = make_service(tmp_path)
    cid = seed_escalated_conversation(service)
    with pytest.raises(UnknownConversation):
        service.handle_operator_action(
            OperatorAction("act-x", "approve_draft", "c-missing", actor="op"))
    service.handle_operator_action(
        OperatorAction("act-2", "reject_draft", cid, actor="op"))
    with pytest.raises(NoOpenEscalation):
        service.handle_operator_action(
            OperatorAction("act-3", "approve_draft", cid, actor="op"))


def test_operator_annotate_and_close(tmp_path):
    service = make_service(tmp_path)
    cid = seed_escalated_conversation(service)
    service.handle_operator_action(
        OperatorAction("act-a", "annotate", cid, actor="op", body="seen this crew before"))
    service.handle_operator_action(
        OperatorAction("act-r", "reject_draft", cid, actor="op"))
    service.handle_operator_action(
        OperatorAction("act-c", "close_conversation", cid, actor="op"))
    snap = service.log.snapshot()
    assert snap.conversations[cid].stage.value == "closed"
    assert snap.annotations[cid][0]["note"] == "seen this crew before"


def test_reports_from_simulated_store(tmp_path):
    service = make_service(
        tmp_path,
        scenario_dir=FIXTURES / "scenarios",
        rates_path=FIXTURES / "rates.csv",
        blocklists_dir=FIXTURES / "blocklists",
        resolutions_path=FIXTURES / "resolutions.json",
        asn_table_path=FIXTURES / "asn_table.csv",
    )
    service.simulate(count=20)
    attrition = service.report_attrition()
    names = {n["name"]: n["count"] for n in attrition["nodes"]}
    assert names["contacted"] == 20
    assert names["responded"] == 20

    trajectories = service.report_trajectories()
    assert trajectories.get("Text→Telegram", 0) == 20

    clusters = service.report_clusters()
    assert clusters["templates"]
    assert clusters["ioc_components"]
    biggest = max(c["size"] for c in clusters["templates"])
    assert biggest >= 5  # shared pitch template folds together

    infra_report = service.report_infra()
    assert infra_report["tld_distribution"]
    assert infra_report["blocklist_coverage"]
    assert infra_report["hosting"] is not None

    finance_report = service.report_finance()
    assert finance_report["rows"] == []  # no ledgers stored yet


def test_trace_matches_hand_computed_totals(tmp_path):
    service = make_service(
        tmp_path,
        ledgers_path=FIXTURES / "ledgers",
        rates_path=FIXTURES / "rates.csv",
        wallet_domains={
            "bc1qa6esq4c6wh6ahd6rmla69s32s7wzqkym7m2x77": ["wpfm-taskhub.club"],
        },
        dataset_wallets=[
            "bc1qk3q0kvlm69nufepd6pn6jz92g6ph8h8g6vfsz6",
            "36x8XoD8Fu6y5VFk28Qn4tjSSViJ17BsE4",
        ],
    )
    payload = service.trace(out_dir=tmp_path / "trace")
    assert all(set(row) == {"wallet", "asset", "domains", "gross_usd", "refunds_usd",
                            "internal_usd", "net_usd", "tx_count"}
               for row in payload["rows"])
    by_wallet = {row["wallet"]: row for row in payload["rows"]}
    btc = by_wallet["bc1qa6esq4c6wh6ahd6rmla69s32s7wzqkym7m2x77"]
    assert btc["net_usd"] == "42000.00"
    assert btc["refunds_usd"] == "25500.00"
    assert btc["internal_usd"] == "15000.00"
    assert btc["tx_count"] == 9
    eth = by_wallet["0xF3d2554Cc074F52A80DC5115Ce635EBf39b1B26A"]
    assert eth["net_usd"] == "5000.00"
    assert payload["total_usd"] == "47000.00"
    csv_text = (tmp_path / "trace" / "revenue.csv").read_text()
    assert csv_text.startswith("domains,wallet,total_txns,revenue_usd")
    # ledger events persisted -> finance report now available
    assert service.report_finance()["total_usd"] == "47000.00"


# --- HTTP API -------------------------------------------------------------------


@pytest.fixture()
def client_env(tmp_path):
    service = make_service(tmp_path, scenario_dir=FIXTURES / "scenarios")
    service.simulate(count=5)
    cid = seed_escalated_conversation(service)
    app = create_app(service)
    return TestClient(app), service, cid


def test_api_conversations(client_env):
    client, service, cid = client_env
    listing = client.get("/conversations").json()
    assert len(listing) == 6
    closed = client.get("/conversations", params={"stage": "closed"}).json()
    assert len(closed) == 5
    telegram = client.get("/conversations", params={"platform": "telegram"}).json()
    assert len(telegram) == 5

    detail = client.get(f"/conversations/{cid}").json()
    assert detail["conversation_id"] == cid
    assert detail["messages"]
    assert detail["persona"]["name"]
    assert client.get("/conversations/nope").status_code == 404


def test_api_escalations_and_actions(client_env):
    client, service, cid = client_env
    queue = client.get("/escalations", params={"open": True}).json()
    assert len(queue) == 1 and queue[0]["conversation_id"] == cid

    body = {"action_id": "api-act-1", "kind": "approve_draft", "actor": "op9"}
    first = client.post(f"/conversations/{cid}/actions", json=body)
    assert first.status_code == 200
    second = client.post(f"/conversations/{cid}/actions", json=body)
    assert second.status_code == 200
    assert second.json()["replayed"] is True
    assert second.json()["seqs"] == first.json()["seqs"]

    assert client.get("/escalations").json() == []
    conflicting = client.post(f"/conversations/{cid}/actions", json={
        "action_id": "api-act-1", "kind": "reject_draft"})
    assert conflicting.status_code == 409
    no_escalation = client.post(f"/conversations/{cid}/actions", json={
        "action_id": "api-act-2", "kind": "approve_draft"})
    assert no_escalation.status_code == 409
    missing = client.post("/conversations/ghost/actions", json={
        "action_id": "api-act-3", "kind": "approve_draft"})
    assert missing.status_code == 404
    empty_edit = client.post(f"/conversations/{cid}/actions", json={
        "action_id": "api-act-4", "kind": "edit_and_send", "body": "  "})
    assert empty_edit.status_code == 422


def test_api_reports_and_stability(client_env):
    client, service, cid = client_env
    attrition = client.get("/reports/attrition").json()
    assert attrition["nodes"]
    assert client.get("/reports/attrition").json() == attrition  # stable reads
    persistence = client.get("/reports/persistence")
    assert persistence.status_code == 200
    csv_resp = client.get("/reports/finance", params={"format": "csv"})
    assert csv_resp.headers["content-type"].startswith("text/csv")
    assert client.get("/reports/unknown").status_code == 404


def test_api_event_stream_resume(client_env):
    client, service, cid = client_env
    listing = client.get("/events", params={"stream": False}).json()
    assert listing[0]["seq"] == 1
    watermark = service.log.watermark
    from_seq = watermark - 3

    with client.stream("GET", "/events",
                       params={"from_seq": from_seq, "limit": 3}) as response:
        body = "".join(response.iter_text())
    ids = [int(line.split(": ")[1]) for line in body.splitlines()
           if line.startswith("id: ")]
    assert ids == [from_seq + 1, from_seq + 2, from_seq + 3]


def test_api_bearer_token(tmp_path):
    service = make_service(tmp_path, api_token="sekrit")
    app = create_app(service)
    client = TestClient(app)
    assert client.get("/conversations").status_code == 401
    ok = client.get("/conversations", headers={"Authorization": "Bearer sekrit"})
    assert ok.status_code == 200


# --- CLI ---------------------------------------------------------------------


def test_cli_ingest_and_simulate(tmp_path, capsys):
    store = tmp_path / "events.jsonl"
    rc = cli_main(["--store", str(store), "ingest",
                   "--input", str(FIXTURES / "portal_reports.csv"),
                   "--format", "portal_csv"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["ingested"] == 3

    rc = cli_main(["--store", str(store), "simulate",
                   "--scenarios", str(FIXTURES / "scenarios"), "--count", "10"])
    assert rc == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["completed"] == 10
    assert summary["stage_trace_failures"] == 0


def test_cli_trace_and_report(tmp_path, capsys):
    store = tmp_path / "events.jsonl"
    rc = cli_main(["--config", str(FIXTURES / "config.json"),
                   "--store", str(store), "trace",
                   "--out", str(tmp_path / "trace")])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["total_usd"] == "47000.00"
    assert (tmp_path / "trace" / "revenue.csv").exists()

    rc = cli_main(["--config", str(FIXTURES / "config.json"),
                   "--store", str(store), "report", "--name", "finance"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["total_usd"] == "47000.00"


def test_cli_analyze_and_export(tmp_path, capsys):
    store = tmp_path / "events.jsonl"
    cli_main(["--store", str(store), "simulate",
              "--scenarios", str(FIXTURES / "scenarios"), "--count", "5"])
    capsys.readouterr()
    rc = cli_main(["--store", str(store), "analyze", "--out", str(tmp_path / "reports")])
    assert rc == 0
    for name in ("attrition", "persistence", "clusters", "infra", "finance"):
        assert (tmp_path / "reports" / f"{name}.json").exists()
    capsys.readouterr()
    rc = cli_main(["--store", str(store), "export", "--out", str(tmp_path / "archive")])
    assert rc == 0
    assert (tmp_path / "archive" / "conversations.csv").exists()


def test_cli_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        cli_main(["frobnicate"])
    assert exc.value.code == 2


def test_cli_runtime_error_exits_1(tmp_path, capsys):
    rc = cli_main(["--store", str(tmp_path / "e.jsonl"), "trace",
                   "--ledgers", str(tmp_path / "missing"),
                   "--rates", str(FIXTURES / "rates.csv")])
    assert rc == 1
    err = capsys.readouterr().err
    assert json.loads(err)["error"]


def test_config_loading_env(tmp_path, monkeypatch):
    config_doc = {
        "store_path": "events.jsonl",
        "rates_path": "rates.csv",
        "api_token": "tok",
        "refund_tolerance": 0.02,
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config_doc))
    (tmp_path / "rates.csv").write_text("date,asset,usd_close\n")
    monkeypatch.setenv("ANANSI_CONFIG", str(path))
    config = load_config()
    assert config.store_path == tmp_path / "events.jsonl"
    assert config.rates_path == tmp_path / "rates.csv"
    assert config.api_token == "tok"
    assert config.refund_tolerance == 0.02


def test_api_contract_shapes(client_env):
    """Key sets the dashboard types depend on; a drift here breaks the UI."""
    client, service, cid = client_env

    summary = client.get("/conversations").json()[0]
    assert set(summary) == {
        "conversation_id", "scammer_phone", "stage", "platform_route",
        "message_count", "open_escalations", "indicator_count", "outcome",
        "opened_at", "scam_type_label",
    }

    detail = client.get(f"/conversations/{cid}").json()
    assert {"messages", "escalations", "indicators", "persona",
            "annotations"} <= set(detail)
    assert set(detail["messages"][0]) == {
        "index", "direction", "platform", "text", "sent_at", "responder",
        "delivery_state",
    }
    assert set(detail["persona"]) == {
        "persona_id", "name", "age", "city", "state", "occupation", "backstory",
    }

    queue_item = client.get("/escalations").json()[0]
    assert set(queue_item) == {
        "ticket_id", "reason", "draft", "opened_at", "resolved", "resolution",
        "conversation_id", "scammer_phone", "stage",
    }

    result = client.post(f"/conversations/{cid}/actions", json={
        "action_id": "shape-1", "kind": "approve_draft"}).json()
    assert set(result) == {"action_id", "conversation_id", "replayed", "seqs"}

    attrition = client.get("/reports/attrition").json()
    assert set(attrition) == {"nodes", "links"}
    assert set(attrition["nodes"][0]) == {"name", "count"}
    assert set(attrition["links"][0]) == {"source", "target", "value"}

    persistence = client.get("/reports/persistence").json()
    assert set(persistence) == {"points", "excluded"}

    finance = client.get("/reports/finance").json()
    assert set(finance) == {"rows", "stats", "total_usd"}

    infra = client.get("/reports/infra").json()
    assert set(infra) == {"domains", "tld_distribution", "blocklist_coverage",
                          "hosting"}

    events = client.get("/events", params={"stream": False}).json()
    assert set(events[0]) == {"seq", "kind", "at"}
