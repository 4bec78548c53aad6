"""Operator CLI: ingest, simulate, analyze, trace, report, serve, export.

Exit codes: 0 success, 1 runtime failure (structured JSON error on
stderr), 2 usage errors (argparse).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from anansi.control_plane.config import load_config
from anansi.control_plane.service import PipelineService


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anansi",
        description="scam-engagement measurement pipeline",
    )
    parser.add_argument("--config", help="config document path "
                        "(default: $ANANSI_CONFIG if set)")
    parser.add_argument("--store", help="event log path (overrides config)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="load scam reports into the store")
    p_ingest.add_argument("--input", required=True)
    p_ingest.add_argument("--format", required=True,
                          choices=["portal_csv", "transcript_text"])
    p_ingest.add_argument("--region", default="US")

    p_sim = sub.add_parser("simulate", help="run scripted scammers end to end")
    p_sim.add_argument("--scenarios", help="scenario directory")
    p_sim.add_argument("--count", type=int)
    p_sim.add_argument("--auto-resolve-escalations", action="store_true")

    p_analyze = sub.add_parser("analyze", help="emit cluster/infra/analytics reports")
    p_analyze.add_argument("--out", required=True)

    p_trace = sub.add_parser("trace", help="compute wallet revenue from ledgers")
    p_trace.add_argument("--ledgers", help="ledger fixture file or directory")
    p_trace.add_argument("--rates", help="rate table CSV")
    p_trace.add_argument("--out", default="trace-out")
    p_trace.add_argument("--wallet", action="append", dest="wallets")

    p_report = sub.add_parser("report", help="render a stored report")
    p_report.add_argument("--name", required=True,
                          choices=["attrition", "persistence", "clusters",
                                   "infra", "finance", "trajectories"])
    p_report.add_argument("--out", help="write to file instead of stdout")

    p_serve = sub.add_parser("serve", help="start the dashboard HTTP API")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8800)
    p_serve.add_argument("--frontend", help="built dashboard directory to mount at /ui")

    p_export = sub.add_parser("export", help="export the dataset archive")
    p_export.add_argument("--out", required=True)
    p_export.add_argument("--redact", action="store_true")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
        if args.store:
            config.store_path = Path(args.store)
        service = PipelineService(config)

        if args.command == "ingest":
            summary = service.ingest_file(args.input, args.format, args.region)
            print(json.dumps(summary, indent=2))
        elif args.command == "simulate":
            summary = service.simulate(
                args.scenarios, args.count,
                auto_resolve_escalations=args.auto_resolve_escalations)
            print(json.dumps(summary, indent=2))
            if summary["stalled"] or summary["stage_trace_failures"]:
                return 1
        elif args.command == "analyze":
            produced = service.generate_reports(args.out)
            print(json.dumps({name: str(path) for name, path in produced.items()},
                             indent=2))
        elif args.command == "trace":
            payload = service.trace(args.ledgers, args.rates, args.out, args.wallets)
            print(json.dumps({"total_usd": payload["total_usd"],
                              "rows": len(payload["rows"])}, indent=2))
        elif args.command == "report":
            payload = {
                "attrition": service.report_attrition,
                "persistence": service.report_persistence,
                "clusters": service.report_clusters,
                "infra": service.report_infra,
                "finance": service.report_finance,
                "trajectories": service.report_trajectories,
            }[args.name]()
            text = json.dumps(payload, indent=2, sort_keys=True)
            if args.out:
                Path(args.out).write_text(text + "\n", "utf-8")
                print(args.out)
            else:
                print(text)
        elif args.command == "export":
            archive = service.export(args.out, redact=args.redact)
            print(str(archive))
        elif args.command == "serve":
            import uvicorn

            from anansi.control_plane.api import create_app
            app = create_app(service, static_dir=args.frontend)
            uvicorn.run(app, host=args.host, port=args.port, log_level="info")
        return 0
    except Exception as exc:  # runtime failure: structured error, exit 1
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
