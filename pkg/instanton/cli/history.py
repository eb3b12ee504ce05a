# instanton/cli/history.py

import argparse
import json

from instanton.core.database import init_db
from instanton.services.ledger import list_runs
from instanton.cli.common import EXIT_PASS, CommandResult


def cmd_history(args: argparse.Namespace) -> CommandResult:
    init_db()
    runs = list_runs(args.limit, args.only_command)
    text = json.dumps([run.model_dump(mode="json") for run in runs], indent=2) + "\n"
    return CommandResult(report=None, exit_code=EXIT_PASS, text=text)


def register(subparsers):
    history = subparsers.add_parser("history", help="list recorded runs")
    history.add_argument("--limit", type=int, default=20)
    history.add_argument("--only", dest="only_command", help="show runs of this command only")
    history.set_defaults(handler=cmd_history, unrecorded=True)
