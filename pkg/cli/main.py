"""
``consentchain`` command-line entry point.

Exit codes: 0 on success, 1 when the network rejects the request (the error
name is printed), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import TYPE_CHECKING

from cli import handlers
from cli.config import CliConfig
from cli.output import EXIT_OK, EXIT_REJECTED, EXIT_USAGE, emit, emit_error
from core.config import get_settings
from core.errors import ErrorCode
from core.logging import configure_logging, get_logger
from core.result import Failure
from services.consensus.types import ReadMode

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = get_logger(__name__)


def _common_flags(*, suppress: bool) -> argparse.ArgumentParser:
    """Flags accepted before or after the command words."""
    default = argparse.SUPPRESS if suppress else None
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument(
        "--json",
        action="store_true",
        default=argparse.SUPPRESS if suppress else False,
        help="machine-readable output",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        default=argparse.SUPPRESS if suppress else False,
        help="debug logging",
    )
    parser.add_argument("--data-dir", type=Path, default=default, help="node files directory")
    parser.add_argument("--at", type=int, default=default, help="clock override (seconds)")
    parser.add_argument("--as", dest="acting", default=default, help="acting actor id")
    return parser


def _group(
    subparsers: argparse._SubParsersAction[argparse.ArgumentParser],
    name: str,
    help_text: str,
) -> argparse._SubParsersAction[argparse.ArgumentParser]:
    parser = subparsers.add_parser(name, help=help_text)
    group = parser.add_subparsers(dest="action", metavar="ACTION")
    group.required = True
    return group


def build_parser() -> argparse.ArgumentParser:
    """The full command table."""
    common = _common_flags(suppress=True)
    parser = argparse.ArgumentParser(
        prog="consentchain",
        description="Permissioned ledger for consent and data governance.",
        parents=[_common_flags(suppress=False)],
    )
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    def leaf(
        group: argparse._SubParsersAction[argparse.ArgumentParser],
        name: str,
        handler: handlers.Handler,
    ) -> argparse.ArgumentParser:
        sub = group.add_parser(name, parents=[common], help=(handler.__doc__ or "").strip())
        sub.set_defaults(handler=handler)
        return sub

    ident = _group(commands, "id", "actors and organizations")
    sub = leaf(ident, "register", handlers.id_register)
    sub.add_argument("actor_id")
    sub.add_argument("--org", default=None, help="parent organization")
    sub.add_argument("--roles", default="", help="comma-separated roles")
    sub.add_argument("--organization", action="store_true", help="register an organization")
    leaf(ident, "list", handlers.id_list)
    leaf(ident, "deactivate", handlers.id_deactivate).add_argument("actor_id")

    prose = _group(commands, "prose", "purpose declarations")
    leaf(prose, "check", handlers.prose_check).add_argument("file", type=Path)
    leaf(prose, "hash", handlers.prose_hash).add_argument("file", type=Path)

    consent = _group(commands, "consent", "consent lifecycle")
    leaf(consent, "declare", handlers.consent_declare).add_argument("file", type=Path)
    sub = leaf(consent, "request", handlers.consent_request)
    sub.add_argument("subject")
    sub.add_argument("decl")
    for name, handler in (
        ("grant", handlers.consent_grant),
        ("deny", handlers.consent_deny),
        ("revoke", handlers.consent_revoke),
        ("explain", handlers.consent_explain),
    ):
        leaf(consent, name, handler).add_argument("decl")
    sub = leaf(consent, "status", handlers.consent_status)
    sub.add_argument("subject")
    sub.add_argument("decl")
    leaf(consent, "assign-role", handlers.consent_assign_role).add_argument("actor_id")

    data = _group(commands, "data", "health records")
    sub = leaf(data, "submit", handlers.data_submit)
    sub.add_argument("subject")
    sub.add_argument("decl")
    sub.add_argument("fields", nargs="+", metavar="field=value")
    sub = leaf(data, "rectify", handlers.data_rectify)
    sub.add_argument("subject")
    sub.add_argument("decl")
    sub.add_argument("old", metavar="old_payload_hash")
    sub.add_argument("fields", nargs="+", metavar="field=value")
    leaf(data, "erase", handlers.data_erase).add_argument("key")
    leaf(data, "mine", handlers.data_mine)
    sub = leaf(data, "aggregate", handlers.data_aggregate)
    sub.add_argument("field")
    sub.add_argument("decl")
    leaf(data, "provenance", handlers.data_provenance).add_argument("key")

    ledger = _group(commands, "ledger", "chain inspection")
    leaf(ledger, "verify", handlers.ledger_verify)
    leaf(ledger, "history", handlers.ledger_history).add_argument("key")
    leaf(ledger, "state", handlers.ledger_state).add_argument("key")

    net = _group(commands, "net", "network config and simulation")
    sub = leaf(net, "init", handlers.net_init)
    sub.add_argument("--peers", required=True, help="comma-separated peer ids")
    sub.add_argument("--endorsers", required=True, help="comma-separated endorser actor ids")
    sub.add_argument("--endorsement-k", type=int, default=1)
    sub.add_argument("--salt", default=None, help="64 hex characters; random when omitted")
    sub.add_argument("--read-mode", choices=[m.value for m in ReadMode], default="open")
    sub.add_argument("--batch-size", type=int, default=10)
    sub.add_argument("--batch-timeout", type=int, default=2)
    sub.add_argument("--delays", default="", help="peer=ticks,...")
    sub.add_argument("--force", action="store_true", help="replace an existing config")
    sub = leaf(net, "run", handlers.net_run)
    sub.add_argument("workload", type=Path)
    sub.add_argument("--ticks", type=int, default=0, help="minimum ticks to simulate")

    serve = commands.add_parser("serve", parents=[common], help="run the nodal read API")
    serve.add_argument("--addr", default=None, help="host:port, default CONSENTCHAIN_ADDR")
    serve.set_defaults(handler=handlers.serve)

    audit = _group(commands, "audit", "audit export")
    sub = leaf(audit, "export", handlers.audit_export)
    sub.add_argument("--from", dest="start", type=int, default=0, help="first height")
    sub.add_argument("--to", dest="end", type=int, default=None, help="stop before this height")
    sub.add_argument("--out", type=Path, default=None, help="write the NDJSON file here")
    return parser


def run_command(argv: Sequence[str] | None = None) -> int:
    """
    Run one command.

    Args:
        argv: Arguments without the program name; ``sys.argv[1:]`` when None.

    Returns:
        Process exit code.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    settings = get_settings()
    configure_logging(
        json_format=args.json or settings.json_logs,
        log_level="DEBUG" if args.verbose else settings.log_level,
    )
    config = CliConfig.from_args(settings, args)
    session = handlers.Session(config)
    logger.debug("Command", command=args.command, action=getattr(args, "action", None))

    outcome = args.handler(session, args)
    if isinstance(outcome, Failure):
        code = EXIT_USAGE if outcome.error.code is ErrorCode.USAGE_ERROR else EXIT_REJECTED
        return emit_error(outcome.error, as_json=config.json_output, code=code)
    return emit(outcome.value, as_json=config.json_output)


def main() -> None:
    """Console script entry point."""
    sys.exit(run_command())


if __name__ == "__main__":
    main()
