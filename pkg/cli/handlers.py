"""
Command handlers.

Each handler takes the session and the parsed arguments and returns an
``Outcome[CommandOutput]``. Mutating commands run through the node's gateway
and commit one block per transaction.
"""

from __future__ import annotations

import secrets
import time
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

from cli.output import CommandOutput
from core.errors import ErrorCode, bad_args, governance_error
from core.logging import get_logger
from core.result import Failure, failure, success
from services.consensus.config import (
    load_network_config,
    parse_network_config,
    render_network_config,
)
from services.consensus.network import run_network_round, split_pair
from services.consensus.workload import load_workload
from services.contracts.engine import build_proposal, simulate_proposal
from services.identity.bootstrap import load_registry
from services.identity.types import Role
from services.ledger.chain import verify_chain
from services.ledger.storage import ChainLog
from services.ledger.types import ValidationCode
from services.ledger.validation import TxValidator
from services.legalprose.declaration import (
    hash_declaration,
    parse_declaration,
    render_declaration,
)
from services.nodal.audit import export_audit, write_audit
from services.nodal.node import Node
from services.nodal.types import QueryRequest
from services.pipeline.types import HealthRecordPayload

if TYPE_CHECKING:
    import argparse
    from collections.abc import Callable, Sequence
    from pathlib import Path

    from cli.config import CliConfig
    from core.result import Outcome
    from services.consensus.gateway import TxReceipt
    from services.contracts.types import TxProposal
    from services.legalprose.types import PurposeDeclaration

logger = get_logger(__name__)

type Handler = Callable[[Session, argparse.Namespace], Outcome[CommandOutput]]


@dataclass(slots=True)
class Session:
    """State shared by the handlers of one invocation."""

    config: CliConfig
    _node: Node | None = field(default=None, repr=False)

    def node(self) -> Outcome[Node]:
        """Open the node on first use."""
        if self._node is None:
            self.config.ensure_layout()
            opened = Node.open(self.config.paths)
            if isinstance(opened, Failure):
                return opened
            self._node = opened.value
        return success(self._node)

    def now(self, node: Node) -> int:
        """``--at`` when given, else wall-clock seconds but never before the tip."""
        if self.config.at is not None:
            return self.config.at
        return max(int(time.time()), node.ledger.tip.timestamp)

    def acting(self) -> Outcome[str]:
        """The ``--as`` actor, required by mutating commands."""
        if self.config.acting is None:
            return failure(governance_error(ErrorCode.USAGE_ERROR, "this command needs --as"))
        return success(self.config.acting)


def _read_text(path: Path) -> Outcome[str]:
    try:
        return success(path.read_text(encoding="utf-8"))
    except OSError as exc:
        return failure(
            governance_error(ErrorCode.MALFORMED_RECORD, f"cannot read {path}: {exc.strerror}")
        )


def _load_declaration(path: Path) -> Outcome[PurposeDeclaration]:
    text = _read_text(path)
    if isinstance(text, Failure):
        return text
    return parse_declaration(text.value)


def _digest_arg(value: str, what: str) -> Outcome[bytes]:
    try:
        digest = bytes.fromhex(value)
    except ValueError:
        digest = b""
    if len(digest) != 32:
        return failure(bad_args(f"{what} must be 64 hex characters"))
    return success(digest)


def _receipt_output(receipt: TxReceipt, extra: dict[str, Any] | None = None) -> CommandOutput:
    data = {**receipt.to_dict(), **(extra or {})}
    text = [f"{receipt.validation_code.value} {receipt.tx_id} height={receipt.height}"]
    text.extend(f"{key}: {value}" for key, value in sorted((extra or {}).items()))
    return CommandOutput(data=data, text=text, ok=receipt.validation_code is ValidationCode.VALID)


def _invoke(
    session: Session,
    action: str,
    args: Callable[[Node, str], tuple[str, ...]],
    extra: dict[str, Any] | None = None,
) -> Outcome[CommandOutput]:
    node = session.node()
    if isinstance(node, Failure):
        return node
    actor = session.acting()
    if isinstance(actor, Failure):
        return actor
    receipt = node.value.gateway.invoke(
        actor.value, action, args(node.value, actor.value), session.now(node.value)
    )
    if isinstance(receipt, Failure):
        return receipt
    return success(_receipt_output(receipt.value, extra))


def _submit(
    session: Session,
    node: Node,
    actor: str,
    proposal: Outcome[TxProposal],
) -> Outcome[CommandOutput]:
    if isinstance(proposal, Failure):
        return proposal
    receipt = node.gateway.submit(actor, proposal.value, session.now(node))
    if isinstance(receipt, Failure):
        node.pipeline.discard(proposal.value.proposal_id)
        return receipt
    return success(_receipt_output(receipt.value))


def _query(session: Session, endpoint: str, params: dict[str, str] | None = None) -> Outcome[Any]:
    node = session.node()
    if isinstance(node, Failure):
        return node
    query = dict(params or {})
    if session.config.at is not None:
        query.setdefault("at", str(session.config.at))
    answer = node.value.nodal_service().handle_query(
        QueryRequest(endpoint=endpoint, params=query, actor=session.config.acting)
    )
    if answer.error is not None:
        return failure(answer.error)
    return success(answer.payload)


def _payload(pairs: Sequence[str]) -> Outcome[HealthRecordPayload]:
    try:
        return success(HealthRecordPayload.from_mapping(dict(split_pair(p) for p in pairs)))
    except ValueError as exc:
        return failure(bad_args(str(exc)))


# identity


def id_register(session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Register an actor or, with ``--organization``, an organization."""
    node = session.node()
    if isinstance(node, Failure):
        return node
    registry = node.value.registry
    if args.organization:
        registered = registry.register_organization(args.actor_id)
    else:
        try:
            roles = [Role(name) for name in args.roles.split(",") if name]
        except ValueError:
            return failure(bad_args(f"unknown role in {args.roles!r}"))
        registered = registry.register_actor(args.actor_id, args.org, roles)
    if isinstance(registered, Failure):
        return registered
    node.value.save_registry()
    actor = registered.value
    handle = registry.onchain_handle(actor.actor_id)
    return success(
        CommandOutput(
            data={**actor.to_dict(), "handle": handle},
            text=[f"registered {actor.actor_id} as {handle}"],
        )
    )


def id_list(session: Session, _args: argparse.Namespace) -> Outcome[CommandOutput]:
    """List current actors."""
    node = session.node()
    if isinstance(node, Failure):
        return node
    actors = list(node.value.registry)
    text = [
        f"{a.actor_id} org={a.org_id or '-'} "
        f"roles={','.join(sorted(r.value for r in a.roles)) or '-'} "
        f"{'active' if a.active else 'inactive'}"
        for a in actors
    ]
    return success(CommandOutput(data=[a.to_dict() for a in actors], text=text))


def id_deactivate(session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Deactivate an actor; it can no longer sign."""
    node = session.node()
    if isinstance(node, Failure):
        return node
    deactivated = node.value.registry.deactivate(args.actor_id)
    if isinstance(deactivated, Failure):
        return deactivated
    node.value.save_registry()
    return success(
        CommandOutput(data=deactivated.value.to_dict(), text=[f"deactivated {args.actor_id}"])
    )


# legal prose


def prose_check(_session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Parse a declaration file and report its hash."""
    declaration = _load_declaration(args.file)
    if isinstance(declaration, Failure):
        return declaration
    digest = hash_declaration(declaration.value).hex()
    return success(
        CommandOutput(
            data={"ok": True, "hash": digest, "declaration": declaration.value.to_dict()},
            text=["ok", digest],
        )
    )


def prose_hash(_session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Print the declaration hash."""
    declaration = _load_declaration(args.file)
    if isinstance(declaration, Failure):
        return declaration
    digest = hash_declaration(declaration.value).hex()
    return success(CommandOutput(data={"hash": digest}, text=[digest]))


# consent


def consent_declare(session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Publish a declaration on-chain."""
    declaration = _load_declaration(args.file)
    if isinstance(declaration, Failure):
        return declaration
    text = render_declaration(declaration.value)
    digest = hash_declaration(declaration.value).hex()
    return _invoke(session, "consent.declare", lambda _n, _a: (text,), {"hash": digest})


def consent_request(session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Controller asks a subject for consent."""
    return _invoke(
        session,
        "consent.request",
        lambda node, _a: (node.registry.onchain_handle(args.subject), args.decl),
    )


def _respond(decision: str) -> Handler:
    def handler(session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
        return _invoke(
            session,
            "consent.respond",
            lambda node, actor: (node.registry.onchain_handle(actor), args.decl, decision),
        )

    handler.__doc__ = f"Subject answers a pending request with {decision}."
    return handler


consent_grant = _respond("grant")
consent_deny = _respond("deny")


def consent_revoke(session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Subject withdraws consent."""
    return _invoke(
        session,
        "consent.revoke",
        lambda node, actor: (node.registry.onchain_handle(actor), args.decl),
    )


def consent_assign_role(session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Controller makes an actor of its organization a processor."""
    return _invoke(
        session,
        "consent.assign_role",
        lambda _n, _a: (args.actor_id, Role.DATA_PROCESSOR.value),
    )


def consent_status(session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Consent record and its status at ``--at``."""
    payload = _query(session, f"/consent/{args.subject}/{args.decl}")
    if isinstance(payload, Failure):
        return payload
    status = payload.value["status_at"]
    return success(
        CommandOutput(data=payload.value, text=[f"{status['state']} at {status['t']}"])
    )


def consent_explain(session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Subject asks what it consented to; answered by simulation, nothing is committed."""
    node = session.node()
    if isinstance(node, Failure):
        return node
    actor = session.acting()
    if isinstance(actor, Failure):
        return actor
    registry = node.value.registry
    proposal = build_proposal(
        node.value.gateway.next_proposal_id(),
        registry.onchain_handle(actor.value),
        "audit.explain",
        (registry.onchain_handle(actor.value), args.decl),
        session.now(node.value),
    )
    if isinstance(proposal, Failure):
        return proposal
    simulated = simulate_proposal(proposal.value, node.value.ledger.snapshot(), registry)
    if isinstance(simulated, Failure):
        return simulated
    response = simulated.value.response
    state = response.get("state", "")
    purpose = response.get("declaration", {}).get("purpose", "")
    return success(CommandOutput(data=response, text=[f"state: {state}", f"purpose: {purpose}"]))


# data


def _submission(
    session: Session,
    args: argparse.Namespace,
    supersedes: str | None,
) -> Outcome[CommandOutput]:
    node = session.node()
    if isinstance(node, Failure):
        return node
    actor = session.acting()
    if isinstance(actor, Failure):
        return actor
    declaration_hash = _digest_arg(args.decl, "declaration hash")
    if isinstance(declaration_hash, Failure):
        return declaration_hash
    old_hash: bytes | None = None
    if supersedes is not None:
        parsed = _digest_arg(supersedes, "payload hash")
        if isinstance(parsed, Failure):
            return parsed
        old_hash = parsed.value
    payload = _payload(args.fields)
    if isinstance(payload, Failure):
        return payload
    pipeline = node.value.pipeline
    declaration = pipeline.published_declaration(declaration_hash.value)
    if isinstance(declaration, Failure):
        return declaration
    proposal_id = node.value.gateway.next_proposal_id()
    now = session.now(node.value)
    if old_hash is None:
        proposal = pipeline.submit_health_record(
            actor.value,
            args.subject,
            declaration.value,
            payload.value,
            now,
            proposal_id=proposal_id,
        )
    else:
        proposal = pipeline.rectify_record(
            actor.value,
            args.subject,
            declaration.value,
            old_hash,
            payload.value,
            now,
            proposal_id=proposal_id,
        )
    return _submit(session, node.value, actor.value, proposal)


def data_submit(session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Submit a health record for a subject."""
    return _submission(session, args, None)


def data_rectify(session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Replace a record; the old payload is erased."""
    return _submission(session, args, args.old)


def data_erase(session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Erase the payload of a record."""
    node = session.node()
    if isinstance(node, Failure):
        return node
    actor = session.acting()
    if isinstance(actor, Failure):
        return actor
    proposal = node.value.pipeline.erase_payload(
        actor.value,
        args.key,
        session.now(node.value),
        proposal_id=node.value.gateway.next_proposal_id(),
    )
    return _submit(session, node.value, actor.value, proposal)


def data_mine(session: Session, _args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Records about the acting subject."""
    node = session.node()
    if isinstance(node, Failure):
        return node
    actor = session.acting()
    if isinstance(actor, Failure):
        return actor
    records = node.value.pipeline.read_own_records(actor.value, session.now(node.value))
    text = []
    for record in records:
        values = (
            "erased"
            if record.payload is None
            else " ".join(f"{k}={v}" for k, v in record.payload.values)
        )
        text.append(f"{record.ref.key} {values}")
    return success(CommandOutput(data=[r.to_dict() for r in records], text=text))


def data_aggregate(session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Counts per value of a field, below-threshold groups suppressed."""
    counts = _query(session, "/analysis/aggregate", {"field": args.field, "decl": args.decl})
    if isinstance(counts, Failure):
        return counts
    text = [f"{group} {n}" for group, n in counts.value.items()]
    return success(CommandOutput(data=counts.value, text=text))


def data_provenance(session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Every committed transaction that touched a key."""
    attempts = _query(session, f"/provenance/{args.key}")
    if isinstance(attempts, Failure):
        return attempts
    text = [
        f"{a['block_timestamp']} {a['actor']} {a['action']} {a['validation_code']}"
        for a in attempts.value
    ]
    return success(CommandOutput(data=attempts.value, text=text))


# ledger


def ledger_verify(session: Session, _args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Verify the stored chain without trusting it."""
    paths = session.config.paths
    config = load_network_config(paths.network_path)
    if isinstance(config, Failure):
        return config
    registry = load_registry(paths.registry_path, config.value.network_salt)
    if isinstance(registry, Failure):
        return registry
    blocks = ChainLog(paths.chain_log_path).read_all()
    if isinstance(blocks, Failure):
        return blocks
    verdict = verify_chain(blocks.value, TxValidator(config.value.policy, registry.value))
    data = {
        "ok": verdict.ok,
        "height": len(blocks.value) - 1,
        "first_bad_height": verdict.first_bad_height,
        "reason": verdict.reason,
    }
    if verdict.ok:
        return success(CommandOutput(data=data, text=["ok"]))
    logger.warning("Chain verification failed", height=verdict.first_bad_height)
    return success(
        CommandOutput(
            data=data,
            text=[f"BrokenLink at height {verdict.first_bad_height}: {verdict.reason}"],
            ok=False,
        )
    )


def ledger_history(session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Committed values of a key."""
    items = _query(session, f"/history/{args.key}")
    if isinstance(items, Failure):
        return items
    text = [f"{i['version']} {i['tx_id']} {i['creator']} {i['value']}" for i in items.value]
    return success(CommandOutput(data=items.value, text=text))


def ledger_state(session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Current value of a key."""
    entry = _query(session, f"/state/{args.key}")
    if isinstance(entry, Failure):
        return entry
    return success(
        CommandOutput(data=entry.value, text=[f"{entry.value['version']} {entry.value['value']}"])
    )


# network


def net_init(session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Write the network config file."""
    path = session.config.paths.network_path
    if path.exists() and not args.force:
        return failure(bad_args(f"{path} exists; pass --force to replace it"))
    lines = {
        "peers": args.peers,
        "endorsers": args.endorsers,
        "endorsement_k": str(args.endorsement_k),
        "network_salt": args.salt or secrets.token_hex(32),
        "read_mode": args.read_mode,
        "batch_size": str(args.batch_size),
        "batch_timeout_ticks": str(args.batch_timeout),
    }
    if args.delays:
        lines["delays"] = args.delays
    parsed = parse_network_config("".join(f"{k}: {v}\n" for k, v in lines.items()))
    if isinstance(parsed, Failure):
        return parsed
    session.config.ensure_layout()
    path.write_text(render_network_config(parsed.value), encoding="utf-8")
    return success(
        CommandOutput(
            data={"path": str(path), "peers": list(parsed.value.topology.peers)},
            text=[f"wrote {path}"],
        )
    )


def net_run(session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Play a workload on a fresh simulated network and print every peer's digests."""
    paths = session.config.paths
    config = load_network_config(paths.network_path)
    if isinstance(config, Failure):
        return config
    registry = load_registry(paths.registry_path, config.value.network_salt)
    if isinstance(registry, Failure):
        return registry
    workload = load_workload(args.workload)
    if isinstance(workload, Failure):
        return workload
    result = run_network_round(config.value, registry.value, workload.value, args.ticks)
    text = [
        f"{r.peer_id} height={r.height} chain={r.chain_hash.hex()} state={r.state_digest.hex()}"
        for r in result.reports
    ]
    text.append(
        f"converged={'yes' if result.converged else 'no'} blocks={len(result.blocks)} "
        f"txs={len(result.tx_order)} rejected={len(result.rejected)}"
    )
    return success(CommandOutput(data=result.to_dict(), text=text, ok=result.converged))


# serving and audit


def serve(session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Run the nodal read API over this node until interrupted."""
    import os  # noqa: PLC0415

    import django  # noqa: PLC0415
    from django.core.management import call_command  # noqa: PLC0415

    from apps.nodal.runtime import install_node  # noqa: PLC0415
    from core.config import get_settings  # noqa: PLC0415

    node = session.node()
    if isinstance(node, Failure):
        return node
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "core.settings.development")
    django.setup()
    at = session.config.at
    install_node(node.value, (lambda: at) if at is not None else None)
    addr = args.addr or get_settings().addr
    logger.info("Serving nodal API", addr=addr, height=node.value.ledger.height)
    call_command("runserver", addr, use_reloader=False)
    return success(CommandOutput(data={"addr": addr}, text=[f"stopped serving {addr}"]))


def audit_export(session: Session, args: argparse.Namespace) -> Outcome[CommandOutput]:
    """Export transactions of a height range as NDJSON and print the file digest."""
    node = session.node()
    if isinstance(node, Failure):
        return node
    export = export_audit(node.value.ledger, args.start, args.end)
    if isinstance(export, Failure):
        return export
    data: dict[str, Any] = {"lines": len(export.value.lines), "sha256": export.value.digest}
    if args.out is not None:
        write_audit(export.value, args.out)
        data["path"] = str(args.out)
        text = [f"wrote {len(export.value.lines)} lines to {args.out}"]
    else:
        text = list(export.value.lines)
    text.append(f"sha256 {export.value.digest}")
    return success(CommandOutput(data=data, text=text))
