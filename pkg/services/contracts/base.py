"""Base types and helpers shared by the built-in contracts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, ClassVar, Protocol, runtime_checkable

from core.errors import ErrorCode, bad_args, governance_error, unknown_actor
from core.result import Failure, failure, success
from services.identity.types import Role
from services.legalprose.declaration import parse_declaration
from services.legalprose.lines import split_list

if TYPE_CHECKING:
    from collections.abc import Callable

    from core.result import Outcome
    from services.contracts.rwset import RWSetBuilder
    from services.contracts.types import ContractName, TxProposal
    from services.identity.registry import ActorRegistry
    from services.identity.types import Actor
    from services.legalprose.types import PurposeDeclaration

type Response = dict[str, Any]
type ActionHandler = Callable[[ContractContext], Outcome[Response]]


@dataclass(frozen=True, slots=True)
class ContractContext:
    """
    Everything an action may look at.

    Attributes:
        proposal: The proposal being simulated.
        state: Read-write set recorder over the snapshot.
        registry: Actor registry for role and handle lookups.
    """

    proposal: TxProposal
    state: RWSetBuilder
    registry: ActorRegistry

    @property
    def now(self) -> int:
        """Contract clock: the proposal's client timestamp."""
        return self.proposal.client_timestamp

    @property
    def creator(self) -> str:
        """On-chain handle of the creator."""
        return self.proposal.creator

    @property
    def args(self) -> tuple[str, ...]:
        """Action arguments."""
        return self.proposal.args


@runtime_checkable
class Contract(Protocol):
    """Protocol every built-in contract implements."""

    @property
    def name(self) -> ContractName:
        """Contract name."""
        ...

    @property
    def actions(self) -> tuple[str, ...]:
        """Dotted names of supported actions."""
        ...

    def invoke(self, action: str, ctx: ContractContext) -> Outcome[Response]:
        """Run ``action``."""
        ...


class BaseContract:
    """Dispatches dotted action names to handler methods."""

    contract_name: ClassVar[ContractName]
    handlers: ClassVar[dict[str, str]]

    @property
    def name(self) -> ContractName:
        """Contract name."""
        return self.contract_name

    @property
    def actions(self) -> tuple[str, ...]:
        """Dotted names of supported actions."""
        return tuple(f"{self.contract_name.value}.{verb}" for verb in self.handlers)

    def invoke(self, action: str, ctx: ContractContext) -> Outcome[Response]:
        """Run ``action`` or return UnknownAction."""
        prefix, _, verb = action.partition(".")
        method = self.handlers.get(verb) if prefix == self.contract_name.value else None
        if method is None:
            return failure(governance_error(ErrorCode.UNKNOWN_ACTION, f"unknown action: {action}"))
        handler: ActionHandler = getattr(self, method)
        return handler(ctx)


def declaration_key(declaration_hex: str) -> str:
    """World-state key of a published declaration."""
    return f"decl/{declaration_hex}"


def role_key(actor_id: str) -> str:
    """World-state key of roles assigned on-chain."""
    return f"identity/{actor_id}/roles"


def expect_args(ctx: ContractContext, count: int) -> Failure[Any] | None:
    """BadArgs unless exactly ``count`` arguments were given."""
    if len(ctx.args) != count:
        return failure(bad_args(f"{ctx.proposal.action} takes {count} args, got {len(ctx.args)}"))
    return None


def parse_digest_hex(value: str, what: str) -> Outcome[bytes]:
    """Parse 64 hex chars into 32 bytes."""
    if len(value) != 64:
        return failure(bad_args(f"{what} must be 64 hex chars"))
    try:
        return success(bytes.fromhex(value))
    except ValueError:
        return failure(bad_args(f"{what} is not hex"))


def resolve_creator(ctx: ContractContext) -> Outcome[Actor]:
    """Actor behind the proposal creator handle."""
    actor = ctx.registry.resolve(ctx.creator)
    if actor is None:
        return failure(unknown_actor(ctx.creator))
    return success(actor)


def resolve_subject(ctx: ContractContext, handle: str) -> Outcome[Actor]:
    """Data subject behind a pseudonymous handle."""
    actor = ctx.registry.resolve(handle)
    if actor is None or not actor.is_subject:
        return failure(unknown_actor(handle))
    return success(actor)


def merge_roles(actor: Actor, assigned: bytes | None) -> frozenset[Role]:
    """Bootstrap roles plus the comma-joined roles stored on-chain."""
    if assigned is None or actor.is_subject or actor.is_organization:
        return actor.roles
    return actor.roles | {Role(name) for name in split_list(assigned.decode("utf-8"))}


def effective_roles(ctx: ContractContext, actor: Actor) -> frozenset[Role]:
    """Roles of ``actor``, recording the read of its on-chain assignments."""
    if actor.is_subject or actor.is_organization:
        return actor.roles
    return merge_roles(actor, ctx.state.get(role_key(actor.actor_id)))


def load_declaration(
    ctx: ContractContext,
    declaration_hex: str,
) -> Outcome[tuple[PurposeDeclaration, bytes]]:
    """Fetch a published declaration and its hash."""
    digest = parse_digest_hex(declaration_hex, "declaration hash")
    if isinstance(digest, Failure):
        return digest
    raw = ctx.state.get(declaration_key(digest.value.hex()))
    if raw is None:
        return failure(
            governance_error(
                ErrorCode.UNKNOWN_DECLARATION, f"declaration not published: {declaration_hex}"
            )
        )
    parsed = parse_declaration(raw.decode("utf-8"))
    if isinstance(parsed, Failure):
        return parsed
    return success((parsed.value, digest.value))
