"""Types for ordering and network simulation."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum
from typing import TYPE_CHECKING, Any

from services.identity.types import SEED_SIZE

if TYPE_CHECKING:
    from collections.abc import Mapping

    from core.errors import GovernanceError
    from services.contracts.types import EndorsementPolicy
    from services.ledger.types import Block, ValidationCode


class ReadMode(StrEnum):
    """Who may query the nodal API."""

    OPEN = "open"
    PERMISSIONED = "permissioned"


@dataclass(frozen=True, slots=True)
class OrdererConfig:
    """Block cutting parameters."""

    batch_size: int = 10
    batch_timeout_ticks: int = 2

    def __post_init__(self) -> None:
        """Validate parameters."""
        if self.batch_size < 1:
            msg = "batch_size must be at least 1"
            raise ValueError(msg)
        if self.batch_timeout_ticks < 1:
            msg = "batch_timeout_ticks must be at least 1"
            raise ValueError(msg)


@dataclass(frozen=True, slots=True)
class NetworkTopology:
    """
    Peers and their block delivery delays.

    Links from the orderer to each peer are reliable and in order; ``delays``
    gives the ticks a block takes to reach a peer (0 when absent).
    """

    peers: tuple[str, ...]
    delays: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Validate peers and delays."""
        if not self.peers:
            msg = "a network needs at least one peer"
            raise ValueError(msg)
        if len(set(self.peers)) != len(self.peers):
            msg = "peer ids must be unique"
            raise ValueError(msg)
        for peer, delay in self.delays.items():
            if peer not in self.peers:
                msg = f"delay given for unknown peer {peer}"
                raise ValueError(msg)
            if delay < 0:
                msg = f"delay of {peer} cannot be negative"
                raise ValueError(msg)

    def delay_of(self, peer: str) -> int:
        """Delivery delay of ``peer``."""
        return self.delays.get(peer, 0)

    def host_of(self, endorsers: tuple[str, ...], endorser: str) -> str:
        """Peer hosting ``endorser``: the i-th sorted endorser runs on peer i mod n."""
        index = sorted(endorsers).index(endorser)
        return self.peers[index % len(self.peers)]


@dataclass(frozen=True, slots=True)
class NetworkConfig:
    """Everything read from the network file."""

    topology: NetworkTopology
    orderer: OrdererConfig
    policy: EndorsementPolicy
    network_salt: bytes
    read_mode: ReadMode = ReadMode.OPEN
    k_anonymity: int = 2
    day_seconds: int = 86_400

    def __post_init__(self) -> None:
        """Validate scalar settings."""
        if len(self.network_salt) != SEED_SIZE:
            msg = f"network_salt must be {SEED_SIZE} bytes"
            raise ValueError(msg)
        if self.k_anonymity < 1:
            msg = "k_anonymity must be at least 1"
            raise ValueError(msg)
        if self.day_seconds < 1:
            msg = "day_seconds must be at least 1"
            raise ValueError(msg)


@dataclass(frozen=True, slots=True)
class WorkloadEvent:
    """One line of a workload file."""

    tick: int
    actor: str
    action: str
    args: tuple[str, ...]
    line: int = 0


@dataclass(frozen=True, slots=True)
class RejectedEvent:
    """A workload event that never reached the orderer."""

    event: WorkloadEvent
    error: GovernanceError


@dataclass(frozen=True, slots=True)
class PeerReport:
    """Final view of one peer."""

    peer_id: str
    height: int
    chain_hash: bytes
    state_digest: bytes

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready representation."""
        return {
            "peer": self.peer_id,
            "height": self.height,
            "chain_hash": self.chain_hash.hex(),
            "state_digest": self.state_digest.hex(),
        }


@dataclass(frozen=True, slots=True)
class RoundResult:
    """Outcome of a simulated run."""

    reports: tuple[PeerReport, ...]
    blocks: tuple[Block, ...]
    codes: Mapping[str, ValidationCode]
    rejected: tuple[RejectedEvent, ...] = ()

    @property
    def tx_order(self) -> tuple[str, ...]:
        """Transaction ids in the order the orderer emitted them."""
        return tuple(tx.tx_id for block in self.blocks for tx in block.txs)

    @property
    def converged(self) -> bool:
        """True when every peer holds the same chain and state."""
        return len({(r.chain_hash, r.state_digest) for r in self.reports}) == 1

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready summary."""
        return {
            "converged": self.converged,
            "peers": [report.to_dict() for report in self.reports],
            "blocks": len(self.blocks),
            "txs": len(self.tx_order),
            "codes": {tx_id: code.value for tx_id, code in self.codes.items()},
            "rejected": [
                {"line": r.event.line, "action": r.event.action, "error": r.error.name}
                for r in self.rejected
            ],
        }
