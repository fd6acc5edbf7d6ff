"""
Deterministic discrete-event network simulation.

Each tick runs in three phases: blocks whose delivery delay has elapsed are
committed, the tick's workload events are simulated, endorsed and submitted,
and the orderer cuts whatever blocks are due. After the last event the
simulation keeps ticking until the orderer queue and every link are empty.
"""

from __future__ import annotations

import heapq
import itertools
from collections import defaultdict
from typing import TYPE_CHECKING

from core.errors import bad_args, unknown_actor
from core.logging import get_logger
from core.result import Failure, failure
from services.consensus.client import assemble_transaction, select_endorsements
from services.consensus.orderer import Orderer
from services.consensus.peer import Peer
from services.consensus.types import (
    NetworkConfig,
    NetworkTopology,
    ReadMode,
    RejectedEvent,
    RoundResult,
    WorkloadEvent,
)
from services.contracts.engine import build_proposal
from services.ledger.chain import Ledger
from services.ledger.validation import TxValidator
from services.pipeline.service import DataPipeline
from services.pipeline.store import MemoryPayloadStore
from services.pipeline.types import HealthRecordPayload, PipelineConfig

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from core.errors import GovernanceError
    from core.result import Outcome
    from services.contracts.engine import ContractRegistry
    from services.contracts.types import TxProposal
    from services.identity.registry import ActorRegistry
    from services.ledger.types import Block, ValidationCode
    from services.pipeline.store import PayloadStore

logger = get_logger(__name__)

SUBMIT_ACTION = "data.submit"


def pipeline_config(config: NetworkConfig) -> PipelineConfig:
    """Pipeline limits taken from a network config."""
    return PipelineConfig(
        k_anonymity=config.k_anonymity,
        day_seconds=config.day_seconds,
        permissioned=config.read_mode is ReadMode.PERMISSIONED,
    )


class Network:
    """Peers, one orderer and the links between them."""

    def __init__(
        self,
        config: NetworkConfig,
        registry: ActorRegistry,
        contracts: ContractRegistry | None = None,
        store: PayloadStore | None = None,
    ) -> None:
        """Create every peer at genesis."""
        self._config = config
        self._registry = registry
        topology = config.topology
        endorsers = tuple(sorted(config.policy.endorser_set))
        hosted: dict[str, list[str]] = defaultdict(list)
        for endorser in endorsers:
            hosted[topology.host_of(endorsers, endorser)].append(endorser)
        self.peers: list[Peer] = [
            Peer(
                peer_id,
                Ledger(TxValidator(config.policy, registry)),
                registry,
                endorsers=tuple(hosted[peer_id]),
                contracts=contracts,
            )
            for peer_id in topology.peers
        ]
        genesis = self.peers[0].ledger.tip
        self.orderer = Orderer(config.orderer, registry, genesis.height, genesis.block_hash)
        self.pipeline = DataPipeline(
            registry,
            self.peers[0].ledger,
            store if store is not None else MemoryPayloadStore(),
            pipeline_config(config),
        )
        self._links: list[tuple[int, int, int, Block]] = []
        self._sequence = itertools.count()
        self._rejected: list[RejectedEvent] = []

    def run(self, workload: Sequence[WorkloadEvent], ticks: int = 0) -> RoundResult:
        """
        Play ``workload`` and drain.

        Args:
            workload: Events; ticks need not be sorted.
            ticks: Minimum number of ticks to run.

        Returns:
            Final per-peer views, the emitted blocks and the validation codes.
        """
        by_tick: dict[int, list[tuple[int, WorkloadEvent]]] = defaultdict(list)
        for index, event in enumerate(workload):
            by_tick[event.tick].append((index, event))
        horizon = max([ticks, *by_tick])
        tick = 0
        while True:
            self._deliver(tick)
            for index, event in by_tick.get(tick, ()):
                self._propose(index, event)
            while (block := self.orderer.cut_block(tick)) is not None:
                self._send(block, tick)
            if tick >= horizon and self.orderer.queue_length == 0 and not self._links:
                break
            tick += 1
        reference = self.peers[0].ledger
        codes = {
            tx.tx_id: tx.validation_code
            for block in reference.blocks
            for tx in block.txs
            if tx.validation_code is not None
        }
        logger.info(
            "Network round finished",
            ticks=tick,
            blocks=len(self.orderer.emitted),
            rejected=len(self._rejected),
        )
        return RoundResult(
            reports=tuple(peer.report() for peer in self.peers),
            blocks=self.orderer.emitted,
            codes=codes,
            rejected=tuple(self._rejected),
        )

    def _send(self, block: Block, tick: int) -> None:
        for index, peer in enumerate(self.peers):
            arrival = tick + self._config.topology.delay_of(peer.peer_id)
            heapq.heappush(self._links, (arrival, next(self._sequence), index, block))

    def _deliver(self, tick: int) -> None:
        while self._links and self._links[0][0] <= tick:
            _, _, index, block = heapq.heappop(self._links)
            peer = self.peers[index]
            outcome = peer.deliver(block)
            if isinstance(outcome, Failure):
                logger.error(
                    "Delivered block rejected",
                    peer=peer.peer_id,
                    height=block.height,
                    error=str(outcome.error),
                )

    def _propose(self, index: int, event: WorkloadEvent) -> None:
        proposal = self._proposal_for(f"w{index}", event)
        if isinstance(proposal, Failure):
            self._reject(event, proposal)
            return
        admitted = self._endorse_and_order(proposal.value, event)
        if isinstance(admitted, Failure):
            self.pipeline.discard(proposal.value.proposal_id)
            self._reject(event, admitted)

    def _endorse_and_order(self, proposal: TxProposal, event: WorkloadEvent) -> Outcome[int]:
        replies = [peer.endorse(proposal) for peer in self.peers if peer.endorsers]
        chosen = select_endorsements(replies)
        if isinstance(chosen, Failure):
            return chosen
        result, endorsements = chosen.value
        tx = assemble_transaction(proposal, result, endorsements, self._registry, event.actor)
        if isinstance(tx, Failure):
            return tx
        return self.orderer.submit_endorsed_tx(tx.value, event.tick)

    def _reject(self, event: WorkloadEvent, outcome: Failure[GovernanceError]) -> None:
        self._rejected.append(RejectedEvent(event=event, error=outcome.error))

    def _proposal_for(self, proposal_id: str, event: WorkloadEvent) -> Outcome[TxProposal]:
        if self._registry.get(event.actor) is None:
            return failure(unknown_actor(event.actor))
        if event.action == SUBMIT_ACTION:
            return self._submission(proposal_id, event)
        args = tuple(self._handle(arg) for arg in event.args)
        return build_proposal(
            proposal_id, self._registry.onchain_handle(event.actor), event.action, args, event.tick
        )

    def _handle(self, arg: str) -> str:
        actor = self._registry.get(arg)
        if actor is not None and actor.is_subject:
            return self._registry.onchain_handle(arg)
        return arg

    def _submission(self, proposal_id: str, event: WorkloadEvent) -> Outcome[TxProposal]:
        """``data.submit|subject|declaration_hex|field=value|...`` through the pipeline."""
        if len(event.args) < 3:
            return failure(bad_args("data.submit needs subject, declaration and fields"))
        subject, declaration_hex, *pairs = event.args
        try:
            declaration_hash = bytes.fromhex(declaration_hex)
            payload = HealthRecordPayload.from_mapping(dict(split_pair(pair) for pair in pairs))
        except ValueError as exc:
            return failure(bad_args(str(exc)))
        declaration = self.pipeline.published_declaration(declaration_hash)
        if isinstance(declaration, Failure):
            return declaration
        return self.pipeline.submit_health_record(
            event.actor,
            subject,
            declaration.value,
            payload,
            event.tick,
            proposal_id=proposal_id,
        )


def split_pair(pair: str) -> tuple[str, str]:
    """Split ``field=value``; raises ValueError without ``=``."""
    name, sep, value = pair.partition("=")
    if not sep:
        msg = f"expected field=value, got {pair!r}"
        raise ValueError(msg)
    return name, value


def run_network_round(
    config: NetworkConfig,
    registry: ActorRegistry,
    workload: Sequence[WorkloadEvent],
    ticks: int = 0,
    contracts: ContractRegistry | None = None,
) -> RoundResult:
    """Run ``workload`` on a fresh network and report every peer's final view."""
    return Network(config, registry, contracts).run(workload, ticks)


def single_peer_config(config: NetworkConfig) -> NetworkConfig:
    """Same network collapsed to its first peer with no delays."""
    return NetworkConfig(
        topology=NetworkTopology(peers=config.topology.peers[:1]),
        orderer=config.orderer,
        policy=config.policy,
        network_salt=config.network_salt,
        read_mode=config.read_mode,
        k_anonymity=config.k_anonymity,
        day_seconds=config.day_seconds,
    )


def replay_reference(
    blocks: Iterable[Block],
    config: NetworkConfig,
    registry: ActorRegistry,
) -> dict[str, ValidationCode]:
    """
    Validation codes a single fresh peer assigns to the given blocks.

    Oracle for convergence: every peer of a run must agree with it.
    """
    ledger = Ledger(TxValidator(config.policy, registry))
    codes: dict[str, ValidationCode] = {}
    for block in blocks:
        committed = ledger.validate_and_commit_block(block)
        if isinstance(committed, Failure):
            logger.error("Reference replay stopped", height=block.height)
            break
        codes.update(zip((tx.tx_id for tx in block.txs), committed.value, strict=True))
    return codes
