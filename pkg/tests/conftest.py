"""
Pytest configuration and fixtures for the test suite.

Actors, the sample declaration and the network config mirror the files under
``tests/fixtures`` so unit tests and CLI runs see the same network.
"""

from __future__ import annotations

import shutil
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import pytest
from django.test import Client

from apps.nodal.runtime import install_node
from core.result import Failure
from services.consensus.client import assemble_transaction
from services.consensus.gateway import Gateway
from services.consensus.types import NetworkConfig, NetworkTopology, OrdererConfig
from services.contracts.endorsement import endorse
from services.contracts.engine import build_proposal, simulate_proposal
from services.contracts.types import EndorsementPolicy
from services.identity.bootstrap import parse_registry
from services.ledger.chain import Ledger
from services.ledger.validation import TxValidator
from services.legalprose.declaration import (
    hash_declaration,
    parse_declaration,
    render_declaration,
)
from services.pipeline.service import DataPipeline
from services.pipeline.store import MemoryPayloadStore
from services.pipeline.types import HealthRecordPayload, PipelineConfig

if TYPE_CHECKING:
    from collections.abc import Callable, Iterator

    from services.consensus.gateway import TxReceipt
    from services.contracts.types import TxProposal
    from services.identity.registry import ActorRegistry
    from services.ledger.types import Transaction
    from services.legalprose.types import PurposeDeclaration

FIXTURES = Path(__file__).parent / "fixtures"
SALT = bytes(32)
CONTROLLER = "lab-a-gw"
PROCESSOR = "lab-a-analyst"
ENDORSERS = ("peer-e1", "peer-e2", "peer-e3")
SUBJECTS = ("citizen-ana", "citizen-bo", "citizen-cy", "citizen-di")


def fixture_text(name: str) -> str:
    """Contents of a file under ``tests/fixtures``."""
    return (FIXTURES / name).read_text(encoding="utf-8")


def make_payload(pseudo_id: str, region: str, result: str = "positive") -> HealthRecordPayload:
    """A record allowed by the sample declaration."""
    return HealthRecordPayload.from_mapping(
        {
            "patient_pseudo_id": pseudo_id,
            "test_date": "2020-05-01",
            "result": result,
            "region": region,
        }
    )


def make_network_config(
    peers: tuple[str, ...] = ("peer0",),
    delays: dict[str, int] | None = None,
    *,
    batch_size: int = 1,
    batch_timeout_ticks: int = 2,
    k: int = 1,
) -> NetworkConfig:
    """Network config over the fixture endorsers."""
    return NetworkConfig(
        topology=NetworkTopology(peers=peers, delays=delays or {}),
        orderer=OrdererConfig(batch_size=batch_size, batch_timeout_ticks=batch_timeout_ticks),
        policy=EndorsementPolicy(k=k, endorser_set=frozenset(ENDORSERS)),
        network_salt=SALT,
    )


@pytest.fixture()
def test_client() -> Client:
    """Return a Django test client."""
    return Client()


@pytest.fixture()
def registry() -> ActorRegistry:
    """Registry loaded from the fixture bootstrap file."""
    return parse_registry(fixture_text("registry.txt"), SALT).unwrap()


@pytest.fixture()
def declaration() -> PurposeDeclaration:
    """The sample covid-surveillance declaration."""
    return parse_declaration(fixture_text("covid.lprose")).unwrap()


@pytest.fixture()
def declaration_hash(declaration: PurposeDeclaration) -> bytes:
    """Hash of the sample declaration."""
    return hash_declaration(declaration)


@pytest.fixture()
def network_config() -> NetworkConfig:
    """Single-peer network, one transaction per block."""
    return make_network_config()


@pytest.fixture()
def validator(network_config: NetworkConfig, registry: ActorRegistry) -> TxValidator:
    """Validator for the fixture policy."""
    return TxValidator(network_config.policy, registry)


@pytest.fixture()
def ledger(validator: TxValidator) -> Ledger:
    """Fresh ledger at genesis."""
    return Ledger(validator)


@dataclass
class Harness:
    """A gateway and pipeline over one ledger with helpers for common flows."""

    registry: ActorRegistry
    ledger: Ledger
    gateway: Gateway
    pipeline: DataPipeline
    declaration: PurposeDeclaration
    declaration_hash: bytes

    @property
    def decl_hex(self) -> str:
        """Hex hash of the sample declaration."""
        return self.declaration_hash.hex()

    def declaration_text(self) -> str:
        """Canonical text of the sample declaration."""
        return render_declaration(self.declaration)

    def handle(self, actor_id: str) -> str:
        """On-chain handle of ``actor_id``."""
        return self.registry.onchain_handle(actor_id)

    def invoke(self, actor: str, action: str, *args: str, now: int) -> TxReceipt:
        """Run an action to commit; fails the test on a rejection."""
        receipt = self.gateway.invoke(actor, action, args, now)
        assert not isinstance(receipt, Failure), receipt
        return receipt.value

    def declare(self, now: int = 1) -> TxReceipt:
        """Publish the sample declaration as its controller."""
        return self.invoke(CONTROLLER, "consent.declare", self.declaration_text(), now=now)

    def request(self, subject: str, now: int) -> TxReceipt:
        """Controller asks ``subject`` for consent."""
        return self.invoke(
            CONTROLLER, "consent.request", self.handle(subject), self.decl_hex, now=now
        )

    def respond(self, subject: str, answer: str, now: int) -> TxReceipt:
        """``subject`` answers a pending request."""
        return self.invoke(
            subject, "consent.respond", self.handle(subject), self.decl_hex, answer, now=now
        )

    def revoke(self, subject: str, now: int) -> TxReceipt:
        """``subject`` withdraws consent."""
        return self.invoke(subject, "consent.revoke", self.handle(subject), self.decl_hex, now=now)

    def grant(self, subject: str, now: int) -> None:
        """Request at ``now`` and grant at ``now + 1``."""
        self.request(subject, now)
        self.respond(subject, "grant", now + 1)

    def endorsed(
        self,
        proposal_id: str,
        actor: str,
        action: str,
        *args: str,
        now: int,
        endorsers: tuple[str, ...] = ("peer-e1",),
    ) -> Transaction:
        """Simulate against the tip and sign as ``actor``, without ordering."""
        proposal = build_proposal(
            proposal_id, self.registry.onchain_handle(actor), action, args, now
        ).unwrap()
        return self.endorse_proposal(proposal, actor, endorsers)

    def endorse_proposal(
        self, proposal: TxProposal, actor: str, endorsers: tuple[str, ...] = ("peer-e1",)
    ) -> Transaction:
        """Endorse an already built proposal against the tip."""
        result = simulate_proposal(proposal, self.ledger.snapshot(), self.registry).unwrap()
        endorsements = tuple(
            endorse(proposal.proposal_id, result.rwset, name, self.registry).unwrap()
            for name in endorsers
        )
        return assemble_transaction(proposal, result, endorsements, self.registry, actor).unwrap()

    def submit(
        self,
        subject: str,
        payload: HealthRecordPayload,
        now: int,
        submitter: str = CONTROLLER,
    ) -> TxReceipt:
        """Submit a record through the pipeline and commit it."""
        proposal = self.pipeline.submit_health_record(
            submitter,
            subject,
            self.declaration,
            payload,
            now,
            proposal_id=self.gateway.next_proposal_id(),
        )
        assert not isinstance(proposal, Failure), proposal
        receipt = self.gateway.submit(submitter, proposal.value, now)
        assert not isinstance(receipt, Failure), receipt
        return receipt.value


@pytest.fixture()
def make_harness(
    registry: ActorRegistry,
    network_config: NetworkConfig,
    declaration: PurposeDeclaration,
    declaration_hash: bytes,
) -> Callable[..., Harness]:
    """Factory for harnesses with custom pipeline limits."""

    def build(*, k_anonymity: int = 2, day_seconds: int = 86_400) -> Harness:
        ledger = Ledger(TxValidator(network_config.policy, registry))
        pipeline = DataPipeline(
            registry,
            ledger,
            MemoryPayloadStore(),
            PipelineConfig(k_anonymity=k_anonymity, day_seconds=day_seconds),
        )
        return Harness(
            registry=registry,
            ledger=ledger,
            gateway=Gateway(network_config, registry, ledger),
            pipeline=pipeline,
            declaration=declaration,
            declaration_hash=declaration_hash,
        )

    return build


@pytest.fixture()
def harness(make_harness: Callable[..., Harness]) -> Harness:
    """Harness with default limits."""
    return make_harness()


@pytest.fixture()
def data_dir(tmp_path: Path) -> Path:
    """Node data directory seeded with the fixture registry and network config."""
    target = tmp_path / "node"
    target.mkdir()
    shutil.copy(FIXTURES / "registry.txt", target / "registry.txt")
    shutil.copy(FIXTURES / "network.conf", target / "network.conf")
    return target


@pytest.fixture()
def _reset_served_node() -> Iterator[None]:
    """Drop whatever node the HTTP layer holds after the test."""
    yield
    install_node(None)
