"""
A node assembled from its files on disk.

The network config supplies the salt the registry needs, so it loads first;
the chain log is replayed and verified before anything is served.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from core.logging import get_logger
from core.result import Failure, success
from services.consensus.config import load_network_config
from services.consensus.gateway import Gateway
from services.consensus.network import pipeline_config
from services.identity.bootstrap import load_registry, save_registry
from services.ledger.chain import Ledger, genesis_block
from services.ledger.storage import ChainLog
from services.ledger.validation import TxValidator
from services.nodal.service import NodalService
from services.pipeline.service import DataPipeline
from services.pipeline.store import FilePayloadStore

if TYPE_CHECKING:
    from collections.abc import Callable

    from core.config import PathSettings
    from core.result import Outcome
    from services.consensus.types import NetworkConfig
    from services.identity.registry import ActorRegistry

logger = get_logger(__name__)


@dataclass(slots=True)
class Node:
    """Everything one operator process works with."""

    paths: PathSettings
    config: NetworkConfig
    registry: ActorRegistry
    ledger: Ledger
    chain_log: ChainLog
    pipeline: DataPipeline
    gateway: Gateway

    @classmethod
    def open(cls, paths: PathSettings) -> Outcome[Node]:
        """
        Load config, registry and chain; start a fresh chain log when none exists.

        Returns:
            Result with the node, or MalformedRecord for an unreadable file,
            or BrokenLink when the stored chain fails verification.
        """
        config = load_network_config(paths.network_path)
        if isinstance(config, Failure):
            return config
        registry = load_registry(paths.registry_path, config.value.network_salt)
        if isinstance(registry, Failure):
            return registry
        chain_log = ChainLog(paths.chain_log_path)
        blocks = chain_log.read_all()
        if isinstance(blocks, Failure):
            return blocks
        if not blocks.value:
            genesis = genesis_block()
            chain_log.append(genesis)
            blocks.value.append(genesis)
        validator = TxValidator(config.value.policy, registry.value)
        ledger = Ledger.restore(blocks.value, validator)
        if isinstance(ledger, Failure):
            return ledger
        pipeline = DataPipeline(
            registry.value,
            ledger.value,
            FilePayloadStore(paths.offchain_path),
            pipeline_config(config.value),
        )
        gateway = Gateway(config.value, registry.value, ledger.value, chain_log)
        logger.debug(
            "Node opened",
            height=ledger.value.height,
            actors=len(registry.value),
            data_dir=str(paths.data_dir),
        )
        return success(
            cls(
                paths=paths,
                config=config.value,
                registry=registry.value,
                ledger=ledger.value,
                chain_log=chain_log,
                pipeline=pipeline,
                gateway=gateway,
            )
        )

    def nodal_service(self, clock: Callable[[], int] | None = None) -> NodalService:
        """Query surface over this node's ledger."""
        return NodalService(self.ledger, self.registry, self.pipeline, clock=clock)

    def save_registry(self) -> None:
        """Persist registry changes."""
        save_registry(self.paths.registry_path, self.registry)
