"""Configuration of one CLI invocation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from core.config import PathSettings

if TYPE_CHECKING:
    import argparse

    from core.config import Settings


@dataclass(frozen=True, slots=True)
class CliConfig:
    """
    Settings merged with command-line flags.

    Attributes:
        paths: Node files, rooted at ``--data-dir`` when given.
        json_output: Print machine-readable JSON.
        verbose: Log at DEBUG.
        at: Clock override for time-dependent commands.
        acting: Actor the command runs as.
    """

    paths: PathSettings
    json_output: bool = False
    verbose: bool = False
    at: int | None = None
    acting: str | None = None

    @classmethod
    def from_args(cls, settings: Settings, args: argparse.Namespace) -> CliConfig:
        """Apply ``--data-dir``, ``--json``, ``-v``, ``--at`` and ``--as``."""
        paths = settings.paths
        if args.data_dir is not None:
            paths = PathSettings(
                data_dir=args.data_dir,
                registry=paths.registry,
                network=paths.network,
                chain_log=paths.chain_log,
                offchain_dir=paths.offchain_dir,
            )
        return cls(
            paths=paths,
            json_output=args.json,
            verbose=args.verbose,
            at=args.at,
            acting=args.acting,
        )

    def ensure_layout(self) -> None:
        """Create the data directory, an empty registry and the payload directory."""
        self.paths.data_dir.mkdir(parents=True, exist_ok=True)
        self.paths.offchain_path.mkdir(parents=True, exist_ok=True)
        registry = self.paths.registry_path
        if not registry.exists():
            registry.parent.mkdir(parents=True, exist_ok=True)
            registry.touch()
