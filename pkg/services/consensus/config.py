"""Network configuration file parsing."""

from __future__ import annotations

from typing import TYPE_CHECKING

from core.errors import ErrorCode, governance_error
from core.result import Failure, failure, success
from services.consensus.types import (
    NetworkConfig,
    NetworkTopology,
    OrdererConfig,
    ReadMode,
)
from services.contracts.types import EndorsementPolicy
from services.legalprose.lines import parse_key_values, split_list

if TYPE_CHECKING:
    from pathlib import Path

    from core.errors import GovernanceError
    from core.result import Outcome

NETWORK_KEYS: tuple[str, ...] = (
    "peers",
    "delays",
    "batch_size",
    "batch_timeout_ticks",
    "endorsement_k",
    "endorsers",
    "network_salt",
    "read_mode",
    "k_anonymity",
    "day_seconds",
)
REQUIRED_KEYS: tuple[str, ...] = ("peers", "endorsers", "network_salt")

_DEFAULTS: dict[str, str] = {
    "delays": "",
    "batch_size": "10",
    "batch_timeout_ticks": "2",
    "endorsement_k": "1",
    "read_mode": ReadMode.OPEN.value,
    "k_anonymity": "2",
    "day_seconds": "86400",
}


def _bad(message: str) -> Failure[GovernanceError]:
    return failure(governance_error(ErrorCode.MALFORMED_RECORD, f"network config: {message}"))


def _parse_delays(value: str) -> dict[str, int]:
    delays: dict[str, int] = {}
    for item in split_list(value):
        peer, sep, ticks = item.partition("=")
        if not sep:
            msg = f"delay entry must be peer=ticks: {item}"
            raise ValueError(msg)
        delays[peer.strip()] = int(ticks)
    return delays


def parse_network_config(text: str) -> Outcome[NetworkConfig]:
    """
    Parse a network file.

    Uses the declaration line rules: ``key: value`` lines, unknown and
    duplicate keys rejected, order-insensitive.

    Returns:
        Result with the config, or UnknownKey, DuplicateKey, MissingKey,
        MalformedRecord.
    """
    parsed = parse_key_values(text, NETWORK_KEYS, REQUIRED_KEYS)
    if isinstance(parsed, Failure):
        return parsed
    values = {**_DEFAULTS, **parsed.value}
    try:
        topology = NetworkTopology(
            peers=tuple(split_list(values["peers"])),
            delays=_parse_delays(values["delays"]),
        )
        orderer = OrdererConfig(
            batch_size=int(values["batch_size"]),
            batch_timeout_ticks=int(values["batch_timeout_ticks"]),
        )
        policy = EndorsementPolicy(
            k=int(values["endorsement_k"]),
            endorser_set=frozenset(split_list(values["endorsers"])),
        )
        config = NetworkConfig(
            topology=topology,
            orderer=orderer,
            policy=policy,
            network_salt=bytes.fromhex(values["network_salt"]),
            read_mode=ReadMode(values["read_mode"]),
            k_anonymity=int(values["k_anonymity"]),
            day_seconds=int(values["day_seconds"]),
        )
    except ValueError as exc:
        return _bad(str(exc))
    return success(config)


def load_network_config(path: Path) -> Outcome[NetworkConfig]:
    """Read and parse ``path``."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        return _bad(f"cannot read {path}: {exc.strerror}")
    return parse_network_config(text)


def render_network_config(config: NetworkConfig) -> str:
    """Canonical text of a config; parsing it yields an equal config."""
    delays = ",".join(
        f"{peer}={config.topology.delays[peer]}"
        for peer in config.topology.peers
        if peer in config.topology.delays
    )
    lines = {
        "peers": ",".join(config.topology.peers),
        "delays": delays,
        "batch_size": str(config.orderer.batch_size),
        "batch_timeout_ticks": str(config.orderer.batch_timeout_ticks),
        "endorsement_k": str(config.policy.k),
        "endorsers": ",".join(sorted(config.policy.endorser_set)),
        "network_salt": config.network_salt.hex(),
        "read_mode": config.read_mode.value,
        "k_anonymity": str(config.k_anonymity),
        "day_seconds": str(config.day_seconds),
    }
    return "".join(f"{key}: {value}\n" for key, value in lines.items())
