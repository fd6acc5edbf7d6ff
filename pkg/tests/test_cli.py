"""End-to-end tests for the consentchain command line."""

from __future__ import annotations

import json
import re
from typing import TYPE_CHECKING

import pytest

from cli.main import build_parser, run_command
from services.legalprose.declaration import hash_declaration, parse_declaration
from tests.conftest import CONTROLLER, FIXTURES, fixture_text

if TYPE_CHECKING:
    from pathlib import Path

DECL_HEX = hash_declaration(parse_declaration(fixture_text("covid.lprose")).unwrap()).hex()
RECORD = ("patient_pseudo_id=p-1", "test_date=2020-05-01", "result=positive", "region=north")


class Cli:
    """Runs commands against one data directory and captures stdout."""

    def __init__(self, data_dir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Bind to ``data_dir``."""
        self.data_dir = data_dir
        self.capsys = capsys

    def __call__(
        self, *argv: str, actor: str | None = None, at: int | None = None
    ) -> tuple[int, str]:
        """Exit code and stdout of one command."""
        flags = ["--data-dir", str(self.data_dir)]
        if actor is not None:
            flags += ["--as", actor]
        if at is not None:
            flags += ["--at", str(at)]
        self.capsys.readouterr()
        code = run_command([*flags, *argv])
        return code, self.capsys.readouterr().out

    def ok(self, *argv: str, actor: str | None = None, at: int | None = None) -> str:
        """Stdout of a command that must succeed."""
        code, out = self(*argv, actor=actor, at=at)
        assert code == 0, out
        return out


@pytest.fixture()
def cli(data_dir: Path, capsys: pytest.CaptureFixture[str]) -> Cli:
    """Command runner over the fixture data directory."""
    return Cli(data_dir, capsys)


@pytest.fixture()
def granted(cli: Cli) -> Cli:
    """Declaration published and citizen-ana has granted consent."""
    cli.ok("consent", "declare", str(FIXTURES / "covid.lprose"), actor=CONTROLLER, at=1)
    cli.ok("consent", "request", "citizen-ana", DECL_HEX, actor=CONTROLLER, at=2)
    cli.ok("consent", "grant", DECL_HEX, actor="citizen-ana", at=3)
    return cli


@pytest.mark.integration
class TestProseCommands:
    """Tests for declaration checks."""

    def test_prose_hash(self, cli: Cli) -> None:
        """The printed hash matches the library."""
        out = cli.ok("prose", "hash", str(FIXTURES / "covid.lprose"))

        assert out.strip() == DECL_HEX

    def test_prose_check_reports_errors(self, cli: Cli, tmp_path: Path) -> None:
        """A broken declaration exits 1 with its error name."""
        broken = tmp_path / "broken.lprose"
        broken.write_text("id: x\ncontroller: lab-a-gw\n", encoding="utf-8")

        code, out = cli("prose", "check", str(broken))

        assert code == 1
        assert out.startswith("MissingKey")


@pytest.mark.integration
class TestConsentCommands:
    """Tests for the consent lifecycle from the command line."""

    def test_grant_without_request(self, cli: Cli) -> None:
        """Granting before any request is an IllegalTransition."""
        cli.ok("consent", "declare", str(FIXTURES / "covid.lprose"), actor=CONTROLLER, at=1)

        code, out = cli("consent", "grant", DECL_HEX, actor="citizen-ana", at=2)

        assert code == 1
        assert "IllegalTransition" in out

    def test_lifecycle(self, granted: Cli) -> None:
        """Status follows the requested point in time."""
        assert granted.ok("consent", "status", "citizen-ana", DECL_HEX, at=2).strip() == (
            "Requested at 2"
        )
        assert granted.ok("consent", "status", "citizen-ana", DECL_HEX, at=3).strip() == (
            "Granted at 3"
        )

        granted.ok("consent", "revoke", DECL_HEX, actor="citizen-ana", at=4)

        assert granted.ok("consent", "status", "citizen-ana", DECL_HEX, at=4).strip() == (
            "Revoked at 4"
        )

    def test_explain_commits_nothing(self, granted: Cli) -> None:
        """Explain answers from a simulation and leaves the chain alone."""
        before = json.loads(granted.ok("--json", "ledger", "verify"))

        out = granted.ok("consent", "explain", DECL_HEX, actor="citizen-ana", at=5)

        assert out.splitlines() == ["state: Granted", "purpose: covid-surveillance"]
        assert json.loads(granted.ok("--json", "ledger", "verify"))["height"] == before["height"]

    def test_mutation_needs_actor(self, cli: Cli) -> None:
        """Mutating commands without --as are usage errors."""
        code, out = cli("consent", "request", "citizen-ana", DECL_HEX, at=1)

        assert code == 2
        assert "--as" in out

    def test_unknown_command(self, cli: Cli) -> None:
        """Argument errors exit 2."""
        code, _ = cli("consent", "shred")

        assert code == 2


@pytest.mark.integration
class TestDataCommands:
    """Tests for record submission and reads."""

    def test_submit_and_read_back(self, granted: Cli) -> None:
        """A subject sees the submitted values; the chain holds only the ref."""
        out = granted.ok("data", "submit", "citizen-ana", DECL_HEX, *RECORD, actor=CONTROLLER, at=4)

        assert out.startswith("Valid ")
        mine = granted.ok("data", "mine", actor="citizen-ana", at=5)
        assert "region=north" in mine
        key = mine.split()[0]
        state = json.loads(granted.ok("--json", "ledger", "state", key))
        assert "north" not in bytes.fromhex(state["value"]).decode()

    def test_submit_without_consent(self, granted: Cli) -> None:
        """Records about a subject who never consented are refused."""
        code, out = granted(
            "data", "submit", "citizen-bo", DECL_HEX, *RECORD, actor=CONTROLLER, at=4
        )

        assert code == 1
        assert out.startswith("ConsentRequired")

    def test_minimization(self, granted: Cli) -> None:
        """Undeclared fields are named in the rejection."""
        code, out = granted(
            "data",
            "submit",
            "citizen-ana",
            DECL_HEX,
            *RECORD,
            "phone_number=555",
            actor=CONTROLLER,
            at=4,
        )

        assert code == 1
        assert out.startswith("MinimizationViolation")
        assert "phone_number" in out

    def test_erase(self, granted: Cli) -> None:
        """After erasure the subject's record reads as erased and provenance lists both steps."""
        granted.ok("data", "submit", "citizen-ana", DECL_HEX, *RECORD, actor=CONTROLLER, at=4)
        key = granted.ok("data", "mine", actor="citizen-ana", at=5).split()[0]

        granted.ok("data", "erase", key, actor="citizen-ana", at=6)

        assert granted.ok("data", "mine", actor="citizen-ana", at=7).strip() == f"{key} erased"
        provenance = granted.ok("data", "provenance", key).splitlines()
        assert [line.split()[2] for line in provenance] == ["data.submit", "data.erase"]


@pytest.mark.integration
class TestLedgerCommands:
    """Tests for chain inspection and audit export."""

    def test_verify(self, granted: Cli) -> None:
        """A chain written through the CLI verifies."""
        assert granted.ok("ledger", "verify").strip() == "ok"
        data = json.loads(granted.ok("--json", "ledger", "verify"))
        assert data == {"ok": True, "height": 3, "first_bad_height": None, "reason": ""}

    def test_history(self, granted: Cli) -> None:
        """The declaration key was written once at height 1."""
        out = granted.ok("ledger", "history", f"decl/{DECL_HEX}")

        assert out.split()[0] == "1.0"

    def test_audit_export(self, granted: Cli, tmp_path: Path) -> None:
        """The export file hashes to the printed digest."""
        target = tmp_path / "audit.jsonl"

        data = json.loads(granted.ok("--json", "audit", "export", "--out", str(target)))

        assert data["lines"] == 3
        assert len(target.read_text(encoding="utf-8").splitlines()) == 3

    def test_audit_bad_range(self, granted: Cli) -> None:
        """Ranges past the tip are rejected."""
        code, out = granted("audit", "export", "--from", "2", "--to", "99")

        assert code == 1
        assert out.startswith("BadRange")


@pytest.mark.integration
class TestNetworkCommands:
    """Tests for network config and simulation."""

    def test_run_demo_converges(self, cli: Cli) -> None:
        """Every peer reports the same chain and state digests."""
        out = cli.ok("net", "run", str(FIXTURES / "demo.workload"))

        lines = out.splitlines()
        peers = [line for line in lines if line.startswith("peer")]
        assert len(peers) == 3
        chains = {match for line in peers for match in re.findall(r"chain=(\w+)", line)}
        states = {match for line in peers for match in re.findall(r"state=(\w+)", line)}
        assert len(chains) == 1
        assert len(states) == 1
        assert lines[-1].startswith("converged=yes")

    def test_init_refuses_overwrite(self, cli: Cli) -> None:
        """An existing config is kept unless --force is given."""
        argv = ("net", "init", "--peers", "a,b", "--endorsers", "peer-e1", "--salt", "00" * 32)

        code, out = cli(*argv)
        forced = cli.ok(*argv, "--force")

        assert code == 1
        assert out.startswith("BadArgs")
        assert forced.startswith("wrote ")
        config = (cli.data_dir / "network.conf").read_text(encoding="utf-8")
        assert "peers: a,b" in config


@pytest.mark.integration
class TestIdentityCommands:
    """Tests for registry management."""

    def test_register_subject(self, cli: Cli) -> None:
        """New subjects get a pseudonymous handle and persist."""
        out = cli.ok("id", "register", "citizen-eve", "--roles", "DataSubject")

        assert re.fullmatch(r"registered citizen-eve as pseudo:[0-9a-f]{64}\n", out)
        assert "citizen-eve" in cli.ok("id", "list")

    def test_register_bad_role(self, cli: Cli) -> None:
        """Unknown roles are BadArgs."""
        code, out = cli("id", "register", "x", "--roles", "Superuser")

        assert code == 1
        assert out.startswith("BadArgs")

    def test_parser_lists_groups(self) -> None:
        """Every command group is reachable from the top-level parser."""
        help_text = build_parser().format_help()

        for group in ("id", "prose", "consent", "data", "ledger", "net", "serve", "audit"):
            assert group in help_text
