"""Tests for the nodal query service, the audit export and the HTTP read API."""

from __future__ import annotations

import hashlib
import json
from typing import TYPE_CHECKING
from unittest.mock import patch

import pytest

from apps.nodal.runtime import install_node
from core.config import PathSettings
from core.errors import ErrorCode, governance_error
from core.result import Failure, failure
from services.consent.codec import consent_key
from services.identity.signing import pseudonymize
from services.nodal.audit import export_audit, write_audit
from services.nodal.node import Node
from services.nodal.service import NodalService
from services.nodal.types import QueryRequest, QueryResponse
from services.pipeline.service import DataPipeline
from services.pipeline.types import PipelineConfig, record_key
from tests.conftest import CONTROLLER, PROCESSOR, SALT, SUBJECTS, make_payload

if TYPE_CHECKING:
    from pathlib import Path

    from django.test import Client

    from tests.conftest import Harness

NOW = 20


@pytest.fixture()
def populated(harness: Harness) -> Harness:
    """Declaration, four grants and four records; three of them in the north."""
    harness.declare(1)
    for offset, subject in enumerate(SUBJECTS):
        harness.grant(subject, 2 + 2 * offset)
    for offset, (subject, region) in enumerate(
        zip(SUBJECTS, ("north", "north", "north", "south"), strict=True)
    ):
        harness.submit(subject, make_payload(f"p-{offset}", region), 10 + offset)
    return harness


@pytest.fixture()
def service(populated: Harness) -> NodalService:
    """Open-read service with a fixed clock."""
    return NodalService(populated.ledger, populated.registry, populated.pipeline, clock=lambda: NOW)


def _ask(
    service: NodalService,
    endpoint: str,
    actor: str | None = None,
    **params: str,
) -> QueryResponse:
    return service.handle_query(QueryRequest(endpoint=endpoint, params=params, actor=actor))


class TestChainRoutes:
    """Tests for raw chain reads."""

    def test_genesis_block(self, service: NodalService) -> None:
        """Block 0 is the empty genesis block."""
        response = _ask(service, "/chain/block/0")

        assert response.ok is True
        assert response.payload["height"] == 0
        assert response.payload["txs"] == []
        assert response.payload["prev_hash"] == "00" * 32

    def test_block_beyond_tip(self, service: NodalService) -> None:
        """Heights past the tip are BadParams."""
        response = _ask(service, "/chain/block/999")

        assert response.ok is False
        assert response.error is not None
        assert response.error.code is ErrorCode.BAD_PARAMS
        assert response.status_code == 400

    def test_non_numeric_height(self, service: NodalService) -> None:
        """Heights must be non-negative integers."""
        response = _ask(service, "/chain/block/-1")

        assert response.error is not None
        assert response.error.code is ErrorCode.BAD_PARAMS

    def test_verify(self, service: NodalService, populated: Harness) -> None:
        """An untouched chain verifies."""
        response = _ask(service, "chain/verify/")

        assert response.payload == {
            "ok": True,
            "first_bad_height": None,
            "reason": "",
            "height": populated.ledger.height,
        }

    def test_unknown_route(self, service: NodalService) -> None:
        """Unmatched paths are UnknownRoute with a 404."""
        response = _ask(service, "/admin/users")

        assert response.error is not None
        assert response.error.code is ErrorCode.UNKNOWN_ROUTE
        assert response.status_code == 404


class TestStateRoutes:
    """Tests for world-state and history reads."""

    def test_state_of_declaration(self, service: NodalService, populated: Harness) -> None:
        """The published declaration is readable with its version."""
        response = _ask(service, f"/state/decl/{populated.decl_hex}")

        assert response.ok is True
        assert response.payload["version"] == "1.0"
        assert bytes.fromhex(response.payload["value"]).decode() == populated.declaration_text()

    def test_state_missing_key(self, service: NodalService) -> None:
        """Unset keys are UnknownKey with a 404."""
        response = _ask(service, "/state/decl/none")

        assert response.error is not None
        assert response.error.code is ErrorCode.UNKNOWN_KEY
        assert response.status_code == 404

    def test_history_of_consent(self, service: NodalService, populated: Harness) -> None:
        """Each committed write of a consent record is listed in order."""
        key = consent_key(populated.handle("citizen-ana"), populated.declaration_hash)

        response = _ask(service, f"/history/{key}")

        assert [item["version"] for item in response.payload] == ["2.0", "3.0"]
        assert [item["block_timestamp"] for item in response.payload] == [2, 3]

    def test_history_of_unknown_key(self, service: NodalService) -> None:
        """A key never written has no history."""
        response = _ask(service, "/history/consent/nobody")

        assert response.error is not None
        assert response.error.code is ErrorCode.UNKNOWN_KEY


class TestAnalysisRoutes:
    """Tests for aggregate, consent and provenance queries."""

    def test_aggregate(self, service: NodalService, populated: Harness) -> None:
        """Counts honor k-anonymity."""
        response = _ask(service, "/analysis/aggregate", field="region", decl=populated.decl_hex)

        assert response.payload == {"north": 3}

    def test_aggregate_at_earlier_time(self, service: NodalService, populated: Harness) -> None:
        """The ``at`` parameter overrides the clock."""
        response = _ask(
            service, "/analysis/aggregate", field="region", decl=populated.decl_hex, at="11"
        )

        assert response.payload == {"north": 2}

    @pytest.mark.parametrize(
        "params",
        [
            {"decl": "ab" * 32},
            {"field": "region"},
            {"field": "region", "decl": "XYZ"},
            {"field": "region", "decl": "ab" * 32, "at": "soon"},
        ],
    )
    def test_aggregate_bad_params(self, service: NodalService, params: dict[str, str]) -> None:
        """Missing or malformed parameters are BadParams."""
        response = _ask(service, "/analysis/aggregate", **params)

        assert response.error is not None
        assert response.error.code is ErrorCode.BAD_PARAMS

    def test_aggregate_unknown_field(self, service: NodalService, populated: Harness) -> None:
        """Grouping by an undeclared field passes the pipeline error through."""
        response = _ask(
            service, "/analysis/aggregate", field="phone_number", decl=populated.decl_hex
        )

        assert response.error is not None
        assert response.error.code is ErrorCode.UNKNOWN_FIELD
        assert response.to_dict() == {
            "ok": False,
            "error": "UnknownField",
            "message": response.error.message,
        }

    def test_consent_status(self, service: NodalService, populated: Harness) -> None:
        """Consent is reported with its history and point-in-time state."""
        response = _ask(service, f"/consent/citizen-ana/{populated.decl_hex}")

        assert response.payload["state"] == "Granted"
        assert response.payload["subject"] == populated.handle("citizen-ana")
        assert response.payload["status_at"] == {"t": NOW, "state": "Granted"}
        assert [entry["state"] for entry in response.payload["history"]] == [
            "Requested",
            "Granted",
        ]

    def test_consent_status_at(self, service: NodalService, populated: Harness) -> None:
        """The requested point in time selects the state in effect then."""
        response = _ask(service, f"/consent/citizen-ana/{populated.decl_hex}", at="2")

        assert response.payload["status_at"] == {"t": 2, "state": "Requested"}

    def test_consent_by_handle(self, service: NodalService, populated: Harness) -> None:
        """Subjects can be named by their on-chain handle."""
        handle = populated.handle("citizen-bo")

        response = _ask(service, f"/consent/{handle}/{populated.decl_hex}")

        assert response.payload["subject"] == handle

    def test_consent_never_requested(self, service: NodalService) -> None:
        """A declaration nobody asked about reports NotRequested."""
        response = _ask(service, f"/consent/citizen-ana/{'ab' * 32}")

        assert response.payload["state"] == "NotRequested"
        assert response.payload["history"] == []

    @pytest.mark.parametrize("subject", ["ghost", CONTROLLER, "pseudo:" + "00" * 32])
    def test_consent_unknown_subject(
        self, service: NodalService, populated: Harness, subject: str
    ) -> None:
        """Only registered data subjects have consent records."""
        response = _ask(service, f"/consent/{subject}/{populated.decl_hex}")

        assert response.error is not None
        assert response.error.code is ErrorCode.UNKNOWN_ACTOR

    def test_provenance(self, service: NodalService) -> None:
        """The submission of a record shows up as its only attempt."""
        payload = make_payload("p-0", "north")
        key = record_key(pseudonymize(SALT, "citizen-ana"), payload.payload_hash())

        response = _ask(service, f"/provenance/{key}")

        assert [attempt["action"] for attempt in response.payload] == ["data.submit"]
        assert response.payload[0]["actor"] == CONTROLLER
        assert response.payload[0]["validation_code"] == "Valid"


class TestPermissionedReads:
    """Tests for permissioned read mode."""

    @pytest.fixture()
    def guarded(self, populated: Harness) -> NodalService:
        """Service whose pipeline requires a registered reader."""
        pipeline = DataPipeline(
            populated.registry,
            populated.ledger,
            populated.pipeline.store,
            PipelineConfig(permissioned=True),
        )
        return NodalService(populated.ledger, populated.registry, pipeline, clock=lambda: NOW)

    def test_anonymous_reader(self, guarded: NodalService) -> None:
        """Every route refuses anonymous readers."""
        response = _ask(guarded, "/chain/block/0")

        assert response.error is not None
        assert response.error.code is ErrorCode.FORBIDDEN
        assert response.status_code == 403

    def test_unknown_reader(self, guarded: NodalService) -> None:
        """Readers must be registered."""
        response = _ask(guarded, "/chain/block/0", actor="ghost")

        assert response.error is not None
        assert response.error.code is ErrorCode.UNKNOWN_ACTOR

    def test_deactivated_reader(self, guarded: NodalService, populated: Harness) -> None:
        """Deactivated actors lose read access."""
        populated.registry.deactivate(PROCESSOR).unwrap()

        response = _ask(guarded, "/chain/block/0", actor=PROCESSOR)

        assert response.error is not None
        assert response.error.code is ErrorCode.FORBIDDEN

    def test_registered_reader(self, guarded: NodalService, populated: Harness) -> None:
        """Registered actors read as usual."""
        response = _ask(
            guarded, "/analysis/aggregate", actor=PROCESSOR, field="region", decl=populated.decl_hex
        )

        assert guarded.permissioned is True
        assert response.payload == {"north": 3}


class TestAuditExport:
    """Tests for the audit export."""

    def test_one_line_per_transaction(self, populated: Harness) -> None:
        """Every committed transaction is listed with its code."""
        export = export_audit(populated.ledger, 0).unwrap()

        assert len(export.lines) == 13
        first = json.loads(export.lines[0])
        first.pop("tx_id")
        assert first == {
            "action": "consent.declare",
            "contract": "consent",
            "creator": CONTROLLER,
            "height": 1,
            "timestamp": 1,
            "validation_code": "Valid",
        }
        assert all(json.loads(line)["validation_code"] == "Valid" for line in export.lines)

    def test_digest_covers_content(self, populated: Harness) -> None:
        """The digest is the SHA-256 of the exported file."""
        export = export_audit(populated.ledger, 2, 4).unwrap()

        assert len(export.lines) == 2
        assert export.content.endswith("\n")
        assert export.digest == hashlib.sha256(export.content.encode()).hexdigest()

    def test_empty_range(self, populated: Harness) -> None:
        """Genesis alone exports nothing."""
        export = export_audit(populated.ledger, 0, 1).unwrap()

        assert export.lines == ()
        assert export.content == ""
        assert export.digest == hashlib.sha256(b"").hexdigest()

    @pytest.mark.parametrize(("start", "end"), [(-1, None), (5, 2), (0, 99)])
    def test_bad_range(self, populated: Harness, start: int, end: int | None) -> None:
        """Ranges outside the chain are BadRange."""
        result = export_audit(populated.ledger, start, end)

        assert isinstance(result, Failure)
        assert result.error.code is ErrorCode.BAD_RANGE

    def test_write_audit(self, populated: Harness, tmp_path: Path) -> None:
        """The written file hashes to the export digest."""
        export = export_audit(populated.ledger, 0).unwrap()
        target = tmp_path / "audit" / "export.jsonl"

        write_audit(export, target)

        assert hashlib.sha256(target.read_bytes()).hexdigest() == export.digest


@pytest.mark.usefixtures("_reset_served_node")
class TestHttpApi:
    """Tests for the read API served by Django."""

    def _serve(self, data_dir: Path) -> Node:
        node = Node.open(PathSettings(data_dir=data_dir)).unwrap()
        install_node(node)
        return node

    def test_genesis_over_http(self, test_client: Client, data_dir: Path) -> None:
        """Block 0 is served as JSON."""
        self._serve(data_dir)

        response = test_client.get("/api/v1/chain/block/0")

        assert response.status_code == 200
        assert response["Content-Type"] == "application/json"
        body = response.json()
        assert body["ok"] is True
        assert body["payload"]["height"] == 0

    def test_errors_over_http(self, test_client: Client, data_dir: Path) -> None:
        """Failures carry their error name and status."""
        self._serve(data_dir)

        beyond = test_client.get("/api/v1/chain/block/999")
        unknown = test_client.get("/api/v1/nowhere")

        assert beyond.status_code == 400
        assert beyond.json()["error"] == "BadParams"
        assert unknown.status_code == 404
        assert unknown.json()["error"] == "UnknownRoute"

    def test_committed_state_over_http(
        self, test_client: Client, data_dir: Path, harness: Harness
    ) -> None:
        """Writes through the node's gateway are visible to readers."""
        node = self._serve(data_dir)
        node.gateway.invoke(
            CONTROLLER, "consent.declare", (harness.declaration_text(),), 1
        ).unwrap()

        response = test_client.get(f"/api/v1/state/decl/{harness.decl_hex}")
        chain = test_client.get("/api/v1/chain/verify")

        assert response.status_code == 200
        assert response.json()["payload"]["version"] == "1.0"
        assert chain.json()["payload"]["height"] == 1

    def test_permissioned_over_http(self, test_client: Client, data_dir: Path) -> None:
        """The actor header identifies the reader."""
        config = data_dir / "network.conf"
        text = config.read_text(encoding="utf-8")
        text = text.replace("read_mode: open", "read_mode: permissioned")
        config.write_text(text, encoding="utf-8")
        self._serve(data_dir)

        anonymous = test_client.get("/api/v1/chain/block/0")
        known = test_client.get(
            "/api/v1/chain/block/0", headers={"X-Consentchain-Actor": PROCESSOR}
        )

        assert anonymous.status_code == 403
        assert anonymous.json()["error"] == "Forbidden"
        assert known.status_code == 200

    def test_node_unavailable(self, test_client: Client) -> None:
        """A node that cannot be opened answers 503."""
        broken = failure(governance_error(ErrorCode.BROKEN_LINK, "chain log fails at height 2"))
        with patch("apps.nodal.views.current_service", return_value=broken):
            response = test_client.get("/api/v1/chain/verify")

        assert response.status_code == 503
        assert response.json()["error"] == "BrokenLink"

    def test_malformed_answer_is_not_served(self, test_client: Client, data_dir: Path) -> None:
        """An answer that fails the envelope check becomes a 500, not a partial body."""
        self._serve(data_dir)

        with patch.object(QueryResponse, "to_dict", return_value={"ok": "maybe"}):
            response = test_client.get("/api/v1/chain/block/0")

        assert response.status_code == 500
        assert response.json()["error"] == "MalformedRecord"
