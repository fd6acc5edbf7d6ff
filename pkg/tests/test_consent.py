"""Tests for the consent state machine and its canonical encoding."""

from __future__ import annotations

import random
from typing import TYPE_CHECKING

import pytest

from core.errors import ErrorCode
from core.result import Failure
from services.consent.codec import consent_key, decode_record, encode_record
from services.consent.machine import (
    consent_status_at,
    is_access_permitted,
    replay_history,
    request_consent,
    respond_consent,
    revoke_consent,
)
from services.consent.types import ConsentRecord, ConsentState, Decision
from services.identity.types import Role

if TYPE_CHECKING:
    from core.result import Outcome

SUBJECT = "pseudo:" + "ab" * 32
CONTROLLER = "labA-gw"
DECL = bytes.fromhex("11" * 32)
OTHER_DECL = bytes.fromhex("22" * 32)
CONTROLLER_ROLES = frozenset({Role.DATA_CONTROLLER})


def _fresh() -> ConsentRecord:
    return ConsentRecord.initial(SUBJECT, DECL)


def _requested(now: int = 10) -> ConsentRecord:
    return request_consent(_fresh(), CONTROLLER, now, CONTROLLER_ROLES).unwrap()


def _granted(now: int = 20) -> ConsentRecord:
    return respond_consent(_requested(), SUBJECT, Decision.GRANT, now).unwrap()


def _random_step(rng: random.Random, record: ConsentRecord, now: int) -> Outcome[ConsentRecord]:
    actor = rng.choice([SUBJECT, CONTROLLER, "someone-else"])
    operation = rng.choice(["request", "grant", "deny", "revoke"])
    if operation == "request":
        roles = CONTROLLER_ROLES if actor == CONTROLLER else frozenset()
        return request_consent(record, actor, now, roles)
    if operation == "revoke":
        return revoke_consent(record, actor, now)
    decision = Decision.GRANT if operation == "grant" else Decision.DENY
    return respond_consent(record, actor, decision, now)


def _grant_in_force(record: ConsentRecord, t: int) -> bool:
    """Recompute from raw history: the entry in force is a subject grant answering a request."""
    in_force = [index for index, entry in enumerate(record.history) if entry.timestamp <= t]
    if not in_force or in_force[-1] == 0:
        return False
    entry = record.history[in_force[-1]]
    previous = record.history[in_force[-1] - 1]
    return (
        entry.state is ConsentState.GRANTED
        and entry.actor == SUBJECT
        and previous.state is ConsentState.REQUESTED
        and previous.actor == CONTROLLER
    )


class TestRequestConsent:
    """Tests for request_consent."""

    def test_not_requested_to_requested(self) -> None:
        """The first request moves the record to Requested."""
        record = _requested()

        assert record.state is ConsentState.REQUESTED
        assert record.history[-1].actor == CONTROLLER
        assert record.history[-1].timestamp == 10

    def test_request_while_granted(self) -> None:
        """A granted record must be revoked before asking again."""
        result = request_consent(_granted(), CONTROLLER, 30, CONTROLLER_ROLES)

        assert isinstance(result, Failure)
        assert result.error.code is ErrorCode.ILLEGAL_TRANSITION
        assert result.error.details == ("Granted", "Requested")

    def test_re_request_after_revocation(self) -> None:
        """Revoked records may be requested again."""
        revoked = revoke_consent(_granted(), SUBJECT, 30).unwrap()

        record = request_consent(revoked, CONTROLLER, 40, CONTROLLER_ROLES).unwrap()

        assert record.state is ConsentState.REQUESTED
        assert len(record.history) == 4

    def test_requires_controller_role(self) -> None:
        """A processor cannot request consent."""
        result = request_consent(_fresh(), "labA-analyst", 1, {Role.DATA_PROCESSOR})

        assert isinstance(result, Failure)
        assert result.error.code is ErrorCode.NOT_A_CONTROLLER


class TestRespondConsent:
    """Tests for respond_consent."""

    def test_grant_sets_granted_at(self) -> None:
        """A grant by the subject records its timestamp."""
        record = _granted(20)

        assert record.state is ConsentState.GRANTED
        assert record.granted_at == 20
        assert record.history[-1].actor == SUBJECT

    def test_deny(self) -> None:
        """A denial leaves granted_at empty."""
        record = respond_consent(_requested(), SUBJECT, Decision.DENY, 20).unwrap()

        assert record.state is ConsentState.DENIED
        assert record.granted_at is None

    def test_grant_without_request(self) -> None:
        """Silence can never be skipped into consent."""
        result = respond_consent(_fresh(), SUBJECT, Decision.GRANT, 5)

        assert isinstance(result, Failure)
        assert result.error.code is ErrorCode.ILLEGAL_TRANSITION

    def test_grant_by_someone_else(self) -> None:
        """Only the subject may answer."""
        result = respond_consent(_requested(), CONTROLLER, Decision.GRANT, 20)

        assert isinstance(result, Failure)
        assert result.error.code is ErrorCode.NOT_THE_SUBJECT

    def test_timestamps_cannot_go_backwards(self) -> None:
        """A transition older than the last one is rejected."""
        result = respond_consent(_requested(10), SUBJECT, Decision.GRANT, 9)

        assert isinstance(result, Failure)
        assert result.error.code is ErrorCode.NON_MONOTONIC_TIMESTAMP


class TestRevokeConsent:
    """Tests for revoke_consent."""

    def test_revoke_sets_revoked_at(self) -> None:
        """Revocation is a single call that records its timestamp."""
        record = revoke_consent(_granted(), SUBJECT, 30).unwrap()

        assert record.state is ConsentState.REVOKED
        assert record.revoked_at == 30
        assert record.granted_at == 20

    def test_revoke_denied(self) -> None:
        """There is nothing to revoke after a denial."""
        denied = respond_consent(_requested(), SUBJECT, Decision.DENY, 20).unwrap()

        result = revoke_consent(denied, SUBJECT, 30)

        assert isinstance(result, Failure)
        assert result.error.code is ErrorCode.ILLEGAL_TRANSITION

    def test_revoke_twice(self) -> None:
        """The second revocation is rejected and leaves history clean."""
        revoked = revoke_consent(_granted(), SUBJECT, 30).unwrap()

        result = revoke_consent(revoked, SUBJECT, 31)

        assert isinstance(result, Failure)
        assert result.error.code is ErrorCode.ILLEGAL_TRANSITION
        assert len(revoked.history) == 3

    def test_revoke_by_controller(self) -> None:
        """Only the subject may revoke."""
        result = revoke_consent(_granted(), CONTROLLER, 30)

        assert isinstance(result, Failure)
        assert result.error.code is ErrorCode.NOT_THE_SUBJECT


class TestConsentStatusAt:
    """Tests for point-in-time queries."""

    @pytest.fixture()
    def record(self) -> ConsentRecord:
        """Requested at 10, granted at 20, revoked at 30."""
        return revoke_consent(_granted(20), SUBJECT, 30).unwrap()

    @pytest.mark.parametrize(
        ("t", "expected"),
        [
            (5, ConsentState.NOT_REQUESTED),
            (10, ConsentState.REQUESTED),
            (19, ConsentState.REQUESTED),
            (25, ConsentState.GRANTED),
            (30, ConsentState.REVOKED),
            (1_000, ConsentState.REVOKED),
        ],
    )
    def test_interval_lookup(self, record: ConsentRecord, t: int, expected: ConsentState) -> None:
        """Each transition takes effect at its own timestamp, inclusive."""
        assert consent_status_at(record, t) is expected

    def test_access_needs_matching_hash(self, record: ConsentRecord) -> None:
        """Access is bound to the consented declaration."""
        assert is_access_permitted(record, DECL, 25) is True
        assert is_access_permitted(record, OTHER_DECL, 25) is False
        assert is_access_permitted(record, DECL, 30) is False

    def test_agrees_with_brute_force_scan(self, record: ConsentRecord) -> None:
        """Bisection should agree with a linear scan of history."""
        rng = random.Random(3)
        for _ in range(1000):
            t = rng.randrange(-5, 50)
            expected = ConsentState.NOT_REQUESTED
            for entry in record.history:
                if entry.timestamp <= t:
                    expected = entry.state
            assert consent_status_at(record, t) is expected


class TestCodec:
    """Tests for the world-state encoding of consent records."""

    def test_key_layout(self) -> None:
        """Records live under consent/<subject>/<declaration hex>."""
        assert consent_key(SUBJECT, DECL) == f"consent/{SUBJECT}/{'11' * 32}"

    def test_encoded_lines(self) -> None:
        """The encoding uses fixed key order with state@timestamp@actor history items."""
        text = encode_record(_granted()).decode()

        assert text.splitlines() == [
            f"subject:{SUBJECT}",
            f"declaration:{'11' * 32}",
            "state:Granted",
            "granted_at:20",
            "revoked_at:-",
            f"history:Requested@10@{CONTROLLER},Granted@20@{SUBJECT}",
        ]

    def test_decode_restores_record(self) -> None:
        """Decoding the encoded bytes gives back the record."""
        record = revoke_consent(_granted(), SUBJECT, 30).unwrap()

        assert decode_record(encode_record(record)).unwrap() == record

    def test_decode_rejects_garbage(self) -> None:
        """Unparseable values are MalformedRecord."""
        data = encode_record(_granted()).replace(b"state:Granted", b"state:Maybe")

        result = decode_record(data)

        assert isinstance(result, Failure)
        assert result.error.code is ErrorCode.MALFORMED_RECORD


class TestStateMachineProperties:
    """Randomized checks over operation sequences."""

    @pytest.mark.parametrize("seed", range(25))
    def test_no_access_without_explicit_grant(self, seed: int) -> None:
        """Failed steps leave the record as it was; access needs a subject's grant."""
        rng = random.Random(seed)
        record = _fresh()
        now = 0
        granted_by_subject = False
        for _ in range(60):
            now += rng.randrange(0, 3)
            result = _random_step(rng, record, now)

            if isinstance(result, Failure):
                continue
            assert len(result.value.history) == len(record.history) + 1
            record = result.value
            if record.state is ConsentState.GRANTED:
                granted_by_subject = True
                assert record.history[-1].actor == SUBJECT
            if is_access_permitted(record, DECL, now):
                assert granted_by_subject
            assert (record.revoked_at is not None) == any(
                entry.state is ConsentState.REVOKED for entry in record.history
            )
            assert replay_history(SUBJECT, DECL, record.history).unwrap() == record

    def test_replay_rejects_impossible_history(self) -> None:
        """A history that skips the request cannot be replayed."""
        granted = _granted()

        result = replay_history(SUBJECT, DECL, granted.history[1:])

        assert isinstance(result, Failure)
        assert result.error.code is ErrorCode.ILLEGAL_TRANSITION

    def test_access_ends_at_revocation(self) -> None:
        """Access is denied at the revocation timestamp and at every later time."""
        record = revoke_consent(_granted(20), SUBJECT, 30).unwrap()

        assert is_access_permitted(record, DECL, 29)
        assert not any(is_access_permitted(record, DECL, t) for t in range(30, 200))

    @pytest.mark.slow
    def test_consent_safety_at_scale(self) -> None:
        """Over 10,000 sequences access needs a request then a grant and never survives a revoke."""
        for seed in range(10_000):
            rng = random.Random(seed)
            record = _fresh()
            now = 0
            for _ in range(20):
                now += rng.randrange(0, 3)
                step = _random_step(rng, record, now)
                if not isinstance(step, Failure):
                    record = step.value

            horizon = now + 3
            for t in range(horizon):
                assert is_access_permitted(record, DECL, t) == _grant_in_force(record, t), (seed, t)
                assert not is_access_permitted(record, OTHER_DECL, t), (seed, t)
            for index, entry in enumerate(record.history):
                if entry.state is not ConsentState.REVOKED:
                    continue
                regranted = next(
                    (
                        later.timestamp
                        for later in record.history[index + 1 :]
                        if later.state is ConsentState.GRANTED
                    ),
                    horizon,
                )
                for t in range(entry.timestamp, regranted):
                    assert not is_access_permitted(record, DECL, t), (seed, t)
