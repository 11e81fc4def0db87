"""Monte-Carlo key-distribution sessions.

A session runs `trials` independent rounds: Alice draws a uniform signal
index, the state crosses an optional noise channel (and optionally an
intercept-resend eavesdropper), Bob's interferometer and detectors sample an
outcome, both parties announce bases over an in-process classical channel,
and matched conclusive rounds enter the sifted key.

Determinism contract: every trial owns a Philox counter-based stream keyed
by (seed, trial index), so results are bit-identical regardless of how many
workers evaluate the trials. The classical exchange and all aggregation run
in trial order.
"""
from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import __version__
from .dfs import collective_dephase, dephase_single, independent_dephase
from .optics import TWO_PI, mzi_pair, mzi_single, phase_modulator
from .protocols import (
    INDEX_FOR,
    OWA_BETAS,
    ClassifiedOutcome,
    SchemeId,
    SignalState,
    classify_combined,
    classify_fig1,
    classify_owa,
    sift,
    signal_state,
)
from .qstate import ModeState, born_sample

RNG_IDENTITY = "numpy-philox4x64 keyed (seed, trial)"

PHASE_RANDOM = "random"


class ConfigError(ValueError):
    """A session configuration failed validation."""


@dataclass(frozen=True)
class ChannelSpec:
    """Quantum-channel noise between Alice and Bob.

    kind: "none" | "collective" | "independent" | "loss".
    phi: fixed collective dephasing phase, or None for uniform per trial.
    loss: per-photon loss probability (kind == "loss" only).
    """

    kind: str = "none"
    phi: float | None = None
    loss: float = 0.0

    def validate(self) -> None:
        if self.kind not in ("none", "collective", "independent", "loss"):
            raise ConfigError(f"unknown channel kind {self.kind!r}")
        if self.kind == "loss" and not 0.0 <= self.loss <= 1.0:
            raise ConfigError(f"loss probability must be in [0, 1], got {self.loss}")
        if self.phi is not None and not math.isfinite(self.phi):
            raise ConfigError("channel phi must be finite")

    def describe(self) -> dict:
        doc: dict = {"kind": self.kind}
        if self.kind == "collective":
            doc["phi"] = "random" if self.phi is None else self.phi
        if self.kind == "loss":
            doc["loss"] = self.loss
        return doc


@dataclass(frozen=True)
class SessionConfig:
    scheme: SchemeId
    trials: int
    seed: int
    phase: float | str = 0.0  # interferometer phase, or "random" per trial
    channel: ChannelSpec = field(default_factory=ChannelSpec)
    eavesdropper: str = "off"  # "off" | "intercept_resend"

    def validate(self) -> None:
        try:
            SchemeId(self.scheme)
        except ValueError:
            raise ConfigError(f"unknown scheme {self.scheme!r}") from None
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if isinstance(self.phase, str):
            if self.phase != PHASE_RANDOM:
                raise ConfigError(f"phase must be a number or 'random', got {self.phase!r}")
        elif not math.isfinite(self.phase):
            raise ConfigError("phase must be finite")
        if self.eavesdropper not in ("off", "intercept_resend"):
            raise ConfigError(f"unknown eavesdropper mode {self.eavesdropper!r}")
        self.channel.validate()

    def describe(self) -> dict:
        return {
            "scheme": SchemeId(self.scheme).value,
            "trials": self.trials,
            "seed": self.seed,
            "phase": self.phase,
            "channel": self.channel.describe(),
            "eavesdropper": self.eavesdropper,
        }


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    alice_index: int
    outcome_label: str  # raw detection pattern, or "lost"
    conclusive: bool
    basis: str  # Bob's announced basis, "" when inconclusive or lost
    bit_alice: int | None
    bit_bob: int | None
    kept: bool

    @property
    def verdict(self) -> str:
        if self.outcome_label == "lost":
            return "lost"
        return "conclusive" if self.conclusive else "inconclusive"


@dataclass
class SessionStats:
    config: SessionConfig
    trials: int
    sifted: int
    errors: int
    histogram: dict  # outcome label -> count
    signal_sent: dict  # index -> count
    signal_kept: dict  # index -> count

    @property
    def sifted_rate(self) -> float:
        return self.sifted / self.trials

    @property
    def qber(self) -> float:
        return self.errors / self.sifted if self.sifted else 0.0


class ClassicalMessage(NamedTuple):
    round_id: int
    direction: str  # "alice->bob" or "bob->alice"
    payload: str


class ChannelClosedError(RuntimeError):
    """The classical channel was used after the session closed it."""


class ChannelEndpoint:
    def __init__(self, channel: "DuplexChannel", name: str, peer_queue: deque, own_queue: deque):
        self._channel = channel
        self._name = name
        self._peer_queue = peer_queue
        self._own_queue = own_queue

    def send(self, round_id: int, payload: str) -> None:
        if self._channel.closed:
            raise ChannelClosedError("send on a closed channel")
        other = "bob" if self._name == "alice" else "alice"
        msg = ClassicalMessage(round_id, f"{self._name}->{other}", payload)
        self._channel.transcript.append(msg)
        self._peer_queue.append(msg)

    def recv(self) -> ClassicalMessage:
        if self._channel.closed:
            raise ChannelClosedError("recv on a closed channel")
        return self._own_queue.popleft()


class DuplexChannel:
    """Ordered, reliable, in-process duplex channel with a full transcript."""

    def __init__(self):
        self.transcript: list[ClassicalMessage] = []
        self.closed = False
        to_alice: deque = deque()
        to_bob: deque = deque()
        self.alice = ChannelEndpoint(self, "alice", to_bob, to_alice)
        self.bob = ChannelEndpoint(self, "bob", to_alice, to_bob)

    def close(self) -> None:
        self.closed = True


def channel_pair() -> DuplexChannel:
    return DuplexChannel()


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, trial], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _two_photon(scheme: SchemeId) -> bool:
    return scheme is not SchemeId.FIG1_SINGLE_PHOTON


def apply_channel(
    state: ModeState, channel: ChannelSpec, rng: np.random.Generator, two_photon: bool
) -> ModeState | None:
    """Pass a state through the configured channel; None means the trial is lost."""
    if channel.kind == "none":
        return state
    if channel.kind == "loss":
        n_photons = 2 if two_photon else 1
        for _ in range(n_photons):
            if rng.random() < channel.loss:
                return None
        return state
    if channel.kind == "collective":
        phi = rng.uniform(0.0, TWO_PI) if channel.phi is None else channel.phi
        return collective_dephase(state, phi) if two_photon else dephase_single(state, phi)
    # independent: a fresh uniform phase per photon
    if two_photon:
        return independent_dephase(state, rng.uniform(0.0, TWO_PI), rng.uniform(0.0, TWO_PI))
    return dephase_single(state, rng.uniform(0.0, TWO_PI))


def _measure(
    scheme: SchemeId, state: ModeState, phi: float, beta: float | None, rng: np.random.Generator
) -> tuple[ClassifiedOutcome, str]:
    """Bob's (or Eve's) apparatus: optional modulator, MZI, detection, verdict."""
    if scheme is SchemeId.FIG1_SINGLE_PHOTON:
        outcome = born_sample(mzi_single(state, phi), rng)
        return classify_fig1(outcome), outcome.label
    if scheme is SchemeId.OWA_FOUR_PHASE:
        assert beta is not None
        state = phase_modulator(state, beta, photon=1, bin="L")
        outcome = born_sample(mzi_pair(state, phi), rng)
        return classify_owa(outcome, beta), outcome.label
    outcome = born_sample(mzi_pair(state, phi), rng)
    return classify_combined(outcome), outcome.label


def intercept_resend(
    state: ModeState, scheme: SchemeId, rng: np.random.Generator
) -> ModeState:
    """Eve measures with Bob's apparatus (her MZI held at φ=0) and resends.

    On a conclusive verdict she resends the signal state matching it; on an
    inconclusive verdict she resends a uniformly chosen signal state.
    """
    beta = float(rng.choice(OWA_BETAS)) if scheme is SchemeId.OWA_FOUR_PHASE else None
    verdict, _ = _measure(scheme, state, 0.0, beta, rng)
    if verdict.conclusive:
        index = INDEX_FOR[(verdict.basis, verdict.bit)]
    else:
        index = int(rng.integers(1, 5))
    return signal_state(scheme, index).state


class _RawTrial(NamedTuple):
    trial: int
    alice_index: int
    outcome_label: str
    verdict: ClassifiedOutcome | None  # None when the trial was lost


def _simulate_trial(config: SessionConfig, trial: int) -> _RawTrial:
    rng = _trial_rng(config.seed, trial)
    scheme = SchemeId(config.scheme)
    alice_index = int(rng.integers(1, 5))
    state = signal_state(scheme, alice_index).state

    if config.eavesdropper == "intercept_resend":
        state = intercept_resend(state, scheme, rng)

    state = apply_channel(state, config.channel, rng, _two_photon(scheme))
    if state is None:
        return _RawTrial(trial, alice_index, "lost", None)

    phi = rng.uniform(0.0, TWO_PI) if config.phase == PHASE_RANDOM else float(config.phase)
    beta = float(rng.choice(OWA_BETAS)) if scheme is SchemeId.OWA_FOUR_PHASE else None
    verdict, label = _measure(scheme, state, phi, beta, rng)
    return _RawTrial(trial, alice_index, label, verdict)


def run_session(
    config: SessionConfig, workers: int = 1
) -> tuple[SessionStats, list[TrialRecord]]:
    """Run a full session; deterministic for a given config, any worker count."""
    config.validate()
    scheme = SchemeId(config.scheme)

    if workers <= 1:
        raws = [_simulate_trial(config, t) for t in range(config.trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            raws = list(pool.map(lambda t: _simulate_trial(config, t), range(config.trials)))
    raws.sort(key=lambda r: r.trial)

    channel = channel_pair()
    records: list[TrialRecord] = []
    histogram: Counter = Counter()
    signal_sent: Counter = Counter()
    signal_kept: Counter = Counter()
    sifted = errors = 0

    for raw in raws:
        histogram[raw.outcome_label] += 1
        signal_sent[raw.alice_index] += 1
        alice = signal_state(scheme, raw.alice_index)
        if raw.verdict is None:
            records.append(
                TrialRecord(raw.trial, raw.alice_index, "lost", False, "", None, None, False)
            )
            continue
        channel.alice.send(raw.trial, f"basis={alice.basis}")
        channel.bob.send(
            raw.trial,
            f"basis={raw.verdict.basis}" if raw.verdict.conclusive else "inconclusive",
        )
        channel.alice.recv()
        channel.bob.recv()
        result = sift(alice, raw.verdict)
        if result.kept:
            sifted += 1
            signal_kept[raw.alice_index] += 1
            if result.bit_alice != result.bit_bob:
                errors += 1
        records.append(
            TrialRecord(
                raw.trial,
                raw.alice_index,
                raw.outcome_label,
                raw.verdict.conclusive,
                raw.verdict.basis or "",
                result.bit_alice,
                result.bit_bob,
                result.kept,
            )
        )
    channel.close()

    stats = SessionStats(
        config=config,
        trials=config.trials,
        sifted=sifted,
        errors=errors,
        histogram=dict(histogram),
        signal_sent=dict(signal_sent),
        signal_kept=dict(signal_kept),
    )
    return stats, records


# --- serialization -----------------------------------------------------------

def _sig12(x: float) -> float:
    """Round to 12 significant digits for stable serialization."""
    return float(f"{x:.12g}")


def stats_document(stats: SessionStats) -> dict:
    per_signal = {
        str(i): {
            "sent": stats.signal_sent.get(i, 0),
            "kept": stats.signal_kept.get(i, 0),
            "success_rate": _sig12(
                stats.signal_kept.get(i, 0) / stats.signal_sent.get(i, 1)
                if stats.signal_sent.get(i, 0)
                else 0.0
            ),
        }
        for i in (1, 2, 3, 4)
    }
    return {
        "scheme": SchemeId(stats.config.scheme).value,
        "config": stats.config.describe(),
        "trials": stats.trials,
        "sifted": stats.sifted,
        "errors": stats.errors,
        "sifted_rate": _sig12(stats.sifted_rate),
        "qber": _sig12(stats.qber),
        "histogram": {k: stats.histogram[k] for k in sorted(stats.histogram)},
        "per_signal": per_signal,
        "rng": RNG_IDENTITY,
        "version": __version__,
    }


def stats_json(stats: SessionStats) -> str:
    return json.dumps(stats_document(stats), indent=2, sort_keys=True)


TRACE_COLUMNS = (
    "trial",
    "alice_index",
    "outcome_label",
    "verdict",
    "basis",
    "bit_alice",
    "bit_bob",
    "kept",
)


def trace_csv(records: list[TrialRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for r in records:
        writer.writerow(
            [
                r.trial,
                r.alice_index,
                r.outcome_label,
                r.verdict,
                r.basis,
                "" if r.bit_alice is None else r.bit_alice,
                "" if r.bit_bob is None else r.bit_bob,
                int(r.kept),
            ]
        )
    return buf.getvalue()


def config_from_dict(doc: dict) -> SessionConfig:
    """Build a SessionConfig from a parsed JSON document (the CLI --config format)."""
    channel_doc = doc.get("channel", {"kind": "none"})
    if isinstance(channel_doc, str):
        channel_doc = {"kind": channel_doc}
    phi = channel_doc.get("phi")
    channel = ChannelSpec(
        kind=channel_doc.get("kind", "none"),
        phi=None if phi in (None, "random") else float(phi),
        loss=float(channel_doc.get("loss", 0.0)),
    )
    phase = doc.get("phase", 0.0)
    return SessionConfig(
        scheme=SchemeId(doc["scheme"]),
        trials=int(doc["trials"]),
        seed=int(doc["seed"]),
        phase=phase if phase == PHASE_RANDOM else float(phase),
        channel=channel,
        eavesdropper=doc.get("eavesdropper", "off"),
    )
