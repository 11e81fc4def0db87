"""Entangled-pair source pipeline for the combined scheme.

A pulsed type-II downconversion crystal emits a noncollinear
polarization-entangled pair, (|HV⟩ + |VH⟩)/√2. A modulator then either
filters one polarization of photon 1 (projective, succeeds half the time on
the Bell input) or phases photon 1's V component by 0 or π. A delay-combiner
merges the two spatial arms with a relative delay equal to the receiver's
interferometer delay, turning polarization labels into time bins (H → early,
V → late). Finally element P delays-and-rotates one polarization mode by far
more than the bin spacing, so the two photons occupy disjoint time frames
with identical polarization; this changes no amplitudes and is tracked as a
flag only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .qstate import ModeState
from .timebin import TWO_PHOTON_BASIS

POLARIZATION_BASIS = ("HH", "HV", "VH", "VV")

_SQRT2_INV = 1.0 / math.sqrt(2.0)


class ModulatorSetting(str, Enum):
    FILTER_H = "filter_H"
    FILTER_V = "filter_V"
    PHASE_0 = "phase_0"
    PHASE_PI = "phase_pi"


class FramesAlreadySeparatedError(RuntimeError):
    """Element P applied to a pair whose time frames are already separated."""


@dataclass(frozen=True)
class FramedPairState:
    """Two-photon time-bin state whose photons occupy disjoint time frames."""

    state: ModeState
    frames_separated: bool = True


def spdc_pair() -> ModeState:
    """The reference downconversion output (|HV⟩ + |VH⟩)/√2."""
    return ModeState(
        POLARIZATION_BASIS, np.array([0, _SQRT2_INV, _SQRT2_INV, 0], dtype=complex)
    )


def modulator_m(
    s: ModeState, setting: ModulatorSetting
) -> tuple[ModeState | None, float]:
    """Apply one modulator setting; returns (state, success probability).

    Filtering projects photon 1 onto H or V (state is None on probability
    zero); the phase settings multiply photon 1's V components by e^{i·0} or
    e^{iπ} and always succeed.
    """
    if s.basis != POLARIZATION_BASIS:
        raise ValueError("modulator_m expects a state over (HH, HV, VH, VV)")
    setting = ModulatorSetting(setting)
    amps = np.array(s.amplitudes)
    if setting in (ModulatorSetting.FILTER_H, ModulatorSetting.FILTER_V):
        keep = "H" if setting is ModulatorSetting.FILTER_H else "V"
        mask = np.array([label[0] == keep for label in s.basis])
        prob = float(np.vdot(amps[mask], amps[mask]).real)
        if prob <= 0.0:
            return None, 0.0
        amps[~mask] = 0.0
        return ModeState(s.basis, amps / math.sqrt(prob)), prob
    phase = 1.0 if setting is ModulatorSetting.PHASE_0 else -1.0
    for i, label in enumerate(s.basis):
        if label[0] == "V":
            amps[i] *= phase
    return ModeState(s.basis, amps), 1.0


def rotate_axes_photon2(s: ModeState) -> ModeState:
    """Swap H ↔ V on photon 2 (the modulator's rotated-axes variant)."""
    if s.basis != POLARIZATION_BASIS:
        raise ValueError("rotate_axes_photon2 expects a polarization pair state")
    swapped = {label[0] + ("V" if label[1] == "H" else "H"): a
               for label, a in zip(s.basis, s.amplitudes)}
    return ModeState(s.basis, np.array([swapped[l] for l in s.basis]))


def combine_and_delay(s: ModeState) -> ModeState:
    """Merge the arms with the bin delay: H → early, V → late, per photon.

    (|HH⟩,|HV⟩,|VH⟩,|VV⟩) → (|EE⟩,|EL⟩,|LE⟩,|LL⟩) with unchanged amplitudes.
    """
    if s.basis != POLARIZATION_BASIS:
        raise ValueError("combine_and_delay expects a polarization pair state")
    return ModeState(TWO_PHOTON_BASIS, s.amplitudes)


def element_p(s: ModeState | FramedPairState) -> FramedPairState:
    """Separate the two photons into disjoint time frames (amplitude identity)."""
    if isinstance(s, FramedPairState):
        raise FramesAlreadySeparatedError("time frames are already separated")
    if s.basis != TWO_PHOTON_BASIS:
        raise ValueError("element_p expects a state over (EE, EL, LE, LL)")
    return FramedPairState(s)


_SIGNAL_SETTINGS = {
    1: ModulatorSetting.FILTER_H,
    2: ModulatorSetting.FILTER_V,
    3: ModulatorSetting.PHASE_0,
    4: ModulatorSetting.PHASE_PI,
}


def prepare_signal(index: int) -> tuple[ModeState, float]:
    """Run the full pipeline for signal index 1..4.

    Returns the emitted time-bin state and the preparation success
    probability (1/2 for the filtered pole states, 1 for the phased
    equatorial states).
    """
    if index not in _SIGNAL_SETTINGS:
        raise ValueError(f"signal index must be 1..4, got {index}")
    modulated, prob = modulator_m(spdc_pair(), _SIGNAL_SETTINGS[index])
    assert modulated is not None  # Bell input never projects to zero
    framed = element_p(combine_and_delay(modulated))
    return framed.state, prob


def make_bell_state(which: int) -> ModeState:
    """All four time-bin Bell states from the same source.

    1, 2 → (|EL⟩ ± |LE⟩)/√2 via the phase settings; 3, 4 → (|EE⟩ ± |LL⟩)/√2
    by first rotating photon 2's polarization axes at the modulator.
    """
    if which not in (1, 2, 3, 4):
        raise ValueError(f"Bell index must be 1..4, got {which}")
    pair = spdc_pair()
    if which in (3, 4):
        pair = rotate_axes_photon2(pair)
    setting = ModulatorSetting.PHASE_0 if which in (1, 3) else ModulatorSetting.PHASE_PI
    modulated, _ = modulator_m(pair, setting)
    return element_p(combine_and_delay(modulated)).state
