"""Time-bin bases and constructors shared by the optics and noise modules.

A single photonic qubit lives on (|E⟩, |L⟩): early and late wavepackets.
A photon pair lives on the four kets (|EE⟩, |EL⟩, |LE⟩, |LL⟩), photon-1-major.
"""
from __future__ import annotations

from .qstate import ModeState, basis_state, superposition

TIME_BIN_BASIS = ("E", "L")
TWO_PHOTON_BASIS = ("EE", "EL", "LE", "LL")


def time_bin_qubit(early: complex, late: complex) -> ModeState:
    return superposition(TIME_BIN_BASIS, {"E": early, "L": late})


def two_photon_state(ee: complex, el: complex, le: complex, ll: complex) -> ModeState:
    return superposition(TWO_PHOTON_BASIS, {"EE": ee, "EL": el, "LE": le, "LL": ll})


def ket(label: str) -> ModeState:
    """Basis ket |E⟩, |L⟩, |EE⟩, |EL⟩, |LE⟩ or |LL⟩."""
    if label in TIME_BIN_BASIS:
        return basis_state(TIME_BIN_BASIS, label)
    if label in TWO_PHOTON_BASIS:
        return basis_state(TWO_PHOTON_BASIS, label)
    raise ValueError(f"unknown time-bin label {label!r}")
