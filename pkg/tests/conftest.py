import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))  # for the oracles module

from timebin_qkd.qstate import ModeState

finite_amp = st.complex_numbers(
    min_magnitude=0.0, max_magnitude=10.0, allow_nan=False, allow_infinity=False
)


def normalized_states(basis):
    """Hypothesis strategy: a random normalized ModeState over `basis`."""
    basis = tuple(basis)

    def build(amps):
        vec = np.array(amps, dtype=complex)
        return ModeState(basis, vec / np.linalg.norm(vec))

    return (
        st.lists(finite_amp, min_size=len(basis), max_size=len(basis))
        .filter(lambda amps: np.linalg.norm(np.array(amps)) > 1e-3)
        .map(build)
    )


phases = st.floats(min_value=0.0, max_value=2 * np.pi, allow_nan=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20260824)
