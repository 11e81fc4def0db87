"""Brute-force enumeration oracles used to cross-check the library.

Everything here expands the interferometer action term by term with plain
dicts and loops, independently of the matrix/kron implementation under test.
"""
from __future__ import annotations

import cmath
from collections import defaultdict

MINUS, PLUS = "minus", "plus"


def mzi_terms(phi: float) -> dict:
    """Per-input-bin term lists: (slot, detector) -> amplitude, four each."""
    e = cmath.exp(1j * phi)
    return {
        "E": [
            (("early", MINUS), 0.5j),
            (("middle", MINUS), 0.5j * e),
            (("middle", PLUS), -0.5 * e),
            (("early", PLUS), 0.5),
        ],
        "L": [
            (("middle", MINUS), 0.5j),
            (("late", MINUS), 0.5j * e),
            (("late", PLUS), -0.5 * e),
            (("middle", PLUS), 0.5),
        ],
    }


def expand_pair(components: dict, phi: float) -> dict:
    """Joint amplitudes for a pair state given as {"EL": amp, ...}."""
    terms = mzi_terms(phi)
    joint: dict = defaultdict(complex)
    for label, amp in components.items():
        for out1, a1 in terms[label[0]]:
            for out2, a2 in terms[label[1]]:
                joint[(out1, out2)] += amp * a1 * a2
    return dict(joint)


def postselect_both_middle(joint: dict) -> tuple[dict, float]:
    """Restrict to both-middle outcomes; returns ({detector pair: amp}, prob)."""
    sub = {
        (o1[1], o2[1]): amp
        for (o1, o2), amp in joint.items()
        if o1[0] == "middle" and o2[0] == "middle"
    }
    prob = sum(abs(a) ** 2 for a in sub.values())
    if prob == 0.0:
        return {}, 0.0
    scale = prob ** -0.5
    return {k: a * scale for k, a in sub.items()}, prob


def owa_same_detector_prob(alpha: float, beta: float, phi: float) -> float:
    """Conditional same-detector probability for an OWA round, by enumeration."""
    inv_sqrt2 = 2 ** -0.5
    components = {
        "EL": inv_sqrt2,
        "LE": inv_sqrt2 * cmath.exp(1j * (alpha + beta)),  # modulator hits photon 1's L bin
    }
    conditional, _ = postselect_both_middle(expand_pair(components, phi))
    return sum(abs(a) ** 2 for (d1, d2), a in conditional.items() if d1 == d2)
