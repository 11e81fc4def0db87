import itertools
import json
import math

import numpy as np
import pytest

import oracles
from timebin_qkd.optics import (
    DETECTION_BASIS,
    JOINT_BASIS,
    DetectionOutcome,
    JointOutcome,
)
from timebin_qkd.protocols import (
    OWA_ALPHAS,
    OWA_BETAS,
    PHASE,
    TIME,
    ClassifiedOutcome,
    SchemeId,
    classify_combined,
    classify_fig1,
    classify_owa,
    generate_chart,
    owa_alice_state,
    owa_round,
    sift,
    signal_state,
)
from timebin_qkd.qstate import equal_up_to_global_phase
from timebin_qkd.timebin import ket, two_photon_state

SQRT2_INV = 1 / math.sqrt(2)


def outcome(slot, det):
    return DetectionOutcome(slot, det)


def joint(s1, d1, s2, d2):
    return JointOutcome(outcome(s1, d1), outcome(s2, d2))


class TestSignalStates:
    @pytest.mark.parametrize(
        "index,label", [(1, "EL"), (2, "LE")]
    )
    def test_combined_poles(self, index, label):
        sig = signal_state(SchemeId.COMBINED, index)
        assert sig.basis == TIME and sig.bit == index - 1
        assert equal_up_to_global_phase(sig.state, ket(label))

    def test_combined_equatorial(self):
        s3 = signal_state(SchemeId.COMBINED, 3)
        s4 = signal_state(SchemeId.COMBINED, 4)
        assert (s3.basis, s3.bit) == (PHASE, 0)
        assert (s4.basis, s4.bit) == (PHASE, 1)
        assert equal_up_to_global_phase(s3.state, two_photon_state(0, 1, 1, 0))
        assert equal_up_to_global_phase(s4.state, two_photon_state(0, 1, -1, 0))

    def test_fig1_states(self):
        assert equal_up_to_global_phase(signal_state(SchemeId.FIG1_SINGLE_PHOTON, 1).state, ket("E"))
        assert equal_up_to_global_phase(signal_state(SchemeId.FIG1_SINGLE_PHOTON, 2).state, ket("L"))
        s3 = signal_state(SchemeId.FIG1_SINGLE_PHOTON, 3).state
        assert s3.amplitude("E") == pytest.approx(SQRT2_INV)
        assert s3.amplitude("L") == pytest.approx(SQRT2_INV)

    @pytest.mark.parametrize("scheme", list(SchemeId))
    def test_state_geometry(self, scheme):
        states = {i: signal_state(scheme, i).state for i in (1, 2, 3, 4)}
        assert abs(states[1].inner(states[2])) <= 1e-12
        assert abs(states[3].inner(states[4])) <= 1e-12
        for i, j in itertools.product((1, 2), (3, 4)):
            assert abs(states[i].inner(states[j])) ** 2 == pytest.approx(0.5, abs=1e-12)

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            signal_state(SchemeId.COMBINED, 5)


class TestOwa:
    def test_alice_state_phases(self):
        assert equal_up_to_global_phase(owa_alice_state(0.0), two_photon_state(0, 1, 1, 0))
        assert equal_up_to_global_phase(owa_alice_state(math.pi), two_photon_state(0, 1, -1, 0))
        assert equal_up_to_global_phase(
            owa_alice_state(math.pi / 2), two_photon_state(0, 1, 1j, 0)
        )

    def test_alpha_outside_set_rejected(self):
        with pytest.raises(ValueError):
            owa_alice_state(0.3)

    @pytest.mark.parametrize("alpha", sorted(OWA_ALPHAS.values()))
    @pytest.mark.parametrize("beta", OWA_BETAS)
    def test_correlation_law(self, alpha, beta):
        expected = (1 + math.cos(alpha + beta)) / 2
        for phi in (0.0, 1.7):
            assert owa_round(alpha, beta, phi) == pytest.approx(expected, abs=1e-12)
            assert owa_round(alpha, beta, phi) == pytest.approx(
                oracles.owa_same_detector_prob(alpha, beta, phi), abs=1e-12
            )

    def test_matched_basis_extremes(self):
        assert owa_round(0.0, 0.0, 0.4) == pytest.approx(1.0, abs=1e-12)
        assert owa_round(math.pi, 0.0, 0.4) == pytest.approx(0.0, abs=1e-12)
        assert owa_round(math.pi / 2, 0.0, 0.4) == pytest.approx(0.5, abs=1e-12)


class TestClassifyFig1:
    @pytest.mark.parametrize(
        "slot,det,basis,bit",
        [
            ("early", "minus", TIME, 0),
            ("early", "plus", TIME, 0),
            ("late", "plus", TIME, 1),
            ("late", "minus", TIME, 1),
            ("middle", "minus", PHASE, 0),
            ("middle", "plus", PHASE, 1),
        ],
    )
    def test_table(self, slot, det, basis, bit):
        verdict = classify_fig1(outcome(slot, det))
        assert verdict.conclusive
        assert (verdict.basis, verdict.bit) == (basis, bit)


class TestClassifyCombined:
    def test_middle_middle_detector_parity(self):
        v = classify_combined(joint("middle", "plus", "middle", "plus"))
        assert (v.conclusive, v.basis, v.bit) == (True, PHASE, 0)
        v = classify_combined(joint("middle", "plus", "middle", "minus"))
        assert (v.conclusive, v.basis, v.bit) == (True, PHASE, 1)

    def test_extreme_slots_give_time_basis(self):
        v = classify_combined(joint("early", "minus", "late", "plus"))
        assert (v.basis, v.bit) == (TIME, 0)
        v = classify_combined(joint("late", "plus", "early", "plus"))
        assert (v.basis, v.bit) == (TIME, 1)

    @pytest.mark.parametrize(
        "s1,s2",
        [("early", "middle"), ("middle", "early"), ("middle", "late"), ("late", "middle"),
         ("early", "early"), ("late", "late")],
    )
    def test_mixed_and_same_slot_patterns_discarded(self, s1, s2):
        v = classify_combined(joint(s1, "plus", s2, "minus"))
        assert not v.conclusive

    def test_exactly_twelve_conclusive_patterns(self):
        conclusive = [j for j in JOINT_BASIS if classify_combined(j).conclusive]
        assert len(conclusive) == 12  # 4 both-middle + 2 slot patterns × 4 detector pairs


class TestClassifyOwa:
    def test_only_middle_middle_conclusive(self):
        assert classify_owa(joint("early", "plus", "late", "plus"), 0.0).conclusive is False
        assert classify_owa(joint("middle", "plus", "middle", "plus"), 0.0).conclusive

    def test_bit_mapping(self):
        same = joint("middle", "minus", "middle", "minus")
        diff = joint("middle", "minus", "middle", "plus")
        assert classify_owa(same, 0.0).bit == 0
        assert classify_owa(diff, 0.0).bit == 1
        assert classify_owa(same, math.pi / 2).bit == 1
        assert classify_owa(diff, math.pi / 2).bit == 0


class TestCharts:
    def test_combined_middle_cells(self):
        chart = generate_chart(SchemeId.COMBINED, 0.8)
        assert chart.consistent("middle/+,middle/+") == (1, 2, 3)
        assert chart.consistent("middle/-,middle/-") == (1, 2, 3)
        assert chart.consistent("middle/+,middle/-") == (1, 2, 4)
        assert chart.consistent("middle/-,middle/+") == (1, 2, 4)

    def test_combined_correlated_slots_empty(self):
        chart = generate_chart(SchemeId.COMBINED, 0.8)
        for d1 in "+-":
            for d2 in "+-":
                assert chart.consistent(f"early/{d1},early/{d2}") == ()
                assert chart.consistent(f"late/{d1},late/{d2}") == ()

    def test_combined_chart_phase_invariant(self):
        grid = [0.0, 0.7, math.pi / 2, 2.1, math.pi]
        charts = [generate_chart(SchemeId.COMBINED, phi).entries for phi in grid]
        assert all(c == charts[0] for c in charts[1:])

    def test_fig1_chart_at_zero(self):
        chart = generate_chart(SchemeId.FIG1_SINGLE_PHOTON, 0.0)
        assert chart.consistent("early/-") == (1, 3, 4)
        assert chart.consistent("early/+") == (1, 3, 4)
        assert chart.consistent("late/-") == (2, 3, 4)
        assert chart.consistent("late/+") == (2, 3, 4)
        assert chart.consistent("middle/-") == (1, 2, 3)
        assert chart.consistent("middle/+") == (1, 2, 4)

    def test_fig1_chart_is_phase_sensitive(self):
        at_zero = generate_chart(SchemeId.FIG1_SINGLE_PHOTON, 0.0).entries
        at_pi = generate_chart(SchemeId.FIG1_SINGLE_PHOTON, math.pi).entries
        assert at_zero["middle/-"] != at_pi["middle/-"]

    def test_zero_consistency_implies_zero_probability(self):
        # Every all-empty entry must be unreachable under all four signals.
        from timebin_qkd.optics import mzi_pair, outcome_distribution

        chart = generate_chart(SchemeId.COMBINED, 1.3)
        dists = [
            outcome_distribution(mzi_pair(signal_state(SchemeId.COMBINED, i).state, 1.3))
            for i in (1, 2, 3, 4)
        ]
        for k, j in enumerate(JOINT_BASIS):
            if chart.consistent(j.label) == ():
                assert all(d[k] <= 1e-12 for d in dists)

    def test_json_round_trip(self):
        chart = generate_chart(SchemeId.COMBINED, 0.0)
        doc = json.loads(chart.to_json())
        assert doc == {label: list(idx) for label, idx in chart.entries.items()}

    def test_text_rendering_fixed_width(self):
        text = generate_chart(SchemeId.COMBINED, 0.0).render_text()
        body = [ln for ln in text.splitlines()[2:]]
        assert len({len(ln) for ln in body if ln.strip().startswith(("early", "middle", "late"))}) == 1
        fig1 = generate_chart(SchemeId.FIG1_SINGLE_PHOTON, 0.0).render_text()
        assert "early/-" in fig1 and "{1,3,4}" in fig1

    def test_threshold_validated(self):
        with pytest.raises(ValueError):
            generate_chart(SchemeId.COMBINED, 0.0, threshold=1.5)


class TestSift:
    def test_matched_phase_basis_kept(self):
        alice = signal_state(SchemeId.COMBINED, 3)
        bob = ClassifiedOutcome.verdict(PHASE, 0, joint("middle", "plus", "middle", "plus"))
        result = sift(alice, bob)
        assert result.kept and (result.bit_alice, result.bit_bob) == (0, 0)

    def test_basis_mismatch_discarded(self):
        alice = signal_state(SchemeId.COMBINED, 1)
        bob = ClassifiedOutcome.verdict(PHASE, 1, joint("middle", "plus", "middle", "minus"))
        assert not sift(alice, bob).kept

    def test_inconclusive_discarded(self):
        alice = signal_state(SchemeId.COMBINED, 2)
        bob = ClassifiedOutcome.inconclusive(joint("early", "plus", "middle", "minus"))
        assert not sift(alice, bob).kept
