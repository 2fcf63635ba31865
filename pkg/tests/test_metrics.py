import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ideaevo.evolution import Population
from ideaevo.landscape import UtilityLandscape
from ideaevo.metrics import convergence, decision_quality, entropy, most_supported, outcome_metrics
from oracles import brute_force_entropy, brute_force_utility

A, B, C = 7, 2, 9


@pytest.mark.parametrize("enc,h", [([A] * 4, 0.0), ([A, A, B, B], 1.0), ([A, B, C, C], 1.5)])
def test_entropy_examples(enc, h):
    assert entropy(enc) == h


def test_entropy_empty_rejected():
    with pytest.raises(ValueError):
        entropy([])


def test_convergence_examples():
    assert convergence([A] * 5, 10) == 1.0
    assert convergence([A, A, B, B], 10) == pytest.approx(0.9, abs=1e-15)
    full = Population(4, range(16))
    assert entropy(full) == 4.0
    assert convergence(full, 4) == 0.0


@pytest.mark.parametrize("enc,best", [([A, A, B], A), ([5, 3], 3), ([7] * 3 + [2] * 3 + [9], 2)])
def test_most_supported_ties(enc, best):
    assert most_supported(enc) == best


def test_decision_quality_uses_true_landscape():
    L = UtilityLandscape(3, (0b000, 0b111, 0b011), (1.0, 0.0, 0.25))
    assert decision_quality([0b011, 0b011, 0b000], L) == 0.25
    pop = [0b001, 0b001, 0b110]
    expected = brute_force_utility(3, list(zip(L.encodings, L.values)), 0b001)
    assert decision_quality(pop, L) == pytest.approx(expected, abs=1e-12)


multisets = st.lists(st.integers(0, 63), min_size=1, max_size=80)


@given(multisets)
def test_entropy_matches_direct_computation(enc):
    h = entropy(enc)
    assert h == pytest.approx(brute_force_entropy(enc), abs=1e-12)
    assert -1e-12 <= h <= min(6, math.log2(len(enc))) + 1e-12


@given(multisets, st.randoms(use_true_random=False))
def test_metrics_permutation_invariant(enc, rnd):
    shuffled = list(enc)
    rnd.shuffle(shuffled)
    assert entropy(shuffled) == pytest.approx(entropy(enc), abs=1e-12)
    assert most_supported(shuffled) == most_supported(enc)


@given(multisets, st.integers(2, 5))
def test_entropy_scale_invariant(enc, factor):
    assert entropy(enc * factor) == pytest.approx(entropy(enc), abs=1e-12)


def test_outcome_metrics_fields():
    L = UtilityLandscape(3, (0b000, 0b111), (1.0, 0.0))
    m = outcome_metrics(Population(3, [1, 1, 2, 0]), L)
    assert m.most_supported == 1
    assert m.decision_true_utility == pytest.approx(0.8)
    assert m.entropy_bits == 1.5
    assert m.convergence == pytest.approx((3 - 1.5) / 3)
    assert m.distinct_types == 3 and m.population_size == 4
