import numpy as np
import pytest
from scipy.stats import chisquare

from resetword import RngSpec, cerny, random_dfa
from resetword.generators import FAMILIES, constant_letter, register_family


def test_single_state():
    for k in (1, 2, 5):
        d = random_dfa(1, k, RngSpec(3))
        assert d.delta == ((0,) * k,)


def test_deterministic_per_seed():
    rs = RngSpec(42)
    assert random_dfa(30, 2, rs) == random_dfa(30, 2, rs)
    assert random_dfa(30, 2, rs) != random_dfa(30, 2, rs.offset(1))
    assert random_dfa(30, 2, RngSpec(42, "philox")) == random_dfa(30, 2, RngSpec(42, "philox"))


def test_transition_uniformity():
    rs = RngSpec(11)
    counts = np.zeros(20, dtype=int)
    for i in range(100_000):
        counts[rs.offset(i).generator().integers(0, 20, size=(20, 2))[0, 0]] += 1
    # the same draw random_dfa makes for δ(0, 0)
    assert random_dfa(20, 2, rs.offset(5)).delta[0][0] == rs.offset(5).generator().integers(0, 20, size=(20, 2))[0, 0]
    assert chisquare(counts).pvalue > 0.01


def test_all_transitions_uniform():
    counts = np.zeros(7, dtype=int)
    rs = RngSpec(8)
    for i in range(2000):
        for row in random_dfa(7, 3, rs.offset(i)).delta:
            for t in row:
                counts[t] += 1
    assert chisquare(counts).pvalue > 0.01


def test_cerny_shape():
    d = cerny(1)
    assert d.delta == ((0, 0),)
    d = cerny(4)
    assert d.columns == ((1, 1, 2, 3), (1, 2, 3, 0))


def test_rng_spec_validation():
    with pytest.raises(ValueError):
        RngSpec(1, "mt19937x")
    with pytest.raises(ValueError):
        RngSpec(-1)
    with pytest.raises(ValueError):
        random_dfa(0, 2, RngSpec(1))
    assert RngSpec((1 << 64) - 1).offset(1).seed == 0


def test_register_family():
    register_family("const-test", constant_letter)
    assert FAMILIES["const-test"](3) == constant_letter(3)
    with pytest.raises(ValueError):
        register_family("cerny", cerny)
    del FAMILIES["const-test"]
