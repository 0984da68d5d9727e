import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from permaspin import meanfield as mf


def test_G_examples():
    for x in (0.5, 1.0, 2.3):
        assert mf.G(0, 0.7, x) == pytest.approx(x**0.49)
        assert mf.G(1, 0.0, x) == pytest.approx(2 * x)
        assert mf.G(2, 0.0, x) == pytest.approx(2 + 2 * x**4)
    with pytest.raises(ValueError):
        mf.G(2, 0.0, 0.0)


def test_hamiltonian_examples():
    mp = mf.MeanFieldParams(12, 3, 1.5, 0.7, 1.0)
    assert mf.mean_hamiltonian_counts((2,) * 6, mp) == pytest.approx(3 * 1.5 * 12 / (2 * 11))
    mp = mf.MeanFieldParams(7, 2, 1.3, -0.4, 1.0)
    assert mf.mean_hamiltonian_counts((7, 0, 0, 0, 0, 0), mp) == pytest.approx(-2 * 1.3 * 7 / 2 + 0.4 * 7)
    with pytest.raises(ValueError):
        mf.mean_hamiltonian_counts((1, 1, 1, 1, 1, 1), mp)


@settings(max_examples=100)
@given(st.lists(st.integers(0, 15), min_size=6, max_size=6).filter(lambda c: sum(c) >= 2),
       st.integers(1, 6), st.floats(0.1, 3), st.floats(-3, 3))
def test_completed_square(cv, q, J, H):
    mp = mf.MeanFieldParams(sum(cv), q, J, H, 1.0)
    h = mf.mean_hamiltonian_counts(cv, mp)
    assert mf.mean_hamiltonian_completed(cv, mp) == pytest.approx(h, rel=1e-9, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(1, 4), st.floats(-2, 2), st.floats(-2, 2), st.data())
def test_counts_form_equals_pair_form(n, q, J, H, data):
    config = data.draw(st.lists(st.integers(0, 5), min_size=n, max_size=n))
    mp = mf.MeanFieldParams(n, q, J, H, 1.0)
    cv = [config.count(i) for i in range(6)]
    assert mf.mean_hamiltonian_counts(cv, mp) == pytest.approx(mf.mean_hamiltonian_pairs(config, mp), abs=1e-9)


@pytest.mark.parametrize("n", range(2, 9))
def test_factorized_equals_direct(n):
    for q, J, H, beta in [(2, 1.0, 0.0, 1.0), (4, 0.5, 0.8, 0.7), (3, 2.0, -1.2, 0.3)]:
        mp = mf.MeanFieldParams(n, q, J, H, beta)
        assert mf.mean_Z_factorized(mp) == pytest.approx(mf.mean_Z_direct(mp), rel=1e-9)
        if n <= 4:
            assert mf.mean_Z_configurations(mp) == pytest.approx(mf.mean_Z_direct(mp), rel=1e-9)


@settings(max_examples=30)
@given(st.integers(2, 10), st.integers(1, 4), st.floats(0.1, 2), st.floats(0, 2), st.floats(0.01, 2))
def test_field_reversal_symmetry(n, q, J, H, beta):
    zp = mf.mean_Z_direct(mf.MeanFieldParams(n, q, J, H, beta))
    zm = mf.mean_Z_direct(mf.MeanFieldParams(n, q, J, -H, beta))
    assert zp == pytest.approx(zm, rel=1e-12)


@pytest.mark.parametrize("n", [2, 5, 9])
def test_infinite_temperature(n):
    mp = mf.MeanFieldParams(n, 2, 1.0, 0.0, 0.0)
    assert mf.mean_Z_direct(mp) == pytest.approx(6.0**n, rel=1e-12)
    assert mf.mean_Z_factorized(mp) == pytest.approx(6.0**n, rel=1e-12)
    assert mf.dominant_term_estimate(mp) == pytest.approx(6.0**n)


def test_dominant_estimate_example():
    mp = mf.MeanFieldParams(6, 2, 1.0, 0.0, 1.0)
    assert mf.dominant_term_estimate(mp) == pytest.approx(6**6 * math.exp(-1.2), rel=1e-14)


def test_central_term_is_a_summand():
    mp = mf.MeanFieldParams(6, 2, 1.0, 0.3, 0.8)
    assert 0 < mf.central_term(mp) < mf.mean_Z_factorized(mp)


def test_compositions_and_multinomials():
    comps = list(mf.compositions(4, 3))
    assert len(comps) == math.comb(6, 2) and comps == sorted(comps)
    assert sum(mf.multinomial(5, c) for c in mf.compositions(5, 6)) == 6**5
    assert list(itertools.islice(mf.compositions(2, 2), 3)) == [(0, 2), (1, 1), (2, 0)]


def test_guards():
    with pytest.raises(ValueError):
        mf.MeanFieldParams(1, 2, 1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        mf.mean_Z_factorized(mf.MeanFieldParams(4, 2, 0.0, 0.0, 1.0))
    with pytest.raises(ValueError):
        mf.mean_Z_configurations(mf.MeanFieldParams(9, 2, 1.0, 0.0, 1.0))


def test_row():
    row = mf.meanfield_row(mf.MeanFieldParams(4, 2, 1.0, 0.5, 1.0))
    assert len(row) == len(mf.MEANFIELD_COLUMNS)
    assert row[-1] == pytest.approx(-math.log(row[5]) / 4)
