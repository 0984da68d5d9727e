import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from permaspin import transfer_1d as t1
from permaspin.model_energy import Graph, ModelParams, brute_force_Z
from permaspin.output import read_csv, write_csv
from permaspin.perm_core import Permutation, StatisticKind, enumerate_perms
from permaspin.verify import PRINTED_MATRICES, parse_monomial_matrix

SETS = t1.s3_sets()
S3, S3_123, S3_123_321 = SETS["S3"], SETS["S3(123)"], SETS["S3(123,321)"]
S2 = enumerate_perms(2)
positive = st.floats(0.1, 2.0)


def test_transfer_params_examples():
    tp = t1.transfer_params(ModelParams(1.0, 0.0, 0.0), 3)
    assert (tp.a, tp.b) == (1.0, 1.0)
    tp = t1.transfer_params(ModelParams(1.0, 2.0, 4.0), 3)
    assert tp.a == pytest.approx(math.exp(-1)) and tp.b == pytest.approx(math.exp(-1))
    tp = t1.transfer_params(ModelParams(1.0, 1.0, 0.0), 2)
    assert tp.b == pytest.approx(math.exp(-1))
    A = t1.build_transfer(S2, tp=tp).entries
    np.testing.assert_allclose(A, [[1, tp.b**2], [tp.b**2, 1]], rtol=1e-15)
    with pytest.raises(ValueError):
        t1.TransferParams(0.0, 1.0)


def test_symbolic_entries():
    A = t1.build_transfer(S3, symbolic=True)
    assert A.monomial(0, 5) == "a^4 b^4"
    Ainv = t1.build_transfer(S3, StatisticKind.INV, symbolic=True)
    i, j = S3.index(Permutation.parse("132")), S3.index(Permutation.parse("231"))
    assert Ainv.monomial(i, j) == "a^3 b^3"
    ones = t1.build_transfer(S3_123_321, tp=t1.TransferParams(1.0, 1.0)).entries
    assert (ones == 1).all() and ones.shape == (4, 4)


@pytest.mark.parametrize("key", list(PRINTED_MATRICES))
def test_printed_matrices(key):
    name, stat = key
    A = t1.build_transfer(SETS[name], stat, symbolic=True)
    assert np.array_equal(A.exponents, parse_monomial_matrix(PRINTED_MATRICES[key]))


def test_des_rejected():
    with pytest.raises(ValueError):
        t1.build_transfer(S3, StatisticKind.DES, symbolic=True)


def test_ring_z_examples():
    for beta, J in [(0.5, 1.0), (1.0, 1.0), (2.0, 0.3)]:
        for n in (3, 4, 9):
            z = t1.ring_Z_for(S2, n, ModelParams(beta, J, 0.0)).Z
            ref = (2 * math.cosh(beta * J)) ** n + (2 * math.sinh(beta * J)) ** n
            assert z == pytest.approx(ref, rel=1e-12)
    p = ModelParams(1.0, 1.0, 0.0)
    assert t1.ring_Z_for(S3, 3, p).Z == pytest.approx(brute_force_Z(Graph.ring(3), S3, p).Z, rel=1e-10)
    A = t1.build_transfer(S3, tp=t1.TransferParams(1.0, 1.0))
    assert t1.ring_Z(A, 5, ModelParams(1.0, 0.0, 0.0)).Z == pytest.approx(6.0**5, rel=1e-12)
    with pytest.raises(ValueError):
        t1.ring_Z(A, 2, p)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(-2, 2), st.floats(-2, 2), st.integers(3, 5), st.sampled_from(list(SETS)))
def test_trace_equals_brute_force(beta, J, H, n, name):
    p = ModelParams(beta, J, H)
    a = t1.ring_Z_for(SETS[name], n, p).log_Z
    b = brute_force_Z(Graph.ring(n), SETS[name], p).log_Z
    assert a == pytest.approx(b, rel=1e-10, abs=1e-10)


def test_zero_field_closed_forms_k2():
    for beta, J in [(0.5, 1.0), (1.7, 0.4)]:
        p = ModelParams(beta, J, 0.0)
        for n in (3, 6):
            z = t1.zero_field_Z_closed(2, n, p).Z
            assert z == pytest.approx(2 * math.exp(beta * J) * (math.exp(beta * J) + math.exp(-beta * J)) ** (n - 1))
        f_ref = -math.log(math.exp(beta * J) + math.exp(-beta * J)) / beta
        assert t1.zero_field_f(2, p) == pytest.approx(f_ref, abs=1e-12)
        assert t1.free_energy_ring(S2, p) == pytest.approx(f_ref, abs=1e-12)


@pytest.mark.parametrize("stat", [StatisticKind.DESTAT, StatisticKind.INV])
def test_zero_field_f_is_row_sum_limit(stat):
    # every row of A sums to Stat_k(b^2) at a = 1, so lambda_max is that row sum
    for beta, J in [(0.4, 1.0), (1.0, 1.0), (2.5, 0.7)]:
        p = ModelParams(beta, J, 0.0, stat)
        assert t1.zero_field_f(3, p) == pytest.approx(t1.free_energy_ring(S3, p), abs=1e-12)


def test_finite_n_closed_form_differs_from_trace():
    # the closed finite-n formula only agrees in the per-site limit
    p = ModelParams(1.0, 1.0, 0.0)
    ratio = t1.zero_field_Z_closed(3, 4, p).Z / t1.ring_Z_for(S3, 4, p).Z
    assert abs(ratio - 1) > 1e-3
    big = 400
    lim = (t1.zero_field_Z_closed(3, big, p).log_Z - t1.ring_Z_for(S3, big, p).log_Z) / big
    assert abs(lim) < 1e-2


def test_closed_forms_at_a1_b2():
    tp = t1.TransferParams(1.0, 2.0)
    assert t1.eig_closed_41(tp).eigenvalues == (25.0, 9.0, -15.0, -15.0)
    A = t1.build_transfer(S3_123_321, tp=tp)
    np.testing.assert_allclose(t1.eig_numeric(A).eigenvalues, [25, 9, -15, -15], atol=1e-10)
    lam1, lam2, lam3, lam4 = t1.eig_closed_42_parts(tp)
    assert (lam3, lam4) == (-15.0, 9.0)


def test_closed_forms_at_identity():
    tp = t1.TransferParams(1.0, 1.0)
    assert sorted(t1.eig_closed_41(tp).eigenvalues) == [0, 0, 0, 4]
    assert t1.eig_closed_42(tp).eigenvalues == pytest.approx([5, 0, 0, 0, 0], abs=1e-12)
    A = t1.build_transfer(S3_123, tp=tp)
    assert t1.eig_numeric(A).eigenvalues == pytest.approx([5, 0, 0, 0, 0], abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(positive, positive)
def test_closed_spectra_match_numeric(a, b):
    tp = t1.TransferParams(a, b)
    for P, closed in ((S3_123_321, t1.eig_closed_41), (S3_123, t1.eig_closed_42), (S3, t1.eig_cubic_43)):
        num = t1.eig_numeric(t1.build_transfer(P, tp=tp)).eigenvalues
        scale = max(1.0, abs(num[0]))
        np.testing.assert_allclose(closed(tp).eigenvalues, num, rtol=0, atol=1e-8 * scale)
    assert t1.eig_closed_42_parts(tp)[1] == pytest.approx(max(t1.eig_closed_42(tp).eigenvalues))


def test_cubic_at_c1_d1():
    cf, lam4, lam5 = t1.cubic_43(1.0, 1.0)
    assert cf.coefficients == (1.0, -6.0, 0.0, 0.0)
    assert (lam4, lam5) == (0.0, 0.0)
    assert sorted(np.roots(cf.coefficients).real) == pytest.approx([0, 0, 6], abs=1e-12)
    tri = t1.discriminants(cf)
    assert (tri.d0, tri.d1, tri.d2) == (36.0, -432.0, 0.0)
    assert t1.lambda_star(1.0, 1.0) == pytest.approx(6.0, rel=1e-12)
    assert t1.surface_grid((1.0, 1.0), (1.0, 1.0), 1) == [(1.0, 1.0, pytest.approx(6.0), 0.0, 0.0, 36.0, -432.0, 0.0)]


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 2.0), st.floats(0.05, 2.0))
def test_lambda5_is_the_double_root(c, d):
    cf, lam4, lam5 = t1.cubic_43(c, d)
    num = t1.eig_numeric(t1.build_transfer(S3, tp=t1.TransferParams.from_cd(c, d))).eigenvalues
    full = sorted([*np.roots(cf.coefficients).real, lam4, lam5, lam5], reverse=True)
    scale = max(1.0, abs(num[0]))
    np.testing.assert_allclose(full, num, rtol=0, atol=1e-8 * scale)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 2.0), st.floats(0.05, 2.0))
def test_lambda_star_properties(c, d):
    tri = t1.discriminants_cd(c, d)
    assert tri.d2 == pytest.approx(tri.d1**2 - 4 * tri.d0**3, rel=1e-9, abs=1e-9)
    det = t1.lambda_star_detail(c, d)
    cf, lam4, lam5 = t1.cubic_43(c, d)
    assert not det.fallback
    assert det.value == pytest.approx(max(np.roots(cf.coefficients).real), rel=1e-8)
    assert det.value >= max(lam4, lam5)


def test_free_energy_examples():
    for beta, J, H in [(0.5, 1.0, 0.0), (1.0, 2.0, 1.5), (3.0, 0.5, -2.0)]:
        p = ModelParams(beta, J, H)
        ref = -J - 2 / beta * math.log(1 + math.exp(-beta * J))
        assert t1.free_energy_ring(S3_123_321, p) == pytest.approx(ref, abs=1e-12)
    for beta in (0.5, 2.0):
        assert t1.free_energy_ring(S3, ModelParams(beta, 0.0, 0.0)) == pytest.approx(-math.log(6) / beta)


@settings(max_examples=50, deadline=None)
@given(positive, positive, st.complex_numbers(max_magnitude=20))
def test_factored_charpolys(a, b, lam):
    tp = t1.TransferParams(a, b)
    for P, stat, poly in (
        (S3_123_321, StatisticKind.DESTAT, t1.charpoly_41_factored),
        (S3_123, StatisticKind.DESTAT, t1.charpoly_42_factored),
        (S3, StatisticKind.DESTAT, t1.charpoly_43_factored),
        (S3, StatisticKind.INV, t1.charpoly_inv_factored),
    ):
        M = t1.build_transfer(P, stat, tp).entries
        det = np.linalg.det(M - lam * np.eye(len(M)))
        # scale by the size of the terms, not the (possibly cancelling) value
        scale = max(1.0, np.abs(M).sum() + abs(lam)) ** len(M)
        assert abs(det - poly(a, b, lam)) <= 1e-9 * scale


def test_surface_grid_csv_round_trip():
    rows = t1.surface_grid(steps=3)
    assert len(rows) == 9
    buf = io.StringIO()
    write_csv(t1.SURFACE_COLUMNS, rows, buf)
    text = buf.getvalue()
    assert text.startswith("# permaspin-lab v1\n")
    cols, body = read_csv(text)
    assert tuple(cols) == t1.SURFACE_COLUMNS
    assert [[float(x) for x in r] for r in body] == [list(r) for r in rows]
    for r in rows:
        assert r[2] >= max(r[3], r[4])
    with pytest.raises(ValueError):
        t1.surface_grid((0.0, 1.0))


def test_spectrum_json():
    res = t1.eig_closed_41(t1.TransferParams(1.0, 2.0))
    assert res.to_json({"a": 1}) == {"params": {"a": 1}, "eigenvalues": [25.0, 9.0, -15.0, -15.0], "method": res.method.value}
