import math

import pytest
from hypothesis import given, settings, strategies as st

from permaspin import lowtemp as lt
from permaspin.model_energy import ModelParams
from permaspin.perm_core import StatisticKind
from permaspin.verify import class_partial_sums


def test_uniform_examples():
    for n, beta, J in [(3, 1.0, 1.0), (5, 0.4, 2.0)]:
        p = ModelParams(beta, J, 0.0)
        assert lt.uniform_contribution(n, p) == pytest.approx(6 * math.exp(n * beta * J), rel=1e-14)
    p = ModelParams(1.0, 1.0, 1.0)
    e3 = math.exp(3)
    assert lt.uniform_contribution(3, p) == pytest.approx(e3 * (1 / e3 + 4 + e3), rel=1e-14)


@given(st.integers(1, 8), st.floats(0, 3), st.floats(-2, 2), st.floats(-2, 2))
def test_uniform_matches_printed(n, beta, J, H):
    p = ModelParams(beta, J, H)
    assert lt.uniform_contribution(n, p) == pytest.approx(lt.uniform_contribution_printed(n, p), rel=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_domain_wall_zero_field(n):
    for beta, J in [(0.5, 1.0), (2.0, 0.7)]:
        p = ModelParams(beta, J, 0.0)
        ref = 6 * math.comb(n, 2) * math.exp(beta * J * (n - 2)) * (4 + math.exp(-2 * beta * J))
        assert lt.domain_wall_contribution(n, p) == pytest.approx(ref, rel=1e-13)
        total = lt.uniform_contribution(n, p) + lt.domain_wall_contribution(n, p)
        assert total == pytest.approx(lt.zero_field_two_class(n, p), rel=1e-13)


def test_domain_wall_n2_single_term():
    p = ModelParams(0.9, 1.2, 0.4)
    bJ, bH = 0.9 * 1.2, 0.9 * 0.4
    x = math.exp(-2 * bJ)
    bracket = (8 + 4 * x) + 8 * (math.exp(bH) + math.exp(-bH)) + 2 * x
    assert lt.domain_wall_contribution(2, p) == pytest.approx(bracket, rel=1e-14)
    with pytest.raises(ValueError):
        lt.domain_wall_contribution(1, p)


@settings(max_examples=40)
@given(st.integers(2, 9), st.floats(0.05, 3), st.floats(-2, 2), st.floats(-2, 2))
def test_simplified_equals_direct(n, beta, J, H):
    p = ModelParams(beta, J, H)
    assert lt.domain_wall_contribution(n, p) == pytest.approx(lt.domain_wall_direct(n, p), rel=1e-12)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_class_sums_match_enumeration(n):
    for beta, J, H in [(0.7, 1.0, 0.0), (1.2, 0.8, 0.6), (0.5, 1.5, -1.1)]:
        p = ModelParams(beta, J, H)
        uni, wall = class_partial_sums(n, p)
        assert lt.uniform_contribution(n, p) == pytest.approx(uni, rel=1e-10)
        assert lt.domain_wall_contribution(n, p) == pytest.approx(wall, rel=1e-10)


def test_lowtemp_report_large_beta():
    rep = lt.lowtemp_Z(5, ModelParams(5.0, 1.0, 0.0))
    assert 0.99 <= rep.ln_ratio <= 1.01
    assert rep.field_case is lt.FieldCase.ZERO
    assert rep.z_two_class <= rep.z_exact
    rep = lt.lowtemp_Z(5, ModelParams(10.0, 1.0, 0.0))
    assert rep.rel_log_error <= 0.01


@pytest.mark.parametrize("H, case", [(0.5, lt.FieldCase.POSITIVE), (-0.5, lt.FieldCase.NEGATIVE)])
def test_dominant_terms_with_field(H, case):
    n, beta, J = 4, 20.0, 1.0
    p = ModelParams(beta, J, H)
    rep = lt.lowtemp_Z(n, p)
    assert rep.field_case is case
    approx = math.exp(n * beta * J) * (4 + math.exp(n * beta * abs(H)))
    assert rep.z_approx == pytest.approx(approx)
    assert rep.z_uniform == pytest.approx(approx, rel=1e-12)
    assert rep.rel_log_error < 1e-3


def test_free_energy_variants():
    fv = lt.lowtemp_f_variants(ModelParams(10.0, 1.0, 0.0))
    assert fv.f_comment6 == -1.0
    ref = -1.0 - 2 / 10.0 * math.log(1 - math.exp(-10.0))
    assert fv.f_comment7 == pytest.approx(ref, abs=1e-14)
    assert fv.f_comment7 > -1.0
    assert lt.lowtemp_f_variants(ModelParams(5.0, 1.0, -0.5)).f_comment6 == -1.5


def test_comparison_table():
    rows = lt.comparison_rows(4, [2.0, 5.0, 10.0], [1.0], [-1.0, 0.0, 1.0])
    assert len(rows) == 9
    for row in rows:
        assert len(row) == len(lt.COMPARISON_COLUMNS)
        assert row[-1] in ("f6", "f7")
        f6, f7, f_exact = row[7], row[8], row[9]
        assert row[-1] == ("f6" if abs(f6 - f_exact) <= abs(f7 - f_exact) else "f7")


def test_only_destat():
    with pytest.raises(ValueError):
        lt.uniform_contribution(3, ModelParams(1.0, stat=StatisticKind.INV))
