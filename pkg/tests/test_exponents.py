from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from kinetic_hls import exponents as X
from kinetic_hls.errors import DomainError


def test_parsing_is_exact():
    assert X.as_fraction("7/12") == F(7, 12)
    assert X.recip("inf") == 0
    assert X.recip("3/2") == F(2, 3)
    with pytest.raises(DomainError):
        X.as_fraction("abc")


def test_admissible_point_has_zero_delta():
    e = X.HlsExponents(F(1, 2) + F(1, 6), F(1, 2) + F(1, 6), F(1, 3))
    assert e.delta == 0
    assert X.check_hls_scaling(e).admissible


def test_r_range_hard_sphere_is_a_point():
    lo, hi, strict = X.r_range(1)
    assert lo == hi == F(1, 6) and not strict
    assert X.admissible_r_for_gamma(1, 24) == [F(1, 6)]


def test_r_range_open_for_maxwell_molecules():
    lo, hi, strict = X.r_range(0)
    assert (lo, hi, strict) == (0, 1, True)


@given(st.fractions(min_value=0, max_value=1, max_denominator=40))
@settings(max_examples=60, deadline=None)
def test_r_range_nonempty_for_all_gamma(g):
    lo, hi, _ = X.r_range(g)
    assert lo <= hi
    assert hi - lo == 1 - g


def test_epsilon_window_readings():
    w1 = X.epsilon_window(1).describe()
    assert w1["lower"] == w1["upper"] == "1/36"
    assert w1["strict_reading"] == "empty"
    assert w1["closed_reading"] == "{1/36}"
    w0 = X.epsilon_window(0)
    assert w0.lower == 0 and w0.upper == F(1, 9)
    assert w0.contains(F(1, 9)) and not w0.contains(0)


@given(st.integers(1, 110))
@settings(max_examples=60, deadline=None)
def test_solvable_triplet_identities(k):
    eps = F(k, 1000)
    t = X.solvable_triplets(eps)
    assert t.checks["hm_primal"] == 3
    assert t.checks["pairing"]
    assert t.primal.kt(3).admissible
    assert t.tilde.ia == F(2, 3)
    assert t.checks["tilde_kt"].admissible == (eps <= F(1, 18))


def test_loss_triplet():
    le = X.loss_exponent_set(1, F(1, 36))
    assert le.a2 == F(15, 8)
    assert le.checks["uni_har"] == F(16, 15)
    assert le.checks["second_kt"].admissible
    assert le.checks["uni_time"] and le.checks["uni_x"]


def test_kt_endpoint_flagged():
    v = X.check_kt_admissible("4/3", "2", "1")   # reciprocals (3/4, 1/2, 1): a = 4/3 = (d+1)/d
    assert v.admissible and v.endpoint and not v.usable


def test_kt_rejects_wrong_time_exponent():
    v = X.check_kt_admissible("3", "3", "3/2")
    assert not v.admissible
    assert any("time relation" in r for r in v.reasons)


def test_weighted_check_hard_sphere_violates_size():
    v = X.section6_weighted_check(F(1, 36), 1, F(4))
    assert v.status == "violates-size"


def test_weighted_check_reduces_to_plain_when_m_infinite():
    v = X.check_weighted_hls("3/2", "3/2", "inf", "3", 0, 0)
    assert v.status == X.check_hls_scaling(X.HlsExponents.from_exponents("3/2", "3/2", "3")).status


def test_hls_examples():
    assert X.check_hls_scaling(X.HlsExponents.from_exponents("3/2", "3/2", "3")).admissible
    e = X.HlsExponents(F(14, 15), F(14, 15), F(7, 10), F(1, 2))
    assert e.delta == 0
    assert X.check_hls_scaling(e).status == "violates-r-range"
    assert X.r_range(F(1, 2))[1] == F(7, 12)


def test_kt_spec_examples():
    v = X.check_kt_admissible("6", "18/5", "18/7")
    assert v.admissible and v.a == 3
    v = X.check_kt_admissible("2", "30/11", "30/21")
    assert v.admissible and v.a == F(15, 8)
    v = X.check_kt_admissible("2", "3", "3/2")
    assert v.admissible and v.endpoint and v.a == 2


def test_epsilon_window_half():
    w = X.epsilon_window(F(1, 2))
    assert (w.lower, w.upper) == (0, F(5, 72))


@pytest.mark.parametrize("eps, primal, primed", [
    (F(1, 18), (F(1, 6), F(5, 18), F(7, 18)), (F(1, 3), F(5, 9), F(1, 9))),
    (F(1, 36), (F(1, 4), F(1, 4), F(5, 12)), (F(1, 2), F(1, 2), F(1, 6))),
])
def test_solvable_triplet_values(eps, primal, primed):
    t = X.solvable_triplets(eps)
    assert t.primal.as_tuple() == primal
    assert t.primed.as_tuple() == primed
    assert 1 / t.tilde.ia == F(3, 2)


def test_loss_bounds_hard_sphere():
    le = X.loss_exponent_set(1)
    assert le.ell2_lower == F(19, 10)
    assert le.ell3_offset == F(10, 9)


def test_weighted_check_strict_weight():
    # gamma = 0, 1/p = 1/q = 1/2, 1/m = 1/3, 1/r = 1/3: ell1 = 3/m = 1 is rejected
    args = ("2", "2", "3", "3")
    assert X.check_weighted_hls(*args, 1, 0).status == "violates-weight"
    assert X.check_weighted_hls(*args, F(101, 100), 0).status == "admissible"
