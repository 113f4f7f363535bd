import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from birmanlab.constants import birman_constant, copson_constant
from birmanlab.hardy_op import solve_difference_eq
from birmanlab.inequalities import (MonotonicityError, NegativeWeightError, SupportError,
                                    abstract_hardy_report, birman_integral_report, birman_report,
                                    copson_report, ground_state_step_check, hardy_report,
                                    integral_rhs_direct, pointwise_lemma_check,
                                    weighted_hardy_report)
from birmanlab.seq import Seq, nabla_pow, to_extended
from birmanlab.weights import (WeightTable, ground_state_table, power_V_table, rho_table)


def random_seq(rng, start, complex_=False, max_len=200):
    n = int(rng.integers(1, max_len + 1))
    vals = rng.standard_normal(n)
    if complex_:
        vals = vals + 1j * rng.standard_normal(n)
    return Seq(start + int(rng.integers(0, 5)), vals)


seeds = st.integers(0, 2**32 - 1)
exponents = st.floats(1.05, 6.0)


# pointwise ingredients ---------------------------------------------------

def test_pointwise_lemma_examples():
    z = np.array([0.3 + 2j, -1.5, 2.7j])
    assert np.all(pointwise_lemma_check(z, 0.0, 2.5) == 0)
    assert pointwise_lemma_check(2.0, 1.0, 2) == 1.0
    assert pointwise_lemma_check(1.0, 0.5, 2) == 0.0
    with pytest.raises(ValueError):
        pointwise_lemma_check(1.0, 1.5, 2)


@given(st.floats(-4, 4), st.floats(-4, 4), st.floats(0, 1), exponents)
def test_pointwise_lemma_nonnegative(x, y, t, p):
    z = complex(x, y)
    assert pointwise_lemma_check(z, t, p) >= -1e-14 * (1 + abs(z) ** p)


def test_ground_state_step_examples():
    g = ground_state_table(2, 0, 10)
    assert ground_state_step_check(Seq.delta(1), g, 2, 1) >= 0
    # u_{n-1} = 0: reduces to |u_n|^p (1 - ((g_n - g_{n-1})/g_n)^(p-1))
    u = Seq(3, [2.0])
    gv = g.values
    expected = 2.0 ** 2 * (1 - (gv[3] - gv[2]) / gv[3])
    assert ground_state_step_check(u, g, 2, 3) == pytest.approx(expected, rel=1e-14)


@given(seeds, exponents, st.floats(-4, 0.9))
def test_ground_state_step_random_complex(seed, p, alpha):
    rng = np.random.default_rng(seed)
    if not alpha < p - 1:
        alpha = 0.0
    g = ground_state_table(p, alpha, 12)
    u = Seq(1, rng.standard_normal(10) + 1j * rng.standard_normal(10))
    for n in range(1, 11):
        m = ground_state_step_check(u, g, p, n)
        scale = abs(u.entry(n)) ** p + abs(u.entry(n - 1)) ** p
        assert m >= -1e-12 * scale


def test_ground_state_step_rejects():
    bad = WeightTable(0, [0.0, 2.0, 1.0], "ground_state_g")
    with pytest.raises(MonotonicityError):
        ground_state_step_check(Seq.delta(1), bad, 2, 2)
    g = ground_state_table(2, 0, 5)
    with pytest.raises(SupportError):
        ground_state_step_check(Seq(0, [1.0, 1.0]), g, 2, 1)


# abstract proposition ----------------------------------------------------------

def test_abstract_affine_ground_state():
    n = np.arange(0, 30, dtype=float)
    g = WeightTable(0, n, "ground_state_g")
    V = WeightTable(0, np.ones(30), "power_V")
    u = Seq(1, np.arange(1.0, 8.0))
    rep = abstract_hardy_report(u, V, g, 2)
    # flux is constant, so the rho weight vanishes
    assert rep.rhs == 0 and rep.holds


def test_abstract_homogeneous():
    g = ground_state_table(2, -2, 40)
    V = power_V_table(-2, 40, "negative_alpha")
    u = Seq.delta(1)
    r1 = abstract_hardy_report(u, V, g, 2)
    r2 = abstract_hardy_report(-3.5 * u, V, g, 2)
    assert r2.lhs == pytest.approx(3.5 ** 2 * r1.lhs, rel=1e-14)
    assert r2.rhs == pytest.approx(3.5 ** 2 * r1.rhs, rel=1e-14)


def test_abstract_instantiation_delta2():
    g = ground_state_table(2, -2, 40)
    V = power_V_table(-2, 40, "negative_alpha")
    rep = abstract_hardy_report(Seq.delta(2), V, g, 2)
    assert rep.holds and rep.margin >= 0


@settings(max_examples=200)
@given(seeds, st.sampled_from([1.5, 2.0, 3.0]), st.sampled_from([-0.5, -2.0]))
def test_abstract_dominates_classical(seed, p, alpha):
    rng = np.random.default_rng(seed)
    u = Seq(2, rng.standard_normal(int(rng.integers(1, 60))))
    top = u.end + 3
    g = ground_state_table(p, alpha, top)
    V = power_V_table(alpha, top, "negative_alpha")
    rep = abstract_hardy_report(u, V, g, p)
    assert rep.holds
    classical = weighted_hardy_report(u, p, alpha)
    assert rep.rhs >= classical.constant * classical.rhs * (1 - 1e-12)
    # the table-based weight agrees with the closed form
    rho = rho_table(p, alpha, "negative_alpha", top)
    direct = sum(rho.at(n) * abs(u.entry(n)) ** p for n in range(2, u.end))
    assert rep.rhs == pytest.approx(direct, rel=1e-8)


def test_abstract_rejects():
    g = ground_state_table(2, 0, 10)
    V = WeightTable(0, -np.ones(11), "power_V")
    with pytest.raises(NegativeWeightError):
        abstract_hardy_report(Seq.delta(1), V, g, 2)
    with pytest.raises(SupportError):
        abstract_hardy_report(Seq(0, [1.0]), power_V_table(0, 10, "copson"), g, 2)
    bad_g = WeightTable(0, np.r_[0.0, np.ones(10)][::-1].copy(), "ground_state_g")
    with pytest.raises(MonotonicityError):
        abstract_hardy_report(Seq.delta(1), power_V_table(0, 10, "copson"), bad_g, 2)


# concrete inequalities -----------------------------------------------------------

def test_hardy_examples():
    rep = hardy_report(Seq.delta(1), 2)
    assert (rep.lhs, rep.rhs, rep.ratio) == (2.0, 1.0, 2.0)
    assert rep.constant == 0.25 and rep.holds
    assert hardy_report(-7.0 * Seq.delta(1), 2).ratio == 2.0
    with pytest.raises(SupportError):
        hardy_report(Seq(0, [1.0, 1.0]), 2)


def test_hardy_sqrt_profile():
    N = 10**4
    n = np.arange(1, N + 1, dtype=float)
    rep = hardy_report(Seq(1, np.sqrt(n)), 2)
    # the jump at the cut dominates; only the inequality itself is asserted
    assert rep.ratio >= 0.25
    # lhs is dominated by the final jump |u_N|^2 = N
    assert rep.ratio == pytest.approx(1022.0374, rel=1e-6)


def test_weighted_hardy_examples():
    rep = weighted_hardy_report(Seq.delta(1), 2, -2)
    assert rep.lhs == 1.25 and rep.rhs == 0.0625 and rep.ratio == 20.0
    assert rep.constant == 2.25 and "u1_nonzero" in rep.flags
    zero = weighted_hardy_report(Seq.zero(), 2, -2)
    assert zero.degenerate and math.isnan(zero.ratio) and zero.holds
    assert "u1_nonzero" not in weighted_hardy_report(Seq.delta(2), 2, -2).flags
    with pytest.raises(ValueError):
        weighted_hardy_report(Seq.delta(1), 2, 0.0)


def test_weighted_hardy_random():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        rep = weighted_hardy_report(random_seq(rng, 1), 2, -2)
        assert rep.margin >= -rep.tol


def test_copson_examples():
    u = Seq(1, [1.0, -2.0, 0.5])
    a, b = copson_report(u, 2.5, 0), hardy_report(u, 2.5)
    assert (a.lhs, a.rhs, a.constant) == (b.lhs, b.rhs, b.constant)
    rep = copson_report(Seq.delta(1), 2, 0.5)
    assert rep.lhs == pytest.approx(1 + 2 ** 0.5, rel=1e-15) and rep.rhs == 1.0
    assert rep.constant == pytest.approx(0.0625) and rep.ratio >= rep.constant
    assert rep.extra["improved_margin"] >= 0
    with pytest.raises(ValueError):
        copson_report(Seq.delta(1), 2, 1.0)
    with pytest.raises(ValueError):
        copson_report(Seq.delta(1), 2, -0.5)


def test_reduction_chain_bitwise():
    rng = np.random.default_rng(3)
    for _ in range(50):
        u = random_seq(rng, 1, complex_=bool(rng.integers(2)))
        p = float(rng.uniform(1.1, 5))
        c, h, b = copson_report(u, p, 0.0), hardy_report(u, p), birman_report(u, p, 1)
        assert c.lhs == h.lhs == b.lhs and c.rhs == h.rhs == b.rhs


def test_birman_examples():
    rep = birman_report(Seq.delta(2), 2, 2)
    assert rep.lhs == 6 and rep.rhs == 1 / 16
    assert rep.margin == 6 - (9 / 16) * (1 / 16)
    with pytest.raises(SupportError, match="u_1"):
        birman_report(Seq(1, [1.0, 1.0]), 2, 2)


def test_birman_extended_precision():
    u = Seq(3, [1.0, -0.5, 0.25, 2.0])
    d, e = birman_report(u, 2.5, 3), birman_report(to_extended(u), 2.5, 3)
    assert e.extended and e.holds
    assert float(e.lhs) == pytest.approx(d.lhs, rel=1e-14)
    assert e.tol < 1e-20 * float(e.lhs)


@settings(max_examples=200)
@given(seeds, exponents, st.integers(1, 4), st.booleans())
def test_p_homogeneity(seed, p, ell, cplx):
    rng = np.random.default_rng(seed)
    u = random_seq(rng, ell, cplx, max_len=50)
    c = complex(rng.standard_normal(), rng.standard_normal()) if cplx else float(rng.standard_normal())
    for rep_fn in (lambda s: birman_report(s, p, ell),
                   lambda s: copson_report(Seq(max(s.offset, 1), s.values), p, 0.3 * (p - 1))):
        r1, r2 = rep_fn(u), rep_fn(c * u)
        assert r2.ratio == pytest.approx(r1.ratio, rel=1e-13)


# integral form ---------------------------------------------------------------------

def test_integral_round_trip_delta3():
    u = Seq.delta(3)
    v = nabla_pow(u, 2)
    a, b = birman_integral_report(v, 2, 2), birman_report(u, 2, 2)
    assert a.lhs == pytest.approx(b.lhs, rel=1e-12)
    assert a.rhs == pytest.approx(b.rhs, rel=1e-10)
    assert "tail_zero" in a.flags
    assert solve_difference_eq(v, 2) == u


@settings(max_examples=100)
@given(seeds, st.sampled_from([1.3, 2.0, 3.5]), st.integers(1, 3))
def test_integral_matches_birman(seed, p, ell):
    rng = np.random.default_rng(seed)
    u = random_seq(rng, ell, max_len=40)
    v = nabla_pow(u, ell)
    a, b = birman_integral_report(v, p, ell), birman_report(u, p, ell)
    assert a.lhs == pytest.approx(b.lhs, rel=1e-10)
    assert a.rhs == pytest.approx(b.rhs, rel=1e-10)


def test_integral_delta1_tail():
    rep = birman_integral_report(Seq.delta(1), 2, 1)
    zeta2 = math.pi ** 2 / 6
    assert rep.extra["rhs_lower"] <= zeta2 <= rep.rhs
    assert rep.extra["tail_width"] < 1e-3 * zeta2
    assert rep.lhs == 1 and rep.holds


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_integral_tail_brackets_direct(ell):
    rng = np.random.default_rng(ell)
    v = Seq(ell, rng.standard_normal(15))
    rep = birman_integral_report(v, 2.5, ell)
    horizon = 20000
    direct = integral_rhs_direct(v, 2.5, ell, horizon)
    assert direct <= rep.rhs
    # the direct sum is itself truncated, so it can only fall short of the lower end
    assert rep.extra["rhs_lower"] <= direct * (1 + 1e-3)


def test_integral_zero_and_shift():
    assert birman_integral_report(Seq.zero(), 2, 2).degenerate
    # entries below ell are ignored
    a = birman_integral_report(Seq(0, [5.0, 1.0, 2.0]), 2, 2)
    b = birman_integral_report(Seq(2, [2.0]), 2, 2)
    assert a.lhs == b.lhs and a.rhs == b.rhs


def test_report_json():
    d = hardy_report(Seq.delta(1), 2).to_dict()
    assert set(d) >= {"lhs", "rhs", "ratio", "constant", "margin", "flags"}
    z = hardy_report(Seq.zero(), 2).to_dict()
    assert z["ratio"] is None and z["flags"] == ["degenerate"]


def test_constants_attached():
    assert birman_report(Seq.delta(3), 3, 3).constant == birman_constant(3, 3)
    assert weighted_hardy_report(Seq.delta(2), 3, -1).constant == copson_constant(3, -1)
