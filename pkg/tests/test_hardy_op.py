import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from birmanlab.hardy_op import (HardyOpSpec, adjoint_array, apply, apply_array, dense_matrix,
                                kernel, opnorm_estimate, opnorm_sweep, solve_difference_eq)
from birmanlab.seq import Seq, nabla_pow


def test_kernel_examples():
    assert all(kernel(n, k, 1) == 1 for n in range(1, 8) for k in range(1, n + 1))
    assert kernel(3, 1, 2) == 3
    assert kernel(4, 2, 3) == 6
    assert kernel(2, 5, 3) == 0


def test_apply_examples():
    spec = HardyOpSpec(1, 2, 10)
    out = apply(Seq(1, np.ones(10)), spec)
    assert np.allclose(out.values, 1, rtol=0, atol=1e-15)
    out = apply(Seq.delta(1), spec)
    assert np.allclose(out.window(1, 11), 1 / np.arange(1, 11), rtol=1e-15)
    out = apply(Seq.delta(1), HardyOpSpec(2, 2, 5))
    assert out.entry(3) == pytest.approx(3 / 16, rel=1e-15)
    with pytest.raises(ValueError):
        apply(Seq.delta(11), spec)
    with pytest.raises(ValueError):
        apply(Seq(0, [1.0]), spec)


@pytest.mark.parametrize("ell", [1, 2, 3, 4, 5])
def test_prefix_sums_equal_kernel(ell):
    size = 500
    rng = np.random.default_rng(ell)
    x = rng.standard_normal(size)
    n = np.arange(1, size + 1)
    direct = np.array([sum(kernel(m, k, ell) * x[k - 1] for k in range(1, m + 1))
                       for m in range(1, size + 1)]) / (n + ell - 1.0) ** ell
    fast = apply_array(x, ell)
    scale = np.abs(x) @ np.ones(size)
    assert np.allclose(fast, direct, rtol=1e-12, atol=1e-12 * scale / (n + ell - 1.0) ** ell * size ** (ell - 1))


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_dense_matrix_and_adjoint(ell):
    spec = HardyOpSpec(ell, 2, 40)
    A = dense_matrix(spec)
    rng = np.random.default_rng(0)
    x, w = rng.standard_normal(40), rng.standard_normal(40)
    assert np.allclose(A @ x, apply_array(x, ell), rtol=1e-12)
    assert np.allclose(A.T @ w, adjoint_array(w, ell), rtol=1e-12)


@given(st.lists(st.floats(0, 1e3), min_size=1, max_size=40), st.integers(1, 4))
def test_apply_preserves_nonnegativity(vals, ell):
    assert np.all(apply_array(np.array(vals), ell) >= 0)


def test_solve_examples():
    u = solve_difference_eq(Seq.delta(2), 2, stop=20)
    assert np.array_equal(u.window(2, 20), np.arange(1, 19))
    assert nabla_pow(u, 2).window(0, 20).tolist() == Seq.delta(2).window(0, 20).tolist()
    u = solve_difference_eq(Seq.delta(1), 1, stop=10)
    assert u.window(1, 10).tolist() == [1.0] * 9
    with pytest.raises(ValueError):
        solve_difference_eq(Seq.delta(1), 2)


@settings(max_examples=50)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=8))
def test_solve_round_trip_exact(ints):
    v = Seq(3, np.array(ints, dtype=float))
    if v.is_zero:
        return
    # past the support u_n is a polynomial; cutting it changes nabla^3 only beyond the cut
    stop = v.end + 5
    u = solve_difference_eq(v, 3, stop=stop)
    assert np.array_equal(nabla_pow(u, 3).window(0, stop), v.window(0, stop))


def test_spec_validation():
    with pytest.raises(ValueError):
        HardyOpSpec(0, 2, 10)
    with pytest.raises(ValueError):
        HardyOpSpec(1, 1.0, 10)
    with pytest.raises(ValueError):
        HardyOpSpec(1, 2, 0)
    assert HardyOpSpec(2, 2, 5).bound == pytest.approx(4 / 3)
    with pytest.raises(ValueError):
        opnorm_estimate(HardyOpSpec(1, 2, 5), tol=0)


def test_opnorm_size_one():
    for ell in (1, 2, 3):
        res = opnorm_estimate(HardyOpSpec(ell, 2.5, 1))
        assert res.norm == pytest.approx(1 / ell ** ell, rel=1e-14)


def test_opnorm_classical_truncation():
    res = opnorm_estimate(HardyOpSpec(1, 2, 10**4))
    assert 1.5 < res.norm < 2.0 and res.converged
    assert res.maximizer.offset == 1 and np.all(res.maximizer.values > 0)


@pytest.mark.parametrize("ell", [1, 2])
def test_opnorm_matches_dense_svd(ell):
    spec = HardyOpSpec(ell, 2, 200)
    res = opnorm_estimate(spec, tol=1e-14, max_iter=100_000)
    sigma = np.linalg.norm(dense_matrix(spec), 2)
    assert res.norm == pytest.approx(sigma, rel=1e-8)


def test_opnorm_lower_bound_for_p_ne_2():
    # any vector gives a lower bound; the iteration must do at least as well as its start
    spec = HardyOpSpec(1, 3, 300)
    res = opnorm_estimate(spec)
    n = np.arange(1, 301.0)
    x = n ** (-1 / 3 - 0.01)
    start = np.sum(np.abs(apply_array(x, 1)) ** 3) ** (1 / 3) / np.sum(x ** 3) ** (1 / 3)
    assert res.norm >= start


def test_opnorm_max_iter_flag():
    res = opnorm_estimate(HardyOpSpec(1, 2, 1000), tol=1e-300, max_iter=2)
    assert not res.converged and res.iters == 2


@pytest.mark.parametrize("p, ell, bound", [(2, 1, 2.0), (2, 2, 4 / 3), (3, 1, 1.5)])
def test_sweep_examples(p, ell, bound):
    recs = opnorm_sweep(p, ell, [100, 1000, 10000])
    assert all(r.bound == pytest.approx(bound) for r in recs)
    assert all(r.value <= bound * (1 + 1e-9) for r in recs)
    assert all(b.value >= a.value for a, b in zip(recs, recs[1:]))
    gaps = [r.gap for r in recs]
    assert all(g > 0 for g in gaps) and gaps == sorted(gaps, reverse=True)


def test_sweep_rejects_unsorted():
    with pytest.raises(ValueError):
        opnorm_sweep(2, 1, [1000, 100])
