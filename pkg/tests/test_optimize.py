import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from circhad.core import PhaseVector, fixture, hadamard_eigenvalues, is_real_symmetric
from circhad.optimize import (KINDS, CriticalPoint, OptimizerConfig, Parametrization,
                              ac_restriction_compare, canonical_orbit_form, embed,
                              find_critical_points, gap_scan, gap_scan_csv, minimize_phi,
                              n8_closed_form, n8_xy_form, orbit_representatives,
                              parity_conjecture_check, residual, start_points,
                              verify_named_minima)
from circhad.phi import phi_decompose, phi_fast, phi_gradient, phi_naive, phi_parts, twisted

angle = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)
QUICK = OptimizerConfig(starts=24, seed=3)


def critical_point(q):
    pv = PhaseVector.from_complex(q) if np.iscomplexobj(q) else q
    parts = phi_parts(pv)
    return CriticalPoint(pv, phi_fast(pv), parts, float(np.max(np.abs(parts.imag))))


# --- parametrizations ---

def test_param_counts():
    assert Parametrization("full_torus", 5).n_params == 4
    assert Parametrization("real_symmetric", 8).n_params == 3
    assert Parametrization("real_symmetric", 6).n_params == 2
    assert Parametrization("half_symmetric_ac", 12).n_params == 3


def test_param_errors():
    with pytest.raises(ValueError):
        Parametrization("real_symmetric", 5)
    with pytest.raises(ValueError):
        Parametrization("half_symmetric_ac", 6)
    with pytest.raises(ValueError):
        Parametrization("spiral", 4)
    with pytest.raises(ValueError):
        embed([0.0, 1.0], "real_symmetric", 8)


def test_embed_examples():
    np.testing.assert_allclose(embed([math.pi / 2], "real_symmetric", 4).q, [1, 1j, 1, -1j], atol=1e-15)
    np.testing.assert_allclose(embed([0, 0, 0], "real_symmetric", 8).q, np.ones(8))
    a, b, c = 0.3, 1.1, -0.7
    q = embed([a, b, c], "real_symmetric", 8).q
    e = np.exp
    np.testing.assert_allclose(q, [1, e(1j * a), e(1j * b), e(1j * c), 1, e(-1j * c), e(-1j * b), e(-1j * a)])
    q = embed([a, b], "half_symmetric_ac", 8).q
    np.testing.assert_allclose(q, [1, e(1j * a), e(1j * b), e(1j * a), 1, e(-1j * a), e(-1j * b), e(-1j * a)])


def test_ac_layout_n12():
    a1, a2, b = 0.2, 0.9, -1.3
    full = embed([a1, a2, b, a2, a1], "real_symmetric", 12)
    np.testing.assert_allclose(embed([a1, a2, b], "half_symmetric_ac", 12).angles, full.angles)


@given(st.integers(1, 8).flatmap(lambda m: st.lists(angle, min_size=m - 1, max_size=m - 1)
                                   .map(lambda p: (2 * m, p))))
def test_embed_real_symmetric(case):
    n, params = case
    pv = embed(params, "real_symmetric", n)
    assert is_real_symmetric(pv, 1e-12)
    assert pv.q[0] == 1 and abs(pv.q[n // 2] - 1) < 1e-15


@given(st.lists(angle, min_size=3, max_size=3))
def test_embed_ac_real_symmetric(params):
    assert is_real_symmetric(embed(params, "half_symmetric_ac", 12), 1e-12)


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(starts=0)
    with pytest.raises(ValueError):
        OptimizerConfig(backtrack=1.0)
    with pytest.raises(ValueError):
        OptimizerConfig(grad_tol=0)


def test_start_points_deterministic():
    cfg = OptimizerConfig(starts=5, seed=9)
    np.testing.assert_array_equal(start_points(cfg, 3), start_points(cfg, 3))
    assert not np.array_equal(start_points(cfg, 3), start_points(OptimizerConfig(starts=5, seed=10), 3))


# --- minimization ---

@pytest.mark.parametrize("kind", KINDS)
def test_minimize_n4(kind):
    res = minimize_phi(4, kind, QUICK)
    assert res.best_value == pytest.approx(16.0, abs=1e-6)
    assert res.gap == pytest.approx(0.0, abs=1e-6)
    assert res.n_converged >= 1


def test_minimize_n8_symmetric():
    res = minimize_phi(8, "real_symmetric", OptimizerConfig(starts=32, seed=1))
    assert res.best_value == pytest.approx(256 / 3, abs=1e-6)
    assert np.linalg.norm(phi_gradient(res.best_point)) < 1e-8


def test_minimize_deterministic():
    a = minimize_phi(6, "real_symmetric", QUICK, keep_starts=True)
    b = minimize_phi(6, "real_symmetric", QUICK, keep_starts=True)
    assert a.best_value == b.best_value
    assert a.per_start == b.per_start
    assert a.best_point == b.best_point


def test_minimize_respects_bound():
    for n in (2, 3, 5, 6):
        res = minimize_phi(n, "full_torus", QUICK, keep_starts=True)
        assert min(res.per_start) >= n * n - 1e-8


def test_minimize_full_torus_reaches_hadamard():
    # circulant complex Hadamard matrices exist at these N
    for n in (2, 3, 5, 6):
        assert minimize_phi(n, "full_torus", QUICK).gap == pytest.approx(0.0, abs=1e-8)


def test_restriction_monotone():
    cfg = OptimizerConfig(starts=16, seed=2)
    full = minimize_phi(8, "full_torus", cfg).best_value
    sym = minimize_phi(8, "real_symmetric", cfg).best_value
    ac = minimize_phi(8, "half_symmetric_ac", cfg).best_value
    assert full <= sym + 1e-6 and sym <= ac + 1e-6


def test_minimize_errors():
    with pytest.raises(ValueError):
        minimize_phi(1)


def test_min_result_json():
    d = minimize_phi(4, "real_symmetric", QUICK).to_json()
    assert {"n", "kind", "best_value", "gap", "n_converged", "best_point"} <= set(d)


# --- named points and closed forms ---

@pytest.mark.parametrize("which,value", [("N4", 16.0), ("N8", 256 / 3), ("N12", 162.0)])
def test_named_minima(which, value):
    assert verify_named_minima(which) == pytest.approx(value, abs=1e-8)


def test_named_minima_unknown():
    with pytest.raises(KeyError):
        verify_named_minima("N16")


def test_n8_closed_form_examples():
    assert n8_closed_form(0, 0, 0) == pytest.approx(512.0)
    acos = math.acos(1 / math.sqrt(3))
    assert n8_closed_form(-acos, math.pi, -acos) == pytest.approx(256 / 3, abs=1e-10)


@given(angle, angle, angle)
def test_n8_closed_form_matches_naive(a, b, c):
    assert n8_closed_form(a, b, c) == pytest.approx(phi_naive(embed([a, b, c], "real_symmetric", 8)), abs=1e-8)


def test_n8_xy_examples():
    phi, sq = n8_xy_form(-2 / 3, -2)
    assert sq == pytest.approx(0.0, abs=1e-14)
    assert phi == pytest.approx(256 / 3, abs=1e-12)
    assert n8_xy_form(2, 2)[0] == pytest.approx(512.0)


def test_n8_xy_grid():
    for x in np.linspace(-2, 2, 100):
        for y in np.linspace(-2, 2, 100):
            n8_xy_form(x, y)  # raises on mismatch


@given(angle, angle)
def test_n8_xy_matches_naive(a, b):
    phi, _ = n8_xy_form(2 * math.cos(2 * a), 2 * math.cos(b))
    assert phi == pytest.approx(phi_naive(embed([a, b], "half_symmetric_ac", 8)), abs=1e-8)


# --- critical points ---

def test_critical_points_n2():
    pts = find_critical_points(2, cfg=OptimizerConfig(starts=64, seed=0))
    q1 = sorted((round(float(np.angle(p.q.q[1]) / (math.pi / 2))) % 4) for p in pts)
    assert q1 == [0, 1, 2, 3]
    assert all(abs(p.q.q[0] - 1) < 1e-12 for p in pts)


def test_critical_points_residuals():
    cfg = OptimizerConfig(starts=64, seed=4)
    for cp in find_critical_points(4, cfg=cfg):
        assert cp.residual < 1e-10
        assert np.linalg.norm(phi_gradient(cp.q)) < 1e-9
        assert cp.phi_value >= 16 - 1e-8


def test_critical_points_real_symmetric_kind():
    for cp in find_critical_points(8, "real_symmetric", OptimizerConfig(starts=32, seed=0)):
        assert is_real_symmetric(cp.q, 1e-9)


def test_critical_points_reject_ac():
    with pytest.raises(ValueError):
        find_critical_points(8, "half_symmetric_ac")


@pytest.mark.parametrize("name", ["K4", "F2tilde", "Ftilde3", "Ftilde5", "BF6"])
def test_hadamard_points_pass_residual(name):
    pv = hadamard_eigenvalues(fixture(name))
    assert residual(pv) < 1e-10


@given(st.lists(angle, min_size=5, max_size=5), st.integers(0, 4), st.integers(0, 4), angle)
def test_canonical_orbit_invariant(a, r, t, lam):
    base = canonical_orbit_form(PhaseVector(a), decimals=5)
    pv = PhaseVector(np.roll(a, r) + lam)
    for _ in range(t):
        pv = twisted(pv)
    assert canonical_orbit_form(pv, decimals=5) == base


def test_orbit_representatives_n3():
    pts = find_critical_points(3, cfg=OptimizerConfig(starts=128, seed=0))
    reps = orbit_representatives(pts)
    assert len(reps) < len(pts)
    assert sorted({round(p.phi_value, 6) for p in reps}) == [9.0, 11.0, 27.0]


# --- conjecture checkers ---

def test_parity_examples():
    assert parity_conjecture_check(critical_point(hadamard_eigenvalues(fixture("BF6"))))
    assert parity_conjecture_check(critical_point(np.array([1, 1j])))


def test_parity_counterexample_n4():
    # q_k = exp(i pi k / 4) is critical with parts (4, 8, 8, 4)
    q = np.exp(1j * np.pi * np.arange(4) / 4)
    cp = critical_point(q)
    assert cp.residual < 1e-12
    np.testing.assert_allclose(cp.parts, [4, 8, 8, 4], atol=1e-12)
    assert not parity_conjecture_check(cp)


def test_parity_needs_critical_point():
    with pytest.raises(ValueError):
        parity_conjecture_check(critical_point(np.exp(1j * np.array([0.0, 0.4, 1.1]))))


def test_ac_compare_n4():
    full, ac = ac_restriction_compare(4, QUICK)
    assert full == pytest.approx(16.0, abs=1e-6) and ac == pytest.approx(16.0, abs=1e-6)
    with pytest.raises(ValueError):
        ac_restriction_compare(6, QUICK)


def test_gap_scan():
    rows = gap_scan(8, OptimizerConfig(starts=32, seed=0))
    assert [r["N"] for r in rows] == [2, 4, 6, 8]
    by_n = {r["N"]: r for r in rows}
    assert by_n[4]["gap"] == pytest.approx(0.0, abs=1e-6)
    assert by_n[8]["gap"] == pytest.approx(64 / 3, abs=1e-6)
    assert all(r["gap"] >= -1e-6 for r in rows)
    text = gap_scan_csv(rows)
    assert text.splitlines()[0] == "N,min_phi,gap,converged_starts"
    assert len(text.splitlines()) == 5
    with pytest.raises(ValueError):
        gap_scan(3)
