import itertools

import numpy as np
import pytest

from minmaxent import (
    HermitianOperator,
    HermitianSdp,
    SdpSolution,
    check_certificate,
    hermitian_basis,
    random_density,
    solve,
)


def herm(mat) -> HermitianOperator:
    return HermitianOperator(np.asarray(mat, dtype=complex))


def domination_problem(rho: np.ndarray) -> HermitianSdp:
    """min tr(sigma) s.t. sigma >= rho, as diag(sigma, slack) with slack = sigma - rho."""
    d = rho.shape[0]
    n = 2 * d
    cmat = np.zeros((n, n), dtype=complex)
    cmat[:d, :d] = np.eye(d)
    cons = []
    for bk in hermitian_basis(d):
        amat = np.zeros((n, n), dtype=complex)
        amat[:d, :d] = -bk
        amat[d:, d:] = bk
        cons.append((herm(amat), -float(np.trace(bk @ rho).real)))
    return HermitianSdp(herm(cmat), tuple(cons))


def double_domination_problem(m1: np.ndarray, m2: np.ndarray) -> HermitianSdp:
    """min tr(sigma) s.t. sigma >= m1 and sigma >= m2 (two slack blocks)."""
    d = m1.shape[0]
    n = 3 * d
    cmat = np.zeros((n, n), dtype=complex)
    cmat[:d, :d] = np.eye(d)
    cons = []
    for target, mat in ((1, m1), (2, m2)):
        lo, hi = target * d, (target + 1) * d
        for bk in hermitian_basis(d):
            amat = np.zeros((n, n), dtype=complex)
            amat[:d, :d] = -bk
            amat[lo:hi, lo:hi] = bk
            cons.append((herm(amat), -float(np.trace(bk @ mat).real)))
    return HermitianSdp(herm(cmat), tuple(cons))


def grid_search_double_domination(m1: np.ndarray, m2: np.ndarray) -> float:
    """Refined grid search over 2x2 Hermitian sigma = [[a, c+di], [c-di, b]].

    Scans the four real parameters on a shrinking grid (final cell below
    1e-5) keeping the best feasible point; feasibility is checked exactly
    through eigenvalues, so every reported value is an upper bound.
    """

    def feasible(sig: np.ndarray) -> bool:
        return (
            np.linalg.eigvalsh(sig - m1)[0] >= -1e-12
            and np.linalg.eigvalsh(sig - m2)[0] >= -1e-12
        )

    center = np.array([1.0, 1.0, 0.0, 0.0])
    width = 1.6
    best_val, best_pt = np.inf, center
    while width > 2.5e-5:
        axes = [np.linspace(c - width, c + width, 9) for c in center]
        for a, b, c, d in itertools.product(*axes):
            if a + b >= best_val:
                continue
            sig = np.array([[a, c + 1j * d], [c - 1j * d, b]])
            if feasible(sig):
                best_val, best_pt = a + b, np.array([a, b, c, d])
        center, width = best_pt, width / 2.0
    return float(best_val)


class TestSolve:
    def test_scalar_bound(self):
        # min x s.t. x >= 3, slack block keeps the cone one-dimensional
        p = HermitianSdp(
            herm(np.diag([1.0, 0.0])), ((herm(np.diag([1.0, -1.0])), 3.0),)
        )
        sol = solve(p)
        assert sol.status == "optimal"
        assert sol.primal_value == pytest.approx(3.0, abs=1e-7)
        assert sol.X_star.mat[0, 0].real == pytest.approx(3.0, abs=1e-6)

    def test_domination_by_psd_matrix(self):
        rho = random_density(3, 7).mat
        sol = solve(domination_problem(rho))
        assert sol.status == "optimal"
        assert sol.primal_value == pytest.approx(1.0, abs=1e-7)
        assert np.max(np.abs(sol.X_star.mat[:3, :3] - rho)) <= 1e-6

    def test_double_domination_matches_grid_search(self):
        m1 = np.diag([0.7, 0.2]).astype(complex)
        m2 = np.array([[0.3, 0.2], [0.2, 0.3]], dtype=complex)
        sol = solve(double_domination_problem(m1, m2))
        assert sol.status == "optimal"
        oracle = grid_search_double_domination(m1, m2)
        assert sol.primal_value == pytest.approx(oracle, abs=1e-4)
        # closed form for two 2x2 constraints: tr(m2) + tr of positive part
        w = np.linalg.eigvalsh(m1 - m2)
        closed = float(np.trace(m2).real + np.sum(w[w > 0]))
        assert sol.primal_value == pytest.approx(closed, abs=1e-7)

    def test_strictly_feasible_start_is_used(self):
        rho = random_density(2, 8).mat
        p = domination_problem(rho)
        x0 = np.zeros((4, 4), dtype=complex)
        x0[:2, :2] = 2.0 * np.eye(2)
        x0[2:, 2:] = 2.0 * np.eye(2) - rho
        sol = solve(p, x0=herm(x0))
        assert sol.status == "optimal"
        assert sol.primal_value == pytest.approx(1.0, abs=1e-7)

    def test_weak_duality_and_certificate_invariants(self):
        for seed in range(6):
            sol = solve(domination_problem(random_density(3, 100 + seed).mat))
            assert sol.status == "optimal"
            assert sol.dual_value <= sol.primal_value + 1e-9
            assert abs(sol.gap) <= 1e-7 * (1.0 + abs(sol.primal_value))
            assert np.linalg.eigvalsh(sol.X_star.mat)[0] >= -1e-7
            assert np.linalg.eigvalsh(sol.Z_star.mat)[0] >= -1e-7

    def test_determinism(self):
        p = domination_problem(random_density(3, 9).mat)
        a, b = solve(p), solve(p)
        assert a.X_star.mat.tobytes() == b.X_star.mat.tobytes()
        assert a.y_star.tobytes() == b.y_star.tobytes()
        assert a.primal_value == b.primal_value

    def test_scale_covariance(self):
        rho = random_density(3, 10).mat
        p1 = domination_problem(rho)
        scaled = HermitianSdp(herm(3.5 * p1.objective.mat), p1.constraints)
        v1 = solve(p1).primal_value
        v2 = solve(scaled).primal_value
        assert v2 == pytest.approx(3.5 * v1, rel=1e-7)

    def test_max_iterations_status(self):
        sol = solve(domination_problem(random_density(3, 11).mat), max_iterations=2)
        assert sol.status == "max_iterations"

    def test_weak_duality_holds_for_every_status(self):
        p = domination_problem(random_density(3, 15).mat)
        for cap in (1, 3, 5, 200):
            sol = solve(p, max_iterations=cap)
            assert sol.dual_value <= sol.primal_value + 1e-9

    def test_infeasible_detected(self):
        # tr(X e11) = -1 is impossible for X >= 0, dual ray diverges
        a = np.zeros((2, 2), dtype=complex)
        a[0, 0] = 1.0
        p = HermitianSdp(herm(np.eye(2)), ((herm(a), -1.0),))
        sol = solve(p)
        assert sol.status == "infeasible_suspected"

    def test_linearly_dependent_constraints_rejected(self):
        a = herm(np.eye(2))
        with pytest.raises(ValueError, match="dependent"):
            HermitianSdp(herm(np.eye(2)), ((a, 1.0), (a, 2.0)))

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            HermitianSdp(herm(np.eye(2)), ((herm(np.eye(3)), 1.0),))


class TestCertificate:
    def test_clean_solution_has_small_residuals(self):
        p = domination_problem(random_density(3, 12).mat)
        report = check_certificate(p, solve(p))
        assert report.constraint_residual <= 1e-7
        assert report.dual_residual <= 1e-7
        assert report.min_eig_X >= -1e-7
        assert report.min_eig_Z >= -1e-7
        assert report.weak_duality_violation == 0.0
        assert report.value_mismatch <= 1e-9

    def test_corrupted_primal_is_flagged(self):
        p = domination_problem(random_density(3, 13).mat)
        sol = solve(p)
        bad = sol.X_star.mat.copy()
        bad[0, 0] += 0.1
        corrupted = SdpSolution(
            X_star=HermitianOperator(bad),
            y_star=sol.y_star,
            Z_star=sol.Z_star,
            primal_value=sol.primal_value,
            dual_value=sol.dual_value,
            gap=sol.gap,
            status=sol.status,
            iterations=sol.iterations,
        )
        report = check_certificate(p, corrupted)
        assert report.constraint_residual > 1e-3

    def test_injected_duality_violation_is_flagged(self):
        p = domination_problem(random_density(3, 14).mat)
        sol = solve(p)
        forged = SdpSolution(
            X_star=sol.X_star,
            y_star=sol.y_star,
            Z_star=sol.Z_star,
            primal_value=sol.primal_value,
            dual_value=sol.primal_value + 1e-5,
            gap=-1e-5,
            status=sol.status,
            iterations=sol.iterations,
        )
        report = check_certificate(p, forged)
        assert report.weak_duality_violation > 1e-6
