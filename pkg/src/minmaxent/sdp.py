"""Self-contained primal-dual interior-point solver for dense Hermitian SDPs.

Solves   minimize    tr(C X)
         subject to  tr(A_i X) = b_i,   i = 1..m,
                     X >= 0   (complex Hermitian positive semidefinite)

together with the dual

         maximize    b' y
         subject to  Z = C - sum_i y_i A_i >= 0.

The complex problem is mapped onto its real symmetric embedding
H -> [[Re H, -Im H], [Im H, Re H]], which doubles eigenvalue
multiplicities and inner products; objective and dual data are mapped
back after the solve.  The iteration is an infeasible-start
path-following method with Nesterov-Todd scaling and a Mehrotra-style
adaptive centering parameter.  Inequalities are not supported directly;
callers encode them through slack blocks inside a block-diagonal
variable, which keeps one code path for everything.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import HermitianOperator

__all__ = [
    "HermitianSdp",
    "SdpSolution",
    "CertificateReport",
    "SolverError",
    "solve",
    "check_certificate",
    "STATUS_OPTIMAL",
    "STATUS_MAX_ITERATIONS",
    "STATUS_INFEASIBLE_SUSPECTED",
]

STATUS_OPTIMAL = "optimal"
STATUS_MAX_ITERATIONS = "max_iterations"
STATUS_INFEASIBLE_SUSPECTED = "infeasible_suspected"

# Stopping targets (relative gap and residuals), the looser thresholds at
# which a stalled iterate is still accepted as optimal, and the iterate
# norm beyond which the problem is suspected infeasible/unbounded.
DEFAULT_TOL = 1e-9
ACCEPT_TOL = 1e-7
DIVERGENCE_LIMIT = 1e12
GRAM_RANK_TOL = 1e-10
STEP_FRACTION = 0.98


class SolverError(RuntimeError):
    """Raised by callers when a solve does not reach an optimal certificate."""

    def __init__(self, message: str, solution: "SdpSolution | None" = None):
        super().__init__(message)
        self.solution = solution


@dataclass(frozen=True, eq=False)
class HermitianSdp:
    """Equality-constrained SDP data: minimize tr(C X) s.t. tr(A_i X) = b_i, X >= 0.

    All operators share one dimension and the A_i must be linearly
    independent as real vectors, which is checked at construction via the
    spectrum of their Gram matrix.
    """

    objective: HermitianOperator
    constraints: tuple[tuple[HermitianOperator, float], ...]

    def __post_init__(self) -> None:
        cons = tuple((a, float(b)) for a, b in self.constraints)
        if not cons:
            raise ValueError("at least one constraint is required")
        n = self.objective.dim
        for i, (a, _) in enumerate(cons):
            if a.dim != n:
                raise ValueError(f"constraint {i} has dimension {a.dim}, expected {n}")
        vecs = np.stack(
            [np.concatenate([a.mat.real.ravel(), a.mat.imag.ravel()]) for a, _ in cons]
        )
        gram = vecs @ vecs.T
        evals = np.linalg.eigvalsh(gram)
        if evals[0] <= GRAM_RANK_TOL * max(1.0, evals[-1]):
            raise ValueError("constraint operators are linearly dependent")
        object.__setattr__(self, "constraints", cons)

    @property
    def dim(self) -> int:
        return self.objective.dim

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)


@dataclass(frozen=True, eq=False)
class SdpSolution:
    """Matched primal/dual certificate returned by solve().

    primal_value is the infeasibility-compensated objective
    tr(C X) + y'(b - A(X)); it coincides with tr(C X) up to rounding
    whenever the constraint residual is at rounding level, and stays an
    accurate optimum estimate when a degenerate face leaves a small
    residual floor that large multipliers would otherwise amplify.
    """

    X_star: HermitianOperator
    y_star: np.ndarray
    Z_star: HermitianOperator
    primal_value: float
    dual_value: float
    gap: float
    status: str
    iterations: int


@dataclass(frozen=True)
class CertificateReport:
    """Residuals of a solution, recomputed from scratch (solver-independent)."""

    constraint_residual: float
    dual_residual: float
    min_eig_X: float
    min_eig_Z: float
    primal_value: float
    dual_value: float
    gap: float
    value_mismatch: float
    weak_duality_violation: float


def _embed(h: np.ndarray) -> np.ndarray:
    return np.block([[h.real, -h.imag], [h.imag, h.real]])


def _unembed(s: np.ndarray, n: int) -> np.ndarray:
    re = 0.5 * (s[:n, :n] + s[n:, n:])
    im = 0.5 * (s[n:, :n] - s[:n, n:])
    m = re + 1j * im
    return 0.5 * (m + m.conj().T)


def _chol_psd(s: np.ndarray) -> np.ndarray:
    scale = max(float(np.trace(s)) / s.shape[0], 1e-300)
    for shift in (0.0, 1e-14, 1e-12, 1e-10, 1e-8, 1e-6):
        try:
            return np.linalg.cholesky(s + shift * scale * np.eye(s.shape[0]))
        except np.linalg.LinAlgError:
            continue
    raise np.linalg.LinAlgError("matrix is not positive definite")


def _max_step(s: np.ndarray, d: np.ndarray, fraction: float) -> float:
    """Largest alpha <= 1 with s + alpha*d staying (fraction-)inside the cone.

    The Cholesky-based estimate can overshoot when s is nearly singular
    (the factor may carry a stabilizing shift), so the returned step is
    verified against an exact eigenvalue check and shrunk if needed.
    """
    ell = _chol_psd(s)
    y = scipy.linalg.solve_triangular(ell, d, lower=True)
    y = scipy.linalg.solve_triangular(ell, y.T, lower=True)
    wmin = float(np.linalg.eigvalsh(0.5 * (y + y.T))[0])
    alpha = 1.0 if wmin >= -1e-14 else min(1.0, -fraction / wmin)
    for _ in range(60):
        if alpha < 1e-14 or np.linalg.eigvalsh(s + alpha * d)[0] > 0.0:
            break
        alpha *= 0.8
    return alpha


def solve(
    problem: HermitianSdp,
    x0: HermitianOperator | None = None,
    tol: float = DEFAULT_TOL,
    max_iterations: int = 200,
    step_fraction: float = STEP_FRACTION,
) -> SdpSolution:
    """Run the interior-point iteration and return a matched certificate.

    x0 optionally supplies a strictly feasible primal start (it must be
    strictly positive definite; equality residuals then stay at rounding
    level throughout).  On optimal certificates the dual value exceeds the
    primal by at most 1e-7 * (1 + |primal| + |dual|), and by at most 1e-9
    away from degenerate optimal faces; identical problem data yields
    identical output.
    """
    nc = problem.dim
    n = 2 * nc
    m = problem.n_constraints
    c_h = problem.objective.mat
    cmat = _embed(c_h)
    amats = np.stack([_embed(a.mat) for a, _ in problem.constraints])
    aflat = amats.reshape(m, n * n)
    b = 2.0 * np.array([bi for _, bi in problem.constraints])

    def a_op(x: np.ndarray) -> np.ndarray:
        return aflat @ x.ravel()

    def a_adj(y: np.ndarray) -> np.ndarray:
        return (y @ aflat).reshape(n, n)

    anorms = np.linalg.norm(aflat, axis=1)
    norm_b = float(np.linalg.norm(b))
    norm_c = float(np.linalg.norm(cmat))

    if x0 is not None:
        if x0.dim != nc:
            raise ValueError(f"x0 has dimension {x0.dim}, expected {nc}")
        x = _embed(x0.mat)
        if np.linalg.eigvalsh(x)[0] <= 1e-14:
            x = max(1.0, np.sqrt(n)) * np.eye(n)
    else:
        tau_p = max(1.0, np.sqrt(n), n * float(np.max((1.0 + np.abs(b)) / (1.0 + anorms))))
        x = tau_p * np.eye(n)
    tau_d = max(1.0, np.sqrt(n), norm_c, float(np.max(anorms)))
    z = tau_d * np.eye(n)
    y = np.zeros(m)

    eye_n = np.eye(n)
    status = STATUS_MAX_ITERATIONS
    iterations = 0
    stall = 0

    def gap_ok(pv: float, dv: float) -> bool:
        # on degenerate optimal faces the primal residual keeps a ~1e-9
        # floor that can leave dv marginally above pv; accept once the gap
        # is within the certificate tolerance in absolute value
        return dv <= pv + 1e-9 or abs(pv - dv) <= ACCEPT_TOL * (1.0 + abs(pv) + abs(dv))

    for it in range(1, max_iterations + 1):
        iterations = it
        rp = b - a_op(x)
        rd = cmat - z - a_adj(y)
        xz = float(np.sum(x * z))
        mu = xz / n
        # infeasibility-compensated objective (the Lagrangian value): when
        # the residual floor is paid for by large multipliers, tr(C X)
        # alone underestimates the optimum by y'(b - A(X))
        pv = float(np.sum(cmat * x)) + float(y @ rp)
        dv = float(b @ y)
        pinf = float(np.linalg.norm(rp)) / (1.0 + norm_b)
        dinf = float(np.linalg.norm(rd)) / (1.0 + norm_c)
        relgap = xz / (1.0 + abs(pv) + abs(dv))

        if pinf <= tol and dinf <= tol and relgap <= tol and gap_ok(pv, dv):
            status = STATUS_OPTIMAL
            break
        if max(np.abs(x).max(), np.abs(z).max(), np.abs(y).max() if m else 0.0) > DIVERGENCE_LIMIT:
            status = STATUS_INFEASIBLE_SUSPECTED
            break

        # Nesterov-Todd scaling point W with W Z W = X.
        try:
            lx = _chol_psd(x)
        except np.linalg.LinAlgError:
            break
        mid = lx.T @ z @ lx
        wmid, qmid = np.linalg.eigh(0.5 * (mid + mid.T))
        wmid = np.clip(wmid, 1e-300, None)
        t = lx @ qmid
        w = (t * wmid**-0.5) @ t.T
        w = 0.5 * (w + w.T)

        waw = w @ amats @ w
        schur = aflat @ waw.reshape(m, n * n).T
        schur = 0.5 * (schur + schur.T)
        try:
            schur_fac = scipy.linalg.cho_factor(
                schur + 1e-14 * max(float(np.trace(schur)) / m, 1.0) * np.eye(m)
            )
        except np.linalg.LinAlgError:
            schur_fac = None

        def solve_schur(rhs: np.ndarray) -> np.ndarray:
            if schur_fac is None:
                return np.linalg.lstsq(schur, rhs, rcond=None)[0]
            dy = scipy.linalg.cho_solve(schur_fac, rhs)
            # two rounds of iterative refinement against the unregularized
            # Schur matrix; near the optimum it is severely ill-conditioned
            for _ in range(2):
                dy = dy + scipy.linalg.cho_solve(schur_fac, rhs - schur @ dy)
            return dy

        def newton(rc: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
            rhs = rp + a_op(w @ rd @ w) - a_op(rc)
            dy = solve_schur(rhs)
            dz = rd - a_adj(dy)
            dx = rc - w @ dz @ w
            return 0.5 * (dx + dx.T), dy, 0.5 * (dz + dz.T)

        # Predictor: pure affine step fixes the centering parameter.
        dxa, _, dza = newton(-x)
        ap = _max_step(x, dxa, step_fraction)
        ad = _max_step(z, dza, step_fraction)
        mu_aff = max(0.0, float(np.sum((x + ap * dxa) * (z + ad * dza)))) / n
        sigma = min(1.0, max(1e-10, (mu_aff / mu) ** 3)) if mu > 0 else 0.0

        # Corrector: recenter toward sigma*mu on the same factorization.
        lz = _chol_psd(z)
        zinv = scipy.linalg.cho_solve((lz, True), eye_n)
        zinv = 0.5 * (zinv + zinv.T)
        dx, dy, dz = newton(sigma * mu * zinv - x)
        ap = _max_step(x, dx, step_fraction)
        ad = _max_step(z, dz, step_fraction)

        x = 0.5 * ((x + ap * dx) + (x + ap * dx).T)
        y = y + ad * dy
        z = 0.5 * ((z + ad * dz) + (z + ad * dz).T)

        if ap < 1e-10 and ad < 1e-10:
            stall += 1
            if stall >= 3:
                break
        else:
            stall = 0

    rp = b - a_op(x)
    rd = cmat - z - a_adj(y)
    pv = float(np.sum(cmat * x)) + float(y @ rp)
    dv = float(b @ y)
    pinf = float(np.linalg.norm(rp)) / (1.0 + norm_b)
    dinf = float(np.linalg.norm(rd)) / (1.0 + norm_c)
    relgap = float(np.sum(x * z)) / (1.0 + abs(pv) + abs(dv))
    if status != STATUS_INFEASIBLE_SUSPECTED:
        if pinf <= ACCEPT_TOL and dinf <= ACCEPT_TOL and relgap <= ACCEPT_TOL and gap_ok(pv, dv):
            status = STATUS_OPTIMAL
        elif status == STATUS_OPTIMAL:
            pass
        else:
            status = STATUS_MAX_ITERATIONS

    x_h = _unembed(x, nc)
    z_h = _unembed(z, nc)
    pv_c = 0.5 * pv
    dv_c = 0.5 * dv
    return SdpSolution(
        X_star=HermitianOperator(x_h),
        y_star=y.copy(),
        Z_star=HermitianOperator(z_h),
        primal_value=pv_c,
        dual_value=dv_c,
        gap=pv_c - dv_c,
        status=status,
        iterations=iterations,
    )


def check_certificate(problem: HermitianSdp, solution: SdpSolution) -> CertificateReport:
    """Recompute feasibility residuals, cone violations and the gap from scratch.

    Uses only the problem data and the solution's (X, y, Z); nothing is
    shared with the solver internals, so corrupted certificates are caught.
    """
    x = solution.X_star.mat
    z = solution.Z_star.mat
    y = solution.y_star
    residuals = [
        abs(float(np.trace(a.mat @ x).real) - b) for a, b in problem.constraints
    ]
    asum = sum(yi * a.mat for yi, (a, _) in zip(y, problem.constraints))
    dual_res = float(np.max(np.abs(problem.objective.mat - z - asum)))
    pv = float(np.trace(problem.objective.mat @ x).real)
    dv = float(sum(yi * b for yi, (_, b) in zip(y, problem.constraints)))
    return CertificateReport(
        constraint_residual=max(residuals),
        dual_residual=dual_res,
        min_eig_X=float(np.linalg.eigvalsh(x)[0]),
        min_eig_Z=float(np.linalg.eigvalsh(z)[0]),
        primal_value=pv,
        dual_value=dv,
        gap=pv - dv,
        value_mismatch=max(abs(pv - solution.primal_value), abs(dv - solution.dual_value)),
        weak_duality_violation=max(0.0, solution.dual_value - solution.primal_value),
    )
