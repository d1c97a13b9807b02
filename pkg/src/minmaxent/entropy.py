"""Single-shot conditional min- and max-entropy and their operational forms.

The conditional min-entropy of a bipartite state rho_AB is

    H_min(A|B) = -log2 min{ tr(sigma) : sigma >= 0, id_A (x) sigma >= rho_AB },

an SDP whose dual runs over operators E_AB >= 0 with tr_A E = id_B; the
dual optimizer is the Choi matrix of a completely positive unital map
whose adjoint is the trace-preserving recovery channel achieving the best
overlap with the maximally entangled state.  The max-entropy is minus the
min-entropy of A conditioned on a purifying system, and equals the log of
the decoupling accuracy d_A * max_sigma F(rho_AB, tau_A (x) sigma)^2,
computed here directly through the semidefinite characterization of the
root fidelity.  F always denotes the ROOT fidelity ||sqrt(r) sqrt(s)||_1,
whose square is the overlap against pure states.  All logarithms are
base 2 and every reported value carries its solver certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sdp
from .channels import ChoiMatrix, adjoint_channel
from .core import (
    BipartiteState,
    CqEnsemble,
    DensityOperator,
    HermitianOperator,
    PureState,
    _matrix_to_json,
    _partial_trace_mat,
    _root_fidelity_mats,
    cq_to_density,
    hermitian_basis,
    maximally_entangled,
    purify,
)
from .sdp import SdpSolution, SolverError

__all__ = [
    "EntropyReport",
    "RecoveryCertificate",
    "max_relative_entropy",
    "min_entropy",
    "max_entropy",
    "guessing_probability",
    "singlet_fraction",
    "decoupling_accuracy",
    "key_secrecy",
    "key_secrecy_block",
    "max_target_fidelity",
    "closed_form_entropies",
    "report_to_json",
]

SUPPORT_LEAK_ATOL = 1e-9
PRODUCT_ATOL = 1e-9
PURE_ATOL = 1e-9
SCHMIDT_ATOL = 1e-9


@dataclass(frozen=True, eq=False)
class EntropyReport:
    """An entropy value in bits together with its optimization certificate."""

    quantity: str
    value_bits: float
    certificate: SdpSolution
    optimizer_sigma: DensityOperator
    dual_optimizer: ChoiMatrix
    gap: float


@dataclass(frozen=True, eq=False)
class RecoveryCertificate:
    """Recovery channel extracted from a min-entropy dual optimizer.

    achieved_overlap is <Phi|(id (x) F)(rho)|Phi> recomputed from scratch
    by applying the channel; predicted equals 2^(-H_min) / d_A.
    """

    channel: ChoiMatrix
    achieved_overlap: float
    predicted: float


def max_relative_entropy(tau: HermitianOperator, tau_prime: HermitianOperator) -> float:
    """Smallest lam with tau <= 2^lam * tau_prime in the semidefinite order.

    Equals log2 of the largest eigenvalue of P t'^(-1/2) tau t'^(-1/2) P
    with P the support projector of tau_prime; +inf when the support of
    tau leaks out of the support of tau_prime by more than 1e-9 in trace.
    """
    if tau.dim != tau_prime.dim:
        raise ValueError("operators must have equal dimensions")
    for name, op in (("tau", tau), ("tau_prime", tau_prime)):
        ev = float(np.linalg.eigvalsh(op.mat)[0])
        if ev < -SUPPORT_LEAK_ATOL:
            raise ValueError(f"{name} has eigenvalue {ev:.3e}, not positive semidefinite")
    w, v = np.linalg.eigh(tau_prime.mat)
    w = np.clip(w, 0.0, None)
    support = w > 1e-12 * max(float(w[-1]), 1e-300)
    leak = float(np.trace(tau.mat).real) - float(
        np.einsum("ij,jk,ki->", v[:, support].conj().T, tau.mat, v[:, support]).real
    )
    if leak > SUPPORT_LEAK_ATOL:
        return math.inf
    inv_sqrt = (v[:, support] * w[support] ** -0.5) @ v[:, support].conj().T
    lam_max = float(np.linalg.eigvalsh(inv_sqrt @ tau.mat @ inv_sqrt)[-1])
    if lam_max <= 0.0:
        return -math.inf
    return math.log2(lam_max)


def _require_optimal(sol: SdpSolution, what: str) -> None:
    if sol.status != sdp.STATUS_OPTIMAL:
        raise SolverError(f"{what}: solver stopped with status {sol.status}", sol)


def _solve_min_entropy_operator(
    rho: np.ndarray, d_a: int, d_b: int
) -> tuple[SdpSolution, np.ndarray, np.ndarray]:
    """Run min{tr sigma : id (x) sigma >= rho} for a PSD operator rho.

    Returns the solution, the optimal sigma block, and the completed dual
    optimizer E with tr_A E = id_B.  The SDP variable is diag(sigma, S)
    with the slack S = id (x) sigma - rho tied entrywise by equality
    constraints; the strictly feasible start uses sigma_0 = 2*lmax(rho)*id.
    """
    d_ab = d_a * d_b
    basis = hermitian_basis(d_ab)
    n = d_b + d_ab
    cmat = np.zeros((n, n), dtype=complex)
    cmat[:d_b, :d_b] = np.eye(d_b)
    cons = []
    for bk in basis:
        amat = np.zeros((n, n), dtype=complex)
        amat[:d_b, :d_b] = -_partial_trace_mat(bk, d_a, d_b, "B")
        amat[d_b:, d_b:] = bk
        cons.append((HermitianOperator(amat), -float(np.trace(bk @ rho).real)))
    problem = sdp.HermitianSdp(HermitianOperator(cmat), tuple(cons))

    lam = float(np.linalg.eigvalsh(rho)[-1])
    c0 = 2.0 * lam if lam > 1e-12 else 1.0
    x0 = np.zeros((n, n), dtype=complex)
    x0[:d_b, :d_b] = c0 * np.eye(d_b)
    x0[d_b:, d_b:] = c0 * np.eye(d_ab) - rho
    sol = sdp.solve(problem, x0=HermitianOperator(x0))
    _require_optimal(sol, "min-entropy SDP")

    sigma = sol.X_star.mat[:d_b, :d_b]
    e_ab = -np.einsum("k,kij->ij", sol.y_star, basis)
    slack_b = np.eye(d_b) - _partial_trace_mat(e_ab, d_a, d_b, "B")
    e_ab = e_ab + np.kron(np.eye(d_a) / d_a, slack_b)
    return sol, sigma, 0.5 * (e_ab + e_ab.conj().T)


def _report_from_hmin(
    quantity: str, sol: SdpSolution, sigma: np.ndarray, e_ab: np.ndarray, d_a: int, d_b: int
) -> EntropyReport:
    sigma_norm = sigma / float(np.trace(sigma).real)
    return EntropyReport(
        quantity=quantity,
        value_bits=-math.log2(sol.primal_value),
        certificate=sol,
        optimizer_sigma=DensityOperator.from_matrix(sigma_norm),
        dual_optimizer=ChoiMatrix(HermitianOperator(e_ab), d_a, d_b),
        gap=sol.gap,
    )


def min_entropy(state: BipartiteState) -> EntropyReport:
    """H_min(A|B) of a bipartite state, with primal and dual optimizers.

    value_bits = -log2 of the primal optimum; the report carries the
    normalized optimal sigma and the dual optimizer E with tr_A E = id_B.
    """
    sol, sigma, e_ab = _solve_min_entropy_operator(state.mat, state.d_A, state.d_B)
    return _report_from_hmin("min_entropy", sol, sigma, e_ab, state.d_A, state.d_B)


def _marginal_over_middle(psi: np.ndarray, d_a: int, d_b: int, d_c: int) -> np.ndarray:
    amp = psi.reshape(d_a, d_b, d_c)
    rho = np.einsum("abc,dbe->acde", amp, amp.conj()).reshape(d_a * d_c, d_a * d_c)
    return 0.5 * (rho + rho.conj().T)


def max_entropy(state: BipartiteState) -> EntropyReport:
    """H_max(A|B) = -H_min(A|C) evaluated on a purification over C.

    The purifying dimension is the rank of rho_AB.  The returned report
    carries the inner min-entropy certificate (its sigma lives on C and
    its dual optimizer on A (x) C).
    """
    psi = purify(state.rho)
    d_c = psi.dim // (state.d_A * state.d_B)
    rho_ac = _marginal_over_middle(psi.amplitudes, state.d_A, state.d_B, d_c)
    sol, sigma, e_ac = _solve_min_entropy_operator(rho_ac, state.d_A, d_c)
    inner = _report_from_hmin("max_entropy", sol, sigma, e_ac, state.d_A, d_c)
    return EntropyReport(
        quantity="max_entropy",
        value_bits=-inner.value_bits,
        certificate=inner.certificate,
        optimizer_sigma=inner.optimizer_sigma,
        dual_optimizer=inner.dual_optimizer,
        gap=inner.gap,
    )


def guessing_probability(e: CqEnsemble) -> tuple[float, list[HermitianOperator]]:
    """Best probability of decoding X from B, with the optimal POVM.

    Maximizes sum_x p_x tr(E_x rho_x) over POVMs {E_x}; this is the
    min-entropy dual restricted to operators that are classical on X, so
    the value equals 2^(-H_min(X|B)) of the joint cq state.
    """
    k, d_b = e.n_outcomes, e.d_B
    basis_b = hermitian_basis(d_b)
    n = k * d_b
    cmat = np.zeros((n, n), dtype=complex)
    for x in range(k):
        cmat[x * d_b : (x + 1) * d_b, x * d_b : (x + 1) * d_b] = -e.probs[x] * e.cond_states[x].mat
    cons = []
    for bk in basis_b:
        amat = np.zeros((n, n), dtype=complex)
        for x in range(k):
            amat[x * d_b : (x + 1) * d_b, x * d_b : (x + 1) * d_b] = bk
        cons.append((HermitianOperator(amat), float(np.trace(bk).real)))
    problem = sdp.HermitianSdp(HermitianOperator(cmat), tuple(cons))
    x0 = HermitianOperator(np.eye(n, dtype=complex) / k)
    sol = sdp.solve(problem, x0=x0)
    _require_optimal(sol, "guessing-probability SDP")
    povm = [
        HermitianOperator(sol.X_star.mat[x * d_b : (x + 1) * d_b, x * d_b : (x + 1) * d_b])
        for x in range(k)
    ]
    return -sol.primal_value, povm


def _apply_on_second(j: ChoiMatrix, rho_ab: np.ndarray, d_a: int) -> np.ndarray:
    """(id_A (x) F)(rho_AB) for a channel F given by its Choi matrix on B."""
    jt = j._tensor()
    r4 = rho_ab.reshape(d_a, j.d_in, d_a, j.d_in)
    out = np.einsum("abcd,bedf->aecf", r4, jt).reshape(d_a * j.d_out, d_a * j.d_out)
    return 0.5 * (out + out.conj().T)


def singlet_fraction(state: BipartiteState) -> tuple[float, RecoveryCertificate]:
    """Largest d_A-weighted overlap with the maximally entangled state.

    Returns 2^(-H_min(A|B)) together with the explicit trace-preserving
    recovery channel on B: the adjoint of the completely positive unital
    map whose Choi matrix is the min-entropy dual optimizer.  The
    certificate's achieved overlap is recomputed by applying the channel.
    """
    d_a = state.d_A
    sol, _, e_ab = _solve_min_entropy_operator(state.mat, d_a, state.d_B)
    recovery = adjoint_channel(ChoiMatrix(HermitianOperator(e_ab), d_a, state.d_B))
    out = _apply_on_second(recovery, state.mat, d_a)
    phi = maximally_entangled(d_a).amplitudes
    achieved = float((phi.conj() @ out @ phi).real)
    value = sol.primal_value
    cert = RecoveryCertificate(channel=recovery, achieved_overlap=achieved, predicted=value / d_a)
    return value, cert


def _support_isometry(rho: np.ndarray) -> np.ndarray:
    """Isometry onto the support of a PSD matrix (eigenvalue cutoff 1e-12 relative)."""
    w, v = np.linalg.eigh(rho)
    cutoff = 1e-12 * max(float(w[-1]), 1e-300)
    keep = w > cutoff
    if not np.any(keep):
        raise ValueError("operator has numerically empty support")
    return v[:, keep]


def _decoupling_problem(
    rho: np.ndarray, d_a: int, d_b: int
) -> tuple[sdp.HermitianSdp, HermitianOperator, int]:
    """Joint SDP over (G, sigma) maximizing the root fidelity with tau (x) sigma.

    The block program max (1/2) tr(X + X†) over [[rho, X], [X†, omega]] >= 0
    forces the columns of X into the support of rho, so the rho corner is
    presolved onto that support (isometry U, S = U† rho U): the variable
    becomes G = [[S, Xt], [Xt†, omega]] with objective Re tr(U Xt), which
    is the same optimum but has strictly feasible points even when rho is
    rank deficient.  omega = tau_A (x) sigma is tied to the trailing sigma
    block by equality constraints, together with tr sigma = 1.
    """
    d = d_a * d_b
    u = _support_isometry(rho)
    r = u.shape[1]
    s_block = u.conj().T @ rho @ u
    basis_r = hermitian_basis(r)
    basis_d = hermitian_basis(d)
    n = r + d + d_b
    cmat = np.zeros((n, n), dtype=complex)
    cmat[:r, r : r + d] = -0.5 * u.conj().T
    cmat[r : r + d, :r] = -0.5 * u
    cons = []
    for bk in basis_r:
        amat = np.zeros((n, n), dtype=complex)
        amat[:r, :r] = bk
        cons.append((HermitianOperator(amat), float(np.trace(bk @ s_block).real)))
    for bk in basis_d:
        amat = np.zeros((n, n), dtype=complex)
        amat[r : r + d, r : r + d] = bk
        amat[r + d :, r + d :] = -_partial_trace_mat(bk, d_a, d_b, "B") / d_a
        cons.append((HermitianOperator(amat), 0.0))
    amat = np.zeros((n, n), dtype=complex)
    amat[r + d :, r + d :] = np.eye(d_b)
    cons.append((HermitianOperator(amat), 1.0))

    x0 = np.zeros((n, n), dtype=complex)
    x0[:r, :r] = s_block
    x0[r : r + d, r : r + d] = np.eye(d) / d
    x0[r + d :, r + d :] = np.eye(d_b) / d_b
    return sdp.HermitianSdp(HermitianOperator(cmat), tuple(cons)), HermitianOperator(x0), r


def _decoupling_solve(rho: np.ndarray, d_a: int, d_b: int) -> tuple[float, np.ndarray, SdpSolution]:
    problem, x0, r = _decoupling_problem(rho, d_a, d_b)
    sol = sdp.solve(problem, x0=x0)
    _require_optimal(sol, "decoupling SDP")
    d = d_a * d_b
    sigma = sol.X_star.mat[r + d :, r + d :]
    sigma = sigma / float(np.trace(sigma).real)
    best_f = max(0.0, -sol.primal_value)
    return d_a * best_f**2, sigma, sol


def decoupling_accuracy(state: BipartiteState) -> tuple[float, DensityOperator]:
    """d_A * max_sigma F(rho_AB, tau_A (x) sigma)^2 over states sigma on B.

    One joint SDP maximizes the root fidelity through its block-matrix
    characterization F = max (1/2) tr(X + X†) subject to
    [[rho, X], [X†, tau (x) sigma]] >= 0; the square is taken afterwards.
    The value equals 2^(H_max(A|B)).
    """
    value, sigma, _ = _decoupling_solve(state.mat, state.d_A, state.d_B)
    return value, DensityOperator.from_matrix(sigma)


def key_secrecy(e: CqEnsemble) -> float:
    """Secrecy of X relative to B: the decoupling accuracy of the cq state.

    Equals max_sigma (sum_x sqrt(p_x) F(rho_x, sigma))^2; the block-sum
    form is available separately as key_secrecy_block.
    """
    value, _ = decoupling_accuracy(cq_to_density(e))
    return value


def key_secrecy_block(e: CqEnsemble, sigma: DensityOperator) -> float:
    """Block-sum secrecy (sum_x sqrt(p_x) F(rho_x, sigma))^2 at a given sigma."""
    if sigma.dim != e.d_B:
        raise ValueError("sigma dimension does not match the ensemble")
    total = 0.0
    for p, s in zip(e.probs, e.cond_states):
        if p > 0.0:
            total += math.sqrt(p) * _root_fidelity_mats(s.mat, sigma.mat)
    return total**2


def max_target_fidelity(state: BipartiteState, target: PureState) -> float:
    """Best squared fidelity with a full-Schmidt-rank pure target on A (x) A'.

    max_F F((id (x) F)(rho_AB), |Psi><Psi|)^2 over channels F from B to
    A', computed by running the min-entropy primal on the conjugated
    operator d_A (t^(1/2) (x) id) rho (t^(1/2) (x) id) with t the reduced
    state of the target on A.  For the maximally entangled target this
    reduces to singlet_fraction / d_A.
    """
    d_a, d_b = state.d_A, state.d_B
    if target.dim != d_a * d_a:
        raise ValueError(f"target must live on A (x) A' with dimension {d_a * d_a}")
    amp = target.amplitudes.reshape(d_a, d_a)
    tau = amp @ amp.conj().T
    if float(np.linalg.eigvalsh(tau)[0]) <= SCHMIDT_ATOL:
        raise ValueError("target does not have full Schmidt rank")
    w, v = np.linalg.eigh(tau)
    sqrt_tau = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    conj = np.kron(sqrt_tau, np.eye(d_b))
    rho_tilde = d_a * (conj @ state.mat @ conj)
    sol, _, _ = _solve_min_entropy_operator(
        0.5 * (rho_tilde + rho_tilde.conj().T), d_a, d_b
    )
    return sol.primal_value / d_a


def closed_form_entropies(state: BipartiteState, case: str) -> tuple[float, float]:
    """(H_min, H_max) in closed form for product or pure bipartite states.

    case='product' requires ||rho_AB - rho_A (x) rho_B||_1 <= 1e-9 and
    returns (-log2 ||rho_A||_inf, 2 log2 tr sqrt(rho_A)); case='pure'
    requires lmax(rho_AB) >= 1 - 1e-9 and returns
    (-log2 (tr sqrt(rho_A))^2, log2 ||rho_A||_inf).
    """
    rho = state.mat
    rho_a = _partial_trace_mat(rho, state.d_A, state.d_B, "A")
    ev_a = np.clip(np.linalg.eigvalsh(rho_a), 0.0, None)
    lam_max_a = float(ev_a[-1])
    tr_sqrt_a = float(np.sum(np.sqrt(ev_a)))
    if case == "product":
        rho_b = _partial_trace_mat(rho, state.d_A, state.d_B, "B")
        dist = float(np.sum(np.abs(np.linalg.eigvalsh(rho - np.kron(rho_a, rho_b)))))
        if dist > PRODUCT_ATOL:
            raise ValueError(f"state is not a product state (trace distance {dist:.3e})")
        return -math.log2(lam_max_a), 2.0 * math.log2(tr_sqrt_a)
    if case == "pure":
        lam_max = float(np.linalg.eigvalsh(rho)[-1])
        if lam_max < 1.0 - PURE_ATOL:
            raise ValueError(f"state is not pure (largest eigenvalue {lam_max!r})")
        return -math.log2(tr_sqrt_a**2), math.log2(lam_max_a)
    raise ValueError(f"case must be 'product' or 'pure', got {case!r}")


def report_to_json(report: EntropyReport, include_optimizers: bool = False) -> str:
    """One-line JSON form of a report; optimizer matrices are optional."""
    fields = [
        f'"quantity":"{report.quantity}"',
        f'"value_bits":{report.value_bits!r}',
        f'"gap":{report.gap!r}',
        f'"primal_value":{report.certificate.primal_value!r}',
        f'"dual_value":{report.certificate.dual_value!r}',
        f'"status":"{report.certificate.status}"',
    ]
    if include_optimizers:
        fields.append(f'"optimizer_sigma":{_matrix_to_json(report.optimizer_sigma.mat)}')
        fields.append(f'"dual_optimizer":{_matrix_to_json(report.dual_optimizer.op.mat)}')
    return "{" + ",".join(fields) + "}"
