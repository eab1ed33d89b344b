"""Fixed-point sets of channels and the invariant-deviation quantities: the
max-relative-entropy distance from a state to the invariant set of a channel
(computed by a certified convex program) and its witness-based Renyi
upper bounds."""

from __future__ import annotations

import dataclasses
import math

import numpy as np
import scipy.optimize

from . import linalg
from .channels import QuantumChannel, apply
from .entropies import cmi, d_alpha, d_max, trace_distance
from .states import DensityOperator

FIXED_POINT_TOL = 1e-8
CONDITIONING_BAND = 1e-5
DEFAULT_GAP_TOL = 1e-6
#: trace-norm invariance below which a state is accepted as its own witness
INVARIANT_FAST_PATH_TOL = 1e-9


class LambdaSolverError(RuntimeError):
    """Raised when the convex solver cannot certify a solution."""


@dataclasses.dataclass(frozen=True)
class FixedPointSet:
    """Orthonormal Hermitian basis of the operator subspace a channel leaves
    invariant, computed from the null space of (superoperator - identity)."""

    basis: tuple[np.ndarray, ...]
    dim: int  # Hilbert space dimension of the system
    tolerance: float
    conditioning_warning: bool

    def __len__(self) -> int:
        return len(self.basis)

    def project_coefficients(self, m: np.ndarray) -> np.ndarray:
        return np.array([np.trace(g.conj().T @ m).real for g in self.basis])

    def project(self, m: np.ndarray) -> np.ndarray:
        c = self.project_coefficients(m)
        out = np.zeros_like(self.basis[0])
        for ci, g in zip(c, self.basis):
            out = out + ci * g
        return out


@dataclasses.dataclass(frozen=True)
class LambdaResult:
    """Outcome of the invariant-deviation optimization.

    ``value`` is attained by ``witness`` (an invariant state); ``lower_bound``
    comes from an explicitly verified dual-feasible point, so
    ``value - lower_bound = gap`` certifies near-optimality.
    """

    value: float
    witness: DensityOperator | None
    gap: float
    lower_bound: float
    conditioning_warning: bool = False
    fast_path: bool = False

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "gap": self.gap,
            "lower_bound": self.lower_bound,
            "witness": self.witness.to_json_dict() if self.witness is not None else None,
            "conditioning_warning": self.conditioning_warning,
        }


def superoperator_matrix(ch: QuantumChannel) -> np.ndarray:
    """Row-major-vec superoperator: vec(E(X)) = S vec(X), S = sum K (x) conj(K)."""
    d = ch.in_dim
    s = np.zeros((d * d, d * d), dtype=complex)
    for k in ch.kraus:
        s += np.kron(k, k.conj())
    return s


def fixed_point_basis(ch: QuantumChannel, tol: float = FIXED_POINT_TOL) -> FixedPointSet:
    """Null-space basis of (superoperator - identity), symmetrized to an
    orthonormal set of Hermitian operators.

    A CPTP map always has at least one fixed state; if the numerics find an
    empty null space something is badly off and we raise.  Singular values in
    the band just above the cutoff flag a near-degenerate fixed space.
    """
    if ch.in_dims != ch.out_dims:
        raise ValueError("fixed points need a square channel (input signature = output)")
    d = ch.in_dim
    s = superoperator_matrix(ch)
    _, sv, vh = np.linalg.svd(s - np.eye(d * d))
    null_mask = sv <= tol
    if not null_mask.any():
        raise LambdaSolverError("no fixed point found; CPTP validation should preclude this")
    warning = bool(((sv > tol) & (sv < CONDITIONING_BAND)).any())
    ops = [vh[i].conj().reshape(d, d) for i in range(len(sv)) if null_mask[i]]
    # the fixed subspace is closed under adjoints, so its Hermitian elements
    # span it; embed candidates into real coordinates and re-orthonormalize
    cands = []
    for x in ops:
        cands.append((x + x.conj().T) / 2.0)
        cands.append((x - x.conj().T) / 2.0j)
    emb = np.array([np.concatenate([c.real.ravel(), c.imag.ravel()]) for c in cands])
    u, sv2, vh2 = np.linalg.svd(emb, full_matrices=False)
    rank = int((sv2 > 1e-10 * sv2.max()).sum())
    basis = []
    for i in range(rank):
        row = vh2[i]
        g = (row[: d * d] + 1j * row[d * d:]).reshape(d, d)
        g = (g + g.conj().T) / 2.0
        g = g / np.linalg.norm(g)
        residual = np.linalg.norm(_apply_mat(ch, g) - g)
        if residual > 10 * tol:
            raise LambdaSolverError(
                f"hermitized fixed-basis element has residual {residual:.2e}"
            )
        basis.append(g)
    return FixedPointSet(tuple(basis), d, tol, warning)


def _apply_mat(ch: QuantumChannel, m: np.ndarray) -> np.ndarray:
    return ch.apply_matrix(m)


def lift_fixed_points(fps: FixedPointSet, a_dim: int) -> FixedPointSet:
    """Fixed points of id_A (x) E: the full A-operator basis tensored with
    the fixed basis of E."""
    a_basis = linalg.hermitian_basis(a_dim)
    lifted = tuple(np.kron(xa, g) for xa in a_basis for g in fps.basis)
    return FixedPointSet(lifted, a_dim * fps.dim, fps.tolerance, fps.conditioning_warning)


def max_support_fixed_state(fps: FixedPointSet) -> np.ndarray:
    """A fixed state whose support contains the support of every fixed state.

    For a trace-preserving positive map the positive and negative parts of a
    Hermitian fixed point are themselves fixed, so the sum of |G_i| over the
    basis is fixed and its support is the union of all fixed supports.
    """
    acc = np.zeros((fps.dim, fps.dim), dtype=complex)
    for g in fps.basis:
        eig = linalg.hermitian_eig(g)
        acc += (eig.eigenvectors * np.abs(eig.eigenvalues)) @ eig.eigenvectors.conj().T
    tr = acc.trace().real
    if tr <= 0:
        raise LambdaSolverError("fixed subspace contains no positive element")
    return acc / tr


def _solve(prob) -> None:
    """Run a cvxpy problem, preferring the interior-point solver; accuracy
    warnings are silenced because the caller certifies the answer itself."""
    import warnings

    import cvxpy as cp

    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="Solution may be inaccurate")
        try:
            prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-11, tol_gap_rel=1e-11,
                       tol_feas=1e-11)
        except cp.error.SolverError:
            prob.solve(solver=cp.SCS, eps=1e-10, max_iters=200000)


def _solve_primal_sdp(rho: np.ndarray, basis: list[np.ndarray]):
    import cvxpy as cp

    k = len(basis)
    x = cp.Variable(k)
    sigma = sum(x[i] * cp.Constant(basis[i]) for i in range(k))
    cost = np.array([g.trace().real for g in basis])
    prob = cp.Problem(cp.Minimize(cost @ x), [sigma - rho >> 0])
    _solve(prob)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        raise LambdaSolverError(f"primal SDP status {prob.status}")
    return np.asarray(x.value, dtype=float)


def _solve_dual_sdp(rho: np.ndarray, basis: list[np.ndarray]):
    import cvxpy as cp

    n = rho.shape[0]
    y = cp.Variable((n, n), hermitian=True)
    cons = [y >> 0]
    cons += [cp.real(cp.trace(cp.Constant(g) @ y)) == g.trace().real for g in basis]
    prob = cp.Problem(cp.Maximize(cp.real(cp.trace(cp.Constant(rho) @ y))), cons)
    _solve(prob)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        raise LambdaSolverError(f"dual SDP status {prob.status}")
    return np.asarray(y.value, dtype=complex)


def _certified_lower_bound(rho: np.ndarray, basis: list[np.ndarray],
                           y: np.ndarray) -> float:
    """Rigorous lower bound on the optimal trace from an approximate dual
    point: clip Y to the PSD cone, then discount by the residual of the
    subspace equality constraints (weak duality with an explicit error
    term; the Frobenius norm of any feasible primal point is at most its
    trace)."""
    yh = (y + y.conj().T) / 2.0
    w, v = np.linalg.eigh(yh)
    yp = (v * np.clip(w, 0.0, None)) @ v.conj().T
    resid = np.array([np.trace(g.conj().T @ yp).real - g.trace().real for g in basis])
    eps = float(np.linalg.norm(resid))
    inner = float(np.trace(yp @ rho).real)
    if inner <= 0:
        return 0.0
    return inner / (1.0 + eps)


def lambda_max(
    state: DensityOperator,
    ch: QuantumChannel,
    gap_tol: float = DEFAULT_GAP_TOL,
) -> LambdaResult:
    """Smallest max-relative entropy from ``state`` to a state the channel
    leaves invariant (the channel acts on the subsystems named by its input
    labels; everything else is the reference).

    Solved as the convex program: minimize tr(sigma) over sigma in the lifted
    fixed-point subspace with sigma >= rho; the value is log2 of the optimum,
    the witness is sigma normalized, and an explicitly verified dual point
    certifies the reported gap.  Returns +inf with no witness when no
    invariant state dominates the support of ``state``.
    """
    b_labels = ch.in_labels
    rest = tuple(l for l in state.labels if l not in b_labels)
    ordered = state.permuted(rest + tuple(b_labels)) if rest else state.permuted(b_labels)
    a_dim = int(np.prod([ordered.dims[i] for i in range(len(rest))])) if rest else 1
    if tuple(ordered.dims[len(rest):]) != ch.in_dims:
        raise ValueError("channel dimensions do not match the designated subsystems")

    # an invariant input is its own witness: the value is certified at 0
    # without touching the superoperator
    moved = apply(ch, state)
    if trace_distance(moved, state) <= INVARIANT_FAST_PATH_TOL:
        value = max(0.0, d_max(state, state))
        return LambdaResult(value, state, value, 0.0, fast_path=True)

    fps = fixed_point_basis(ch)
    anchor_b = max_support_fixed_state(fps)
    # feasibility: every invariant state is dominated by a multiple of the
    # maximal-support fixed state, so leakage outside its support means +inf
    proj = linalg.support_projector(anchor_b)
    comp = np.eye(fps.dim) - proj
    rho_b = linalg.partial_trace(ordered.matrix, (a_dim, fps.dim), [1])
    leak = float(np.trace(rho_b @ comp).real)
    if leak > 1e-9:
        return LambdaResult(math.inf, None, 0.0, math.inf, fps.conditioning_warning)

    rho = ordered.matrix

    lifted = lift_fixed_points(fps, a_dim) if a_dim > 1 else fps
    basis = list(lifted.basis)
    coeff = _solve_primal_sdp(rho, basis)
    sigma = np.zeros_like(rho)
    for c, g in zip(coeff, basis):
        sigma = sigma + c * g
    # iterative refinement: the solver stalls around 1e-8 absolute
    # feasibility, which the max-relative entropy amplifies; re-solving the
    # residual problem (same cone, right-hand side rho - sigma) gains the
    # solver's relative accuracy at the residual scale
    for _ in range(3):
        residual = rho - sigma
        if np.linalg.eigvalsh(residual).max() <= 1e-13:
            break
        try:
            corr = _solve_primal_sdp(residual, basis)
        except LambdaSolverError:
            break
        for c, g in zip(corr, basis):
            sigma = sigma + c * g
    tr_sigma = sigma.trace().real
    if tr_sigma <= 0:
        raise LambdaSolverError("primal solution has nonpositive trace")
    witness_mat = (sigma + sigma.conj().T) / 2.0 / tr_sigma
    # clip solver-scale negative eigenvalue noise so the witness validates
    ww, wv = np.linalg.eigh(witness_mat)
    if ww.min() < 0:
        witness_mat = (wv * np.clip(ww, 0.0, None)) @ wv.conj().T
        witness_mat /= witness_mat.trace().real
        witness_mat = lifted.project(witness_mat)
        witness_mat /= witness_mat.trace().real
    witness = DensityOperator(
        witness_mat, ordered.dims, ordered.labels
    ).permuted(state.labels)
    value = d_max(ordered, witness.permuted(ordered.labels))

    y = _solve_dual_sdp(rho, basis)
    lower_tr = _certified_lower_bound(rho, basis, y)
    if lower_tr <= 0:
        raise LambdaSolverError("dual certificate collapsed to a trivial bound")
    lower = math.log2(lower_tr)
    gap = value - lower
    if not math.isfinite(gap) or gap < -1e-9:
        raise LambdaSolverError(f"inconsistent certificate: value {value}, lower {lower}")
    if gap > max(gap_tol, 1e-4):
        raise LambdaSolverError(f"certified gap {gap:.2e} exceeds tolerance")
    return LambdaResult(value, witness, gap, lower, fps.conditioning_warning)


def lambda_max_classical_lp(joint_ab: np.ndarray, stochastic: np.ndarray) -> float:
    """Exact linear-programming route for diagonal instances: minimize the
    total mass of a dominating array inside the diagonal fixed subspace of a
    stochastic matrix acting on the second variable.  The independent oracle
    for the semidefinite route."""
    p = np.asarray(joint_ab, dtype=float)
    if p.ndim != 2:
        raise ValueError("expected a bivariate joint pmf")
    s = np.asarray(stochastic, dtype=float)
    nb = s.shape[0]
    if s.shape != (nb, nb) or p.shape[1] != nb:
        raise ValueError("stochastic matrix must be square and match the second alphabet")
    _, sv, vh = np.linalg.svd(s - np.eye(nb))
    null = vh[sv <= FIXED_POINT_TOL]
    if null.shape[0] == 0:
        raise LambdaSolverError("stochastic matrix has no fixed distribution")
    k = null.shape[0]
    na = p.shape[0]
    # sigma(a, b) = sum_i c[a, i] * null[i, b]; minimize sum sigma s.t. sigma >= p
    c_obj = np.tile(null.sum(axis=1), na)
    a_ub = np.zeros((na * nb, na * k))
    for a in range(na):
        a_ub[a * nb:(a + 1) * nb, a * k:(a + 1) * k] = -null.T
    b_ub = -p.ravel()
    res = scipy.optimize.linprog(
        c_obj, A_ub=a_ub, b_ub=b_ub,
        bounds=[(None, None)] * (na * k), method="highs",
    )
    if res.status == 2:  # infeasible
        return math.inf
    if not res.success:
        raise LambdaSolverError(f"LP failed: {res.message}")
    return math.log2(res.fun)


def lambda_alpha_upper(
    state: DensityOperator,
    ch: QuantumChannel,
    alpha: float,
    witness: DensityOperator,
) -> float:
    """Witness-based upper bound on the order-alpha invariant deviation:
    D_alpha(state || witness) for an explicitly invariant witness."""
    moved = apply(ch, witness)
    resid = trace_distance(moved, witness.permuted(moved.labels))
    if resid > 1e-7:
        raise ValueError(f"witness is not invariant: residual {resid:.2e}")
    return d_alpha(state, witness.permuted(state.labels).matrix, alpha)


@dataclasses.dataclass(frozen=True)
class MarkovBoundCertificate:
    """Concrete block-decomposable upper-bound certificate: the image of an
    invariant witness under the full recovery channel is a Markov chain, so
    its max-relative entropy to the recovered state upper-bounds the distance
    from the recovered state to the Markov set."""

    value: float
    markov_state: DensityOperator
    markov_cmi: float
    flagged: bool


def markov_dmax_bound(
    recovered: DensityOperator,
    lam: LambdaResult,
    ch_full: QuantumChannel,
    cmi_tol: float = 1e-6,
) -> MarkovBoundCertificate:
    if lam.witness is None:
        raise ValueError("lambda result carries no witness")
    mu = apply(ch_full, lam.witness)
    mu_cmi = cmi(mu)
    value = d_max(recovered.permuted(mu.labels), mu)
    return MarkovBoundCertificate(value, mu, mu_cmi, bool(mu_cmi > cmi_tol))
