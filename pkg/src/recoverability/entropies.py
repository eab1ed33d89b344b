"""Scalar information measures in bits: von Neumann quantities, conditional
mutual information, fidelity and trace distance, and the one-shot relative
entropy ladder D_min <= D_alpha <= D <= D_max.

Support conventions: logarithms, inverses and negative powers are restricted
to the support of their argument; a divergence whose first argument has mass
outside the support of the second returns ``math.inf`` (never raises).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from . import linalg
from .states import ClassicalJoint, DensityOperator, marginal

LN2 = math.log(2.0)
#: mass of the first argument tolerated outside the second argument's support
SUPPORT_LEAK_TOL = 1e-9


def _mat(x) -> np.ndarray:
    if isinstance(x, DensityOperator):
        return x.matrix
    return linalg.as_complex_matrix(x)


def binary_entropy(x: float) -> float:
    """h(x) = -x log2 x - (1-x) log2(1-x), with 0 log 0 = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy argument {x} outside [0, 1]")
    out = 0.0
    if x > 0.0:
        out -= x * math.log2(x)
    if x < 1.0:
        out -= (1.0 - x) * math.log2(1.0 - x)
    return out


def _entropy_from_eigs(w: np.ndarray) -> float:
    w = np.clip(np.asarray(w, dtype=float), 0.0, None)
    top = w.max(initial=0.0)
    w = w[w > linalg.SUPPORT_THRESHOLD * top]
    if w.size == 0:
        return 0.0
    return float(-(w * np.log2(w)).sum())


def von_neumann(state) -> float:
    """Von Neumann entropy -tr rho log2 rho in bits."""
    return _entropy_from_eigs(np.linalg.eigvalsh(_mat(state)))


def cmi(state: DensityOperator, a_labels=None, c_labels=None) -> float:
    """Conditional mutual information I(A:C|B) = H(AB)+H(BC)-H(B)-H(ABC).

    Defaults: A is the first subsystem, C the last, B everything in between
    (possibly empty, in which case this is the mutual information).
    """
    labels = state.labels
    a = tuple(a_labels) if a_labels is not None else (labels[0],)
    c = tuple(c_labels) if c_labels is not None else (labels[-1],)
    if set(a) & set(c):
        raise ValueError("A and C label sets overlap")
    b = tuple(l for l in labels if l not in a and l not in c)
    ab = tuple(l for l in labels if l in a or l in b)
    bc = tuple(l for l in labels if l in b or l in c)
    h_ab = von_neumann(marginal(state, ab))
    h_bc = von_neumann(marginal(state, bc))
    h_b = von_neumann(marginal(state, b)) if b else 0.0
    h_abc = von_neumann(state)
    return h_ab + h_bc - h_b - h_abc


def _support_leak(rho: np.ndarray, sigma_eig: linalg.HermitianEigen) -> float:
    w = sigma_eig.eigenvalues
    cutoff = linalg.SUPPORT_THRESHOLD * max(w.max(), 0.0)
    kernel = sigma_eig.eigenvectors[:, w <= cutoff]
    if kernel.shape[1] == 0:
        return 0.0
    return float(np.einsum("ij,jk,ki->", kernel.conj().T, rho, kernel).real)


def relative_entropy(rho, sigma, leak_tol: float = SUPPORT_LEAK_TOL) -> float:
    """D(rho||sigma) = tr rho (log2 rho - log2 sigma); +inf when the support
    of rho is not contained in the support of sigma."""
    r = _mat(rho)
    s_eig = linalg.hermitian_eig(_mat(sigma))
    if _support_leak(r, s_eig) > leak_tol:
        return math.inf
    w = s_eig.eigenvalues
    cutoff = linalg.SUPPORT_THRESHOLD * max(w.max(), 0.0)
    keep = w > cutoff
    v = s_eig.eigenvectors[:, keep]
    # tr rho log sigma over the support of sigma
    weights = np.einsum("ij,jk,ki->i", v.conj().T, r, v).real
    tr_rho_log_sigma = float((weights * np.log2(w[keep])).sum())
    tr_rho_log_rho = -_entropy_from_eigs(np.linalg.eigvalsh(r))
    return tr_rho_log_rho - tr_rho_log_sigma


def fidelity(tau, omega) -> float:
    """F(tau, omega) = (tr sqrt(sqrt(tau) omega sqrt(tau)))^2 in [0, 1]."""
    t = _mat(tau)
    o = _mat(omega)
    st = linalg.matrix_power_psd(t, 0.5)
    inner = st @ o @ st
    w = np.clip(np.linalg.eigvalsh((inner + inner.conj().T) / 2.0), 0.0, None)
    return float(np.sqrt(w).sum() ** 2)


def trace_distance(tau, omega) -> float:
    """Half the trace norm of the difference."""
    return 0.5 * linalg.trace_norm(_mat(tau) - _mat(omega))


def d_min(rho, sigma) -> float:
    """Min-relative entropy -log2 F(rho, sigma); +inf for orthogonal states."""
    f = fidelity(rho, sigma)
    if f <= 0.0:
        return math.inf
    return -math.log2(f)


def d_max(rho, sigma, leak_tol: float = SUPPORT_LEAK_TOL) -> float:
    """Max-relative entropy log2 of the smallest lambda with rho <= lambda sigma.

    Computed spectrally as log2 lambda_max(sigma^{-1/2} rho sigma^{-1/2})
    with the support-restricted inverse square root; +inf when the support
    of rho leaks out of the support of sigma.
    """
    r = _mat(rho)
    s = _mat(sigma)
    s_eig = linalg.hermitian_eig(s)
    if _support_leak(r, s_eig) > leak_tol:
        return math.inf
    inv_sqrt = linalg.matrix_power_psd(s, -0.5)
    m = inv_sqrt @ r @ inv_sqrt
    top = float(np.linalg.eigvalsh((m + m.conj().T) / 2.0).max())
    if top <= 0.0:
        return -math.inf
    return math.log2(top)


def d_alpha(rho, sigma, alpha: float, leak_tol: float = SUPPORT_LEAK_TOL) -> float:
    """Minimal (sandwiched) quantum Renyi relative entropy of order alpha.

    D_alpha = (1/(alpha-1)) log2 [ tr (sigma^e rho sigma^e)^alpha / tr rho ]
    with e = (1-alpha)/(2 alpha).  Orders within 1e-6 of 1 delegate to the
    relative entropy; alpha = 1/2 coincides with d_min; for alpha > 1 the
    support condition is enforced (+inf on violation).
    """
    if alpha < 0.5:
        raise ValueError("alpha must be at least 1/2")
    if abs(alpha - 1.0) <= 1e-6:
        return relative_entropy(rho, sigma, leak_tol)
    r = _mat(rho)
    s = _mat(sigma)
    if alpha > 1.0 and _support_leak(r, linalg.hermitian_eig(s)) > leak_tol:
        return math.inf
    e = (1.0 - alpha) / (2.0 * alpha)
    s_e = linalg.matrix_power_psd(s, e)
    m = s_e @ r @ s_e
    w = np.clip(np.linalg.eigvalsh((m + m.conj().T) / 2.0), 0.0, None)
    w = w[w > 0.0]
    if w.size == 0:
        return math.inf if alpha > 1.0 else -math.inf
    # tr m^alpha in log space to survive extreme orders
    log2_tr = float(logsumexp(alpha * np.log(w))) / LN2
    tr_rho = float(np.trace(r).real)
    return (log2_tr - math.log2(tr_rho)) / (alpha - 1.0)


def petz_renyi_2(tau, omega, leak_tol: float = SUPPORT_LEAK_TOL) -> float:
    """Petz quadratic relative entropy log2 tr(tau^2 omega^{-1}) with the
    support-restricted inverse; +inf on support violation."""
    t = _mat(tau)
    o = _mat(omega)
    if _support_leak(t, linalg.hermitian_eig(o)) > leak_tol:
        return math.inf
    o_inv = linalg.matrix_power_psd(o, -1.0)
    val = float(np.trace(t @ t @ o_inv).real)
    if val <= 0.0:
        return -math.inf
    return math.log2(val)


def _joint_support_basis(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Orthonormal columns spanning supp(a) intersect supp(b)."""
    pa = linalg.support_projector(a)
    pb = linalg.support_projector(b)
    w, v = np.linalg.eigh((pa + pb) / 2.0)
    return v[:, w > 1.0 - 1e-9]


def log_euclidean_alpha(omega, sigma, alpha: float) -> float:
    """Log-Euclidean Renyi divergence of order alpha > 1:

    (1/(alpha-1)) log2 tr exp(alpha log omega + (1-alpha) log sigma),

    evaluated on the intersection of the two supports (full-rank inputs are
    the intended regime).
    """
    if alpha <= 1.0:
        raise ValueError("alpha must exceed 1")
    o = _mat(omega)
    s = _mat(sigma)
    basis = _joint_support_basis(o, s)
    if basis.shape[1] == 0:
        return math.inf
    oc = basis.conj().T @ o @ basis
    sc = basis.conj().T @ s @ basis
    log_o = linalg.matrix_function(oc, np.log, support_only=True)
    log_s = linalg.matrix_function(sc, np.log, support_only=True)
    h = alpha * log_o + (1.0 - alpha) * log_s
    w = np.linalg.eigvalsh((h + h.conj().T) / 2.0)
    return float(logsumexp(w)) / LN2 / (alpha - 1.0)


def _refined_pinching_basis(sigma: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Eigenbasis of sigma, rotated inside degenerate clusters to also
    diagonalize the compression of rho (a joint eigenbasis when they
    commute)."""
    eig = linalg.hermitian_eig(sigma)
    w, v = eig.eigenvalues, eig.eigenvectors.copy()
    scale = max(abs(w[0]), abs(w[-1]), 1e-300)
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or abs(w[i] - w[start]) > 1e-10 * scale:
            if i - start > 1:
                block = v[:, start:i]
                comp = block.conj().T @ rho @ block
                _, u = np.linalg.eigh((comp + comp.conj().T) / 2.0)
                v[:, start:i] = block @ u
            start = i
    return v


def d_measured_bounds(rho, sigma) -> tuple[float, float]:
    """Bracket for the measured relative entropy.

    Lower bound: the larger of -log2 F and the classical divergence after
    measuring both states in a (degeneracy-refined) eigenbasis of sigma;
    the bracket collapses to the relative entropy for commuting inputs.
    Upper bound: the relative entropy.
    """
    r = _mat(rho)
    s = _mat(sigma)
    v = _refined_pinching_basis(s, r)
    p = np.clip(np.einsum("ij,jk,ki->i", v.conj().T, r, v).real, 0.0, None)
    q = np.clip(np.einsum("ij,jk,ki->i", v.conj().T, s, v).real, 0.0, None)
    pinched = classical_relative_entropy(p, q)
    lower = max(d_min(rho, sigma), pinched)
    upper = relative_entropy(rho, sigma)
    return (min(lower, upper), upper)


# ---------------------------------------------------------------------------
# classical (pmf-level) counterparts; exact up to float arithmetic and
# therefore also the oracles for the diagonal-state quantum paths
# ---------------------------------------------------------------------------


def _pmf(x) -> np.ndarray:
    if isinstance(x, ClassicalJoint):
        return x.pmf
    return np.asarray(x, dtype=float)


def shannon_entropy(pmf) -> float:
    """Shannon entropy of a pmf array, in bits."""
    p = _pmf(pmf).ravel()
    p = p[p > 0.0]
    if p.size == 0:
        return 0.0
    return float(-(p * np.log2(p)).sum())


def classical_cmi(joint: ClassicalJoint, a_labels=None, c_labels=None) -> float:
    """I(A:C|B) on a classical joint via the four-entropy formula."""
    labels = joint.labels
    a = tuple(a_labels) if a_labels is not None else (labels[0],)
    c = tuple(c_labels) if c_labels is not None else (labels[-1],)
    b = tuple(l for l in labels if l not in a and l not in c)
    ab = tuple(l for l in labels if l in a or l in b)
    bc = tuple(l for l in labels if l in b or l in c)
    h_ab = shannon_entropy(joint.marginal(ab).pmf)
    h_bc = shannon_entropy(joint.marginal(bc).pmf)
    h_b = shannon_entropy(joint.marginal(b).pmf) if b else 0.0
    h_abc = shannon_entropy(joint.pmf)
    return h_ab + h_bc - h_b - h_abc


def classical_relative_entropy(p, q, leak_tol: float = SUPPORT_LEAK_TOL) -> float:
    pp = _pmf(p).ravel()
    qq = _pmf(q).ravel()
    mask = pp > 0.0
    if float(pp[mask & (qq <= 0.0)].sum()) > leak_tol:
        return math.inf
    mask &= qq > 0.0
    return float((pp[mask] * (np.log2(pp[mask]) - np.log2(qq[mask]))).sum())


def classical_d_max(p, q, leak_tol: float = SUPPORT_LEAK_TOL) -> float:
    """max log2 p(x)/q(x) over the support of p, with the support convention."""
    pp = _pmf(p).ravel()
    qq = _pmf(q).ravel()
    mask = pp > 0.0
    if float(pp[mask & (qq <= 0.0)].sum()) > leak_tol:
        return math.inf
    mask &= qq > 0.0
    if not mask.any():
        return -math.inf
    return float(np.log2(pp[mask] / qq[mask]).max())


def classical_d_alpha(p, q, alpha: float, leak_tol: float = SUPPORT_LEAK_TOL) -> float:
    """Classical Renyi divergence of order alpha, evaluated in log space."""
    if alpha < 0.5:
        raise ValueError("alpha must be at least 1/2")
    if abs(alpha - 1.0) <= 1e-6:
        return classical_relative_entropy(p, q, leak_tol)
    pp = _pmf(p).ravel()
    qq = _pmf(q).ravel()
    if alpha > 1.0 and float(pp[(pp > 0.0) & (qq <= 0.0)].sum()) > leak_tol:
        return math.inf
    mask = (pp > 0.0) & (qq > 0.0)
    if not mask.any():
        return math.inf if alpha > 1.0 else -math.inf
    terms = alpha * np.log(pp[mask]) + (1.0 - alpha) * np.log(qq[mask])
    log2_sum = float(logsumexp(terms)) / LN2
    return (log2_sum - math.log2(float(pp.sum()))) / (alpha - 1.0)
