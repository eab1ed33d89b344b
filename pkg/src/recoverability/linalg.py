"""Dense complex Hermitian linear algebra kernels.

Conventions used throughout the package:

* operators are numpy complex arrays in row-major layout;
* in tensor products the left factor is the slow index, i.e.
  ``tensor_product(a, b)[i*db + k, j*db + l] == a[i, j] * b[k, l]``;
* eigenvalues below ``SUPPORT_THRESHOLD`` times the largest eigenvalue are
  treated as exact zeros by all support-restricted operations.
"""

from __future__ import annotations

import dataclasses
from typing import Callable, Iterable, Sequence

import numpy as np

SUPPORT_THRESHOLD = 1e-10
HERMITICITY_TOL = 1e-10


@dataclasses.dataclass(frozen=True)
class HermitianEigen:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # unitary, columns are eigenvectors

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_complex_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim {m.ndim}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    return m


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def is_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    scale = max(np.abs(m).max(), 1.0)
    return np.abs(m - m.conj().T).max() <= tol * scale


def hermitian_eig(m, tol: float = HERMITICITY_TOL) -> HermitianEigen:
    """Eigendecompose a Hermitian matrix (symmetrized internally).

    Raises ValueError for non-square input or input that is not Hermitian
    within ``tol`` (relative to the largest entry).
    """
    m = as_complex_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix is not square: shape {m.shape}")
    if not is_hermitian(m, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh((m + m.conj().T) / 2.0)
    return HermitianEigen(eigenvalues=w, eigenvectors=v)


def matrix_function(
    m,
    f: Callable[[np.ndarray], np.ndarray],
    support_only: bool = False,
    threshold: float = SUPPORT_THRESHOLD,
) -> np.ndarray:
    """Apply a scalar function to the eigenvalues of a Hermitian matrix.

    With ``support_only`` set, eigenvalues at or below ``threshold`` times the
    largest eigenvalue are mapped to 0 instead of ``f(0)``; this realizes
    support-restricted logarithms, inverses and negative powers.

    Raises ValueError if ``f`` is undefined (non-finite) at a retained
    eigenvalue, e.g. the logarithm of 0 without ``support_only``.
    """
    eig = hermitian_eig(m)
    w = eig.eigenvalues
    fw = np.zeros_like(w)
    if support_only:
        cutoff = threshold * max(w.max(), 0.0)
        mask = w > cutoff
    else:
        mask = np.ones_like(w, dtype=bool)
    if mask.any():
        with np.errstate(all="ignore"):
            vals = np.asarray(f(w[mask]), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ValueError("scalar function is undefined at a retained eigenvalue")
        fw[mask] = vals
    v = eig.eigenvectors
    return (v * fw) @ v.conj().T


def matrix_power_psd(m, power: float, threshold: float = SUPPORT_THRESHOLD) -> np.ndarray:
    """Support-restricted real power of a PSD matrix (negative eigenvalue
    noise below the support threshold is clipped)."""
    eig = hermitian_eig(m)
    w = np.clip(eig.eigenvalues, 0.0, None)
    cutoff = threshold * max(w.max(), 0.0)
    out = np.zeros_like(w)
    mask = w > cutoff
    out[mask] = w[mask] ** power
    v = eig.eigenvectors
    return (v * out) @ v.conj().T


def complex_matrix_power_psd(
    m, power: complex, threshold: float = SUPPORT_THRESHOLD
) -> np.ndarray:
    """Support-restricted complex power m^z of a PSD matrix.

    Defined on the support as exp(z log lambda); kernel eigenvalues map to 0.
    Used for the rotated sandwich exponents (1 +/- it)/2.
    """
    eig = hermitian_eig(m)
    w = np.clip(eig.eigenvalues, 0.0, None)
    cutoff = threshold * max(w.max(), 0.0)
    out = np.zeros(w.shape, dtype=complex)
    mask = w > cutoff
    out[mask] = np.exp(power * np.log(w[mask]))
    v = eig.eigenvectors
    return (v * out) @ v.conj().T


def tensor_product(*factors) -> np.ndarray:
    """Kronecker product; the left factor is the slow (most significant) index."""
    out = as_complex_matrix(factors[0])
    for f in factors[1:]:
        out = np.kron(out, as_complex_matrix(f))
    return out


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out all subsystems not listed in ``keep``.

    ``dims`` is the subsystem dimension signature (slow index first); the
    product of ``dims`` must equal the matrix side.  Kept subsystems stay in
    their original order.
    """
    m = as_complex_matrix(m)
    dims = tuple(int(d) for d in dims)
    n = int(np.prod(dims))
    if m.shape != (n, n):
        raise ValueError(f"dimension signature {dims} does not match matrix side {m.shape}")
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        return np.array([[m.trace()]])
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} subsystems")
    k = len(dims)
    t = m.reshape(dims + dims)
    traced = [i for i in range(k) if i not in keep]
    for count, i in enumerate(traced):
        axis = i - sum(1 for j in traced[:count] if j < i)
        t = np.trace(t, axis1=axis, axis2=axis + t.ndim // 2)
    side = int(np.prod([dims[i] for i in keep]))
    return t.reshape(side, side)


def permute_systems(m, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder subsystems: output subsystem i is input subsystem perm[i]."""
    m = as_complex_matrix(m)
    dims = tuple(int(d) for d in dims)
    k = len(dims)
    perm = list(perm)
    if sorted(perm) != list(range(k)):
        raise ValueError(f"{perm} is not a permutation of {k} subsystems")
    t = m.reshape(dims + dims)
    t = t.transpose(perm + [k + p for p in perm])
    n = int(np.prod(dims))
    return t.reshape(n, n)


def trace_norm(m) -> float:
    """Sum of singular values; for Hermitian input the sum of |eigenvalues|."""
    m = as_complex_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError("trace norm expects a square matrix")
    if is_hermitian(m):
        return float(np.abs(np.linalg.eigvalsh((m + m.conj().T) / 2.0)).sum())
    return float(np.linalg.svd(m, compute_uv=False).sum())


def support_projector(m, threshold: float = SUPPORT_THRESHOLD) -> np.ndarray:
    """Projector onto eigenspaces with eigenvalue > threshold * lambda_max."""
    eig = hermitian_eig(m)
    w = eig.eigenvalues
    cutoff = threshold * max(w.max(), 0.0)
    cols = eig.eigenvectors[:, w > cutoff]
    return cols @ cols.conj().T


def hermitian_basis(d: int) -> list[np.ndarray]:
    """Orthonormal (Hilbert-Schmidt) Hermitian basis of the d x d operators."""
    basis = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = e[j, i] = inv_sqrt2
            basis.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = -1j * inv_sqrt2
            e[j, i] = 1j * inv_sqrt2
            basis.append(e)
    return basis
