"""Density operators, classical joint distributions, and structured-state
constructors (block-decomposed Markov chains, classical embeddings,
totally antisymmetric states)."""

from __future__ import annotations

import dataclasses
import itertools
import json
import math
from typing import Sequence

import numpy as np

from . import linalg

STATE_TOL = 1e-10
PMF_TOL = 1e-12


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclasses.dataclass(frozen=True)
class DensityOperator:
    """PSD, trace-one operator over labeled subsystems.

    ``dims`` is the subsystem dimension signature (slow index first) and
    ``labels`` names the subsystems in the same order.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        m = linalg.as_complex_matrix(self.matrix)
        dims = tuple(int(d) for d in self.dims)
        labels = tuple(str(l) for l in self.labels)
        n = int(np.prod(dims))
        if len(labels) != len(dims):
            raise ValueError("labels and dims must have equal length")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate subsystem labels: {labels}")
        if m.shape != (n, n):
            raise ValueError(f"matrix side {m.shape} does not match dims {dims}")
        if not linalg.is_hermitian(m, STATE_TOL):
            raise ValueError("density operator is not Hermitian within tolerance")
        m = (m + m.conj().T) / 2.0
        tr = m.trace().real
        if abs(tr - 1.0) > STATE_TOL:
            raise ValueError(f"trace is {tr}, not 1 within {STATE_TOL}")
        if np.linalg.eigvalsh(m).min() < -STATE_TOL:
            raise ValueError("density operator has a negative eigenvalue beyond tolerance")
        object.__setattr__(self, "matrix", _freeze(m))
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def label_indices(self, labels: Sequence[str]) -> list[int]:
        for l in labels:
            if l not in self.labels:
                raise KeyError(f"unknown subsystem label {l!r}; have {self.labels}")
        return [self.labels.index(l) for l in labels]

    def dims_of(self, labels: Sequence[str]) -> tuple[int, ...]:
        return tuple(self.dims[i] for i in self.label_indices(labels))

    def permuted(self, new_order: Sequence[str]) -> "DensityOperator":
        perm = self.label_indices(new_order)
        if sorted(perm) != list(range(len(self.dims))):
            raise ValueError("new_order must mention every label exactly once")
        m = linalg.permute_systems(self.matrix, self.dims, perm)
        return DensityOperator(m, tuple(self.dims[p] for p in perm), tuple(new_order))

    def purity(self) -> float:
        return float((self.matrix @ self.matrix).trace().real)

    def to_json_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "dims": list(self.dims),
            "matrix": matrix_to_json(self.matrix),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "DensityOperator":
        side = int(np.prod(d["dims"]))
        return cls(matrix_from_json(d["matrix"], side, side), tuple(d["dims"]), tuple(d["labels"]))

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json(cls, s: str) -> "DensityOperator":
        return cls.from_json_dict(json.loads(s))


def matrix_to_json(m: np.ndarray) -> list[list[float]]:
    """Row-major [re, im] pair list; floats round-trip exactly via repr."""
    return [[float(z.real), float(z.imag)] for z in np.asarray(m, dtype=complex).ravel()]


def matrix_from_json(entries, rows: int, cols: int) -> np.ndarray:
    flat = np.array([complex(re, im) for re, im in entries], dtype=complex)
    if flat.size != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {flat.size}")
    return flat.reshape(rows, cols)


@dataclasses.dataclass(frozen=True)
class ClassicalJoint:
    """Nonnegative joint pmf over labeled finite alphabets."""

    pmf: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        p = np.asarray(self.pmf, dtype=float)
        labels = tuple(str(l) for l in self.labels)
        if p.ndim != len(labels):
            raise ValueError("pmf rank must equal the number of variable labels")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate variable labels: {labels}")
        if p.min() < 0:
            raise ValueError("pmf has a negative entry")
        if abs(p.sum() - 1.0) > PMF_TOL:
            raise ValueError(f"pmf sums to {p.sum()}, not 1 within {PMF_TOL}")
        object.__setattr__(self, "pmf", _freeze(p))
        object.__setattr__(self, "labels", labels)

    @property
    def alphabets(self) -> tuple[int, ...]:
        return self.pmf.shape

    def label_indices(self, labels: Sequence[str]) -> list[int]:
        for l in labels:
            if l not in self.labels:
                raise KeyError(f"unknown variable label {l!r}; have {self.labels}")
        return [self.labels.index(l) for l in labels]

    def marginal(self, keep: Sequence[str]) -> "ClassicalJoint":
        keep_idx = sorted(self.label_indices(keep))
        drop = tuple(i for i in range(self.pmf.ndim) if i not in keep_idx)
        return ClassicalJoint(self.pmf.sum(axis=drop), tuple(self.labels[i] for i in keep_idx))

    def to_json_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "alphabets": list(self.alphabets),
            "pmf": [float(x) for x in self.pmf.ravel()],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ClassicalJoint":
        p = np.array(d["pmf"], dtype=float).reshape(tuple(d["alphabets"]))
        return cls(p, tuple(d["labels"]))

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json(cls, s: str) -> "ClassicalJoint":
        return cls.from_json_dict(json.loads(s))


@dataclasses.dataclass(frozen=True)
class MarkovBlock:
    """One direct-sum block: weight * (state on A x bL) tensor (state on bR x C)."""

    weight: float
    left: np.ndarray   # density matrix on A (x) bL
    right: np.ndarray  # density matrix on bR (x) C
    bl_dim: int
    br_dim: int


@dataclasses.dataclass(frozen=True)
class MarkovChainSpec:
    """Block decomposition of the middle system: B = direct sum of bL_j (x) bR_j."""

    blocks: tuple[MarkovBlock, ...]
    a_dim: int
    c_dim: int
    labels: tuple[str, str, str] = ("A", "B", "C")

    def __post_init__(self):
        w = sum(b.weight for b in self.blocks)
        if not self.blocks:
            raise ValueError("spec needs at least one block")
        if any(b.weight < -1e-14 for b in self.blocks) or abs(w - 1.0) > 1e-10:
            raise ValueError("block weights must form a probability distribution")
        for b in self.blocks:
            if b.left.shape != (self.a_dim * b.bl_dim,) * 2:
                raise ValueError("left factor has inconsistent dimensions")
            if b.right.shape != (b.br_dim * self.c_dim,) * 2:
                raise ValueError("right factor has inconsistent dimensions")

    @property
    def b_dim(self) -> int:
        return sum(b.bl_dim * b.br_dim for b in self.blocks)


def from_classical(joint: ClassicalJoint) -> DensityOperator:
    """Diagonal density operator in the computational product basis."""
    diag = joint.pmf.ravel()
    return DensityOperator(np.diag(diag.astype(complex)), joint.alphabets, joint.labels)


def marginal(state: DensityOperator, keep: Sequence[str]) -> DensityOperator:
    """Partial trace over the complement of ``keep`` (labels kept in order)."""
    keep_idx = sorted(state.label_indices(keep))
    m = linalg.partial_trace(state.matrix, state.dims, keep_idx)
    return DensityOperator(
        m,
        tuple(state.dims[i] for i in keep_idx),
        tuple(state.labels[i] for i in keep_idx),
    )


def assemble_markov(spec: MarkovChainSpec) -> DensityOperator:
    """Assemble the block-diagonal state sum_j w_j rho_{A bL_j} (x) rho_{bR_j C}.

    The direct-sum blocks are embedded by concatenating the bL_j (x) bR_j
    product bases along B's computational basis, in block order, with the
    left factor as the slow index inside each block.
    """
    da, dc = spec.a_dim, spec.c_dim
    db = spec.b_dim
    out = np.zeros((da, db, dc, da, db, dc), dtype=complex)
    offset = 0
    for blk in spec.blocks:
        nb = blk.bl_dim * blk.br_dim
        m = blk.weight * linalg.tensor_product(blk.left, blk.right)
        t = m.reshape(da, nb, dc, da, nb, dc)
        out[:, offset:offset + nb, :, :, offset:offset + nb, :] += t
        offset += nb
    n = da * db * dc
    return DensityOperator(out.reshape(n, n), (da, db, dc), spec.labels)


def _perm_parity(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    parity = 0
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        parity ^= (length - 1) & 1
    return -1 if parity else 1


def slater_state(d: int) -> DensityOperator:
    """Totally antisymmetric pure state on d subsystems of dimension d.

    The amplitude of the basis vector |pi(1) ... pi(d)> is sign(pi)/sqrt(d!).
    Capped at d = 6 (factorial amplitude count; the dense d^d-dimensional
    matrix grows steeply beyond that).
    """
    if not 2 <= d <= 6:
        raise ValueError("d must be between 2 and 6")
    dim = d ** d
    psi = np.zeros(dim, dtype=complex)
    norm = 1.0 / math.sqrt(math.factorial(d))
    for perm in itertools.permutations(range(d)):
        idx = 0
        for p in perm:
            idx = idx * d + p
        psi[idx] = _perm_parity(perm) * norm
    rho = np.outer(psi, psi.conj())
    labels = tuple(f"S{i + 1}" for i in range(d))
    return DensityOperator(rho, (d,) * d, labels)


def random_density(
    dims: Sequence[int],
    rank: int | None = None,
    seed: int = 0,
    labels: Sequence[str] | None = None,
) -> DensityOperator:
    """Normalized Wishart state G G^dagger / tr for a seeded complex Gaussian G.

    Full rank by default, which keeps relative entropies finite during
    fuzzing. Deterministic per seed.
    """
    dims = tuple(int(d) for d in dims)
    n = int(np.prod(dims))
    rank = n if rank is None else int(rank)
    if not 1 <= rank <= n:
        raise ValueError(f"rank must be in [1, {n}]")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    m = g @ g.conj().T
    m /= m.trace().real
    if labels is None:
        labels = [chr(ord("A") + i) for i in range(len(dims))]
    return DensityOperator(m, dims, tuple(labels))


def random_classical(
    alphabets: Sequence[int],
    seed: int = 0,
    labels: Sequence[str] | None = None,
) -> ClassicalJoint:
    """Seeded flat-Dirichlet joint pmf over the given alphabets."""
    alphabets = tuple(int(a) for a in alphabets)
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(int(np.prod(alphabets)))).reshape(alphabets)
    if labels is None:
        labels = [chr(ord("X") + i) if i < 3 else f"V{i}" for i in range(len(alphabets))]
    return ClassicalJoint(p, tuple(labels))


def _factor_pairs(n: int) -> list[tuple[int, int]]:
    return [(l, n // l) for l in range(1, n + 1) if n % l == 0]


def random_markov_spec(
    dims: Sequence[int],
    seed: int = 0,
    labels: Sequence[str] = ("A", "B", "C"),
) -> MarkovChainSpec:
    """Random block decomposition of B with random full-rank factors.

    Single-block decompositions (which give full-rank chains) and two-block
    ones are both drawn, so downstream relative entropies exercise finite
    and infinite values.
    """
    da, db, dc = (int(d) for d in dims)
    rng = np.random.default_rng(seed)

    def rand_factor(n, subseed):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        m = g @ g.conj().T
        return m / m.trace().real

    choices: list[list[tuple[int, int]]] = [[pair] for pair in _factor_pairs(db)]
    for split in range(1, db):
        for lp in _factor_pairs(split):
            for rp in _factor_pairs(db - split):
                choices.append([lp, rp])
    shape = choices[rng.integers(len(choices))]
    weights = rng.dirichlet(np.ones(len(shape)))
    blocks = []
    for w, (bl, br) in zip(weights, shape):
        blocks.append(
            MarkovBlock(
                weight=float(w),
                left=rand_factor(da * bl, None),
                right=rand_factor(br * dc, None),
                bl_dim=bl,
                br_dim=br,
            )
        )
    return MarkovChainSpec(tuple(blocks), da, dc, tuple(labels))
