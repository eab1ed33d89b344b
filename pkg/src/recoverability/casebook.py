"""Exact generators and closed-form evaluators for the worked examples:

* the erased-copy family (``sec41``): a tripartite distribution with a large
  conditional mutual information that a simple mixing channel nevertheless
  recovers well, in max-relative entropy;
* the modular-mixture family (``sec42``): a mixture of a perfect-copy triple
  and a modular-sum triple whose recovery channel leaves the uniform pair
  invariant, separating the relative-entropy bound from every finite-order
  Renyi deviation term;
* the corner-mass and binary-exchange distribution triples (``remark2``,
  ``remark3``) probing the sharpness of the triangle-like inequality;
* the totally antisymmetric state report (``antisym``): small conditional
  mutual information, yet far from any block-decomposable state.

Closed forms and enumerations are deliberately separate code paths; closed
forms use the large-alphabet simplifications (e.g. the collision probability
p + pq + q^2), enumerations are exact at finite n.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .channels import ClassicalChannel
from .entropies import (
    binary_entropy,
    classical_cmi,
    classical_d_alpha,
    classical_d_max,
    classical_relative_entropy,
    cmi,
)
from .states import ClassicalJoint, marginal, slater_state

ENUM_MAX_N = 8
LOG2_6 = math.log2(6.0)


@dataclasses.dataclass(frozen=True)
class ErasedCopyParams:
    """n: alphabet exponent (alphabet size 2^n); p: probability that the
    middle variable copies the source directly; q: probability that it copies
    the noisy copy instead."""

    n: int
    p: float
    q: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.p < 0 or self.q < 0 or self.p + self.q > 1 + 1e-12:
            raise ValueError("need p, q >= 0 with p + q <= 1")

    @property
    def size(self) -> int:
        return 2 ** self.n


@dataclasses.dataclass(frozen=True)
class ModularMixtureParams:
    """n: alphabet exponent; p: weight of the perfect-copy component."""

    n: int
    p: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must be a probability")

    @property
    def size(self) -> int:
        return 2 ** self.n


@dataclasses.dataclass(frozen=True)
class ClosedFormReport:
    """Named scalar results (bits) plus boolean findings for one experiment."""

    name: str
    values: dict[str, float]
    flags: dict[str, bool] = dataclasses.field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "values": {k: float(v) for k, v in self.values.items()},
            "flags": {k: bool(v) for k, v in self.flags.items()},
        }


def _check_enum_n(n: int):
    if n > ENUM_MAX_N:
        raise ValueError(f"n = {n} too large for explicit enumeration (max {ENUM_MAX_N})")


def erased_copy_joint(params: ErasedCopyParams) -> ClassicalJoint:
    """Exact joint pmf of (X, Y, Z): X uniform on 2^n symbols; Z copies X
    with probability p + q, else is fresh uniform; Y copies X with
    probability p, copies Z with probability q, else is fresh uniform.

    Summing over the hidden choice flags leaves five cell families:
    the full diagonal, the three partial diagonals, and the bulk.
    """
    _check_enum_n(params.n)
    n_sym = params.size
    p, q = params.p, params.q
    r = 1.0 - p - q
    ar = np.arange(n_sym)
    pmf = np.full((n_sym, n_sym, n_sym), r * r / n_sym ** 3)
    pmf[ar[:, None], np.arange(n_sym)[None, :], ar[:, None]] += (p + q) * r / n_sym ** 2
    pmf[ar, ar, :] += r * p / n_sym ** 2
    pmf[:, ar, ar] += r * q / n_sym ** 2
    pmf[ar, ar, ar] += (p + q) ** 2 / n_sym
    return ClassicalJoint(pmf, ("X", "Y", "Z"))


def erased_copy_recovery(params: ErasedCopyParams) -> ClassicalChannel:
    """Recovery channel Y -> (Y', Z'): with probability p^2 + q + pq output
    (Y, Y); with the remaining probability split evenly, output (Y, fresh
    uniform) or (fresh uniform, Y).  Reproduces the (Y, Z) marginal from the
    Y marginal exactly at every n."""
    n_sym = params.size
    p, q = params.p, params.q
    w_copy = p * p + q + p * q
    w_side = (1.0 - w_copy) / 2.0
    mat = np.zeros((n_sym * n_sym, n_sym))
    ar = np.arange(n_sym)
    for y in range(n_sym):
        mat[y * n_sym + y, y] += w_copy
        mat[y * n_sym + ar, y] += w_side / n_sym
        mat[ar * n_sym + y, y] += w_side / n_sym
    return ClassicalChannel(mat, n_sym, (n_sym, n_sym), "Y", ("Y", "Z"))


def _log2_ratio_max(pairs) -> float:
    """log2 of the largest numerator/denominator ratio; zero-mass numerators
    are skipped (support convention), a positive numerator over a zero
    denominator is +inf."""
    best = -math.inf
    for num, den in pairs:
        if num <= 0.0:
            continue
        if den <= 0.0:
            return math.inf
        best = max(best, math.log2(num / den))
    return best


def erased_copy_closed_forms(params: ErasedCopyParams) -> ClosedFormReport:
    """Large-n closed forms for the erased-copy family.

    The two conditional entropies marginalize the hidden flags exactly; the
    conditional-mutual-information lower bound discounts the flags' log 6
    information content; both max-relative entropies are five-way maxima of
    per-cell-family mass ratios with the collision probability p + pq + q^2.
    """
    n, p, q = params.n, params.p, params.q
    r = 1.0 - p - q
    p_eq = p + p * q + q * q  # large-n collision probability of X and Y
    p_ne = 1.0 - p_eq
    w_copy = p * p + q + p * q
    w_side = (1.0 - w_copy) / 2.0
    forward = _log2_ratio_max([
        ((p + q) ** 2, p_eq * w_copy),
        (r * q, p_ne * w_copy),
        ((p + q) * r, p_eq * w_side),
        (r * p, p_eq * w_side),
        (r * r, p_ne * 2.0 * w_side),
    ])
    reverse = _log2_ratio_max([
        (p_eq * w_copy, (p + q) ** 2),
        (p_ne * w_copy, r * q),
        (p_eq * w_side, (p + q) * r),
        (p_eq * w_side, r * p),
        (p_ne * 2.0 * w_side, r * r),
    ])
    return ClosedFormReport(
        name="erased_copy_closed_forms",
        values={
            "cond_ent_source_given_y_flags": n * r * (1.0 + q),
            "cond_ent_source_given_yz_flags": n * r * (1.0 - p),
            "cmi_lower": n * r * (p + q) - LOG2_6,
            "dmax_forward": forward,
            "dmax_reverse": reverse,
            "collision_probability": p_eq,
        },
    )


def modular_mixture_joint(params: ModularMixtureParams) -> ClassicalJoint:
    """Mixture p * (X = Y = Z uniform) + (1-p) * (X, Y independent uniform,
    Z = X + Y mod 2^n)."""
    _check_enum_n(params.n)
    n_sym = params.size
    p = params.p
    ar = np.arange(n_sym)
    pmf = np.zeros((n_sym, n_sym, n_sym))
    x, y = np.meshgrid(ar, ar, indexing="ij")
    pmf[x, y, (x + y) % n_sym] += (1.0 - p) / n_sym ** 2
    pmf[ar, ar, ar] += p / n_sym
    return ClassicalJoint(pmf, ("X", "Y", "Z"))


def modular_mixture_recovery(params: ModularMixtureParams) -> ClassicalChannel:
    """Recovery channel Y -> (Y', Z'): with probability p output (Y, Y); with
    probability 1-p output (U, (Y + U) mod 2^n) for fresh uniform U.

    The mixing branch regenerates the modular surface z = x + y from the
    perfectly-correlated component (where the input is X itself), which is
    what keeps the relative entropy to the recovered triple at log(1/p)
    instead of growing with n; with (Y - U) in the second slot that property
    is lost.  The marginalized map Y -> Y' leaves the uniform pair
    distribution invariant.
    """
    n_sym = params.size
    p = params.p
    mat = np.zeros((n_sym * n_sym, n_sym))
    ar = np.arange(n_sym)
    for y in range(n_sym):
        mat[y * n_sym + y, y] += p
        mat[ar * n_sym + ((y + ar) % n_sym), y] += (1.0 - p) / n_sym
    return ClassicalChannel(mat, n_sym, (n_sym, n_sym), "Y", ("Y", "Z"))


def modular_mixture_uniform_pair(params: ModularMixtureParams) -> ClassicalJoint:
    """The invariant witness: independent uniform (X, Y)."""
    n_sym = params.size
    return ClassicalJoint(np.full((n_sym, n_sym), 1.0 / n_sym ** 2), ("X", "Y"))


def _log2_sum_exp2(terms) -> float:
    """log2 of a sum of 2^term values, stable for huge exponents."""
    top = max(terms)
    if top == -math.inf:
        return -math.inf
    return top + math.log2(sum(2.0 ** (t - top) for t in terms))


def modular_mixture_closed_forms(alpha: float) -> ClosedFormReport:
    """Closed-form chain for the modular mixture at p = alpha^-2, n = alpha.

    Evaluated entirely in log space (the dominating witness term contains
    (1 - p + p 2^n)^alpha).  The report states whether the chain
    relative-entropy-upper + order-alpha-deviation-upper < cmi-lower holds at
    this alpha rather than assuming it; it holds for large alpha and the
    report carries the empirical margin.
    """
    if alpha < 2:
        raise ValueError("alpha must be at least 2")
    p = alpha ** -2.0
    n = alpha
    cmi_lower = (1.0 - p) * n - binary_entropy(p)
    d_upper = math.log2(1.0 / p)
    # log2 of 2^-n (1-p)^alpha (2^n - 1):  -n + alpha log2(1-p) + log2(2^n - 1)
    log2_2n_minus_1 = n + math.log1p(-(2.0 ** -n)) / math.log(2.0)
    term_flat = -n + alpha * math.log2(1.0 - p) + log2_2n_minus_1
    # log2 of 2^-n (1 - p + p 2^n)^alpha with 1 - p + p 2^n = p 2^n (1 + (1-p)/(p 2^n))
    log2_spike_base = math.log2(p) + n + math.log1p((1.0 - p) / (p * 2.0 ** n)) / math.log(2.0)
    term_spike = -n + alpha * log2_spike_base
    lam_upper = _log2_sum_exp2([term_flat, term_spike]) / (alpha - 1.0)
    gap = cmi_lower - d_upper - lam_upper
    return ClosedFormReport(
        name="modular_mixture_closed_forms",
        values={
            "cmi_lower": cmi_lower,
            "d_upper": d_upper,
            "lambda_alpha_upper": lam_upper,
            "chain_gap": gap,
        },
        flags={"chain_holds": gap > 0.0},
    )


def corner_mass_distributions(p: float) -> tuple[ClassicalJoint, ClassicalJoint, ClassicalJoint]:
    """Three distributions on {0,1}^2: mass p in one corner and (1-p)/3
    elsewhere; the same with the opposite corner; and uniform."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    off = (1.0 - p) / 3.0
    pm = np.full((2, 2), off)
    pm[0, 0] = p
    qm = np.full((2, 2), off)
    qm[1, 1] = p
    sm = np.full((2, 2), 0.25)
    labels = ("X", "Y")
    return (
        ClassicalJoint(pm, labels),
        ClassicalJoint(qm, labels),
        ClassicalJoint(sm, labels),
    )


def corner_mass_closed_forms(p: float, alpha: float) -> ClosedFormReport:
    """Closed forms for the corner-mass triple and the triangle-gap at the
    given order (order 1 delegates to the relative entropy)."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    d_pq = (4.0 * p - 1.0) / 3.0 * math.log2(3.0 * p / (1.0 - p))
    d_ps = p * math.log2(4.0 * p) + (1.0 - p) * math.log2(4.0 * (1.0 - p) / 3.0)
    if abs(alpha - 1.0) <= 1e-6:
        _, q, s = corner_mass_distributions(p)
        d_alpha_sq = classical_relative_entropy(s.pmf, q.pmf)
    else:
        d_alpha_sq = (1.0 / (alpha - 1.0)) * math.log2(
            3.0 ** alpha / (4.0 ** alpha * (1.0 - p) ** (alpha - 1.0))
            + 1.0 / (4.0 ** alpha * p ** (alpha - 1.0))
        )
    gap = d_pq - d_ps - d_alpha_sq
    return ClosedFormReport(
        name="corner_mass_closed_forms",
        values={"d_pq": d_pq, "d_ps": d_ps, "d_alpha_sq": d_alpha_sq, "triangle_gap": gap},
        flags={"triangle_violated": gap > 0.0},
    )


def binary_exchange_distributions(
    p: float, eps: float
) -> tuple[ClassicalJoint, ClassicalJoint, ClassicalJoint]:
    """Binary distributions (1-p, p), (1-eps, eps) and (1-p/2, p/2)."""
    for v, name in ((p, "p"), (eps, "eps")):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must be a probability")
    labels = ("X",)
    return (
        ClassicalJoint(np.array([1.0 - p, p]), labels),
        ClassicalJoint(np.array([1.0 - eps, eps]), labels),
        ClassicalJoint(np.array([1.0 - p / 2.0, p / 2.0]), labels),
    )


def binary_exchange_closed_forms(p: float, eps: float) -> ClosedFormReport:
    """Relative entropies of the binary triple and the exchanged-triangle gap.

    The max-relative entropy is evaluated with support-restricted ratios
    (so p = 0 gives 0, not the log 2 branch of the generic formula).
    """
    pd, qd, sd = binary_exchange_distributions(p, eps)
    d_pq = classical_relative_entropy(pd.pmf, qd.pmf)
    d_sq = classical_relative_entropy(sd.pmf, qd.pmf)
    dmax_ps = classical_d_max(pd.pmf, sd.pmf)
    gap = d_pq - dmax_ps - d_sq
    return ClosedFormReport(
        name="binary_exchange_closed_forms",
        values={"d_pq": d_pq, "d_sq": d_sq, "dmax_ps": dmax_ps, "exchange_gap": gap},
        flags={"exchange_violated": gap > 0.0},
    )


def antisymmetric_report(d: int) -> ClosedFormReport:
    """Per-step conditional mutual informations of the totally antisymmetric
    state: I(S1 : Sk | S2 ... S(k-1)) for k = 2..d, their sum (which the
    chain rule pins at twice the single-site entropy), and the pigeonhole
    bound on the smallest one."""
    if not 2 <= d <= 6:
        raise ValueError("d must be between 2 and 6")
    state = slater_state(d)
    labels = state.labels
    values: dict[str, float] = {}
    per_k = []
    for k in range(2, d + 1):
        block = marginal(state, labels[:k]) if k < d else state
        val = cmi(block, a_labels=(labels[0],), c_labels=(labels[k - 1],))
        per_k.append(val)
        values[f"cmi_step_{k}"] = val
    values["cmi_sum"] = float(sum(per_k))
    values["chain_bound"] = 2.0 * math.log2(d)
    values["cmi_min"] = float(min(per_k))
    values["pigeonhole_bound"] = 2.0 / (d - 1) * math.log2(d)
    values["purity"] = state.purity()
    return ClosedFormReport(
        name="antisymmetric_report",
        values=values,
        flags={
            "sum_within_bound": sum(per_k) <= values["chain_bound"] + 1e-8,
            "min_within_bound": min(per_k) <= values["pigeonhole_bound"] + 1e-8,
        },
    )


def erased_copy_enumeration(params: ErasedCopyParams) -> dict[str, float]:
    """Exact finite-n quantities for the erased-copy family, via the
    enumerated joint: conditional mutual information, both max-relative
    entropies against the recovered triple, the marginal-match residual of
    the recovery channel, and the exact collision probability."""
    from .channels import classical_channel_apply

    joint = erased_copy_joint(params)
    rec = erased_copy_recovery(params)
    recovered = classical_channel_apply(rec, joint.marginal(("X", "Y")), "Y")
    yz = joint.marginal(("Y", "Z"))
    rec_yz = classical_channel_apply(rec, joint.marginal(("Y",)), "Y")
    n_sym = params.size
    ar = np.arange(n_sym)
    return {
        "cmi": classical_cmi(joint, ("X",), ("Z",)),
        "dmax_forward": classical_d_max(joint.pmf, recovered.pmf),
        "dmax_reverse": classical_d_max(recovered.pmf, joint.pmf),
        "relent_forward": classical_relative_entropy(joint.pmf, recovered.pmf),
        "marginal_match_residual": float(np.abs(rec_yz.pmf - yz.pmf).max()),
        "collision_probability": float(joint.pmf[ar, ar, :].sum()),
    }


def modular_mixture_enumeration(params: ModularMixtureParams) -> dict[str, float]:
    """Exact finite-n quantities for the modular mixture: conditional mutual
    information, the relative entropy to the recovered triple, the
    marginal-match residual, and the invariance residual of the uniform
    pair under the marginalized recovery map."""
    from .channels import classical_channel_apply

    joint = modular_mixture_joint(params)
    rec = modular_mixture_recovery(params)
    recovered = classical_channel_apply(rec, joint.marginal(("X", "Y")), "Y")
    rec_yz = classical_channel_apply(rec, joint.marginal(("Y",)), "Y")
    yz = joint.marginal(("Y", "Z"))
    uniform_pair = modular_mixture_uniform_pair(params)
    moved = classical_channel_apply(rec, uniform_pair, "Y").marginal(("X", "Y"))
    return {
        "cmi": classical_cmi(joint, ("X",), ("Z",)),
        "relent_forward": classical_relative_entropy(joint.pmf, recovered.pmf),
        "d_upper_closed": math.log2(1.0 / params.p) if params.p > 0 else math.inf,
        "marginal_match_residual": float(np.abs(rec_yz.pmf - yz.pmf).max()),
        "invariance_residual": float(np.abs(moved.pmf - uniform_pair.pmf).max()),
    }


def modular_mixture_witness_divergence(params: ModularMixtureParams, alpha: float) -> float:
    """Order-alpha divergence from the (X, Y) marginal of the mixture to the
    invariant uniform pair, by direct enumeration."""
    joint = modular_mixture_joint(params)
    xy = joint.marginal(("X", "Y"))
    uniform_pair = modular_mixture_uniform_pair(params)
    return classical_d_alpha(xy.pmf, uniform_pair.pmf, alpha)
