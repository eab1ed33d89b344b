"""Acceptance suite: every exit criterion at its stated tolerance, one
pass/fail line per criterion (visible with pytest -s)."""

import math
import time

import numpy as np

from recoverability import (
    apply,
    classical_to_quantum,
    classical_cmi,
    from_classical,
    lambda_max,
    lambda_max_classical_lp,
    marginal,
    petz_map,
    random_classical,
    relative_entropy,
    restrict_output,
)
from recoverability.casebook import (
    ErasedCopyParams,
    ModularMixtureParams,
    antisymmetric_report,
    binary_exchange_closed_forms,
    erased_copy_closed_forms,
    erased_copy_enumeration,
    modular_mixture_closed_forms,
    modular_mixture_enumeration,
)
from recoverability.harness import (
    TrialConfig,
    verify_dimbound,
    verify_fr,
    verify_theorem,
    verify_triangle,
    verify_winter,
)

LOG2_6 = math.log2(6.0)


def report(criterion, passed, detail=""):
    print(f"{'PASS' if passed else 'FAIL'} criterion {criterion}: {detail}")
    assert passed, f"criterion {criterion}: {detail}"


def test_criterion_1_classical_petz_equality():
    """Classical recovery is exact: the relative entropy to the transpose-map
    reconstruction equals the conditional mutual information, and the
    reduced map leaves the input invariant (both to 1e-9, 100 states, 10 s)."""
    alphabet_cycle = [(2, 2, 2), (3, 3, 3), (4, 4, 4), (2, 3, 4), (4, 2, 3), (3, 4, 2)]
    started = time.perf_counter()
    worst_eq = 0.0
    worst_lam = 0.0
    for trial in range(100):
        joint = random_classical(alphabet_cycle[trial % len(alphabet_cycle)],
                                 seed=[1000, trial], labels=("X", "Y", "Z"))
        rho = from_classical(joint)
        rec = petz_map(marginal(rho, ("Y", "Z")))
        rho_xy = marginal(rho, ("X", "Y"))
        d_val = relative_entropy(rho, apply(rec, rho_xy))
        i_val = classical_cmi(joint, ("X",), ("Z",))
        worst_eq = max(worst_eq, abs(d_val - i_val))
        lam = lambda_max(rho_xy, restrict_output(rec))
        worst_lam = max(worst_lam, lam.value)
    elapsed = time.perf_counter() - started
    report(
        1,
        worst_eq <= 1e-9 and worst_lam <= 1e-9 and elapsed <= 10.0,
        f"|D - I| <= {worst_eq:.2e}, lambda <= {worst_lam:.2e}, {elapsed:.1f}s",
    )


def test_criterion_2_main_bound():
    """Main lower bound with certified invariant-deviation term: margin
    >= -1e-6 on 100 trials at (2,2,2) and 30 at (2,3,2), within 5 minutes."""
    started = time.perf_counter()
    rep_a = verify_theorem(TrialConfig(dims=(2, 2, 2), trials=100, seed=21))
    rep_b = verify_theorem(TrialConfig(dims=(2, 3, 2), trials=30, seed=22))
    elapsed = time.perf_counter() - started
    worst = min(rep_a.margins["recovery_lower_bound"]["min"],
                rep_b.margins["recovery_lower_bound"]["min"])
    gap = max(rep_a.quantities["max_lambda_gap"], rep_b.quantities["max_lambda_gap"])
    failures = rep_a.quantities["solver_failures"] + rep_b.quantities["solver_failures"]
    report(
        2,
        rep_a.passed and rep_b.passed and worst >= -1e-6 and gap <= 1e-6
        and failures == 0 and elapsed <= 300.0,
        f"min margin {worst:.2e}, max gap {gap:.2e}, {failures} solver failures, {elapsed:.0f}s",
    )


def test_criterion_3_markov_distance_bound():
    """Relative entropy to any block-decomposable state dominates the
    conditional mutual information: 200 pairs, margin >= -1e-8, 30 s."""
    started = time.perf_counter()
    rep_a = verify_winter(TrialConfig(dims=(2, 2, 2), trials=100, seed=31))
    rep_b = verify_winter(TrialConfig(dims=(2, 3, 2), trials=100, seed=32))
    elapsed = time.perf_counter() - started
    worst = min(rep_a.margins["markov_relent_bound"]["min"],
                rep_b.margins["markov_relent_bound"]["min"])
    finite = (rep_a.quantities["finite_relent_trials"]
              + rep_b.quantities["finite_relent_trials"])
    report(
        3,
        rep_a.passed and rep_b.passed and worst >= -1e-8 and finite >= 50
        and elapsed <= 30.0,
        f"min margin {worst:.2e} over 200 pairs ({finite} finite), {elapsed:.1f}s",
    )


def test_criterion_4_triangle_inequality():
    """Triangle-like inequality at orders 0.5, 0.75, 1 and the
    finite-dimensional extension at 2 and 4: 200 triples, margin >= -1e-8."""
    rep = verify_triangle(TrialConfig(dims=(2, 3, 4), trials=200, seed=41))
    worst = min(
        rep.margins[f"renyi_triangle_alpha_{a:g}"]["min"] for a in (0.5, 0.75, 1.0, 2.0, 4.0)
    )
    count = sum(
        rep.margins[f"renyi_triangle_alpha_{a:g}"]["count"] for a in (0.5, 0.75, 1.0)
    )
    report(
        4,
        rep.passed and worst >= -1e-8 and count >= 600,
        f"min margin {worst:.2e} over {count} triple evaluations",
    )


def test_criterion_5_binary_exchange_instance():
    """The explicit binary instance: the max-relative entropy is exactly one
    bit and exchanging it with the relative entropy breaks the triangle."""
    rep = binary_exchange_closed_forms(7.0 / 8.0, 1.0 / 8.0)
    dmax_exact = abs(rep.values["dmax_ps"] - 1.0) <= 1e-12
    gap = rep.values["exchange_gap"]
    report(
        5,
        dmax_exact and gap > 0,
        f"dmax = {rep.values['dmax_ps']!r}, exchange gap = {gap:.4f}",
    )


def test_criterion_6_erased_copy_headlines():
    """Closed forms hit the headline values exactly; enumeration converges at
    rate 2^-n; the bound formula reproduces; the cmi/recovery separation
    grows linearly in n."""
    fwd = erased_copy_closed_forms(ErasedCopyParams(6, 0.5, 0.0)).values["dmax_forward"]
    rev = erased_copy_closed_forms(ErasedCopyParams(6, 0.25, 0.25)).values["dmax_reverse"]
    exact = abs(fwd - 1.0) <= 1e-12 and abs(rev - math.log2(15.0 / 8.0)) <= 1e-12

    conv_ok = True
    ratios = []
    for n in (4, 6, 8):
        enum_f = erased_copy_enumeration(ErasedCopyParams(n, 0.5, 0.0))
        enum_r = erased_copy_enumeration(ErasedCopyParams(n, 0.25, 0.25))
        tol = 16.0 * 2.0 ** (-n)
        conv_ok = conv_ok and abs(enum_f["dmax_forward"] - 1.0) <= tol
        conv_ok = conv_ok and abs(enum_r["dmax_reverse"] - math.log2(15.0 / 8.0)) <= tol
        ratios.append(enum_f["cmi"] / enum_f["dmax_forward"])

    bound = erased_copy_closed_forms(ErasedCopyParams(40, 0.5, 0.0)).values["cmi_lower"]
    formula_ok = bound == 40 * 0.5 * 0.5 - LOG2_6

    growing = ratios[0] < ratios[1] < ratios[2]
    report(
        6,
        exact and conv_ok and formula_ok and growing,
        f"fwd={fwd!r} rev={rev!r} ratios={[round(r, 2) for r in ratios]}",
    )


def test_criterion_7_modular_mixture_chain():
    """Closed-form chain strictly positive at order 64 (log space only); the
    n=4 enumeration obeys the recovery bound and the invariance is exact."""
    closed = modular_mixture_closed_forms(64.0)
    enum = modular_mixture_enumeration(ModularMixtureParams(n=4, p=0.1))
    chain_ok = closed.flags["chain_holds"] and closed.values["chain_gap"] > 0
    d_ok = enum["relent_forward"] <= math.log2(10.0) + 1e-9
    inv_ok = enum["invariance_residual"] <= 1e-12
    report(
        7,
        chain_ok and d_ok and inv_ok,
        f"chain gap {closed.values['chain_gap']:.3f} bits, "
        f"D = {enum['relent_forward']:.3f} <= {math.log2(10.0):.3f}, "
        f"invariance {enum['invariance_residual']:.1e}",
    )


def test_criterion_8_universal_recovery():
    """Universal averaged recovery map at 64 nodes: fidelity within the
    conditional mutual information (quadrature slack 1e-3) on 100 states."""
    rep = verify_fr(TrialConfig(dims=(2, 2, 2), trials=100, seed=81))
    worst = rep.margins["universal_recovery_fidelity"]["min"]
    weights_ok = rep.quantities["weight_defect"] <= 1e-10
    report(
        8,
        rep.passed and worst >= -1e-3 and weights_ok,
        f"min fidelity margin {worst:.2e}, weight defect {rep.quantities['weight_defect']:.1e}",
    )


def test_criterion_9_dimension_chain():
    """Pinsker and the dimension-dependent fourth-power chain on 100 trials,
    margins >= -1e-8."""
    rep = verify_dimbound(TrialConfig(dims=(2, 2, 2), trials=100, seed=91))
    worst = min(rep.margins["pinsker"]["min"], rep.margins["dimension_chain"]["min"])
    report(9, rep.passed and worst >= -1e-8, f"min chain margin {worst:.2e}")


def test_criterion_10_antisymmetric():
    """Totally antisymmetric state at d = 3: chain-rule sum and pigeonhole
    bounds hold, the state is pure to 1e-10."""
    rep = antisymmetric_report(3)
    sum_ok = rep.values["cmi_sum"] <= 2 * math.log2(3.0) + 1e-8
    min_ok = rep.values["cmi_min"] <= math.log2(3.0) + 1e-8
    purity_ok = abs(rep.values["purity"] - 1.0) <= 1e-10
    report(
        10,
        sum_ok and min_ok and purity_ok,
        f"sum {rep.values['cmi_sum']:.4f} <= {2 * math.log2(3.0):.4f}, "
        f"min {rep.values['cmi_min']:.4f} <= {math.log2(3.0):.4f}",
    )


def test_criterion_11_lp_sdp_oracle_equivalence():
    """The linear-programming route and the semidefinite route agree to 1e-7
    on 50 random diagonal instances."""
    worst = 0.0
    for trial in range(50):
        na, nb = [(2, 3), (3, 2), (2, 4), (4, 2), (3, 3)][trial % 5]
        joint = random_classical((na, nb), seed=[1100, trial], labels=("A", "B"))
        rng = np.random.default_rng([1101, trial])
        stoch = np.array([rng.dirichlet(np.ones(nb)) for _ in range(nb)]).T
        lp_val = lambda_max_classical_lp(joint.pmf, stoch)
        from recoverability.channels import ClassicalChannel

        qch = classical_to_quantum(ClassicalChannel(stoch, nb, (nb,), "B", ("B",)))
        sdp_val = lambda_max(from_classical(joint), qch).value
        worst = max(worst, abs(lp_val - sdp_val))
    report(11, worst <= 1e-7, f"max |LP - SDP| = {worst:.2e} over 50 instances")
