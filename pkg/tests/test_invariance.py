import math

import numpy as np
import pytest

from recoverability import (
    DensityOperator,
    QuantumChannel,
    apply,
    classical_to_quantum,
    cmi,
    d_max,
    fixed_point_basis,
    from_classical,
    lambda_alpha_upper,
    lambda_max,
    lambda_max_classical_lp,
    lift_fixed_points,
    marginal,
    markov_dmax_bound,
    max_support_fixed_state,
    petz_map,
    random_channel,
    random_classical,
    random_density,
    restrict_output,
    trace_distance,
)
from recoverability.channels import ClassicalChannel
from recoverability.states import assemble_markov, random_markov_spec


def identity_channel(d):
    return QuantumChannel((np.eye(d, dtype=complex),), (d,), (d,), ("B",), ("B",))


def depolarizing_channel(d):
    ks = tuple(
        np.sqrt(1.0 / d) * np.outer(np.eye(d)[:, i], np.eye(d)[j]).astype(complex)
        for i in range(d)
        for j in range(d)
    )
    return QuantumChannel(ks, (d,), (d,), ("B",), ("B",))


def stochastic_quantum(mat, label="B"):
    n = mat.shape[0]
    return classical_to_quantum(ClassicalChannel(mat, n, (n,), label, (label,)))


class TestFixedPointBasis:
    def test_identity_channel_full_space(self):
        fps = fixed_point_basis(identity_channel(2))
        assert len(fps) == 4

    def test_depolarizing_unique(self):
        fps = fixed_point_basis(depolarizing_channel(2))
        assert len(fps) == 1
        g = fps.basis[0]
        assert np.abs(g / g.trace() - np.eye(2) / 2).max() <= 1e-8

    def test_two_ergodic_classes(self):
        # two independent mixing blocks: fixed space is two-dimensional,
        # spanned by the per-class uniform distributions
        mat = np.zeros((4, 4))
        mat[:2, :2] = 0.5
        mat[2:, 2:] = 0.5
        fps = fixed_point_basis(stochastic_quantum(mat))
        assert len(fps) == 2
        for g in fps.basis:
            off = g - np.diag(np.diagonal(g))
            assert np.abs(off).max() <= 1e-8

    def test_basis_elements_are_fixed_and_orthonormal(self):
        ch = random_channel((3,), (3,), env_dim=2, seed=1, in_labels=("B",), out_labels=("B",))
        fps = fixed_point_basis(ch)
        assert len(fps) >= 1
        for i, g in enumerate(fps.basis):
            assert np.linalg.norm(ch.apply_matrix(g) - g) <= 1e-8
            for j, h in enumerate(fps.basis):
                want = 1.0 if i == j else 0.0
                assert abs(np.trace(g.conj().T @ h).real - want) <= 1e-10


class TestLift:
    def test_identity_lift_dimension(self):
        fps = fixed_point_basis(identity_channel(2))
        assert len(lift_fixed_points(fps, 2)) == 16

    def test_unique_fixed_point_lift(self):
        fps = fixed_point_basis(depolarizing_channel(2))
        lifted = lift_fixed_points(fps, 2)
        assert len(lifted) == 4

    def test_lifted_elements_fixed(self):
        ch = random_channel((2,), (2,), env_dim=2, seed=2, in_labels=("B",), out_labels=("B",))
        fps = fixed_point_basis(ch)
        lifted = lift_fixed_points(fps, 2)
        eye = np.eye(2)
        for g in lifted.basis:
            moved = sum(
                np.kron(eye, k) @ g @ np.kron(eye, k).conj().T for k in ch.kraus
            )
            assert np.linalg.norm(moved - g) <= 1e-8


class TestMaxSupportFixedState:
    def test_depolarizing(self):
        tau = max_support_fixed_state(fixed_point_basis(depolarizing_channel(3)))
        assert np.abs(tau - np.eye(3) / 3).max() <= 1e-8

    def test_is_fixed(self):
        ch = random_channel((3,), (3,), env_dim=2, seed=3, in_labels=("B",), out_labels=("B",))
        tau = max_support_fixed_state(fixed_point_basis(ch))
        assert np.linalg.norm(ch.apply_matrix(tau) - tau) <= 1e-7
        assert np.linalg.eigvalsh(tau).min() >= -1e-10


class TestLambdaMax:
    def test_identity_channel_gives_zero(self):
        rho = random_density((2, 2), seed=4, labels=("A", "B"))
        res = lambda_max(rho, identity_channel(2))
        assert res.value <= 1e-6
        assert res.witness is not None
        assert trace_distance(res.witness, rho) <= 1e-9

    def test_depolarizing_pure_input_one_bit(self):
        rho = DensityOperator(np.diag([1.0, 0, 0, 0]).astype(complex), (2, 2), ("A", "B"))
        res = lambda_max(rho, depolarizing_channel(2))
        assert res.value == pytest.approx(1.0, abs=1e-6)
        assert res.gap <= 1e-6
        # grid-search oracle over the invariant family tau_A (x) 1/2
        best = math.inf
        for x in np.linspace(0.01, 0.99, 99):
            tau = np.kron(np.diag([x, 1 - x]), np.eye(2) / 2)
            best = min(best, d_max(rho, tau))
        assert res.value <= best + 1e-6

    def test_witness_is_invariant_and_attains(self):
        rho = random_density((2, 2), seed=5, labels=("A", "B"))
        ch = restrict_output(
            random_channel((2,), (2, 2), env_dim=2, seed=6, in_labels=("B",), out_labels=("B", "C"))
        )
        res = lambda_max(rho, ch)
        assert res.gap <= 1e-6
        moved = apply(ch, res.witness)
        assert trace_distance(moved, res.witness) <= 1e-7
        assert d_max(rho, res.witness) == pytest.approx(res.value, abs=1e-9)

    def test_invariant_state_fast_path(self):
        # invariance within 1e-9 forces a near-zero value
        ch = random_channel((2,), (2,), env_dim=2, seed=7, in_labels=("B",), out_labels=("B",))
        tau = max_support_fixed_state(fixed_point_basis(ch))
        rho_a = random_density((2,), seed=8, labels=("A",))
        rho = DensityOperator(np.kron(rho_a.matrix, tau), (2, 2), ("A", "B"))
        res = lambda_max(rho, ch)
        assert res.value <= 1e-6

    def test_disturbed_state_has_macroscopic_value(self):
        # trace distance >= 0.1 from every invariant state forces a value
        # via -log F <= D_max and the definiteness of the fidelity
        rho = DensityOperator(np.diag([1.0, 0, 0, 0]).astype(complex), (2, 2), ("A", "B"))
        moved = apply(depolarizing_channel(2), rho)
        assert trace_distance(moved, rho) >= 0.1
        res = lambda_max(rho, depolarizing_channel(2))
        assert res.value >= 1e-3

    def test_bounded_by_invariant_witness_distance(self):
        # the uniform pair is invariant under the marginalized modular-mixture
        # recovery, so it witnesses an upper bound on the optimal value
        from recoverability.casebook import (
            ModularMixtureParams,
            modular_mixture_joint,
            modular_mixture_recovery,
            modular_mixture_uniform_pair,
        )

        params = ModularMixtureParams(n=2, p=0.3)
        rho_xy = from_classical(modular_mixture_joint(params).marginal(("X", "Y")))
        witness = from_classical(modular_mixture_uniform_pair(params))
        r_yy = restrict_output(
            classical_to_quantum(modular_mixture_recovery(params)), drop_labels=("Z",)
        )
        res = lambda_max(rho_xy, r_yy)
        assert res.value <= d_max(rho_xy, witness.matrix) + 1e-9

    def test_infeasible_support_returns_infinity(self):
        # channel resets B to |0><0|: the only invariant state has rank-one
        # B-marginal, so a full-rank input cannot be dominated
        reset = QuantumChannel(
            (np.array([[1, 0], [0, 0]], dtype=complex),
             np.array([[0, 1], [0, 0]], dtype=complex)),
            (2,), (2,), ("B",), ("B",),
        )
        rho = random_density((2, 2), seed=9, labels=("A", "B"))
        res = lambda_max(rho, reset)
        assert res.value == math.inf
        assert res.witness is None

    def test_witness_optimality_under_perturbations(self):
        rho = random_density((2, 2), seed=10, labels=("A", "B"))
        ch = restrict_output(
            random_channel((2,), (2, 2), env_dim=2, seed=11, in_labels=("B",), out_labels=("B", "C"))
        )
        res = lambda_max(rho, ch)
        fps = lift_fixed_points(fixed_point_basis(ch), 2)
        rng = np.random.default_rng(12)
        for _ in range(50):
            coeffs = rng.standard_normal(len(fps))
            direction = sum(c * g for c, g in zip(coeffs, fps.basis))
            cand = res.witness.matrix + 1e-3 * direction
            w = np.linalg.eigvalsh(cand)
            if w.min() < 1e-12:
                continue
            cand = cand / cand.trace().real
            assert d_max(rho, cand) >= res.value - res.gap - 1e-9

    def test_data_processing_consistency(self):
        for seed in range(10):
            rho = random_density((2, 2), seed=[13, seed], labels=("A", "B"))
            tau = random_density((2, 2), seed=[14, seed], labels=("A", "B"))
            ch = random_channel((2,), (2,), env_dim=2, seed=[15, seed],
                                in_labels=("B",), out_labels=("B",))
            before = d_max(rho, tau)
            after = d_max(apply(ch, rho), apply(ch, tau))
            assert after <= before + 1e-8


class TestClassicalLpOracle:
    def test_matches_sdp_on_diagonal_instances(self):
        for seed in range(10):
            joint = random_classical((2, 3), seed=[16, seed], labels=("A", "B"))
            rng = np.random.default_rng([17, seed])
            mat = np.array([rng.dirichlet(np.ones(3)) for _ in range(3)]).T
            lp_val = lambda_max_classical_lp(joint.pmf, mat)
            res = lambda_max(from_classical(joint), stochastic_quantum(mat))
            assert res.value == pytest.approx(lp_val, abs=1e-7)

    def test_lp_identity_channel(self):
        joint = random_classical((2, 2), seed=18)
        assert abs(lambda_max_classical_lp(joint.pmf, np.eye(2))) <= 1e-9

    def test_lp_infeasible(self):
        # absorbing chain: fixed distribution is the point mass at state 0
        mat = np.array([[1.0, 1.0], [0.0, 0.0]])
        joint = random_classical((2, 2), seed=19)
        assert lambda_max_classical_lp(joint.pmf, mat) == math.inf


class TestLambdaAlphaUpper:
    def test_invariant_input_gives_zero(self):
        ch = random_channel((2,), (2,), env_dim=2, seed=20, in_labels=("B",), out_labels=("B",))
        tau_b = max_support_fixed_state(fixed_point_basis(ch))
        rho = DensityOperator(
            np.kron(random_density((2,), seed=21).matrix, tau_b), (2, 2), ("A", "B")
        )
        assert lambda_alpha_upper(rho, ch, 2.0, rho) <= 1e-8

    def test_rejects_non_invariant_witness(self):
        ch = depolarizing_channel(2)
        rho = DensityOperator(np.diag([1.0, 0, 0, 0]).astype(complex), (2, 2), ("A", "B"))
        with pytest.raises(ValueError):
            lambda_alpha_upper(rho, ch, 2.0, rho)

    def test_modular_mixture_witness_bound(self):
        # order-alpha deviation of the mixture from the invariant uniform
        # pair matches the closed form, and bounds the infimum
        from recoverability.casebook import (
            ModularMixtureParams,
            modular_mixture_joint,
            modular_mixture_recovery,
            modular_mixture_uniform_pair,
        )

        params = ModularMixtureParams(n=2, p=0.3)
        joint = modular_mixture_joint(params)
        rho_xy = from_classical(joint.marginal(("X", "Y")))
        witness = from_classical(modular_mixture_uniform_pair(params))
        rec = classical_to_quantum(modular_mixture_recovery(params))
        r_yy = restrict_output(rec, drop_labels=("Z",))
        for alpha in (2.0, 4.0):
            got = lambda_alpha_upper(rho_xy, r_yy, alpha, witness)
            n, p = params.size, params.p
            want = (1.0 / (alpha - 1.0)) * math.log2(
                (1 - p) ** alpha * (n - 1) / n + (1 - p + p * n) ** alpha / n
            )
            assert got == pytest.approx(want, abs=1e-9)

    def test_large_alpha_consistent_with_dmax(self):
        ch = random_channel((2,), (2,), env_dim=2, seed=22, in_labels=("B",), out_labels=("B",))
        tau_b = max_support_fixed_state(fixed_point_basis(ch))
        witness = DensityOperator(np.kron(np.eye(2) / 2, tau_b), (2, 2), ("A", "B"))
        rho = random_density((2, 2), seed=23, labels=("A", "B"))
        big = lambda_alpha_upper(rho, ch, 1e4, witness)
        assert big == pytest.approx(d_max(rho, witness.matrix), abs=1e-2)


class TestMarkovBound:
    def test_read_only_recovery(self):
        # invariant input: the certificate chain is the recovered state itself
        joint = random_classical((3, 3, 3), seed=24, labels=("A", "B", "C"))
        rho = from_classical(joint)
        rho_ab = marginal(rho, ("A", "B"))
        rec = petz_map(marginal(rho, ("B", "C")))
        recovered = apply(rec, rho_ab)
        lam = lambda_max(rho_ab, restrict_output(rec))
        cert = markov_dmax_bound(recovered, lam, rec)
        assert not cert.flagged
        assert cert.value <= 1e-6

    def test_certificate_state_is_markov(self):
        rho = random_density((2, 2, 2), seed=25, labels=("A", "B", "C"))
        rec = random_channel((2,), (2, 2), env_dim=2, seed=26,
                             in_labels=("B",), out_labels=("B", "C"))
        rho_ab = marginal(rho, ("A", "B"))
        lam = lambda_max(rho_ab, restrict_output(rec))
        cert = markov_dmax_bound(apply(rec, rho_ab), lam, rec)
        assert cert.markov_cmi <= 1e-6
        assert cert.value <= lam.value + 1e-6  # data processing

    def test_certificate_against_sampled_chains(self):
        rho = random_density((2, 2, 2), seed=27, labels=("A", "B", "C"))
        rec = random_channel((2,), (2, 2), env_dim=2, seed=28,
                             in_labels=("B",), out_labels=("B", "C"))
        rho_ab = marginal(rho, ("A", "B"))
        recovered = apply(rec, rho_ab)
        lam = lambda_max(rho_ab, restrict_output(rec))
        cert = markov_dmax_bound(recovered, lam, rec)
        candidates = [cert.value]
        for seed in range(40):
            mu = assemble_markov(random_markov_spec((2, 2, 2), seed=[29, seed]))
            candidates.append(d_max(recovered, mu))
        assert cert.value >= min(candidates) - 1e-6

    def test_read_only_recovery_drops_the_deviation_term(self):
        # an append-style recovery leaves the input untouched on B, so the
        # deviation term vanishes and the relative entropy alone dominates
        # the conditional mutual information
        sigma_c = random_density((2,), seed=30, labels=("C",))
        eig_w, eig_v = np.linalg.eigh(sigma_c.matrix)
        ks = tuple(
            np.kron(np.eye(2), math.sqrt(w) * eig_v[:, i].reshape(2, 1))
            for i, w in enumerate(eig_w) if w > 1e-14
        )
        append = QuantumChannel(ks, (2,), (2, 2), ("B",), ("B", "C"))
        rho = random_density((2, 2, 2), seed=31, labels=("A", "B", "C"))
        rho_ab = marginal(rho, ("A", "B"))
        lam = lambda_max(rho_ab, restrict_output(append))
        assert lam.value <= 1e-6
        from recoverability.entropies import relative_entropy

        d_val = relative_entropy(rho, apply(append, rho_ab))
        assert d_val >= cmi(rho) - 1e-6

    def test_eq13_restatement(self):
        # invariance within 1e-9 in trace norm forces lambda <= 1e-6, and a
        # 0.1 disturbance forces lambda >= 1e-3 (both directions)
        ch = depolarizing_channel(2)
        tau = DensityOperator(np.kron(np.eye(2) / 2, np.eye(2) / 2), (2, 2), ("A", "B"))
        assert lambda_max(tau, ch).value <= 1e-6
        rho = DensityOperator(np.diag([1.0, 0, 0, 0]).astype(complex), (2, 2), ("A", "B"))
        assert lambda_max(rho, ch).value >= 1e-3
