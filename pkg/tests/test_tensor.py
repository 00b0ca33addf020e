"""Tests for the canonical tensor-chain state container.

Frozen worked examples pin the gate/SVD conventions; the dense oracle
(brute-force Fock vectors and partial traces) provides the independent route
for reduced density matrices, and hypothesis drives random circuits through
the canonical-form invariants.
"""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kitaev_chain import (
    BondOverflowError,
    DensityBlock,
    KitaevParams,
    TensorChain,
    TruncationError,
    bond_hamiltonian,
    energy_expectation,
    prepare_eigenstate,
    schur_decompose,
    build_coupling_matrix,
)
from kitaev_chain import oracle
from kitaev_chain.tensor import FOCK_SITE_LIMIT

RNG_GATE = np.sqrt(0.5) * (
    np.eye(4, dtype=complex) + 1j * np.fliplr(np.eye(4))
)  # (|00> + i|11>)/sqrt(2) when applied to |00>; couples equal-parity pairs

SWAP01 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def haar_unitary(dim: int, seed: int) -> np.ndarray:
    """Deterministic Haar-ish unitary from a QR factorization."""
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_circuit(n_sites: int, seed: int, depth: int = 3) -> TensorChain:
    """Product state pushed through a few layers of random nearest-neighbor gates."""
    state = TensorChain.product_state([0] * n_sites)
    rng = np.random.default_rng(seed)
    for layer in range(depth):
        for left in range(n_sites - 1):
            state.apply_two_site_gate(left, haar_unitary(4, int(rng.integers(2**32))))
        state.apply_single_site_gate(
            int(rng.integers(n_sites)), haar_unitary(2, int(rng.integers(2**32)))
        )
    return state


def dense_vector(state: TensorChain) -> np.ndarray:
    """Flattened Fock amplitudes with site 0 as the most significant bit."""
    return state.fock_coefficients().reshape(-1)


class TestDensityBlock:
    def test_accepts_valid_two_by_two(self):
        block = DensityBlock(np.diag([0.25, 0.75]))
        assert block.dim == 2
        assert block.entries.flags.writeable is False

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            DensityBlock(np.eye(3) / 3.0)

    def test_rejects_non_hermitian(self):
        rho = np.array([[0.5, 0.3], [0.0, 0.5]])
        with pytest.raises(ValueError, match="Hermiticity"):
            DensityBlock(rho)

    def test_rejects_wrong_trace(self):
        with pytest.raises(ValueError):
            DensityBlock(np.diag([0.7, 0.7]))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(ValueError):
            DensityBlock(np.diag([1.5, -0.5]))


class TestConstruction:
    def test_product_state_layout(self):
        state = TensorChain.product_state([0, 1, 0])
        assert state.n_sites == 3
        assert state.bond_dimensions == (1, 1)
        assert state.norm() == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(state.rdm_site(1).entries, np.diag([0.0, 1.0]), atol=1e-12)

    def test_product_state_rejects_bad_bits(self):
        with pytest.raises(ValueError):
            TensorChain.product_state([0, 2])
        with pytest.raises(ValueError):
            TensorChain.product_state([])

    def test_rejects_mismatched_bonds(self):
        good = TensorChain.product_state([0, 0])
        with pytest.raises(ValueError):
            TensorChain(good.gammas, [])
        with pytest.raises(ValueError):
            TensorChain(good.gammas, [np.array([0.5, 0.5])])  # not normalized

    def test_rejects_nonpositive_lambda(self):
        gammas = [np.zeros((2, 1, 2)), np.zeros((2, 2, 1))]
        gammas[0][0, 0, 0] = 1.0
        gammas[1][0, 0, 0] = 1.0
        with pytest.raises(ValueError):
            TensorChain(gammas, [np.array([1.0, -0.0])])

    def test_copy_is_independent(self):
        state = TensorChain.product_state([0, 0, 0])
        clone = state.copy()
        clone.apply_single_site_gate(0, SWAP01)
        np.testing.assert_allclose(state.rdm_site(0).entries, np.diag([1.0, 0.0]), atol=1e-12)
        np.testing.assert_allclose(clone.rdm_site(0).entries, np.diag([0.0, 1.0]), atol=1e-12)


class TestSingleSiteGate:
    def test_identity_leaves_state(self):
        state = random_circuit(4, seed=7)
        before = dense_vector(state)
        state.apply_single_site_gate(2, np.eye(2))
        np.testing.assert_allclose(dense_vector(state), before, atol=1e-12)

    def test_diagonal_gate_is_global_phase_on_filled_site(self):
        theta = 0.731
        state = TensorChain.product_state([1])
        state.apply_single_site_gate(0, np.diag([np.exp(1j * theta / 2), np.exp(-1j * theta / 2)]))
        amps = dense_vector(state)
        assert amps[1] == pytest.approx(np.exp(-1j * theta / 2), abs=1e-12)
        np.testing.assert_allclose(
            state.rdm_site(0).entries, np.diag([0.0, 1.0]), atol=1e-12
        )

    def test_swap_gate_relabels_basis(self):
        state = TensorChain.product_state([0, 0, 0])
        state.apply_single_site_gate(1, SWAP01)
        amps = dense_vector(state)
        assert amps[0b010] == pytest.approx(1.0, abs=1e-12)

    def test_rejects_non_unitary(self):
        state = TensorChain.product_state([0, 0])
        with pytest.raises(ValueError, match="unitary"):
            state.apply_single_site_gate(0, np.array([[1.0, 0.0], [0.0, 2.0]]))

    def test_rejects_bad_site(self):
        state = TensorChain.product_state([0, 0])
        with pytest.raises(ValueError):
            state.apply_single_site_gate(2, np.eye(2))

    def test_touches_only_one_tensor(self):
        state = random_circuit(4, seed=3)
        frozen = [g.copy() for g in state.gammas]
        lambdas = [l.copy() for l in state.lambdas]
        state.apply_single_site_gate(1, haar_unitary(2, 11))
        for site in (0, 2, 3):
            np.testing.assert_array_equal(state.gammas[site], frozen[site])
        for bond in range(3):
            np.testing.assert_array_equal(state.lambdas[bond], lambdas[bond])


class TestTwoSiteGate:
    def test_identity_leaves_state(self):
        state = random_circuit(4, seed=5)
        before = dense_vector(state)
        state.apply_two_site_gate(1, np.eye(4))
        np.testing.assert_allclose(dense_vector(state), before, atol=1e-12)

    def test_worked_entangling_example(self):
        state = TensorChain.product_state([0, 0, 0, 0])
        state.apply_two_site_gate(0, RNG_GATE)
        np.testing.assert_allclose(
            state.lambdas[0], np.array([1.0, 1.0]) / np.sqrt(2.0), atol=1e-12
        )
        amps = state.fock_coefficients()
        assert amps[0, 0, 0, 0] == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-12)
        assert amps[1, 1, 0, 0] == pytest.approx(1j / np.sqrt(2.0), abs=1e-12)
        assert np.abs(amps).sum() == pytest.approx(np.sqrt(2.0), abs=1e-12)

    def test_gate_then_inverse_restores(self):
        state = random_circuit(5, seed=9)
        before = dense_vector(state)
        u = haar_unitary(4, 21)
        state.apply_two_site_gate(2, u)
        state.apply_two_site_gate(2, u.conj().T)
        np.testing.assert_allclose(dense_vector(state), before, atol=1e-10)
        assert state.norm() == pytest.approx(1.0, abs=1e-10)

    def test_rejects_non_unitary(self):
        state = TensorChain.product_state([0, 0])
        with pytest.raises(ValueError, match="unitary"):
            state.apply_two_site_gate(0, np.diag([1.0, 1.0, 1.0, 0.5]))

    def test_rejects_bad_bond(self):
        state = TensorChain.product_state([0, 0])
        with pytest.raises(ValueError):
            state.apply_two_site_gate(1, np.eye(4))

    def test_truncation_error_when_nothing_survives(self):
        state = TensorChain.product_state([0, 0])
        with pytest.raises(TruncationError):
            state.apply_two_site_gate(0, RNG_GATE, threshold=2.0)

    def test_bond_overflow_error(self):
        state = TensorChain.product_state([0, 0])
        with pytest.raises(BondOverflowError):
            state.apply_two_site_gate(0, RNG_GATE, max_bond=1)

    def test_touches_only_local_tensors(self):
        state = random_circuit(5, seed=13)
        frozen = [g.copy() for g in state.gammas]
        lambdas = [l.copy() for l in state.lambdas]
        state.apply_two_site_gate(2, haar_unitary(4, 17))
        for site in (0, 1, 4):
            np.testing.assert_array_equal(state.gammas[site], frozen[site])
        for bond in (0, 1, 3):
            np.testing.assert_array_equal(state.lambdas[bond], lambdas[bond])

    def test_update_is_deterministic(self):
        runs = []
        for _ in range(2):
            state = random_circuit(4, seed=23)
            runs.append(state)
        for a, b in zip(runs[0].lambdas, runs[1].lambdas):
            np.testing.assert_array_equal(a, b)
        for a, b in zip(runs[0].gammas, runs[1].gammas):
            np.testing.assert_array_equal(a, b)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2**31))
    def test_canonical_invariants_after_random_circuit(self, seed):
        state = random_circuit(4, seed=seed)
        residuals = state.canonical_residuals()
        assert residuals["left"] < 1e-10
        assert residuals["right"] < 1e-10
        assert residuals["bond"] < 1e-10
        assert state.norm() == pytest.approx(1.0, abs=1e-10)
        for lam in state.lambdas:
            assert (lam > 0.0).all()


class TestReducedDensityMatrices:
    def test_site_vacuum(self):
        state = TensorChain.product_state([0, 0, 0])
        np.testing.assert_allclose(state.rdm_site(0).entries, np.diag([1.0, 0.0]), atol=1e-12)

    def test_site_worked_example_is_maximally_mixed(self):
        state = TensorChain.product_state([0, 0, 0])
        state.apply_two_site_gate(0, RNG_GATE)
        np.testing.assert_allclose(
            state.rdm_site(0).entries, np.diag([0.5, 0.5]), atol=1e-12
        )

    def test_pair_vacuum(self):
        state = TensorChain.product_state([0, 0, 0])
        rho = state.rdm_pair(0).entries
        expected = np.zeros((4, 4))
        expected[0, 0] = 1.0
        np.testing.assert_allclose(rho, expected, atol=1e-12)

    def test_pair_worked_example(self):
        state = TensorChain.product_state([0, 0, 0])
        state.apply_two_site_gate(0, RNG_GATE)
        vec = np.zeros(4, dtype=complex)
        vec[0b00] = 1.0 / np.sqrt(2.0)
        vec[0b11] = 1j / np.sqrt(2.0)
        np.testing.assert_allclose(state.rdm_pair(0).entries, np.outer(vec, vec.conj()), atol=1e-12)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2**31))
    def test_pair_partial_traces_match_sites(self, seed):
        state = random_circuit(4, seed=seed)
        for left in range(3):
            rho = state.rdm_pair(left).entries.reshape(2, 2, 2, 2)
            np.testing.assert_allclose(
                np.einsum("jklk->jl", rho), state.rdm_site(left).entries, atol=1e-10
            )
            np.testing.assert_allclose(
                np.einsum("kjkl->jl", rho), state.rdm_site(left + 1).entries, atol=1e-10
            )

    def test_ends_vacuum(self):
        state = TensorChain.product_state([0, 0, 0, 0])
        expected = np.zeros((4, 4))
        expected[0, 0] = 1.0
        np.testing.assert_allclose(state.rdm_ends().entries, expected, atol=1e-12)

    def test_ends_requires_three_sites(self):
        state = TensorChain.product_state([0, 0])
        with pytest.raises(ValueError):
            state.rdm_ends()

    def test_ends_contraction_budget(self):
        state = random_circuit(4, seed=2)
        with pytest.raises(BondOverflowError):
            state.rdm_ends(max_bond=1)

    @settings(max_examples=20, deadline=None)
    @given(
        n_sites=st.integers(min_value=3, max_value=6),
        seed=st.integers(min_value=0, max_value=2**31),
    )
    def test_ends_matches_dense_partial_trace(self, n_sites, seed):
        state = random_circuit(n_sites, seed=seed)
        rho = state.rdm_ends().entries
        expected = oracle.partial_trace_ends(dense_vector(state), n_sites)
        np.testing.assert_allclose(rho, expected, atol=1e-10)

    def test_ends_three_sites_equals_traced_middle(self):
        state = random_circuit(3, seed=31)
        vec = dense_vector(state).reshape(2, 2, 2)
        rho_full = np.einsum("jmk,lmn->jkln", vec, vec.conj()).reshape(4, 4)
        np.testing.assert_allclose(state.rdm_ends().entries, rho_full, atol=1e-10)


class TestFockCoefficients:
    def test_vacuum_one_hot(self):
        state = TensorChain.product_state([0, 0, 0])
        amps = state.fock_coefficients()
        assert amps[0, 0, 0] == pytest.approx(1.0, abs=1e-12)
        assert np.abs(amps).sum() == pytest.approx(1.0, abs=1e-12)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2**31))
    def test_norm_one(self, seed):
        state = random_circuit(5, seed=seed)
        amps = dense_vector(state)
        assert np.vdot(amps, amps).real == pytest.approx(1.0, abs=1e-10)

    def test_site_limit_guard(self):
        state = TensorChain.product_state([0] * (FOCK_SITE_LIMIT + 1))
        with pytest.raises(ValueError, match="amplitudes"):
            state.fock_coefficients()


class TestParityExpectation:
    def test_product_states(self):
        assert TensorChain.product_state([0, 1, 1]).parity_expectation() == pytest.approx(1.0)
        assert TensorChain.product_state([0, 1, 0]).parity_expectation() == pytest.approx(-1.0)

    @settings(max_examples=15, deadline=None)
    @given(
        theta=st.floats(min_value=-3.0, max_value=3.0),
        phi=st.floats(min_value=-3.0, max_value=3.0),
    )
    def test_parity_preserving_gates_keep_parity(self, theta, phi):
        state = TensorChain.product_state([1, 0, 0])
        before = state.parity_expectation()
        pair = np.cos(theta / 2) * np.eye(4, dtype=complex) + 1j * np.sin(
            theta / 2
        ) * np.fliplr(np.eye(4))
        state.apply_two_site_gate(1, pair)
        state.apply_single_site_gate(0, np.diag([np.exp(1j * phi / 2), np.exp(-1j * phi / 2)]))
        assert state.parity_expectation() == pytest.approx(before, abs=1e-10)


class TestSerialization:
    def test_round_trip(self):
        state = random_circuit(4, seed=41)
        state.degenerate = True
        text = state.to_json()
        loaded = TensorChain.from_json(text)
        assert loaded.degenerate is True
        np.testing.assert_allclose(dense_vector(loaded), dense_vector(state), atol=1e-12)
        for a, b in zip(loaded.lambdas, state.lambdas):
            np.testing.assert_allclose(a, b, atol=1e-15)

    def test_payload_shape_and_determinism(self):
        state = random_circuit(3, seed=43)
        text = state.to_json()
        assert text == state.to_json()
        payload = json.loads(text)
        assert payload["n_sites"] == 3
        assert len(payload["gammas"]) == 3
        assert len(payload["lambdas"]) == 2


class TestBondHamiltonian:
    def test_frozen_entries(self):
        h = bond_hamiltonian(1.0, 1.0 + 0.0j, 2.0, 2.0)
        expected = np.array(
            [
                [2.0, 0.0, 0.0, -1.0],
                [0.0, 0.0, -1.0, 0.0],
                [0.0, -1.0, 0.0, 0.0],
                [-1.0, 0.0, 0.0, -2.0],
            ],
            dtype=complex,
        )
        np.testing.assert_allclose(h, expected, atol=1e-15)

    def test_hermitian_for_complex_pairing(self):
        h = bond_hamiltonian(0.7, 0.3 + 0.4j, 0.1, -0.2)
        np.testing.assert_allclose(h, h.conj().T, atol=1e-15)


class TestEnergyExpectation:
    def test_diagonal_hamiltonian_on_vacuum(self):
        state = TensorChain.product_state([0, 0, 0, 0])
        params = KitaevParams(4, 0.0, 2.0, 0.0)
        assert energy_expectation(state, params) == pytest.approx(4.0, abs=1e-12)

    def test_open_ground_state_energy(self):
        params = KitaevParams(8, 1.0, 0.5, 1.0)
        state, schur, _ = prepare_eigenstate(params)
        expected = -0.5 * float(np.sum(schur.epsilons))
        assert energy_expectation(state, params) == pytest.approx(expected, abs=1e-8)

    def test_periodic_shortcut_matches_spectrum_sum(self):
        for mu in (0.5, 1.5, 3.0):
            params = KitaevParams(10, 1.0, mu, 1.0, boundary="periodic")
            state, schur, _ = prepare_eigenstate(params)
            expected = -0.5 * float(np.sum(schur.epsilons))
            assert energy_expectation(state, params) == pytest.approx(expected, abs=1e-8)

    def test_periodic_refuses_degenerate_state(self):
        params = KitaevParams(4, 1.0, 0.5, 1.0, boundary="periodic")
        state = TensorChain.product_state([0, 0, 0, 0])
        state.degenerate = True
        with pytest.raises(ValueError, match="degenerate"):
            energy_expectation(state, params)

    def test_site_count_mismatch(self):
        state = TensorChain.product_state([0, 0, 0])
        with pytest.raises(ValueError):
            energy_expectation(state, KitaevParams(4, 1.0, 0.0, 1.0))
