import numpy as np
import pytest

from ecdsim.model import (
    C1,
    C2,
    D0,
    D1,
    FLIP_FLOP,
    TWO_PI,
    SystemParams,
    assemble_h4,
    assemble_h12,
    dispersive_estimates,
    embed_pure_state,
    excitation_number_operator,
    minimal_gap,
    two_excitation_indices,
)


def charpoly_eigenvalues(h):
    """Independent eigenvalue oracle: roots of the characteristic polynomial."""
    roots = np.roots(np.poly(h))
    assert np.max(np.abs(roots.imag)) < 1e-8
    return np.sort(roots.real)


class TestControlMatrices:
    def test_hermitian(self):
        for m in (D0, D1, C1, C2, FLIP_FLOP):
            assert np.allclose(m, np.asarray(m).conj().T)

    def test_flip_flop_is_coupling_commutator(self):
        assert np.allclose(2j * (C2 @ C1 - C1 @ C2), FLIP_FLOP)

    def test_flip_flop_entries(self):
        expected = np.zeros((4, 4), dtype=complex)
        expected[1, 2] = 2j
        expected[2, 1] = -2j
        assert np.array_equal(FLIP_FLOP, expected)


class TestSystemParams:
    def test_default_dimensionless_parameters(self):
        p = SystemParams()
        assert p.delta_g == pytest.approx(-44.0, abs=1e-12)
        assert p.f0 == pytest.approx(0.2, abs=1e-12)
        assert p.delta_1_init == pytest.approx(-TWO_PI * 2.19e9)
        assert p.delta_2_init == pytest.approx(-TWO_PI * 2.21e9)

    def test_rejects_inverted_qubit_order(self):
        with pytest.raises(ValueError):
            SystemParams(omega_1_init=TWO_PI * 5.99e9,
                         omega_2_init=TWO_PI * 6.01e9)

    def test_rejects_nonpositive_coupling(self):
        with pytest.raises(ValueError):
            SystemParams(g=0.0)

    def test_warns_outside_dispersive_regime(self):
        with pytest.warns(UserWarning, match="dispersive"):
            SystemParams(g=TWO_PI * 500e6)

    def test_g0_cached_property_matches_minimal_gap(self):
        p = SystemParams()
        assert p.g0 == minimal_gap(p)

    def test_minimal_gap_value(self):
        # frozen from the characteristic-polynomial oracle below
        p = SystemParams()
        assert p.g0 / TWO_PI == pytest.approx(1.132853926968e6, rel=1e-9)

    def test_minimal_gap_against_charpoly_oracle(self):
        p = SystemParams()
        evals = charpoly_eigenvalues(assemble_h4(0.0, p))
        assert minimal_gap(p) == pytest.approx(
            p.g * 0.5 * (evals[2] - evals[1]), rel=1e-10)


class TestAssembleH4:
    def test_structure(self, params):
        f = 0.13
        h = assemble_h4(f, params)
        expected = params.delta_g * D0 + f * D1 + C1 + C2
        assert np.allclose(h, expected)
        assert np.allclose(h, h.conj().T)

    def test_batched_matches_scalar(self, params):
        fs = np.linspace(0.0, 0.2, 7)
        batch = assemble_h4(fs, params)
        assert batch.shape == (7, 4, 4)
        for j, f in enumerate(fs):
            assert np.allclose(batch[j], assemble_h4(float(f), params))

    def test_eigenvalues_match_charpoly_oracle(self, params):
        for f in (0.0, 0.07, 0.2):
            h = assemble_h4(f, params)
            assert np.allclose(np.linalg.eigvalsh(h),
                               charpoly_eigenvalues(h), atol=1e-8)


class TestJaynesCummings:
    def test_two_excitation_indices(self):
        assert two_excitation_indices(3) == [0, 4, 7, 11]
        assert two_excitation_indices(4) == [0, 5, 9, 14]
        with pytest.raises(ValueError):
            two_excitation_indices(2)

    def test_h12_hermitian_and_conserves_excitations(self, params):
        h = assemble_h12(params.delta_1_init, params.delta_2_init,
                         params.g, params.g, n_fock=4)
        n_op = excitation_number_operator(4)
        assert np.allclose(h, h.conj().T)
        assert np.allclose(h @ n_op, n_op @ h, atol=1e-6)

    def test_two_excitation_block_reduces_to_h4(self, params):
        """With equal couplings the two-excitation block of the full model is
        exactly g times the dimensionless four-level Hamiltonian."""
        f = 0.11
        d1 = params.g * (params.delta_g + f)
        d2 = params.g * (params.delta_g - f)
        h12 = assemble_h12(d1, d2, params.g, params.g, n_fock=3)
        idx = two_excitation_indices(3)
        block = h12[np.ix_(idx, idx)]
        assert np.allclose(block, params.g * assemble_h4(f, params),
                           rtol=1e-12, atol=1e-3)

    def test_embed_pure_state_round_trip(self):
        vec = np.array([0.1, 0.7, 0.7, 0.1]) / np.sqrt(1.0)
        big = embed_pure_state(vec, n_fock=3)
        assert big.shape == (12,)
        assert np.allclose(big[two_excitation_indices(3)], vec)
        assert np.count_nonzero(big) == 4
        with pytest.raises(ValueError):
            embed_pure_state(np.ones(3))


class TestDispersiveEstimates:
    def test_values(self, params):
        rwa, renorm = dispersive_estimates(params)
        omega_q = TWO_PI * 6.0e9
        delta = omega_q - params.omega_r
        big_delta = omega_q + params.omega_r
        assert rwa == pytest.approx(params.g**2 / delta, rel=1e-12)
        assert renorm == pytest.approx(
            params.g**2 * (1.0 / delta - 1.0 / big_delta), rel=1e-12)

    def test_ratio_identity(self, params):
        rwa, renorm = dispersive_estimates(params)
        omega_q = 0.5 * (params.omega_1_init + params.omega_2_init)
        delta = omega_q - params.omega_r
        big_delta = omega_q + params.omega_r
        assert renorm / rwa == pytest.approx(1.0 - delta / big_delta,
                                             rel=1e-12)
