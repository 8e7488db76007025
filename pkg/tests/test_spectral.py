import numpy as np
import pytest

from ecdsim.model import SystemParams, TWO_PI, assemble_h4
from ecdsim.spectral import (
    CDProfile,
    build_cd_profile,
    cd_field,
    cd_fields,
    eigen_frames,
    partial_cd,
)
from ecdsim.sweeps import SweepSpec, eval_sweep


def cd_finite_difference(spec, params, s, h=1e-6):
    """Independent oracle: H_CD from finite differences of the eigenvectors,

        t_f H_CD = i sum_m |d_s m><m|  (off-diagonal part, smooth gauge).
    """
    _, vm = np.linalg.eigh(assemble_h4(eval_sweep(spec, s - h), params))
    _, v0 = np.linalg.eigh(assemble_h4(eval_sweep(spec, s), params))
    _, vp = np.linalg.eigh(assemble_h4(eval_sweep(spec, s + h), params))
    vm = vm * np.sign(np.diag(v0.T @ vm))
    vp = vp * np.sign(np.diag(v0.T @ vp))
    dv = (vp - vm) / (2.0 * h)
    k = 1j * dv @ v0.T
    in_basis = v0.T @ k @ v0
    np.fill_diagonal(in_basis, 0.0)
    return v0 @ in_basis @ v0.T


class TestEigenFrames:
    def test_tracked_energies_match_sorted_spectrum(self, params):
        spec = SweepSpec.for_params("pl", params)
        frames = eigen_frames(spec, params, 401)
        h = assemble_h4(eval_sweep(spec, frames.s), params)
        reference = np.linalg.eigvalsh(h)
        assert np.allclose(np.sort(frames.energies, axis=1), reference)

    def test_eigenvector_property(self, params):
        spec = SweepSpec.for_params("tan", params)
        frames = eigen_frames(spec, params, 101)
        for j in (0, 50, 100):
            h = assemble_h4(eval_sweep(spec, frames.s[j]), params)
            for b in range(4):
                v = frames.vectors[j, :, b]
                assert np.allclose(h @ v, frames.energies[j, b] * v,
                                   atol=1e-10)

    def test_continuity(self, params):
        spec = SweepSpec.for_params("lz", params)
        frames = eigen_frames(spec, params, 2001)
        assert frames.min_overlap > 0.999

    def test_branch_lookup(self, params):
        spec = SweepSpec.for_params("pl", params)
        frames = eigen_frames(spec, params, 201)
        b = frames.branch_index_for_basis_state(2)
        assert abs(frames.vectors[0, 2, b]) > 0.99

    def test_coarse_grid_reports_poor_overlap(self, params):
        # two points jump straight across the anticrossing, where the middle
        # eigenvectors rotate by 45 degrees (overlap 1/sqrt(2))
        spec = SweepSpec.for_params("lz", params)
        frames = eigen_frames(spec, params, 2)
        assert 0.5 < frames.min_overlap < 0.9

    def test_n_grid_validation(self, params):
        with pytest.raises(ValueError):
            eigen_frames(SweepSpec.for_params("lz", params), params, 1)


class TestCDField:
    def test_hermitian_purely_imaginary(self, params):
        spec = SweepSpec.for_params("pl", params)
        for s in (0.2, 0.5, 0.8):
            k = cd_field(spec, params, s)
            assert np.allclose(k, k.conj().T)
            assert np.allclose(k.real, 0.0, atol=1e-14)

    @pytest.mark.parametrize("kind", ["lz", "pl", "tan"])
    def test_against_finite_difference_oracle(self, params, kind):
        spec = SweepSpec.for_params(kind, params)
        for s in (0.3, 0.5, 0.7):
            ours = cd_field(spec, params, s)
            oracle = cd_finite_difference(spec, params, s)
            assert np.allclose(ours, oracle, atol=1e-5)

    def test_batched_matches_single(self, params):
        spec = SweepSpec.for_params("tan", params)
        s = np.array([0.1, 0.4, 0.9])
        batch = cd_fields(spec, params, s)
        for j, sj in enumerate(s):
            assert np.allclose(batch[j], cd_field(spec, params, float(sj)))

    def test_partial_cd_structure(self, params):
        spec = SweepSpec.for_params("pl", params)
        hp = partial_cd(spec, params, 0.5)
        full = cd_field(spec, params, 0.5)
        assert hp[1, 2] == pytest.approx(full[1, 2])
        mask = np.ones((4, 4), dtype=bool)
        mask[1, 2] = mask[2, 1] = False
        assert np.allclose(hp[mask], 0.0)
        assert np.allclose(hp, hp.conj().T)


class TestCDProfile:
    def test_spline_matches_direct_evaluation(self, params, pl_profile):
        spec = pl_profile.spec
        for s in (0.123, 0.456, 0.789):
            direct = float(cd_field(spec, params, s)[1, 2].imag)
            assert pl_profile.h23(s) == pytest.approx(direct, abs=1e-9)

    def test_h23_maxima(self, tan_profile, pl_profile):
        # frozen from dense sampling of the exact spectral formula
        assert tan_profile.h23_max == pytest.approx(0.72892401, rel=1e-6)
        assert pl_profile.h23_max == pytest.approx(2.93294710, rel=1e-6)

    def test_dominance(self, pl_profile, tan_profile):
        assert pl_profile.dominance_ratio() > 10.0
        assert tan_profile.dominance_ratio() > 10.0

    def test_pl_h23_non_negative(self, pl_profile):
        assert np.min(pl_profile.h23_samples) >= -1e-12

    def test_csv_rows_shape(self, tan_profile):
        rows = tan_profile.csv_rows()
        assert rows.shape == (len(tan_profile.s), 7)
        assert np.allclose(rows[:, 0], tan_profile.s)
        assert np.allclose(rows[:, 4], tan_profile.element_samples(1, 2))

    def test_upper_pairs_cover_independent_elements(self):
        assert len(CDProfile.UPPER_PAIRS) == 6
        assert (1, 2) in CDProfile.UPPER_PAIRS

    def test_dominance_grows_with_detuning(self, params, pl_profile):
        # doubling |delta_g| pushes the spectator levels further away
        far = SystemParams(omega_r=TWO_PI * 10.4e9)
        assert far.delta_g == pytest.approx(2 * params.delta_g)
        spec = SweepSpec.for_params("pl", far)
        prof = build_cd_profile(spec, far, 801)
        assert prof.dominance_ratio() > pl_profile.dominance_ratio()
