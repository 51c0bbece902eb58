"""Tests for ray-localized normal operators and perturbation builders."""

import numpy as np
import pytest

from specloc import numerics, operators
from specloc.errors import DimensionError, InputError


def two_ray_spec():
    return operators.RaySpectrumSpec(rays=(
        operators.Ray(theta=0.0, radii=(1.0, 4.0)),
        operators.Ray(theta=np.pi / 2, radii=(2.0,)),
    ))


class TestBuildNormal:
    def test_diagonal_entries(self):
        g = operators.build_normal(two_ray_spec())
        np.testing.assert_allclose(np.diag(g), [1.0, 4.0, 2.0j], atol=1e-15)
        assert numerics.opnorm(g - np.diag(np.diag(g))) == 0.0

    def test_is_normal(self):
        g = operators.build_normal(two_ray_spec())
        comm = g @ g.conj().T - g.conj().T @ g
        assert numerics.opnorm(comm) <= 1e-14

    def test_eigenvalue_multiset(self):
        spec = operators.RaySpectrumSpec(rays=(
            operators.Ray(theta=np.pi, radii=(3.0, 3.0, 1.0)),))
        g = operators.build_normal(spec)
        got = sorted(np.diag(g), key=lambda z: (z.real, z.imag))
        want = sorted([-3.0 + 0j, -3.0 + 0j, -1.0 + 0j], key=lambda z: (z.real, z.imag))
        np.testing.assert_allclose(got, want, atol=1e-14)

    def test_dimension_cap(self):
        spec = operators.RaySpectrumSpec(rays=(
            operators.Ray(theta=0.0, radii=tuple(float(k) for k in range(1, 514))),))
        with pytest.raises(DimensionError):
            operators.build_normal(spec)

    def test_rejects_duplicate_ray_angles(self):
        with pytest.raises(InputError):
            operators.RaySpectrumSpec(rays=(
                operators.Ray(theta=0.0, radii=(1.0,)),
                operators.Ray(theta=2 * np.pi, radii=(2.0,)),
            ))

    def test_rejects_negative_radius(self):
        with pytest.raises(InputError):
            operators.Ray(theta=0.0, radii=(-1.0,))


class TestBuildPerturbation:
    def test_dense_passthrough(self):
        m = np.array([[0.0, 1.0], [2.0, 0.0]])
        s = operators.build_perturbation(operators.DensePerturbation(entries=m), 2)
        np.testing.assert_array_equal(s, m.astype(complex))

    def test_gaussian_norm_matches_scale(self):
        spec = operators.RandomGaussianPerturbation(seed=42, scale=0.37)
        s = operators.build_perturbation(spec, 16)
        np.testing.assert_allclose(numerics.opnorm(s), 0.37, atol=1e-10)

    def test_gaussian_deterministic(self):
        spec = operators.RandomGaussianPerturbation(seed=9, scale=1.0)
        s1 = operators.build_perturbation(spec, 8)
        s2 = operators.build_perturbation(spec, 8)
        np.testing.assert_array_equal(s1, s2)

    def test_gaussian_zero_scale(self):
        s = operators.build_perturbation(operators.RandomGaussianPerturbation(seed=1, scale=0.0), 4)
        assert not np.any(s)

    def test_banded_pattern(self):
        spec = operators.BandedPerturbation(seed=3, scale=1.0, bandwidth=1)
        s = operators.build_perturbation(spec, 6)
        i, j = np.indices((6, 6))
        assert not np.any(s[np.abs(i - j) > 1])
        assert np.all(s[np.abs(i - j) <= 1] != 0.0)
        np.testing.assert_allclose(numerics.opnorm(s), 1.0, atol=1e-10)

    def test_offdiagonal_block_layout(self):
        b = np.array([[1.0]])
        c = np.array([[2.0]])
        s = operators.build_perturbation(operators.OffDiagonalBlockPerturbation(b=b, c=c), 2)
        np.testing.assert_array_equal(s, [[0.0, 1.0], [2.0, 0.0]])

    def test_dense_wrong_shape(self):
        with pytest.raises(DimensionError):
            operators.build_perturbation(operators.DensePerturbation(entries=np.eye(3)), 2)


class TestAssemble:
    def test_basic(self):
        spec = two_ray_spec()
        g = operators.build_normal(spec)
        s = 0.1 * np.ones((3, 3), dtype=complex)
        system = operators.assemble(g, s, 0.5, ray_spec=spec)
        np.testing.assert_array_equal(system.t, g + s)
        assert system.p == 0.5
        assert system.b is None
        np.testing.assert_allclose(system.sigma_g(), np.diag(g))

    def test_infers_ray_spec(self):
        g = np.diag([1.0, 2.0, 3.0j])
        system = operators.assemble(g, np.zeros((3, 3)), 0.0)
        thetas = sorted(system.ray_spec.thetas)
        np.testing.assert_allclose(thetas, [0.0, np.pi / 2], atol=1e-12)

    def test_rejects_p_out_of_range(self):
        g = np.diag([1.0, 2.0])
        for bad in (1.0, -0.1, 2.0):
            with pytest.raises(InputError):
                operators.assemble(g, np.zeros((2, 2)), bad)

    def test_rejects_dim_mismatch(self):
        with pytest.raises(DimensionError):
            operators.assemble(np.diag([1.0, 2.0]), np.zeros((3, 3)), 0.5)

    def test_rejects_non_diagonal_g(self):
        g = np.array([[1.0, 0.5], [0.0, 2.0]])
        with pytest.raises(InputError):
            operators.assemble(g, np.zeros((2, 2)), 0.5)

    def test_rejects_mismatched_declared_spectrum(self):
        spec = operators.RaySpectrumSpec(rays=(operators.Ray(theta=0.0, radii=(1.0, 2.0)),))
        g = np.diag([1.0, 3.0])
        with pytest.raises(InputError):
            operators.assemble(g, np.zeros((2, 2)), 0.5, ray_spec=spec)
