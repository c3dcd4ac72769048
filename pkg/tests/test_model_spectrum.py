"""Tests for the model spectrum module."""

import cmath
import math

import mpmath
import numpy as np
import pytest

from src.errors import ExceptionalPairError, InvalidParameterError
from src.model_spectrum import (
    count_eigenvalues,
    eigen_modes,
    frobenius_basis,
    is_exceptional,
    make_params,
    shooting_residual,
    strip_solutions,
)
from src.special_functions import log_gamma


EXCEPTIONAL_CASES = [
    (0.5, 1, 0.0),
    (0.3 + 0.2j, 1, 1.5),
    (0.3 + 0.2j, -1, -2.0),
    (-0.4 + 0.7j, 1, 0.3),
    (-0.6 - 0.5j, -1, 4.0),
    (0.8, -1, -1.0),
    (0.1 + 1.5j, 1, 10.0),
    (-0.2 + 0.1j, -1, 0.0),
    (0.7 - 1.2j, 1, -3.0),
    (-0.9 + 0.3j, 1, 2.0),
]


def exceptional_kappa(m: complex, branch: int, ell: float) -> complex:
    """κ with Log ς = m(±iπ − ℓ), so that ±π ∈ Im((1/m) Ln ς)."""
    return cmath.exp(m * (branch * 1j * math.pi - ell) + log_gamma(m) - log_gamma(-m))


def small_loop(m: complex, kappa: complex, radius_m: float, radius_kappa: float, steps: int = 9):
    """Parameters on a small closed loop around (m, κ)."""
    phases = np.exp(1j * np.linspace(0.0, 2.0 * math.pi, steps))
    return [make_params(m + radius_m * z, kappa + radius_kappa * z) for z in phases]


class TestMakeParams:
    """Tests for parameter validation and ς."""

    @pytest.mark.parametrize("m", [0.0, 1.0, -1.0, 1.2 + 0.5j, 0.0 + 2j])
    def test_rejects_invalid_order(self, m):
        """Test that Re(m) = 0 and |Re(m)| >= 1 are rejected."""
        with pytest.raises(InvalidParameterError):
            make_params(m, 1.0)

    def test_rejects_non_finite(self):
        """Test that nan and inf are rejected."""
        with pytest.raises(InvalidParameterError):
            make_params(0.3, complex(math.nan, 0.0))
        with pytest.raises(InvalidParameterError):
            make_params(complex(0.3, math.inf), 1.0)

    def test_varsigma_matches_mpmath(self):
        """Test ς = κ Γ(−m)/Γ(m) against mpmath."""
        m, kappa = 0.3 + 0.2j, 1 - 0.5j
        p = make_params(m, kappa)
        expected = complex(mpmath.mpc(kappa) * mpmath.gamma(-mpmath.mpc(m)) / mpmath.gamma(mpmath.mpc(m)))
        assert abs(p.varsigma - expected) < 1e-10 * abs(expected)
        assert -math.pi < p.log_varsigma.imag <= math.pi

    def test_zero_kappa(self):
        """Test that κ = 0 gives ς = 0 and no logarithm."""
        p = make_params(0.4 + 0.1j, 0)
        assert p.varsigma == 0
        assert p.log_varsigma is None
        assert not p.has_boundary_coupling

    def test_self_adjointness(self):
        """Test that only real (m, κ) is self-adjoint."""
        assert make_params(0.3, -1.0).is_self_adjoint
        assert not make_params(0.3 + 0.1j, -1.0).is_self_adjoint
        assert not make_params(0.3, 1j).is_self_adjoint


class TestExceptionalPairs:
    """Tests for exceptional-pair detection."""

    def test_constructed_pair_at_half(self):
        """Test (m, κ) = (1/2, −i/2): ς = i is exceptional with witness 0."""
        p = make_params(0.5, -0.5j)
        assert p.varsigma == pytest.approx(1j, abs=1e-12)
        flag, witness = is_exceptional(p)
        assert flag
        assert witness == 0

    @pytest.mark.parametrize("m,branch,ell", EXCEPTIONAL_CASES)
    def test_constructed_pairs_are_flagged(self, m, branch, ell):
        """Test that κ built from Log ς = m(±iπ − ℓ) is flagged and refused."""
        p = make_params(m, exceptional_kappa(m, branch, ell))
        flag, witness = is_exceptional(p)
        assert flag
        assert isinstance(witness, int)
        with pytest.raises(ExceptionalPairError):
            eigen_modes(p)

    def test_zero_kappa_is_never_exceptional(self):
        """Test that κ = 0 is not exceptional."""
        assert is_exceptional(make_params(0.5, 0)) == (False, None)
        assert strip_solutions(make_params(0.5, 0)) is None


class TestEigenModes:
    """Tests for the closed-form eigenvalue enumeration."""

    def test_robin_anchor(self):
        """Test (m, κ) = (1/2, −1/2): one eigenvalue −4 at k = 2."""
        spectrum = eigen_modes(make_params(0.5, -0.5))
        assert spectrum.count == 1
        assert abs(spectrum.modes[0] - 2.0) < 1e-10
        assert spectrum.eigenvalues[0] == pytest.approx(-4.0, abs=1e-9)
        assert spectrum.margin == pytest.approx(0.25, abs=1e-12)

    def test_zero_kappa_has_no_eigenvalues(self):
        """Test that κ = 0 gives an empty spectrum."""
        spectrum = eigen_modes(make_params(0.3 + 0.4j, 0))
        assert spectrum.count == 0
        assert math.isinf(spectrum.margin)

    def test_high_count(self):
        """Test (0.1 + 2i, 1): about |m|²/Re(m) ≈ 40 eigenvalues."""
        p = make_params(0.1 + 2j, 1.0)
        spectrum = eigen_modes(p)
        assert 40 <= spectrum.count <= 41
        assert all(k.real > 0 for k in spectrum.modes)
        assert len(set(spectrum.modes)) == spectrum.count
        assert list(spectrum.indices) == sorted(spectrum.indices)

    def test_modes_solve_the_boundary_condition(self):
        """Test (k/2)^{−2m} = ς for every enumerated mode."""
        p = make_params(-0.4 + 0.9j, 2.0 - 1.0j)
        for k in eigen_modes(p).modes:
            assert cmath.exp(-2 * p.m * cmath.log(k / 2)) == pytest.approx(p.varsigma, rel=1e-10)

    def test_self_adjoint_eigenvalue_is_real(self):
        """Test that real (m, κ) gives a real negative eigenvalue."""
        spectrum = eigen_modes(make_params(0.3, -1.0))
        assert spectrum.count == 1
        assert abs(spectrum.eigenvalues[0].imag) < 1e-12
        assert spectrum.eigenvalues[0].real < 0

    def test_count_eigenvalues(self):
        """Test that count_eigenvalues agrees with eigen_modes."""
        p = make_params(0.3 + 0.5j, -2.0 + 1j)
        assert count_eigenvalues(p) == eigen_modes(p).count

    @pytest.mark.parametrize("m,kappa,kappa_radius", [(0.5, -0.5, 0.1), (-0.5, -2.0, 0.2)])
    def test_count_is_locally_constant(self, m, kappa, kappa_radius):
        """Test that the count does not change along a small non-exceptional loop."""
        counts = set()
        for p in small_loop(m, kappa, 0.05, kappa_radius):
            assert not is_exceptional(p, 1e-2)[0]
            counts.add(count_eigenvalues(p))
        assert len(counts) == 1


class TestFrobeniusBasis:
    """Tests for the Frobenius solutions used by the boundary fits."""

    def test_leading_term(self):
        """Test that the basis starts exactly with x^{1/2+ν}."""
        x = np.array([1e-6, 1e-5])
        values = frobenius_basis(0.3 + 0.1j, 4.0, x)
        np.testing.assert_allclose(values, x ** (0.8 + 0.1j), rtol=1e-10)

    def test_matches_modified_bessel(self):
        """Test φ_ν(x) = Γ(ν+1)(2/k)^ν √x I_ν(kx)."""
        nu, k, x = 0.3, 1.5, 0.7
        expected = float(mpmath.gamma(nu + 1) * (2 / k) ** nu * mpmath.sqrt(x) * mpmath.besseli(nu, k * x))
        value = frobenius_basis(nu, k * k, np.array([x]))[0]
        assert value == pytest.approx(expected, rel=1e-12)


class TestShooting:
    """Tests for the independent shooting oracle."""

    def test_robin_mode(self):
        """Test that k = 2 is an eigenvalue parameter of the Robin case."""
        p = make_params(0.5, -0.5)
        assert abs(shooting_residual(p, 2.0)) < 1e-6

    def test_real_mode_and_off_mode(self):
        """Test an eigenvalue and a non-eigenvalue k for real (m, κ)."""
        p = make_params(0.3, -1.0)
        k = eigen_modes(p).modes[0]
        assert abs(shooting_residual(p, k)) < 1e-5
        assert abs(shooting_residual(p, 1.3 * k)) > 1e-2

    def test_random_complex_modes(self):
        """Test shooting on random complex parameters with eigenvalues."""
        rng = np.random.default_rng(7)
        checked = 0
        for _ in range(400):
            m = complex(rng.choice([-1, 1]) * rng.uniform(0.2, 0.8), rng.uniform(-0.5, 0.5))
            kappa = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            if abs(kappa) < 0.5:
                continue
            p = make_params(m, kappa)
            if is_exceptional(p, 0.05)[0]:
                continue
            modes = eigen_modes(p).modes
            if not modes or not all(0.05 < abs(k) < 50 and abs(k.imag) <= 3 * k.real for k in modes):
                continue
            for k in modes:
                assert abs(shooting_residual(p, k)) < 1e-5
                assert abs(shooting_residual(p, 1.5 * k)) > 1e-2
            checked += 1
            if checked == 5:
                break
        assert checked == 5

    def test_rejects_non_decaying_k(self):
        """Test that Re(k) <= 0 is rejected."""
        with pytest.raises(ValueError):
            shooting_residual(make_params(0.5, -0.5), -1.0 + 1j)


class TestClosedFormExamples:
    """Tests for hand-solvable parameter points."""

    def test_robin_varsigma(self):
        """Test (1/2, −1/2): ς = 1 and not exceptional."""
        p = make_params(0.5, -0.5)
        assert p.varsigma == pytest.approx(1.0, abs=1e-13)
        assert is_exceptional(p) == (False, None)

    def test_varsigma_real_order(self):
        """Test (0.3, 1): ς = Γ(−0.3)/Γ(0.3)."""
        expected = float(mpmath.gamma(-0.3) / mpmath.gamma(0.3))
        assert make_params(0.3, 1.0).varsigma == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("m,kappa", [(0.5, 0.5), (0.3, 1.0), (0.8, 2.5)])
    def test_negative_varsigma_has_no_eigenvalues(self, m, kappa):
        """Test that real m with ς < 0 gives an empty spectrum."""
        p = make_params(m, kappa)
        assert p.varsigma.real < 0
        assert count_eigenvalues(p) == 0

    def test_robin_off_eigenvalue(self):
        """Test that k = 1 violates the Robin condition."""
        assert abs(shooting_residual(make_params(0.5, -0.5), 1.0)) > 0.1

