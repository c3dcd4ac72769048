"""Tests for the winding module and the Levinson identity."""

import cmath
import math

import numpy as np
import pytest

from src.errors import ExceptionalPairError, RefinementExhaustedError
from src.model_spectrum import is_exceptional, make_params
from src.symbol import min_denominator
from src.winding import (
    RefinementPolicy,
    edge_references,
    edge_winding,
    total_winding,
    verify_levinson,
)
from tests.test_model_spectrum import small_loop


def random_points(seed: int, count: int, with_coupling: bool = True):
    """Random non-exceptional (m, κ) with Re(m) ∈ ±(0.05, 0.95), |Im m| <= 2, |κ| <= 5."""
    rng = np.random.default_rng(seed)
    points = []
    while len(points) < count:
        m = complex(rng.choice([-1, 1]) * rng.uniform(0.05, 0.95), rng.uniform(-2, 2))
        kappa = rng.uniform(0, 5) * cmath.exp(1j * rng.uniform(-math.pi, math.pi)) if with_coupling else 0
        p = make_params(m, kappa)
        if with_coupling and (is_exceptional(p, 1e-2)[0] or min_denominator(p) < 1e-3):
            continue
        points.append(p)
    return points


class TestEdgeWinding:
    """Tests for the adaptive phase integrator."""

    def test_constant(self):
        """Test that a constant has zero winding on one panel."""
        winding, diagnostics = edge_winding(lambda s: 2 - 1j, RefinementPolicy(initial_panels=1))
        assert winding == 0
        assert diagnostics.panels == 1

    def test_full_turn(self):
        """Test e^{2πis} on [0, 1] winds once counter-clockwise."""
        winding, diagnostics = edge_winding(lambda s: cmath.exp(2j * math.pi * s), None, 0.0, 1.0)
        assert winding == pytest.approx(1.0, abs=1e-12)
        assert diagnostics.max_phase_step < math.pi / 2

    def test_reversed_and_negative(self):
        """Test the direction of traversal and of rotation."""
        assert edge_winding(lambda s: cmath.exp(2j * math.pi * s), None, 1.0, 0.0)[0] == pytest.approx(-1.0)
        assert edge_winding(lambda s: cmath.exp(-4j * math.pi * s), None, 0.0, 1.0)[0] == pytest.approx(-2.0)

    def test_refines_fast_rotation(self):
        """Test that a coarse start is refined until the steps are small."""
        winding, diagnostics = edge_winding(
            lambda s: cmath.exp(6j * math.pi * s), RefinementPolicy(initial_panels=2), 0.0, 1.0
        )
        assert winding == pytest.approx(3.0, abs=1e-10)
        assert diagnostics.deepest_level > 0

    def test_zero_on_path_exhausts_refinement(self):
        """Test that a sign change of a real function cannot be resolved."""
        with pytest.raises(RefinementExhaustedError):
            edge_winding(lambda s: complex(s - 1.0 / 3.0), RefinementPolicy(max_depth=10), 0.0, 1.0)

    def test_vanishing_sample(self):
        """Test that an exact zero at a node is reported."""
        with pytest.raises(ExceptionalPairError):
            edge_winding(lambda s: complex(s), RefinementPolicy(initial_panels=2), -1.0, 1.0)


class TestTotalWinding:
    """Tests for the winding of the boundary symbol."""

    def test_robin_anchor(self):
        """Test (1/2, −1/2): clockwise winding +1 with the expected edge split."""
        report = total_winding(make_params(0.5, -0.5))
        assert report.rounded == 1
        assert report.integrality_residual < 1e-6
        assert report.w1 == pytest.approx(0.0, abs=1e-9)
        assert report.w2 == pytest.approx(0.5, abs=1e-9)
        assert report.w3 == pytest.approx(0.5, abs=1e-9)
        assert report.w4 == 0
        assert report.max_phase_step < math.pi / 2
        assert len(report.samples_used) == 4

    def test_no_coupling(self):
        """Test that κ = 0 winds zero times with a constant Γ₂."""
        m = 0.3 + 0.4j
        report = total_winding(make_params(m, 0))
        assert report.rounded == 0
        assert report.w2 == 0
        assert report.w1 == pytest.approx(m.real / 2 - 0.25, abs=1e-9)

    @pytest.mark.parametrize("m,kappa", [(0.5, -0.5), (0.3 + 0.7j, 1.5 - 2j), (-0.6 + 1.2j, -3 + 1j)])
    def test_refinement_soundness(self, m, kappa):
        """Test that halving the initial panel count leaves the total unchanged."""
        p = make_params(m, kappa)
        fine = total_winding(p, RefinementPolicy(initial_panels=64))
        coarse = total_winding(p, RefinementPolicy(initial_panels=32))
        assert abs(fine.total - coarse.total) < 1e-9

    @pytest.mark.parametrize("m,kappa,kappa_radius", [(0.5, -0.5, 0.1), (-0.5, -2.0, 0.2), (0.3 + 0.2j, 1 + 1j, 0.1)])
    def test_homotopy_stability(self, m, kappa, kappa_radius):
        """Test that the rounded winding is constant along a small non-exceptional loop."""
        windings = set()
        for p in small_loop(m, kappa, 0.05, kappa_radius):
            assert not is_exceptional(p, 1e-2)[0]
            assert min_denominator(p) > 1e-3
            windings.add(total_winding(p).rounded)
        assert len(windings) == 1


class TestEdgeReferences:
    """Tests for the closed-form edge contributions."""

    def test_positive_branch(self):
        """Test Re(m) > 0: (Re(m)/2 − 1/4, Re(m)/2 + 1/4)."""
        assert edge_references(make_params(0.6 + 1j, 2.0)) == pytest.approx((0.05, 0.55))

    def test_negative_branch(self):
        """Test Re(m) < 0: (−Re(m)/2 − 1/4, −Re(m)/2 + 1/4)."""
        assert edge_references(make_params(-0.6 + 1j, 2.0)) == pytest.approx((0.05, 0.55))

    def test_no_coupling(self):
        """Test κ = 0: Γ₁ and Γ₃ cancel."""
        assert edge_references(make_params(-0.6 + 1j, 0)) == pytest.approx((-0.55, 0.55))


class TestVerifyLevinson:
    """Tests for the Levinson identity and its corollary."""

    def test_robin_record(self):
        """Test the full record of the Robin case."""
        record = verify_levinson(make_params(0.5, -0.5))
        assert record.theorem_ok
        assert record.spectrum_count == 1
        assert abs(record.spectrum.modes[0] - 2.0) < 1e-10
        assert record.corollary_applies
        assert record.corollary_residual < 1e-6
        assert record.fredholm_index == -1
        assert record.index_ok
        assert record.unitarity_defect < 1e-12

    def test_refuses_exceptional_pair(self):
        """Test that (1/2, −i/2) is refused."""
        with pytest.raises(ExceptionalPairError, match="refusing"):
            verify_levinson(make_params(0.5, -0.5j))

    def test_random_points(self):
        """Test the identity, the corollary and the edge references on random points."""
        points = random_points(seed=20240611, count=200)
        signs = set()
        for p in points:
            record = verify_levinson(p)
            assert record.theorem_ok, (p.m, p.kappa)
            assert record.index_ok == record.theorem_ok
            assert record.winding.integrality_residual < 1e-6
            assert record.corollary_residual < 1e-6, (p.m, p.kappa)
            assert max(record.edge_reference_residuals) < 1e-6, (p.m, p.kappa)
            signs.add(p.m.real > 0)
        assert signs == {True, False}

    def test_no_coupling_random(self):
        """Test winding 0 = count 0 for 20 random m with κ = 0."""
        for p in random_points(seed=11, count=20, with_coupling=False):
            record = verify_levinson(p)
            assert record.winding.rounded == 0
            assert record.spectrum_count == 0
            assert record.theorem_ok

    def test_high_count(self):
        """Test (0.1 + 2i, 1): about 40 eigenvalues, matched by the winding."""
        record = verify_levinson(make_params(0.1 + 2j, 1.0))
        assert 40 <= record.spectrum_count <= 41
        assert record.winding.rounded == record.spectrum_count
        assert record.theorem_ok


class TestClosedFormWindings:
    """Tests for hand-computed windings and references."""

    @pytest.mark.parametrize("m,expected", [(0.3, (-0.1, 0.4)), (-0.3, (-0.1, 0.4)), (0.5 + 0.2j, (0.0, 0.5))])
    def test_reference_values(self, m, expected):
        """Test the edge references depend only on |Re(m)|."""
        assert edge_references(make_params(m, 1.0)) == pytest.approx(expected, abs=1e-15)

    def test_negative_varsigma_winds_zero(self):
        """Test (0.3, 1): ς < 0 gives total winding 0."""
        report = total_winding(make_params(0.3, 1.0))
        assert report.rounded == 0
        assert abs(report.total) < 1e-6

    def test_half_order_without_coupling(self):
        """Test (1/2, 0): both sides vanish."""
        record = verify_levinson(make_params(0.5, 0))
        assert record.theorem_ok
        assert record.winding.rounded == 0
        assert record.spectrum_count == 0
        assert not record.corollary_applies
