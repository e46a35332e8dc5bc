"""
Tests for the closed-form rates of the three-basis variant.
"""
import math
import pytest
import sys
from pathlib import Path

import numpy as np

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.rates.variant import (
    VariantParams,
    variant_eta,
    variant_eta_evan,
    variant_eta_overlap,
    variant_eta_sum,
    variant_iter,
    variant_iter_sum,
    variant_qb,
    variant_qb_sum,
    variant_qber,
    variant_rates,
)
from src.quantum.qstate import overlap_prob
from src.utils.exceptions import UndefinedRateError

rad = math.radians

REFERENCE_TRIPLES = [(90, 90, 90), (65, 65, 280), (110, 225, 0), (120, 240, 0)]


def evan_samples(triple, count=20, seed=0):
    rng = np.random.default_rng(seed)
    t1, t2, p2 = (rad(a) for a in triple)
    return [
        VariantParams(t1, t2, p2, t3, p3)
        for t3, p3 in zip(rng.uniform(0, 2 * math.pi, count), rng.uniform(0, 2 * math.pi, count))
    ]


class TestVariantIter:
    """Test cases for the variant ITER."""

    def setup_method(self):
        """Set up test fixtures."""
        self.orthogonal = VariantParams(rad(90), rad(90), rad(90), 0.0, 0.0)

    def test_evan_in_e_basis(self):
        """Test the (90, 90, 90) configuration with Evan in e."""
        assert variant_iter(self.orthogonal) == pytest.approx(1.0 / 3.0)

    @pytest.mark.parametrize("theta1_deg,theta2_deg,phi2_deg", [(40, 100, 30), (70, 200, 300)])
    def test_evan_in_e_basis_general(self, theta1_deg, theta2_deg, phi2_deg):
        """Test 2/3 [c_f (1 - c_f) + c_h (1 - c_h)] when Evan measures in e."""
        p = VariantParams(rad(theta1_deg), rad(theta2_deg), rad(phi2_deg), 0.0, 0.0)
        c_f = math.cos(rad(theta1_deg) / 2) ** 2
        c_h = overlap_prob(p.e_basis.state1, p.h_basis.state1)
        expected = (2.0 / 3.0) * (c_f * (1 - c_f) + c_h * (1 - c_h))
        assert variant_iter(p) == pytest.approx(expected, abs=1e-12)

    def test_coincident_bases(self):
        """Test that coincident bases never produce index errors."""
        assert variant_iter(VariantParams(0.0, 0.0, 0.0, 0.0, 0.0)) == 0.0

    def test_constant_for_orthogonal_bases(self):
        """Test that mutually unbiased bases give ITER = 1/3 for every Evan basis."""
        for p in evan_samples(REFERENCE_TRIPLES[0], count=50):
            assert variant_iter(p) == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_matches_unsimplified_sum(self):
        """Test the simplified ITER against the transition sum."""
        for triple in REFERENCE_TRIPLES:
            for p in evan_samples(triple, count=15, seed=2):
                assert variant_iter(p) == pytest.approx(variant_iter_sum(p), abs=1e-12)


class TestVariantQbAndQber:
    """Test cases for P_QB and the variant QBER."""

    def setup_method(self):
        """Set up test fixtures."""
        self.orthogonal = VariantParams(rad(90), rad(90), rad(90), 0.0, 0.0)
        self.coincident = VariantParams(0.0, 0.0, 0.0, 0.0, 0.0)

    def test_qb_examples(self):
        """Test P_QB for Evan in e and for coincident bases."""
        assert variant_qb(self.orthogonal) == pytest.approx(2.5 / 9.0)
        assert variant_qb(self.coincident) == pytest.approx(0.0, abs=1e-15)
        assert variant_eta_evan(self.orthogonal) == pytest.approx(0.27778, abs=1e-5)

    def test_qber_example(self):
        """Test QBER = (1/3) / (3 * 2.5 / 9) = 0.4."""
        assert variant_qber(self.orthogonal) == pytest.approx(0.4)

    def test_qber_zero_without_index_errors(self):
        """Test that ITER = 0 with key bits present gives a zero QBER."""
        # f antiparallel to e, h parallel to e, Evan measuring in e
        p = VariantParams(math.pi, 0.0, 0.0, 0.0, 0.0)
        assert variant_iter(p) == 0.0
        assert variant_qb(p) == pytest.approx(2.0 / 9.0)
        assert variant_qber(p) == 0.0

    def test_evan_orthogonal_to_coincident_bases(self):
        """Test that no key bits at all leaves the QBER undefined."""
        p = VariantParams(0.0, 0.0, 0.0, math.pi, 0.0)
        assert variant_iter(p) == 0.0
        with pytest.raises(UndefinedRateError):
            variant_qber(p)

    def test_coincident_bases_undefined(self):
        """Test the undefined QBER for coincident bases."""
        with pytest.raises(UndefinedRateError):
            variant_qber(self.coincident)
        with pytest.raises(UndefinedRateError):
            variant_rates(self.coincident)

    def test_identity(self):
        """Test QBER * 3 * P_QB = ITER over a grid of Evan bases."""
        for triple in REFERENCE_TRIPLES:
            t1, t2, p2 = (rad(a) for a in triple)
            for t3 in np.linspace(0.0, 2 * math.pi, 20, endpoint=False):
                for p3 in np.linspace(0.0, 2 * math.pi, 20, endpoint=False):
                    p = VariantParams(t1, t2, p2, t3, p3)
                    assert variant_qber(p) * 3 * variant_qb(p) == pytest.approx(variant_iter(p), abs=1e-9)

    def test_qb_matches_unsimplified_sum(self):
        """Test the simplified P_QB against the transition sum."""
        for triple in REFERENCE_TRIPLES:
            for p in evan_samples(triple, count=15, seed=4):
                assert variant_qb(p) == pytest.approx(variant_qb_sum(p), abs=1e-12)

    def test_relabeling_symmetry(self):
        """Test the e <-> f swap realized as theta3 -> theta1 - theta3 in the phi = 0 plane."""
        for theta1, theta2 in ((rad(110), rad(225)), (rad(60), rad(300))):
            for theta3 in np.linspace(0.2, 6.1, 9):
                a = VariantParams(theta1, theta2, 0.0, theta3, 0.0)
                b = VariantParams(theta1, theta1 - theta2, 0.0, theta1 - theta3, 0.0)
                assert variant_iter(a) == pytest.approx(variant_iter(b), abs=1e-9)
                assert variant_qb(a) == pytest.approx(variant_qb(b), abs=1e-9)


class TestVariantEta:
    """Test cases for the no-attack efficiency."""

    @pytest.mark.parametrize("triple,expected", [
        ((90, 90, 90), 1.0 / 6.0),
        ((0, 0, 0), 0.0),
        ((120, 240, 0), 0.25),
    ])
    def test_examples(self, triple, expected):
        """Test the efficiency at the reference configurations."""
        assert variant_eta(*(rad(a) for a in triple)) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("triple", REFERENCE_TRIPLES + [(35, 80, 200), (170, 10, 45)])
    def test_three_forms_agree(self, triple):
        """Test the trigonometric, overlap and sum forms."""
        angles = tuple(rad(a) for a in triple)
        assert variant_eta(*angles) == pytest.approx(variant_eta_overlap(*angles), abs=1e-12)
        assert variant_eta(*angles) == pytest.approx(variant_eta_sum(*angles), abs=1e-12)

    def test_maximum_over_configurations(self):
        """Test that no configuration beats the planar 120 degree arrangement."""
        grid = np.radians(np.arange(0, 360, 15))
        best = max(variant_eta(t1, t2, p2) for t1 in grid for t2 in grid for p2 in grid[::6])
        assert best == pytest.approx(0.25, abs=1e-12)

    def test_rates_bundle(self):
        """Test variant_rates."""
        rates = variant_rates(VariantParams(rad(90), rad(90), rad(90), 0.0, 0.0))
        assert rates.iter == pytest.approx(1.0 / 3.0)
        assert rates.qb == pytest.approx(2.5 / 9.0)
        assert rates.eta_evan == rates.qb
        assert rates.qber == pytest.approx(0.4)
        assert rates.eta == pytest.approx(1.0 / 6.0)
