import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mrpibound import bound
from mrpibound.exceptions import InvalidContraction, InvalidTolerance, NotContractive
from mrpibound.mrpi import MrpiSeries, random_schur_matrix, reference_mrpi, truncated_mrpi
from mrpibound.norms import QuadraticNorm, induced_norm, lyapunov_norm
from mrpibound.sets import Box, Zonotope, box_to_zonotope, sample_unit_directions, support, support_outer

SCALAR_W = Box.symmetric(1.0, 1)
EUC1 = QuadraticNorm.euclidean(1)


class TestTailBound:
    def test_value(self):
        assert bound.tail_bound(1.0, 0.5, 2) == 0.5

    def test_no_disturbance(self):
        assert all(bound.tail_bound(0.0, 0.7, n) == 0.0 for n in range(10))

    def test_nilpotent(self):
        assert bound.tail_bound(3.0, 0.0, 1) == 0.0

    @pytest.mark.parametrize("gamma", [1.0, 1.5, -0.1])
    def test_invalid(self, gamma):
        with pytest.raises(InvalidContraction):
            bound.tail_bound(1.0, gamma, 3)

    def test_geometric_step(self):
        for n in range(20):
            assert bound.tail_bound(0.3, 0.8, n + 1) == pytest.approx(0.8 * bound.tail_bound(0.3, 0.8, n), rel=1e-15)


class TestNMin:
    def test_value(self):
        n = bound.n_min(0.01, 0.5, 1.0)
        assert n == 8
        assert bound.tail_bound(1.0, 0.5, 8) <= 0.01 < bound.tail_bound(1.0, 0.5, 7)

    def test_clamp(self):
        assert bound.n_min(2.0, 0.5, 1.0) == 0
        assert bound.n_min(5.0, 0.5, 1.0) == 0

    def test_bracketing_example(self):
        v = bound.n_min(1e-3, 0.9, 0.2449)
        assert bound.tail_bound(0.2449, 0.9, v) <= 1e-3 < bound.tail_bound(0.2449, 0.9, v - 1)

    def test_matches_formula(self):
        raw = math.log(1e-3 * 0.1 / 0.2449) / math.log(0.9)
        assert bound.n_min(1e-3, 0.9, 0.2449) == math.ceil(raw)

    def test_invalid(self):
        with pytest.raises(InvalidTolerance):
            bound.n_min(0.0, 0.5, 1.0)
        with pytest.raises(InvalidContraction):
            bound.n_min(0.1, 1.0, 1.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-9, 10.0), st.floats(1e-3, 0.999), st.floats(1e-6, 100.0))
def test_n_min_bracketing(eps, gamma, r_w):
    n = bound.n_min(eps, gamma, r_w)
    assert bound.tail_bound(r_w, gamma, n) <= eps
    if n >= 1:
        assert bound.tail_bound(r_w, gamma, n - 1) > eps


class TestCertificate:
    def test_scalar(self):
        cert = bound.certify([[0.5]], SCALAR_W, EUC1, 3)
        assert cert.tail == pytest.approx(0.25)

    def test_zero_matrix(self):
        cert = bound.certify(np.zeros((2, 2)), Box.symmetric(1.0, 2), QuadraticNorm.euclidean(2), 1)
        assert cert.tail == 0.0

    def test_composes(self):
        A = 0.5 * random_schur_matrix(6, seed=0)
        norm = QuadraticNorm.euclidean(6)
        gamma = induced_norm(A, norm)
        assert gamma < 1
        cert = bound.certify(A, Box.symmetric(0.1, 6), norm, 7)
        assert cert.tail == pytest.approx(0.244949 * gamma ** 7 / (1 - gamma), rel=1e-5)

    def test_not_contractive(self):
        with pytest.raises(NotContractive):
            bound.certify([[1.0, 5.0], [0.0, 0.5]], Box.symmetric(1.0, 2), QuadraticNorm.euclidean(2), 3)

    def test_text_roundtrip(self):
        cert = bound.certify(random_schur_matrix(3, 2), Box.symmetric(0.1, 3),
                             lyapunov_norm(random_schur_matrix(3, 2)).norm, 12)
        assert bound.TruncationCertificate.from_text(cert.to_text()) == cert


class TestCertifiedOuter:
    def test_zero_tail(self):
        e = box_to_zonotope(SCALAR_W)
        cert = bound.certify([[0.0]], SCALAR_W, EUC1, 1)
        z = bound.certified_outer(e, cert, EUC1)
        assert support_outer(z, np.array([1.0])) == pytest.approx(1.0)

    def test_scalar_exact(self):
        series = MrpiSeries([[0.5]], SCALAR_W, 1)
        cert = bound.certify([[0.5]], SCALAR_W, EUC1, 1)
        z = bound.certified_outer(truncated_mrpi(series, 1), cert, EUC1)
        assert support_outer(z, np.array([[1.0], [-1.0]])) == pytest.approx([2.0, 2.0])

    def test_outer_approximation_and_rpi(self):
        A = random_schur_matrix(6, seed=0)
        norm = lyapunov_norm(A).norm
        w = Box.symmetric(0.1, 6)
        series = MrpiSeries(A, w, 200)
        dirs = sample_unit_directions(6, 2000, 0)
        ref = support(reference_mrpi(series, 200), dirs)
        for n in (1, 5, 20, 60):
            cert = bound.certify(A, w, norm, n)
            z = bound.certified_outer(truncated_mrpi(series, n), cert, norm)
            assert np.all(support_outer(z, dirs) >= ref - 1e-9)
            assert bound.rpi_violation(A, w, z, dirs) <= 1e-9


class TestOperatorContraction:
    def test_equal_sets(self):
        s = box_to_zonotope(SCALAR_W)
        assert bound.operator_contraction_gap([[0.5]], SCALAR_W, s, s, [[1.0], [-1.0]]) == (0.0, 0.0)

    def test_scalar_interval(self):
        lhs, rhs = bound.operator_contraction_gap([[0.5]], SCALAR_W, Zonotope.origin(1), box_to_zonotope(SCALAR_W),
                                                  [[1.0], [-1.0]])
        assert lhs == pytest.approx(0.5)
        assert rhs == pytest.approx(0.5)

    def test_nested_random_pairs(self, rng):
        A = random_schur_matrix(6, seed=0)
        norm = lyapunov_norm(A).norm
        w = Box.symmetric(0.1, 6)
        dirs = sample_unit_directions(6, 300, 1)
        for _ in range(20):
            inner = Zonotope(np.zeros(6), rng.standard_normal((6, 3)))
            outer = Zonotope(np.zeros(6), np.hstack((inner.generators, rng.standard_normal((6, 2)))))
            lhs, rhs = bound.operator_contraction_gap(A, w, inner, outer, dirs, norm)
            assert lhs <= rhs + 1e-9
