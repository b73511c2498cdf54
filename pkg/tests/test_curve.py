"""Tests for curves and Frenet frames in E^4."""

import math

import numpy as np
import pytest

from pencil4 import curve as cv
from pencil4.errors import (
    ConstraintViolationError,
    DegenerateFrameError,
    UnsupportedCompletionError,
)
from support import fd_frenet

SQ3 = math.sqrt(3.0)
SEED_CURVE = cv.WCurve(SQ3 / 2, 0.25, 1.0, 2.0)

# Closed-form curvature values for the seed generator, derivable by direct
# substitution of the curve's derivatives:
#   kappa1 = sqrt(a^2 c^4 + b^2 d^4) = sqrt(7)/2
#   kappa2 = |a b c d (c^2 - d^2)| / kappa1 = 3 sqrt(3) / (2 sqrt(7))
#   kappa3 = c d / kappa1 = 4 / sqrt(7)
SEED_KAPPAS = (
    math.sqrt(7.0) / 2.0,
    3.0 * SQ3 / (2.0 * math.sqrt(7.0)),
    4.0 / math.sqrt(7.0),
)

# Unit-speed analytic curve with nonconstant curvatures (closed-form
# antiderivative of (cos(p sqrt(s)), sin(p sqrt(s)), cos(q sqrt(s)),
# sin(q sqrt(s))) / sqrt(2) with p=1, q=2).
INVOLUTE_COMPONENTS = [
    "(2*sqrt(s)*sin(sqrt(s)) + 2*cos(sqrt(s))) / sqrt(2)",
    "(-2*sqrt(s)*cos(sqrt(s)) + 2*sin(sqrt(s))) / sqrt(2)",
    "(sqrt(s)*sin(2*sqrt(s)) + 0.5*cos(2*sqrt(s))) / sqrt(2)",
    "(-sqrt(s)*cos(2*sqrt(s)) + 0.5*sin(2*sqrt(s))) / sqrt(2)",
]


def make_involute():
    return cv.AnalyticCurve.from_strings(INVOLUTE_COMPONENTS, (0.5, 2.5))


class TestVec4:
    def test_dot_and_norm(self):
        v = cv.Vec4(1.0, 2.0, 2.0, 0.0)
        assert v.dot(v) == 9.0
        assert v.norm() == 3.0
        assert v.dot(v) >= 0.0

    def test_roundtrip_array(self):
        v = cv.Vec4(0.1, -0.2, 0.3, -0.4)
        assert cv.Vec4.from_array(v.as_array()) == v


class TestCurveConstruction:
    def test_w_curve_unit_speed_enforced(self):
        with pytest.raises(ConstraintViolationError):
            cv.WCurve(1.0, 1.0, 1.0, 1.0)
        cv.WCurve(SQ3 / 2, 0.25, 1.0, 2.0)  # a^2c^2 + b^2d^2 = 3/4 + 1/4

    def test_analytic_unit_speed_enforced(self):
        with pytest.raises(ConstraintViolationError):
            cv.AnalyticCurve.from_strings(["2*s", "0", "0", "0"], (0.0, 1.0))
        cv.AnalyticCurve.from_strings(["s", "0", "0", "0"], (0.0, 1.0))

    def test_involute_curve_is_accepted(self):
        make_involute()


class TestDerivatives:
    def test_w_curve_first_derivative_at_zero(self):
        (d1,) = cv.derivatives(SEED_CURVE, 0.0, order=1)
        assert d1.as_array() == pytest.approx([0.0, SQ3 / 2, 0.0, 0.5], abs=1e-15)
        assert d1.norm() == pytest.approx(1.0, abs=1e-12)

    def test_w_curve_second_derivative_at_zero(self):
        d1, d2 = cv.derivatives(SEED_CURVE, 0.0, order=2)
        assert d2.as_array() == pytest.approx([-SQ3 / 2, 0.0, -1.0, 0.0], abs=1e-15)

    def test_straight_line_second_derivative(self):
        line = cv.AnalyticCurve.from_strings(["s", "0", "0", "0"], (0.0, 2.0))
        d1, d2 = cv.derivatives(line, 0.7, order=2)
        assert d2.as_array() == pytest.approx([0.0] * 4, abs=1e-15)

    def test_matches_finite_differences(self):
        for s in (0.4, 1.3):
            got = [d.as_array() for d in cv.derivatives(SEED_CURVE, s, order=4)]
            from support import fd_derivative

            for k in range(1, 5):
                want = fd_derivative(SEED_CURVE.point, s, order=k, h=0.02)
                assert got[k - 1] == pytest.approx(want, abs=5e-7)


class TestFrenetApparatus:
    def test_seed_curve_kappas(self):
        for s in (0.0, 0.9, 2.2):
            app = cv.frenet_apparatus(SEED_CURVE, s)
            assert app.kappa1 == pytest.approx(SEED_KAPPAS[0], abs=1e-12)
            assert app.kappa2 == pytest.approx(SEED_KAPPAS[1], abs=1e-12)
            assert app.kappa3 == pytest.approx(SEED_KAPPAS[2], abs=1e-12)
            assert app.rank == 4
            assert app.degenerate == (False, False, False)

    def test_matches_finite_difference_oracle(self):
        frame_fd, kappas_fd = fd_frenet(SEED_CURVE.point, 0.8, h=0.02)
        app = cv.frenet_apparatus(SEED_CURVE, 0.8)
        assert app.kappas == pytest.approx(kappas_fd, abs=1e-6)
        assert app.frame == pytest.approx(frame_fd, abs=1e-6)

    def test_orthonormality(self):
        for s in np.linspace(0.0, 6.0, 7):
            app = cv.frenet_apparatus(SEED_CURVE, float(s))
            gram = app.frame @ app.frame.T
            assert np.max(np.abs(gram - np.eye(4))) < 1e-10

    def test_determinant_is_plus_one(self):
        for s in np.linspace(0.0, 6.0, 7):
            app = cv.frenet_apparatus(SEED_CURVE, float(s))
            assert np.linalg.det(app.frame.T) == pytest.approx(1.0, abs=1e-10)

    def test_planar_circle_degenerates_at_rank_2(self):
        circle = cv.AnalyticCurve.from_strings(["cos(s)", "sin(s)", "0", "0"], (0.0, 6.0))
        with pytest.raises(DegenerateFrameError) as ei:
            cv.frenet_apparatus(circle, 1.0)
        assert ei.value.rank == 2
        assert ei.value.kappas[0] == pytest.approx(1.0, abs=1e-12)

    def test_straight_line_degenerates_at_rank_1(self):
        line = cv.AnalyticCurve.from_strings(["s", "0", "0", "0"], (0.0, 2.0))
        with pytest.raises(DegenerateFrameError) as ei:
            cv.frenet_apparatus(line, 0.5)
        assert ei.value.rank == 1

    def test_frenet_residuals_small(self):
        h = 1e-5
        for s in (0.3, 1.7):
            app = cv.frenet_apparatus(SEED_CURVE, s)
            plus = cv.frenet_apparatus(SEED_CURVE, s + h)
            minus = cv.frenet_apparatus(SEED_CURVE, s - h)
            dframe = (plus.frame - minus.frame) / (2 * h)
            k1, k2, k3 = app.kappas
            V1, V2, V3, V4 = app.frame
            residuals = [
                np.linalg.norm(dframe[0] - k1 * V2),
                np.linalg.norm(dframe[1] + k1 * V1 - k2 * V3),
                np.linalg.norm(dframe[2] + k2 * V2 - k3 * V4),
                np.linalg.norm(dframe[3] + k3 * V3),
            ]
            assert max(residuals) < 1e-6

    def test_analytic_curve_apparatus(self):
        inv = make_involute()
        app = cv.frenet_apparatus(inv, 1.0)
        gram = app.frame @ app.frame.T
        assert np.max(np.abs(gram - np.eye(4))) < 1e-9
        # closed form: kappa1(s) = sqrt((p^2+q^2)/(8s)) with p=1, q=2
        assert app.kappa1 == pytest.approx(math.sqrt(5.0 / 8.0), rel=1e-9)

    def test_kappa1_closed_form_for_random_w_curves(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            c, d = rng.uniform(0.5, 2.5, size=2)
            if abs(c - d) < 0.2:
                d = c + 0.3
            theta = rng.uniform(0.2, math.pi / 2 - 0.2)
            a, b = math.cos(theta) / c, math.sin(theta) / d
            w = cv.WCurve(a, b, c, d)
            app = cv.frenet_apparatus(w, 0.37)
            want = math.sqrt(a * a * c**4 + b * b * d**4)
            assert app.kappa1 == pytest.approx(want, abs=1e-10)

    def test_kappas_stationary_along_w_curve(self):
        apps = [cv.frenet_apparatus(SEED_CURVE, s) for s in np.linspace(0.0, 5.0, 9)]
        for pick in (lambda f: f.kappa1, lambda f: f.kappa2, lambda f: f.kappa3):
            vals = [pick(a) for a in apps]
            assert max(vals) - min(vals) < 1e-10


class TestCompleteFrame:
    def test_explicit_completion_vectors(self):
        w = cv.WCurve(1 / math.sqrt(2), 1 / math.sqrt(2), 1.0, 1.0)
        app = cv.complete_frame(w, 0.0)
        assert app.V3.as_array() == pytest.approx(
            [0.0, 1 / math.sqrt(2), 0.0, -1 / math.sqrt(2)], abs=1e-12
        )
        assert app.V4.as_array() == pytest.approx(
            [1 / math.sqrt(2), 0.0, -1 / math.sqrt(2), 0.0], abs=1e-12
        )
        gram = app.frame @ app.frame.T
        assert np.max(np.abs(gram - np.eye(4))) < 1e-12
        assert app.kappa2 == 0.0 and app.kappa3 == 0.0
        assert app.rank == 2

    def test_orthonormal_at_any_s(self):
        w = cv.WCurve(0.6, 0.8, 1.0, 1.0)
        for s in np.linspace(0.0, 6.0, 13):
            app = cv.complete_frame(w, float(s))
            gram = app.frame @ app.frame.T
            assert np.max(np.abs(gram - np.eye(4))) < 1e-12

    def test_nondegenerate_curve_rejected(self):
        with pytest.raises(UnsupportedCompletionError):
            cv.complete_frame(SEED_CURVE, 0.0)

    def test_frenet_apparatus_routes_degenerate_curves_here(self):
        w = cv.WCurve(0.6, 0.8, 1.0, 1.0)
        app = cv.frenet_apparatus(w, 0.3)
        assert app.rank == 2
        assert app.connection == pytest.approx((1.0, 0.0, -1.0))

    def test_completion_frame_ode_coefficients(self):
        # The completion rotates: numerical frame derivatives must satisfy
        # the frame ODE with the recorded connection coefficients.
        w = cv.WCurve(0.6, 0.8, 1.0, 1.0)
        h = 1e-6
        s = 0.9
        app = cv.complete_frame(w, s)
        plus = cv.complete_frame(w, s + h)
        minus = cv.complete_frame(w, s - h)
        dframe = (plus.frame - minus.frame) / (2 * h)
        w1, w2, w3 = app.connection
        V1, V2, V3, V4 = app.frame
        residuals = [
            np.linalg.norm(dframe[0] - w1 * V2),
            np.linalg.norm(dframe[1] + w1 * V1 - w2 * V3),
            np.linalg.norm(dframe[2] + w2 * V2 - w3 * V4),
            np.linalg.norm(dframe[3] + w3 * V3),
        ]
        assert max(residuals) < 1e-8

    def test_planar_circle_completion(self):
        w = cv.WCurve(0.5, 0.0, 2.0, 2.0)  # radius 1/2, rate 2
        app = cv.frenet_apparatus(w, 0.4)
        assert app.kappa1 == pytest.approx(2.0, abs=1e-12)
        gram = app.frame @ app.frame.T
        assert np.max(np.abs(gram - np.eye(4))) < 1e-12


class TestIsWCurve:
    def test_w_curve_samples(self):
        apps = [cv.frenet_apparatus(SEED_CURVE, s) for s in np.linspace(0.0, 5.0, 16)]
        assert cv.is_w_curve(apps)

    def test_nonconstant_curvature_detected(self):
        inv = make_involute()
        apps = [cv.frenet_apparatus(inv, s) for s in np.linspace(0.7, 2.3, 16)]
        assert not cv.is_w_curve(apps)

    def test_single_repeated_sample(self):
        app = cv.frenet_apparatus(SEED_CURVE, 1.0)
        assert cv.is_w_curve([app] * 16)

    def test_too_few_samples_rejected(self):
        app = cv.frenet_apparatus(SEED_CURVE, 1.0)
        with pytest.raises(ValueError):
            cv.is_w_curve([app] * 15)
