"""Independent numerical differential geometry for immersions into E^4.

Works purely from point evaluations of a patch (u, v) -> E^4: derivatives
by central differences with one Richardson extrapolation level (the
resulting 5-point stencils are 4th-order accurate), a normal basis by
Gram-Schmidt over the standard basis vectors, and the curvature invariants
assembled from the measured fundamental-form coefficients.  Nothing here
touches moving frames or symbolic derivatives, so it is a genuinely
independent check of every closed form in the library.

K and ||H||^2 (and the ambient mean-curvature vector) are basis
independent.  The normal curvature depends on the orientation of the
chosen bases; reports carry that orientation so callers can compare values
up to one global sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import RankDeficiencyError, StepUnderflowError

__all__ = [
    "Immersion",
    "OracleReport",
    "ComparisonReport",
    "numeric_forms",
    "compare",
]

DEFAULT_TOLERANCE = 1e-6
_GRAM_TOL = 1e-12
_SKIP_TOL = 0.25  # reject normal-candidate residuals shorter than this


@dataclass(frozen=True)
class Immersion:
    """A surface patch given by an evaluator and a rectangular domain.

    ``step`` overrides the differencing step; when None the policy
    h = 1e-4 * max(1, |u|, |v|) applies.  Larger steps (~4e-3) push the
    roundoff floor of second derivatives from ~1e-7 down to ~1e-10 and are
    used by flatness certifications.
    """

    fn: Callable[[float, float], np.ndarray]
    u_domain: tuple[float, float]
    v_domain: tuple[float, float]
    step: float | None = None

    def step_at(self, u: float, v: float) -> float:
        if self.step is not None:
            return self.step
        return 1e-4 * max(1.0, abs(u), abs(v))


@dataclass(frozen=True, eq=False)
class OracleReport:
    """Measured fundamental forms and curvature invariants at one point.

    ``c`` has shape (2, 2, 2): c[k-1, i-1, j-1] is the projection of X_ij
    onto the k-th measured normal.  ``k_n`` follows the same index pattern
    as the closed-form route; ``k_n_alt`` uses the standard commutator
    F-term, and the two agree whenever F = 0.  ``orientation`` is the sign
    of det[T1 T2 N1 N2]; k_n * orientation is comparable across points and
    basis choices.  ``error_estimate`` maps quantity names to the observed
    difference between the extrapolated and unextrapolated stencil values.
    """

    E: float
    F: float
    G: float
    W2: float
    c: np.ndarray
    K: float
    k_n: float
    k_n_alt: float
    mean_vector: np.ndarray
    h_norm_sq: float
    orientation: float
    error_estimate: dict

    @property
    def k_n_oriented(self) -> float:
        return self.k_n * self.orientation


def _first_derivative(f, x: float, h: float):
    lo = (f(x + h) - f(x - h)) / (2.0 * h)
    wide = (f(x + 2.0 * h) - f(x - 2.0 * h)) / (4.0 * h)
    hi = (4.0 * lo - wide) / 3.0
    return hi, lo


def _second_derivative(f, x: float, h: float, center):
    lo = (f(x + h) - 2.0 * center + f(x - h)) / (h * h)
    wide = (f(x + 2.0 * h) - 2.0 * center + f(x - 2.0 * h)) / (4.0 * h * h)
    hi = (4.0 * lo - wide) / 3.0
    return hi, lo


def numeric_forms(im: Immersion, u: float, v: float,
                  seed_order: tuple[int, int, int, int] = (0, 1, 2, 3)) -> OracleReport:
    """Fundamental forms and invariants at (u, v) from differencing alone.

    ``seed_order`` is the order in which standard basis vectors are offered
    to the normal-basis Gram-Schmidt (the defaults make the basis
    deterministic; a different order exercises basis independence).

    Raises StepUnderflowError when the 2-step stencil leaves the domain and
    RankDeficiencyError when the measured tangents are dependent.
    """
    h = im.step_at(u, v)
    (u0, u1), (v0, v1) = im.u_domain, im.v_domain
    if u - 2 * h < u0 or u + 2 * h > u1 or v - 2 * h < v0 or v + 2 * h > v1:
        raise StepUnderflowError(
            f"stencil of half-width {2 * h!r} does not fit at ({u!r}, {v!r})"
        )
    f = im.fn
    center = f(u, v)

    x_u, x_u_lo = _first_derivative(lambda uu: f(uu, v), u, h)
    x_v, x_v_lo = _first_derivative(lambda vv: f(u, vv), v, h)
    x_uu, x_uu_lo = _second_derivative(lambda uu: f(uu, v), u, h, center)
    x_vv, x_vv_lo = _second_derivative(lambda vv: f(u, vv), v, h, center)

    def dv_at(uu: float):
        return _first_derivative(lambda vv: f(uu, vv), v, h)

    x_uv, x_uv_lo = _mixed(dv_at, u, h)

    return _report_from_derivatives(
        x_u, x_v, x_uu, x_uv, x_vv,
        low=(x_u_lo, x_v_lo, x_uu_lo, x_uv_lo, x_vv_lo),
        seed_order=seed_order,
    )


def _mixed(dv_at, u: float, h: float):
    hi_p1, lo_p1 = dv_at(u + h)
    hi_m1, lo_m1 = dv_at(u - h)
    hi_p2, lo_p2 = dv_at(u + 2 * h)
    hi_m2, lo_m2 = dv_at(u - 2 * h)
    lo = (hi_p1 - hi_m1) / (2.0 * h)
    wide = (hi_p2 - hi_m2) / (4.0 * h)
    hi = (4.0 * lo - wide) / 3.0
    lo_both = (lo_p1 - lo_m1) / (2.0 * h)
    return hi, lo_both


def _normal_basis(x_u: np.ndarray, x_v: np.ndarray,
                  seed_order=(0, 1, 2, 3)) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    t1 = x_u / np.linalg.norm(x_u)
    r = x_v - (x_v @ t1) * t1
    rn = np.linalg.norm(r)
    if rn * rn < _GRAM_TOL:
        raise RankDeficiencyError("tangent vectors are numerically dependent")
    t2 = r / rn
    normals = []
    for i in seed_order:
        e = np.zeros(4)
        e[i] = 1.0
        res = e - (e @ t1) * t1 - (e @ t2) * t2
        for n in normals:
            res = res - (res @ n) * n
        ln = np.linalg.norm(res)
        if ln > _SKIP_TOL:
            normals.append(res / ln)
            if len(normals) == 2:
                break
    if len(normals) != 2:
        raise RankDeficiencyError("could not assemble a normal basis")
    return t1, t2, normals[0], normals[1]


def _invariants(E, F, G, c):
    w2 = E * G - F * F
    if w2 <= _GRAM_TOL:
        raise RankDeficiencyError(f"tangent Gram determinant too small: {w2!r}")
    K = sum(c[k, 0, 0] * c[k, 1, 1] - c[k, 0, 1] ** 2 for k in range(2)) / w2
    # normal curvature, same index pattern as the closed-form route
    k_n = (
        E * (c[0, 0, 1] * c[1, 1, 1] - c[1, 0, 1] * c[0, 1, 1])
        - F * (c[0, 0, 0] * c[0, 1, 1] - c[1, 0, 0] * c[0, 1, 1])
        + G * (c[0, 0, 0] * c[1, 0, 1] - c[1, 0, 0] * c[0, 0, 1])
    ) / w2
    # standard commutator F-term variant (identical when F = 0)
    k_n_alt = (
        E * (c[0, 0, 1] * c[1, 1, 1] - c[1, 0, 1] * c[0, 1, 1])
        - F * (c[0, 0, 0] * c[1, 1, 1] - c[1, 0, 0] * c[0, 1, 1])
        + G * (c[0, 0, 0] * c[1, 0, 1] - c[1, 0, 0] * c[0, 0, 1])
    ) / w2
    h_coeff = [
        (c[k, 0, 0] * G + c[k, 1, 1] * E - 2.0 * c[k, 0, 1] * F) / (2.0 * w2)
        for k in range(2)
    ]
    return w2, K, k_n, k_n_alt, h_coeff


def _report_from_derivatives(x_u, x_v, x_uu, x_uv, x_vv, low,
                             seed_order=(0, 1, 2, 3)) -> OracleReport:
    E = float(x_u @ x_u)
    F = float(x_u @ x_v)
    G = float(x_v @ x_v)
    t1, t2, n1, n2 = _normal_basis(x_u, x_v, seed_order)

    def coeffs(d_uu, d_uv, d_vv):
        c = np.empty((2, 2, 2))
        for k, n in enumerate((n1, n2)):
            c[k, 0, 0] = d_uu @ n
            c[k, 0, 1] = c[k, 1, 0] = d_uv @ n
            c[k, 1, 1] = d_vv @ n
        return c

    c = coeffs(x_uu, x_uv, x_vv)
    w2, K, k_n, k_n_alt, h_coeff = _invariants(E, F, G, c)
    mean_vector = h_coeff[0] * n1 + h_coeff[1] * n2
    h_norm_sq = float(h_coeff[0] ** 2 + h_coeff[1] ** 2)
    orientation = float(np.sign(np.linalg.det(np.column_stack([t1, t2, n1, n2]))))

    # truncation estimates: same assembly from the unextrapolated stencils
    x_u_lo, x_v_lo, x_uu_lo, x_uv_lo, x_vv_lo = low
    E_lo = float(x_u_lo @ x_u_lo)
    F_lo = float(x_u_lo @ x_v_lo)
    G_lo = float(x_v_lo @ x_v_lo)
    c_lo = coeffs(x_uu_lo, x_uv_lo, x_vv_lo)
    try:
        _, K_lo, k_n_lo, _, h_lo = _invariants(E_lo, F_lo, G_lo, c_lo)
        est = {
            "E": abs(E - E_lo),
            "F": abs(F - F_lo),
            "G": abs(G - G_lo),
            "K": abs(K - K_lo),
            "K_N": abs(k_n - k_n_lo),
            "H_norm_sq": abs(h_norm_sq - (h_lo[0] ** 2 + h_lo[1] ** 2)),
        }
    except RankDeficiencyError:
        est = {}

    return OracleReport(
        E=E, F=F, G=G, W2=float(w2), c=c,
        K=float(K), k_n=float(k_n), k_n_alt=float(k_n_alt),
        mean_vector=mean_vector, h_norm_sq=h_norm_sq,
        orientation=orientation, error_estimate=est,
    )


@dataclass(frozen=True)
class ComparisonReport:
    """Outcome of matching a closed-form field against the oracle."""

    quantity: str
    max_abs_dev: float
    max_rel_dev: float
    worst_point: tuple[float, float]
    tolerance: float
    passed: bool
    ratio: float  # median closed/oracle over well-conditioned points
    sign: float = 1.0  # global sign applied to the oracle values

    def summary(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        return (
            f"{self.quantity}: {verdict}  max|dev| = {self.max_abs_dev:.3e} "
            f"(tol {self.tolerance:.1e}) at (s, t) = "
            f"({self.worst_point[0]:.6g}, {self.worst_point[1]:.6g}); "
            f"ratio closed/oracle = {self.ratio:.6g}"
        )


def compare(
    quantity: str,
    closed: Sequence[float],
    oracle_values: Sequence[float],
    points: Sequence[tuple[float, float]],
    tolerance: float = DEFAULT_TOLERANCE,
    *,
    match_sign: bool = False,
) -> ComparisonReport:
    """Max absolute/relative deviation of ``closed`` against the oracle.

    A point passes when |closed - oracle| <= max(tol, tol * |oracle|).  With
    ``match_sign`` one global sign is granted to the oracle values first
    (normal curvature is defined up to normal-basis orientation).
    """
    a = np.asarray(closed, dtype=float)
    b = np.asarray(oracle_values, dtype=float)
    if a.shape != b.shape or len(a) != len(points):
        raise ValueError("field shapes disagree")
    sign = 1.0
    if match_sign and np.max(np.abs(b)) > 0:
        if np.max(np.abs(a - b)) > np.max(np.abs(a + b)):
            sign = -1.0
    dev = np.abs(a - sign * b)
    limits = np.maximum(tolerance, tolerance * np.abs(b))
    worst = int(np.argmax(dev - limits))
    scale = np.maximum(1.0, np.abs(b))
    good = np.abs(b) > max(1e-9, 0.01 * float(np.max(np.abs(b)))) if np.max(np.abs(b)) > 0 else np.zeros(len(b), bool)
    ratio = float(np.median(a[good] / (sign * b[good]))) if np.any(good) else math.nan
    return ComparisonReport(
        quantity=quantity,
        max_abs_dev=float(np.max(dev)),
        max_rel_dev=float(np.max(dev / scale)),
        worst_point=tuple(points[worst]),
        tolerance=tolerance,
        passed=bool(np.all(dev <= limits)),
        ratio=ratio,
        sign=sign,
    )


def grid_max_abs_gaussian(im: Immersion, s_values: Sequence[float],
                          t_values: Sequence[float]) -> float:
    """max |K| measured by the oracle over a grid (flatness certification)."""
    worst = 0.0
    for t in t_values:
        for s in s_values:
            worst = max(worst, abs(numeric_forms(im, float(s), float(t)).K))
    return worst
