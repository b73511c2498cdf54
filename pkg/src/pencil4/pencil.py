"""Surface pencils X(s,t) = gamma(s) + A(t) V2(s) + B(t) V4(s).

The marching-scale functions A, B are expressions in t with exact symbolic
derivatives.  Writing a = 1 - k1 A and b = k2 A - k3 B, the tangent plane is
spanned by X_s = a V1 + b V3 and X_t = A' V2 + B' V4, the metric is
diagonal (E = a^2 + b^2, F = 0, G = A'^2 + B'^2), and the second
fundamental form has exactly four nonzero coefficients.

Coefficient source: by default the k_i are the frame-ODE ("connection")
coefficients of the apparatus, which is what differentiating the actual
frame requires; for completed degenerate frames these differ from the
curve's own curvatures (which are zero past kappa1).  Flatness bookkeeping
that follows the curve-curvature convention passes ``source="curve"``.

Everything is immutable and evaluation is pure; grid sweeps can run in
parallel without coordination.  The per-surface frame cache is a plain
dict keyed by the parameter value (idempotent writes, so concurrent reads
under the GIL stay consistent).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import expr as ex
from .curve import CurveSpec, FrenetApparatus, Vec4, WCurve, frenet_apparatus
from .errors import RegularityViolationError

__all__ = [
    "MarchingScale",
    "PencilSurface",
    "PencilCoefficients",
    "FundamentalForms",
    "coefficients",
    "eval_surface",
    "tangent_frame",
    "normal_frame",
    "fundamental_forms",
]

REGULARITY_TOL = 1e-12
_KAPPA_FD_STEP = 1e-5  # central step for kappa'(s) on analytic curves


@dataclass(frozen=True)
class MarchingScale:
    """The pair A(t), B(t) with exact first and second derivatives."""

    A: ex.Expr
    B: ex.Expr
    domain: tuple[float, float]
    dA: ex.Expr = field(init=False, repr=False, compare=False, default=None)
    dB: ex.Expr = field(init=False, repr=False, compare=False, default=None)
    ddA: ex.Expr = field(init=False, repr=False, compare=False, default=None)
    ddB: ex.Expr = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "dA", ex.differentiate(self.A))
        object.__setattr__(self, "dB", ex.differentiate(self.B))
        object.__setattr__(self, "ddA", ex.differentiate(self.dA))
        object.__setattr__(self, "ddB", ex.differentiate(self.dB))
        t0, t1 = self.domain
        if not t1 > t0:
            raise RegularityViolationError("marching")
        for t in np.linspace(t0, t1, 64):
            da = ex.evaluate(self.dA, float(t))
            db = ex.evaluate(self.dB, float(t))
            if da * da + db * db <= REGULARITY_TOL:
                raise RegularityViolationError("marching", t=float(t))

    @classmethod
    def from_expressions(cls, a_text: str, b_text: str, domain: tuple[float, float],
                         var: str = "t") -> "MarchingScale":
        return cls(ex.parse(a_text, var), ex.parse(b_text, var),
                   (float(domain[0]), float(domain[1])))

    def values(self, t: float) -> tuple[float, float, float, float, float, float]:
        """(A, B, A', B', A'', B'') at ``t``."""
        return (
            ex.evaluate(self.A, t),
            ex.evaluate(self.B, t),
            ex.evaluate(self.dA, t),
            ex.evaluate(self.dB, t),
            ex.evaluate(self.ddA, t),
            ex.evaluate(self.ddB, t),
        )


@dataclass(frozen=True)
class PencilCoefficients:
    """a, b shorthand and their partial derivatives at one point."""

    a: float
    b: float
    a_s: float
    a_t: float
    b_s: float
    b_t: float


@dataclass(frozen=True)
class FundamentalForms:
    """First- and second-form coefficients of a pencil surface point.

    F vanishes identically for pencils, as do c1_12 and c2_22; they are kept
    as explicit zeros so generic curvature formulas can consume this
    structure directly.
    """

    E: float
    G: float
    W2: float
    c1_11: float
    c1_22: float
    c2_11: float
    c2_12: float
    F: float = 0.0
    c1_12: float = 0.0
    c2_22: float = 0.0

    def c(self, k: int, i: int, j: int) -> float:
        """Second-form coefficient c^k_ij with 1-based indices."""
        key = (k, min(i, j), max(i, j))
        table = {
            (1, 1, 1): self.c1_11,
            (1, 1, 2): self.c1_12,
            (1, 2, 2): self.c1_22,
            (2, 1, 1): self.c2_11,
            (2, 1, 2): self.c2_12,
            (2, 2, 2): self.c2_22,
        }
        return table[key]


@dataclass(frozen=True)
class PencilSurface:
    """A spine curve plus marching-scale functions, evaluable to points,
    frames and fundamental forms."""

    curve: CurveSpec
    marching: MarchingScale
    s_domain: tuple[float, float] = None
    _frames: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.s_domain is None:
            object.__setattr__(self, "s_domain", self.curve.domain)

    @property
    def t_domain(self) -> tuple[float, float]:
        return self.marching.domain

    # -- frames ---------------------------------------------------------

    def frame(self, s: float) -> FrenetApparatus:
        app = self._frames.get(s)
        if app is None:
            app = frenet_apparatus(self.curve, s)
            self._frames[s] = app
        return app

    def _kappas(self, s: float, source: str) -> tuple[float, float, float]:
        app = self.frame(s)
        if source == "frame":
            return app.connection
        if source == "curve":
            return app.kappas
        raise ValueError(f"unknown coefficient source {source!r}")

    def _kappa_rates(self, s: float, source: str) -> tuple[float, float, float]:
        """d/ds of the coefficient triple; exactly zero for W-curves,
        central finite differences elsewhere (no closed form survives the
        Gram-Schmidt construction)."""
        if isinstance(self.curve, WCurve):
            return (0.0, 0.0, 0.0)
        h = _KAPPA_FD_STEP
        lo, hi = self.s_domain
        if s - h < lo or s + h > hi:
            # one-sided second-order fallback near the boundary
            sign = 1.0 if s - h < lo else -1.0
            k0 = np.array(self._kappas(s, source))
            k1 = np.array(self._kappas(s + sign * h, source))
            k2 = np.array(self._kappas(s + 2.0 * sign * h, source))
            rate = sign * (-3.0 * k0 + 4.0 * k1 - k2) / (2.0 * h)
            return tuple(float(v) for v in rate)
        plus = np.array(self._kappas(s + h, source))
        minus = np.array(self._kappas(s - h, source))
        rate = (plus - minus) / (2.0 * h)
        return tuple(float(v) for v in rate)

    # -- geometry -------------------------------------------------------

    def coefficients(self, s: float, t: float, source: str = "frame") -> PencilCoefficients:
        k1, k2, k3 = self._kappas(s, source)
        dk1, dk2, dk3 = self._kappa_rates(s, source)
        A, B, dA, dB, _, _ = self.marching.values(t)
        return PencilCoefficients(
            a=1.0 - k1 * A,
            b=k2 * A - k3 * B,
            a_s=-dk1 * A,
            a_t=-k1 * dA,
            b_s=dk2 * A - dk3 * B,
            b_t=k2 * dA - k3 * dB,
        )

    def _check_regularity(self, s: float, t: float, co: PencilCoefficients,
                          dA: float, dB: float) -> None:
        if co.a * co.a + co.b * co.b <= REGULARITY_TOL:
            raise RegularityViolationError("spine", s, t)
        if dA * dA + dB * dB <= REGULARITY_TOL:
            raise RegularityViolationError("marching", s, t)

    def point_array(self, s: float, t: float) -> np.ndarray:
        """X(s,t) without regularity checks (the point itself is always
        defined); used by the numerical oracle's stencils."""
        app = self.frame(s)
        A = ex.evaluate(self.marching.A, t)
        B = ex.evaluate(self.marching.B, t)
        return self.curve.point(s) + A * app.frame[1] + B * app.frame[3]

    def point(self, s: float, t: float) -> Vec4:
        """X(s,t); raises RegularityViolationError when either regularity
        condition fails at the point."""
        co = self.coefficients(s, t)
        _, _, dA, dB, _, _ = self.marching.values(t)
        self._check_regularity(s, t, co, dA, dB)
        return Vec4.from_array(self.point_array(s, t))

    def tangent_frame(self, s: float, t: float) -> tuple[Vec4, Vec4]:
        """(X_s, X_t) = (a V1 + b V3, A' V2 + B' V4)."""
        co = self.coefficients(s, t)
        _, _, dA, dB, _, _ = self.marching.values(t)
        self._check_regularity(s, t, co, dA, dB)
        app = self.frame(s)
        x_s = co.a * app.frame[0] + co.b * app.frame[2]
        x_t = dA * app.frame[1] + dB * app.frame[3]
        return Vec4.from_array(x_s), Vec4.from_array(x_t)

    def normal_frame(self, s: float, t: float) -> tuple[Vec4, Vec4]:
        """(N1, N2) = ((-B' V2 + A' V4)/sqrt(G), (-b V1 + a V3)/sqrt(E))."""
        co = self.coefficients(s, t)
        _, _, dA, dB, _, _ = self.marching.values(t)
        self._check_regularity(s, t, co, dA, dB)
        app = self.frame(s)
        g = math.sqrt(dA * dA + dB * dB)
        e = math.sqrt(co.a * co.a + co.b * co.b)
        n1 = (-dB * app.frame[1] + dA * app.frame[3]) / g
        n2 = (-co.b * app.frame[0] + co.a * app.frame[2]) / e
        return Vec4.from_array(n1), Vec4.from_array(n2)

    def fundamental_forms(self, s: float, t: float, source: str = "frame") -> FundamentalForms:
        k1, k2, k3 = self._kappas(s, source)
        co = self.coefficients(s, t, source)
        A, B, dA, dB, ddA, ddB = self.marching.values(t)
        self._check_regularity(s, t, co, dA, dB)
        E = co.a * co.a + co.b * co.b
        G = dA * dA + dB * dB
        sqrt_e = math.sqrt(E)
        sqrt_g = math.sqrt(G)
        return FundamentalForms(
            E=E,
            G=G,
            W2=E * G,
            c1_11=(dA * co.b * k3 - dB * (k1 * co.a - k2 * co.b)) / sqrt_g,
            c1_22=(dA * ddB - dB * ddA) / sqrt_g,
            c2_11=(co.a * co.b_s - co.b * co.a_s) / sqrt_e,
            c2_12=(co.a * co.b_t - co.b * co.a_t) / sqrt_e,
        )

    def second_derivative_s(self, s: float, t: float, source: str = "frame") -> Vec4:
        """X_ss assembled from the frame decomposition
        a_s V1 + (k1 a - k2 b) V2 + b_s V3 + k3 b V4."""
        k1, k2, k3 = self._kappas(s, source)
        co = self.coefficients(s, t, source)
        app = self.frame(s)
        v = (co.a_s * app.frame[0]
             + (k1 * co.a - k2 * co.b) * app.frame[1]
             + co.b_s * app.frame[2]
             + k3 * co.b * app.frame[3])
        return Vec4.from_array(v)

    def as_point_function(self) -> Callable[[float, float], np.ndarray]:
        return self.point_array


# Module-level aliases mirroring the operation names.

def coefficients(p: PencilSurface, s: float, t: float, source: str = "frame") -> PencilCoefficients:
    return p.coefficients(s, t, source)


def eval_surface(p: PencilSurface, s: float, t: float) -> Vec4:
    return p.point(s, t)


def tangent_frame(p: PencilSurface, s: float, t: float) -> tuple[Vec4, Vec4]:
    return p.tangent_frame(s, t)


def normal_frame(p: PencilSurface, s: float, t: float) -> tuple[Vec4, Vec4]:
    return p.normal_frame(s, t)


def fundamental_forms(p: PencilSurface, s: float, t: float,
                      source: str = "frame") -> FundamentalForms:
    return p.fundamental_forms(s, t, source)
