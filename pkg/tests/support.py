"""Independent numerical oracles used by the test suite.

Everything here works purely from point evaluations so it cannot share a
failure mode with the symbolic / closed-form code paths it checks.
"""

from __future__ import annotations

import numpy as np

# 4th-order central stencils (offset: coefficient), divided by h^order.
_STENCILS = {
    1: ({-2: 1.0, -1: -8.0, 1: 8.0, 2: -1.0}, 12.0),
    2: ({-2: -1.0, -1: 16.0, 0: -30.0, 1: 16.0, 2: -1.0}, 12.0),
    3: ({-3: 1.0, -2: -8.0, -1: 13.0, 1: -13.0, 2: 8.0, 3: -1.0}, 8.0),
    4: ({-3: -1.0, -2: 12.0, -1: -39.0, 0: 56.0, 1: -39.0, 2: 12.0, 3: -1.0}, 6.0),
}


def fd_derivative(f, x: float, order: int = 1, h: float = 1e-5):
    """4th-order-accurate central finite difference of ``f`` at ``x``.

    ``f`` may return a float or an ndarray.  The first-derivative stencil is
    the Richardson extrapolation of the plain central difference over steps
    h and 2h.
    """
    stencil, denom = _STENCILS[order]
    acc = None
    for offset, coeff in stencil.items():
        term = coeff * np.asarray(f(x + offset * h), dtype=float)
        acc = term if acc is None else acc + term
    return acc / (denom * h**order)


def richardson_first_derivative(f, x: float, h: float = 1e-5) -> float:
    """Central difference with one Richardson extrapolation level
    (equivalently the 5-point first-derivative stencil)."""
    d_h = (f(x + h) - f(x - h)) / (2.0 * h)
    d_2h = (f(x + 2.0 * h) - f(x - 2.0 * h)) / (4.0 * h)
    return (4.0 * d_h - d_2h) / 3.0


def fd_frenet(point_fn, s: float, h: float = 0.02):
    """Frame and curvatures of a unit-speed curve from point samples only.

    Derivatives come from the 4th-order stencils above, the frame from
    Gram-Schmidt, the last vector's sign from det = +1.  Returns
    (frame 4x4 rows V1..V4, (k1, k2, k3)).
    """
    derivs = [fd_derivative(point_fn, s, order=k, h=h) for k in (1, 2, 3, 4)]
    basis = []
    norms = []
    for d in derivs:
        e = d.astype(float)
        for v in basis:
            e = e - np.dot(e, v) * v
        n = np.linalg.norm(e)
        norms.append(n)
        if n < 1e-7:
            raise ValueError(f"rank deficiency in finite-difference frame at s={s}")
        basis.append(e / n)
    V1, V2, V3, V4 = basis
    if np.linalg.det(np.column_stack(basis)) < 0.0:
        V4 = -V4
    k1 = norms[1]
    k2 = norms[2] / k1
    k3 = float(np.dot(derivs[3], V4)) / (k1 * k2)
    return np.array([V1, V2, V3, V4]), (k1, k2, k3)


def fd_surface_second_derivatives(point_fn, u: float, v: float, h: float = 1e-3):
    """(X_uu, X_uv, X_vv) of an immersion from point samples, 4th order."""
    x_uu = fd_derivative(lambda uu: point_fn(uu, v), u, order=2, h=h)
    x_vv = fd_derivative(lambda vv: point_fn(u, vv), v, order=2, h=h)
    x_uv = fd_derivative(
        lambda uu: fd_derivative(lambda vv: point_fn(uu, vv), v, order=1, h=h),
        u,
        order=1,
        h=h,
    )
    return x_uu, x_uv, x_vv


def fd_surface_first_derivatives(point_fn, u: float, v: float, h: float = 1e-5):
    """(X_u, X_v) of an immersion from point samples, 4th order."""
    x_u = fd_derivative(lambda uu: point_fn(uu, v), u, order=1, h=h)
    x_v = fd_derivative(lambda vv: point_fn(u, vv), v, order=1, h=h)
    return x_u, x_v
