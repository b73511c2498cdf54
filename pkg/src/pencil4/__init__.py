"""Surface pencils through a spine curve in Euclidean 4-space.

A pencil sweeps X(s,t) = gamma(s) + A(t) V2(s) + B(t) V4(s) along the
Frenet frame of a unit-speed curve.  The package provides:

* ``expr``      -- the expression language with exact symbolic derivatives
* ``curve``     -- curves in E^4 and their moving frames
* ``pencil``    -- pencil surfaces, frames, fundamental forms
* ``curvature`` -- Gaussian/normal/mean curvature and flatness residuals
* ``families``  -- rotation, Vranceanu, Lawson, ruled and flat-polar designs
* ``oracle``    -- finite-difference ground truth for any E^4 immersion
* ``cli``       -- the ``pencil4`` command-line front end
"""

__version__ = "0.1.0"

from .curve import (  # noqa: F401
    AnalyticCurve,
    FrenetApparatus,
    Vec4,
    WCurve,
    complete_frame,
    derivatives,
    frenet_apparatus,
    is_w_curve,
)
from .pencil import (  # noqa: F401
    FundamentalForms,
    MarchingScale,
    PencilCoefficients,
    PencilSurface,
)
from .curvature import CurvatureReport, flatness_residuals, report  # noqa: F401
from .oracle import Immersion, OracleReport, compare, numeric_forms  # noqa: F401
