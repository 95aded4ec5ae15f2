"""Complex reflective billiards, triangular line fields, Birkhoff distributions
and real pseudo-billiards."""

from .projective import (
    I1,
    I2,
    INFINITY_LINE,
    DegenerateMirrorError,
    DirectionCoord,
    ProjLine,
    ProjPoint,
    ReflectionVerdict,
    VerdictKind,
    bilinear_form,
    is_isotropic,
    reflect_direction,
    reflection_law_verdict,
    symmetry_about_line,
)
from .conics import (
    CircleMirror,
    ConfocalConic,
    ConfocalFamily,
    Frame,
    IntersectionSet,
    LineMirror,
    Mirror,
    MirrorImage,
    ParabolaFamily,
    ParabolaMirror,
    conic_at,
    intersect_line_mirror,
    parabola_at,
    tangent_line,
)
from .reflectivity import (
    Billiard,
    ClosureReport,
    Law,
    Orbit,
    Patch,
    Topotype,
    build_type1,
    build_type2,
    build_type3,
    chain,
    combine,
    combine_erase,
    extend_orbit,
    verify_k_reflectivity,
)
from .triangular import (
    FramedTriangleState,
    RotationH,
    concordant_pair,
    integrate_spiral,
    line_field_direction,
    squared_perimeter,
)
from .birkhoff import (
    FramedKGon,
    concordant_lengths,
    distribution_dimension,
    frame_real_kgon,
    integral_plane,
    lambda_residual,
    tangent_functions,
)
from .real_billiards import (
    ArcBody,
    ConvexBody,
    OrientedLine,
    billiard_map,
    commute_residual,
    invisibility_scan,
    law_type,
    skew_parity_sign,
    trace_ray,
)

__version__ = "0.1.0"
