"""Strain-aware wiring layout for tight garments.

Pipeline: load a garment mesh with its 2D pattern, compute per-face
strain energy densities over a motion set, weight the mesh edges by
strip-intersection integrals, solve the weighted Steiner tree over the
terminals, smooth it into a curvature-bounded arc-spline strip and
evaluate elongation/energy metrics against a minimum-length baseline.
"""

from .clipping import clip_triangle_rect, convex_clip, polygon_area
from .errors import (
    CannotSatisfyCurvature,
    ConfigError,
    DegenerateFace,
    DisconnectedTerminals,
    EmbeddingFailure,
    MotionMismatch,
    NonManifold,
    OracleTooLarge,
    PatternMissing,
    SeamEdge,
    TerminalCapExceeded,
    WirelayError,
)
from .graph import (
    EdgeIntegrals,
    WeightedWireGraph,
    build_graph,
    compute_edge_integrals,
    edge_weight,
    eta_floor,
)
from .layout import (
    ArcSeg,
    ArcSpline,
    LineSeg,
    WireLayout,
    compare_layouts,
    curve_deformation_energy,
    elongation_rates,
    evaluate_layout,
    extract_branches,
    make_layout,
    smooth_branch,
)
from .mesh import (
    GarmentMesh,
    MotionSequence,
    MotionSet,
    TerminalSet,
    build_mesh,
    build_motion_set,
    edge_strip_rect,
    insert_terminal,
    make_terminal_set,
    nearest_vertex,
    resolve_terminals,
    rest_motion,
    subdivide_centroid,
)
from .mesh_io import LoadOptions, load_garment, load_motions, read_frames, write_frames
from .solver import (
    SolvePolicy,
    SteinerTree,
    oracle_brute_force,
    solve,
    solve_approx_mehlhorn,
    solve_exact_dw,
)
from .strain import (
    MaterialParams,
    StrainField,
    compute_strain_field,
    deformation_gradient,
    green_strain,
    svk_density,
)
from .synthetic import gen_synthetic

__version__ = "0.1.0"
