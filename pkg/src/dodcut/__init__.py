"""First-order upwind solver for linear hyperbolic systems on cut-cell meshes,
with penalty stabilization of small cut cells."""

from .linalg import (
    FluxDecomposition,
    SystemMatrices,
    build_system,
    face_flux_tables,
    flux_matrix,
    max_wave_speed,
)
from .mesh import (
    AREA_EPS,
    BOUNDARY,
    Cell,
    CutCellMesh,
    CutLine,
    Face,
    MeshError,
    clip_cell,
    generate_mesh,
    polygon_area,
)
from .scheme import (
    ProblemConfig,
    RunReport,
    SimulationBlowup,
    UpwindOperator,
    error_norms,
    euler_step,
    exact_boundary,
    exact_solution,
    project_initial,
    run,
    time_step_size,
    upwind_residual,
    weighted_l2,
)
from .stabilization import (
    CellStabilization,
    StabilizationError,
    WeightDiagnostics,
    build_stabilization,
    inflow_weights,
    penalty,
    quadratic_form_check,
    stabilization_residual,
    verify_weights,
)
from .harness import (
    ConvergenceTable,
    DecayReport,
    converge,
    decay_experiment,
    overshoot_excess,
    radial_bump_initial,
    within_initial_bounds,
    zero_boundary,
)

__version__ = "0.1.0"
