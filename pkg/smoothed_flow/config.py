"""
Project configuration and shared constants.
Single source for tolerances, integration defaults, sweep grids and file names.
"""

from pathlib import Path

# Output JSON schema; bump when a document layout changes
SCHEMA_VERSION = 1
DEFAULT_SEED = 0

# A state is "on" the energy surface when |u^2 + v^2 - f(r)| is below this
SURFACE_TOL = 1e-10

# Turning points are polished until |v| is below EVENT_TOL; a new crossing
# only counts once |v| has exceeded EVENT_ARM_FACTOR * EVENT_TOL since the last one
EVENT_TOL = 1e-10
EVENT_ARM_FACTOR = 1e3

# Period closure: return to within CLOSURE_TOL * max(1, |s0|) of the start in (r, v, u),
# after having left it by CLOSURE_DEPART_FACTOR times that distance
CLOSURE_TOL = 1e-6
CLOSURE_DEPART_FACTOR = 100.0

# Collision approach: r < COLLISION_RADIUS_FACTOR * R_max and u^2 + v^2 within
# COLLISION_ENERGY_TOL of f(0)
COLLISION_RADIUS_FACTOR = 1e-6
COLLISION_ENERGY_TOL = 1e-3

# Integrator defaults (embedded Runge-Kutta with dense output)
DEFAULT_METHOD = "DOP853"
DEFAULT_RTOL = 1e-11
DEFAULT_ATOL = 1e-13
# r is resolved relative to itself so close approaches to r=0 stay sharp
RADIAL_ATOL = 1e-30
MIN_STEP = 1e-14
# Gauss-Legendre 4- vs 8-node disagreement allowed per step in physical_time
QUADRATURE_TOL = 1e-9

# Orbit classification
SCAN_POINTS = 4096
# log-spaced scan starts at SCAN_FLOOR * R_max
SCAN_FLOOR = 1e-10
# smallest radius tried when a root hides below the scan floor
ROOT_SEARCH_FLOOR = 1e-200
TANGENCY_VALUE_TOL = 1e-10
TANGENCY_SLOPE_TOL = 1e-6
TANGENCY_STEP_FACTOR = 1e-7
ROOT_SEPARATION_FACTOR = 1e-6
DISTINCT_RADIUS_FACTOR = 1e-6
STATIONARY_TOL = 1e-8

# Integration oracle: tau budget, grown x BUDGET_GROWTH per round while the orbit
# is still on its first fall or half-oscillation
ORACLE_TAU_SPAN = 200.0
ORACLE_BUDGET_GROWTH = 10.0
ORACLE_MAX_ROUNDS = 10

# Equivalence reports
DEFAULT_SAMPLES = 64
C_RANGE_BISECTION_STEPS = 60
C_RANGE_MAX_DOUBLINGS = 60
# sampled range when neither flow has a Void boundary
UNBOUNDED_C_RANGE = 2.0

# Built-in sweep (h fixed at DEFAULT_SWEEP_H)
SWEEP_ALPHAS = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)
SWEEP_EPSILONS = (0.01, 0.05, 0.1)
DEFAULT_SWEEP_H = -1.0

# Portrait sampling
PORTRAIT_POINTS = 401

# All command outputs go here by default (CSV, JSON)
DEFAULT_OUTPUT_DIR = Path("output")

# Default filenames (relative to output dir); used by main.py and scripts
FILENAMES = {
    "trajectory_csv": "trajectory.csv",
    "trajectory_events": "trajectory_events.json",
    "portrait_combined": "combined.csv",
    "sweep_csv": "equivalence_sweep.csv",
    "amended_forms": "amended_forms.json",
    "oracle_agreement": "oracle_agreement.json",
}
