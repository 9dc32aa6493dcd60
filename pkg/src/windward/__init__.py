"""Look-ahead path following for unicycle-like vehicles in strong flowfields."""

from .dynamics import IntegratorConfig, VehicleState, derivatives, step
from .geometry import UnitVec2, Vec2, angle_between, cross_k, rot, triple_product_dir
from .guidance import (GainTooSmall, GuidanceDiagnostics, GuidanceOutput,
                       GuidanceParams, InfeasibleCourse, Regime,
                       command_from_footprint, feasibility_cone,
                       gain_lower_bound, guidance_step, infeasibility_indices,
                       infeasible_mapping, look_ahead, look_ahead_on_error,
                       residual_normal_accel, shift_angle, shift_angle_fast,
                       solve_wind_triangle, u_fast1, u_fast2, u_slow)
from .paths import (ArcChain, ArcSegment, Circle, DegenerateProjection,
                    Footprint, FrenetFrame, FrenetSingularity, Line,
                    LineSegment, PathModel, SinglePoint, s_dot)
from .sim import (ErrorDynamicsState, PortraitTrace, Scenario,
                  SimulationAborted, TrajectoryLog, continuity_sweep,
                  default_grid, error_dynamics_rhs, metrics, phase_portrait,
                  portrait_initial_state, run, run_error_dynamics)
from .wind import ConstantWind, PiecewiseConstantWind, SinusoidalWind, WindModel

__version__ = "0.1.0"
