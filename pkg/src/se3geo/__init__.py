"""Left-invariant geometry on SE(3) and its quotient of positions and
orientations: group exp/log, Hamiltonian geodesic flow, exact-distance
shooting, and fiber sections."""

from .errors import (AllAtCutLocus, AngleAtCutLocus, DegenerateFiber, GeometryError,
                     NoConvergence, NotHorizontal, NotLegal, StepCountTooSmall)
from .flow import (MomentumDiagnostics, PhaseState, ShootingConfig, ShootingResult,
                   Trajectory, energy_oracle_distance, flow_rhs, hamiltonian, integrate,
                   momentum_diagnostics, shoot_distance)
from .metrics import (MetricParams, SubbundleProjections, algebra_norm, legality_check,
                      log_norm, projections, reductive_check)
from .se3 import (AlgebraVector, EulerZYZ, RigidMotion, ad, adjoint_action, adjoint_matrix,
                  coad, compose, euler_zyz, exp_se3, exp_so3, f_coefficient, inverse,
                  log_se3, log_so3, rotation_from_euler, structure_constants,
                  warmup_kernels)
from .sections import (CosetPoint, FiberSweep, SectionResult, compute_sections, coplanarity,
                       fiber_element, fiber_sweep, lognorm_error,
                       min_angular_velocity_check, project, section_canonical,
                       section_min_distance, section_min_lognorm)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
