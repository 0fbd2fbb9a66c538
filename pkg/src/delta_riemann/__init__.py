"""Exact and numerical Riemann solutions of the Chaplygin Keyfitz-Kranzer and
pressureless gas systems with time-dependent friction, including delta-shocks."""
from .errors import (BoundaryContamination, CflViolation, ConfigError, DegenerateData,
                     DeltaRiemannError, EmptyInput, InvalidTime, MuBelowCritical, NoSpike,
                     NotApplicable, NotDeltaRegime, NumericalFailure, QuadratureFailure,
                     SingularProfile)
from .friction import (FrictionTerm, Trajectory, adaptive_quad, double_primitive_B, eval_alpha,
                       primitive_A)
from .fvm import (FvmConfig, FvmHistory, FvmState, SpikeDiagnostics, empirical_orders, fvm_run,
                  l1_error, spike_diagnostics)
from .kk import (DeltaShock, EntropyCheck, Region, RiemannData, TwoContact, check_entropy,
                 classify, delta_shock_params, discriminant, intermediate_density, sample, solve)
from .limits import (LimitRecord, LimitStudy, concentration_limit, critical_sequence,
                     delta_weight_below_mu0, mu_critical, mu_to_mu0_study, mu_zero_limit,
                     richardson, vanishing_pressure_study, vanishing_sequence)
from .model import Profile, SingularPart, State
from .pressureless import (SingleContact, VacuumFan, branch_name, pressureless_delta_params,
                           sample_pressureless, solve_pressureless)
from .weak import (ResidualReport, SweepTable, TestFunction, residual, residual_kk,
                   residual_pressureless, residual_sweep)

__version__ = "0.1.0"
