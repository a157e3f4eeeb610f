"""Quantum kicked top simulator: generalized entanglement, state extent,
and fidelity decay as indicators of quantum chaos."""

__version__ = "0.1.0"

from .spin import SpinSystem, GcsParams, build_spin_system, build_gcs, expectation
from .dynamics import FloquetOperator, build_floquet, evolve, fidelity_series
from .measures import (GeRecord, RmtBaseline, purity_su2, purity_so2, extent,
                       invariant_uncertainty, ge_extent_identity_residual,
                       rmt_average_ge, haar_random_state, haar_baseline,
                       ge_record, meyer_wallach_crosscheck)
from .classical import (classical_step, lyapunov_estimate, classify,
                        correspondence_check, ChaosLabel)
from .errors import ValidationError, NumericalInvariantError
