"""Two-user symmetric Gaussian interference channel with output feedback.

Closed-form achievable rates and outer bound, the linear deterministic model
and its two-stage feedback protocol, Kramer's scheme as a baseline, a
Monte-Carlo check of the Alamouti-style combining, and a max-min evaluator
for finite deterministic channels.
"""

from .model import (ChannelParams, DetParams, DomainError, RateReport, Regime, classify,
                    db_to_linear, det_from_gaussian, linear_to_db)
from .deterministic import (EntropyReport, ProtocolResult, det_capacity, ldm_transfer,
                            message_length, run_two_stage_protocol, verify_entropy_identities)
from .gaussian import (STRONG_GAP_BITS, WEAK_GAP_BITS, GapCertificate, GdofPoint, OuterBound,
                       achievable, achievable_strong, achievable_weak, gap_certificate,
                       gap_sweep, gdof_feedback, gdof_nonfeedback, outer_bound,
                       outer_objective)
from .kramer import (KramerRoot, QuarticCoeffs, RootNotFoundError, kramer_gdof, kramer_rate,
                     kramer_rho_star, kramer_root)
from .alamouti import (McConfig, StrongEstimate, WeakEstimate, simulate_strong_combining,
                       simulate_weak_combining)
from .egc import (ChannelSpecError, CondDistU, DetChannelSpec, EgcObjective, SearchResult,
                  dumps_spec, egc_capacity_search, egc_objective, ldm_to_egc, loads_spec)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
