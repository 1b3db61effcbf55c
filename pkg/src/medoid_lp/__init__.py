"""k-medoids as a linear program: exact recovery checks and separated-balls experiments."""
from ._kernels import BACKEND
from .certificates import (CertificateReport, check_all, check_democratic_certificate,
                           check_dual_certificate, check_max_u_certificate,
                           check_threshold_certificate)
from .experiment import CellResult, ExperimentConfig, run_experiment
from .kmedoids import (Clustering, ExactResult, RelaxationResult, brute_force_kmedoids,
                       build_relaxation, classify_recovery, solve_relaxation)
from .model import (DissimilarityMatrix, PointSet, RadialLaw, dissimilarities,
                    place_ball_centers, sample_ball, separated_balls)
from .report import emit_report
from .theory import GuaranteeQuery, check_guarantee, concentration_bounds, validate_concentration_empirically

__version__ = "0.1.0"
