"""Complex zeros of the characteristic function of a PT-symmetric
double-step waveguide: resonances, complex eigenvalues, self-dual
spectral singularities, ladder asymptotics, forbidden amplitude gaps,
prescribed-wavenumber singularity design, and branch continuation."""

from .kernels import EntireKernelValue, KernelDomainError, kernel_eval
from .model import (FValue, ModelDomainError, ModelParams, eval_F, eval_F0,
                    eval_F_minus, eval_F_plus, eval_F_scale, eval_G)
from .zerofinder import (Classification, ContourError, SearchRegion,
                         WindingAccuracyError, ZeroRecord,
                         classification_band, classify, count_zeros,
                         find_zeros, region_r, verify_region_bounds)
from .asymptotics import (LadderPrediction, SmallGammaZero, ladder_constants,
                          ladder_count, ladder_predict, large_ell_targets,
                          single_step_radius, single_step_real_zero_candidate,
                          single_step_zeros, small_gamma_zero, theta)
from .singularities import (DesignResult, GapCertificate, MinScanRow,
                            SingularityPoint, TABLE1_SEEDS, build_point,
                            design_for_k, g, g_star, gap_certificate,
                            min_scan, no_root_band, polish_real_axis_zero,
                            real_system_residual, recover_ell, solve_g_for_u,
                            u_from_k_beta, k_from_u_beta)
from .continuation import (Branch, BranchKind, BranchPoint, atlas,
                           branch_intersections, threshold_curve,
                           trace_singularity, trace_zero, trace_zero_family)

__version__ = "1.0.0"
