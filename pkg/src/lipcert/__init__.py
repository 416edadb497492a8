"""Exact certificates over Lipschitz-free spaces of finite metric spaces.

Everything is computed in `fractions.Fraction`; certificates replay their
defining inequalities before they are returned.
"""

from .errors import InvalidInput, SoundnessError
from .metric import (FiniteMetricSpace, ValidationReport, builtin_space,
                     build_example52, build_line, make_pair_set, project,
                     reflect, reflect_set, space_from_json, space_to_json,
                     validate_metric)
from .lipschitz import (LipschitzFunction, PartialFunction, floor_round,
                        function_from_json, function_to_json, lip_norm,
                        mcshane_inf_extension, mcshane_sup_extension, slope)
from .monotone import (CmCertificate, CmViolation, brute_force_cm_oracle,
                       check_augmented, check_gamma_cm, prune_to_cm,
                       synthesize_witness)
from .lpcore import LinearProgram, LpResult, solve_lp
from .functionals import (PairMeasure, apply_measure,
                          check_norm_attainment_signed, dual_norm, is_optimal,
                          measure_from_json, measure_to_json, positivize,
                          slice_diameter)
from .d2p import (Ld2pCertificate, Sd2pCertificate, ld2p_certificate,
                  lip_ltp_witness, sd2p_certificate, two_lip_ltp_witness)

__version__ = "0.1.0"

__all__ = [
    "InvalidInput", "SoundnessError",
    "FiniteMetricSpace", "ValidationReport", "builtin_space",
    "build_example52", "build_line", "make_pair_set", "project", "reflect",
    "reflect_set", "space_from_json", "space_to_json", "validate_metric",
    "LipschitzFunction", "PartialFunction", "floor_round",
    "function_from_json", "function_to_json", "lip_norm",
    "mcshane_inf_extension", "mcshane_sup_extension", "slope",
    "CmCertificate", "CmViolation", "brute_force_cm_oracle",
    "check_augmented", "check_gamma_cm", "prune_to_cm", "synthesize_witness",
    "LinearProgram", "LpResult", "solve_lp",
    "PairMeasure", "apply_measure", "check_norm_attainment_signed",
    "dual_norm", "is_optimal", "measure_from_json", "measure_to_json",
    "positivize", "slice_diameter",
    "Ld2pCertificate", "Sd2pCertificate", "ld2p_certificate",
    "lip_ltp_witness", "sd2p_certificate", "two_lip_ltp_witness",
]
