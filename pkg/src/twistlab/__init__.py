"""Distinguishing Hecke eigenforms by their normalized traces.

Exact q-expansions and Hecke eigenvalues, coincidence sets of normalized
traces and their densities, twist certificates a_p(f1) = chi(p) p^r a_p(f2),
and the L-function checks behind the fact that genuine newforms only admit
r = 0.
"""

from .characters import CyclotomicNumber, DirichletCharacter, enumerate_characters
from .comparator import (
    DensityReport,
    ParityFinding,
    coincidence_set,
    infer_parity_and_r,
    normalized_ap,
    upper_density,
    vanishing_set,
)
from .modforms import NewformRecord, corpus, get_form, synthesize_tate_twist
from .series import QSeries
from .twist import TwistCertificate, detect_twist, twist_record, verify_certificate

__version__ = "0.1.0"

__all__ = [
    "CyclotomicNumber",
    "DensityReport",
    "DirichletCharacter",
    "NewformRecord",
    "ParityFinding",
    "QSeries",
    "TwistCertificate",
    "coincidence_set",
    "corpus",
    "detect_twist",
    "enumerate_characters",
    "get_form",
    "infer_parity_and_r",
    "normalized_ap",
    "synthesize_tate_twist",
    "twist_record",
    "upper_density",
    "vanishing_set",
    "verify_certificate",
]
