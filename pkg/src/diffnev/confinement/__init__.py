"""Exact formal-series engine and singularity-confinement experiments."""
from .explicit import ExplicitSolutionReport, FitConfig, check_explicit_solution
from .field import A0, A2, ALPHA, FIELD, FieldElement, canonical, fe, specialize
from .laws import CoefficientLawReport, PatternVerdict, pole_pattern_conclusion, verify_coefficient_laws
from .series import (FormalSeries, SeriesDomainError, TruncationError, series_add, series_div,
                     series_invert, series_mul, series_sub)
from .trace import (ConfinementTrace, IrreducibilityError, iterate_confinement, rhs,
                    satisfies_equation, substitution_residuals)
from .specialize import SpecializationReport, specialization_check
