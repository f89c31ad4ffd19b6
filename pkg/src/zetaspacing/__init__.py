"""Finite-height corrections to the spacing distribution of Riemann zeros.

Prime-sum constants, exact CUE_N spacing densities, Richardson extraction of
the 1/N^2 correction, the effective-dimension prediction, and tools to compare
against zero tables or Monte Carlo surrogates.
"""

__version__ = "0.1.0"

from .primecorr import HeightContext, r2_unfolded, r2_expansion
from .constants import ConstantSet, build_constant_set, compute_cn, compute_q, sieve, stieltjes
from .cue import KernelSpec, bin_probabilities, gap_determinant, r2_cue_exact, r2_truncated, spacing_density
from .curves import CorrelationCurve, SpacingCurve
from .errors import ConditioningError, DataError, DomainError, FormatError, SingularityError
from .extract import ExtractionReport, extract_p0, extract_p1
from .mc import McRun, sample_cue
from .predict import PredictionParams, delta_p, derive_params, predicted_spacing
from .zeros import ZeroDataset, load_zeros, residuals, spacing_histogram, unfold
