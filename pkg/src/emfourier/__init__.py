"""Reconstruction of electromagnetic current sources ``J = p f + p x grad g``
on a cube from multi-frequency far-field data, one Fourier mode per probe."""

from .coefficients import CoefficientSet, read_coefficients, write_coefficients
from .errors import (ConfigurationError, DatasetFormatError, DegeneracyError, DomainError,
                     IncompleteDataError, QuadratureWarning, SequencingError)
from .forward import electric_far_field, magnetic_far_field, radiation_vector
from .inversion import (extract_nonzero_mode, extract_zero_mode, reconstruct,
                        recover_coefficients)
from .measurement import (Dataset, add_noise, extend_by_symmetry, read_dataset, synthesize,
                          upper_hemisphere, write_dataset)
from .quadrature import QuadratureSpec
from .source_model import Polarization, ScalarProfile, SourceSpec, catalog, evaluate_current
from .spectral_grid import GridParams, build_probe_set, truncation_order

__version__ = "0.1.0"
