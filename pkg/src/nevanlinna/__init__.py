"""Nevanlinna characteristics of delta-subharmonic and meromorphic functions, with
numerical verification of planar and ray estimates."""
from .characteristics import RadiiTriple, ValueWithError
from .config import DEFAULT, Settings
from .errors import (AtomOnCircle, DegenerateSet, EntireRequired, NevanlinnaError, ParseError,
                     ProposalMismatch, SetOutsideBound, ValidationError)
from .model import (AtomicMeasure, DeltaSubharmonicFn, LogPotentialFn, MeromorphicSpec,
                    Potential, as_potential, ln_modulus)
from .planarsets import PlanarSet, RaySet, annular_sectors, disc, disc_union, grid_mask
from .verify import InequalityReport, VERIFIERS

__version__ = "0.1.0"
