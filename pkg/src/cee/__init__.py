"""Integrated-information analysis of transition probability matrices."""

__version__ = "0.1.0"

from .errors import CeeError, UnreachableStateError  # noqa: E402
from .states import SystemState  # noqa: E402
from .tpm import Tpm, validate_tpm, load_tpm  # noqa: E402
from .repertoire import Repertoire, cause_repertoire, effect_repertoire, unconstrained_repertoire  # noqa: E402
from .mechanism import MechanismCut, apply_cut, small_phi, core_purview, distinction, Distinction  # noqa: E402
from .system import (  # noqa: E402
    Complex,
    CauseEffectStructure,
    SystemCut,
    cause_effect_structure,
    find_complexes,
    system_phi,
)
from .algebra import Factorization, factorize, product_residual, tensor_product  # noqa: E402
from .grain import CoarseGraining, GrainBudget, coarse_grain, grain_search, temporal_grain  # noqa: E402
from .euclid import (  # noqa: E402
    SimConfig,
    empirical_tpm,
    hologram_entropy,
    info_bits,
    physicality,
    simulate,
)
