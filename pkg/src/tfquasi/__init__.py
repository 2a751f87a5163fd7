"""Time-frequency analysis and quasi-Banach operator ideals on finite cyclic groups."""

__version__ = "0.1.0"

from .errors import ConfigError, NotAFrameError, NumericalError, TFQError
from .gabor import (
    GaborLattice,
    GaborSystem,
    analysis,
    canonical_dual,
    frame_bounds,
    frame_operator,
    gabor_matrix,
    gaussian_window,
    synthesis,
    wexler_raz,
)
from .lattice import Grid, PhasePoint, dft, idft, inner, tf_shift
from .opnorms import (
    IdealReport,
    SpaceSpec,
    approx_numbers_upper,
    compose_bound,
    nuclear_upper,
    opnorm_upper,
    pqr_condition,
    schatten_triangle_check,
    schatten_upper,
    singular_values_hilbert,
)
from .qmatrix import QuantMatrix
from .quant import (
    apply_op,
    change_quantization,
    kernel_of_symbol,
    pad_kernel,
    rank_one_symbol,
    symbol_of_kernel,
)
from .spaces import (
    AtomicRep,
    Exponent,
    MatrixOperator,
    ModSpec,
    atomic_norm_upper,
    embedding_check,
    lattice_modnorm,
    lp_weighted_norm,
    mixed_lpq_norm,
    modnorm,
    tensor_norm_upper,
    up_matrix_norm,
)
from .timefreq import cross_wigner_A, istft, stft
from .weights import (
    ModerateCertificate,
    Weight,
    moderateness_constant,
    omega0_compatibility,
    shifted_weight,
    standard_weight,
    submultiplicativity_check,
    weight_transform_A,
)
from .estimators import GaborFrame, ModulationNorm, STFTTransformer
