"""freres: a dual-track latent video token codec.

Sparse high-fidelity spatial anchors plus compact temporal-frequency
residual tokens, with hierarchical budget planning, a spatial-guided
cross-attention absorber, and spectral analysis tooling.
"""

from .absorber import (
    AbsorberWeights,
    NeighborhoodMask,
    absorb,
    attention_matrix,
    build_mask,
    cell_center,
    masked_cross_attention,
)
from .anchors import AnchorSet, PrunedFrame, block_prune, retain_top_energy, select_anchors
from .budget import BudgetRequest, CompressionPlan, account_context, allocate, compression_ratio
from .errors import (
    BadMagic,
    BudgetTooSmall,
    CodecError,
    DivisionDomain,
    EmptyGop,
    InvalidBudget,
    InvalidSpec,
    IoFailure,
    MissingWeights,
    NonFiniteValue,
    ShapeMismatch,
    TruncatedFile,
)
from .fusion import FusionConfig, FusionMode, fuse, raw_adapter
from .io import (
    CodecWeights,
    XorShift64Star,
    format_tokens,
    identity_weights,
    load_weights,
    read_latents,
    read_tokens,
    seeded_weights,
    write_latents,
    write_tokens,
    write_weights,
)
from .model import GridCoord, LatentSequence, Token, TokenKind, TokenStream, validate
from .pipeline import EncodeOptions, EncodeReport, run_pipeline
from .spectrum import SpectrumReport, energy_spectrum, trajectory_topk_ratio, write_spectrum_csv
from .synthetic import SYNTHETIC_KINDS, SyntheticSpec, gen_synthetic
from .temporal import (
    FrequencyBlock,
    Gop,
    compress_gop,
    dct2,
    energy_filter,
    group_frames,
    idct2,
    pool_frames,
    static_token_cells,
    summary_vectors,
)

__version__ = "0.1.0"
