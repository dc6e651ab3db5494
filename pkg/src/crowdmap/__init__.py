"""crowdmap: density-map tooling for crowd counting.

Turns head annotations into Gaussian density maps, recovers head
locations (and standardized pseudo-label maps) from coarse predicted
maps by greedy kernel matching, and scores counting/map quality.
"""

from ._backend import DEFAULT as active_backend
from ._backend import available_backends
from .dataset import (
    FilterRule,
    SceneMeta,
    filter_scenes,
    format_time_of_day,
    parse_time_of_day,
    preset_rule,
)
from .density import (
    BORDER_RENORMALIZE,
    BORDER_TRUNCATE,
    DEFAULT_K,
    DEFAULT_SIGMA,
    GaussianWindow,
    HeadList,
    count_from_mass,
    crop_window,
    generate_density_map,
    make_window,
)
from .errors import FormatError, InvalidArgumentError
from .gpr import (
    MODE_INCREMENTAL,
    MODE_NAIVE,
    ReconstructionResult,
    probability_map,
    reconstruct,
    refresh_region,
    select_candidate,
)
from .io import (
    load_dmap,
    load_heads_csv,
    load_pgm,
    load_scenes_jsonl,
    save_dmap,
    save_heads_csv,
    save_scenes_jsonl,
    save_trace_jsonl,
)
from .metrics import (
    LossWeights,
    QualityParams,
    content_loss,
    counting_errors,
    lsgan_disc_loss,
    lsgan_gen_loss,
    multiscale_disc_loss,
    multiscale_gen_loss,
    pixel_mse,
    psnr,
    reconstruction_loss,
    ssim,
    total_objective,
)
from .simulate import random_head_list, synthetic_coarse_map

__version__ = "0.1.0"

__all__ = [
    "BORDER_RENORMALIZE",
    "BORDER_TRUNCATE",
    "DEFAULT_K",
    "DEFAULT_SIGMA",
    "FilterRule",
    "FormatError",
    "GaussianWindow",
    "HeadList",
    "InvalidArgumentError",
    "LossWeights",
    "MODE_INCREMENTAL",
    "MODE_NAIVE",
    "QualityParams",
    "ReconstructionResult",
    "SceneMeta",
    "active_backend",
    "available_backends",
    "content_loss",
    "count_from_mass",
    "counting_errors",
    "crop_window",
    "filter_scenes",
    "format_time_of_day",
    "generate_density_map",
    "load_dmap",
    "load_heads_csv",
    "load_pgm",
    "load_scenes_jsonl",
    "lsgan_disc_loss",
    "lsgan_gen_loss",
    "make_window",
    "multiscale_disc_loss",
    "multiscale_gen_loss",
    "parse_time_of_day",
    "pixel_mse",
    "preset_rule",
    "probability_map",
    "psnr",
    "random_head_list",
    "reconstruct",
    "reconstruction_loss",
    "refresh_region",
    "save_dmap",
    "save_heads_csv",
    "save_scenes_jsonl",
    "save_trace_jsonl",
    "select_candidate",
    "ssim",
    "synthetic_coarse_map",
    "total_objective",
    "__version__",
]
