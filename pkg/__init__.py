"""noisy-le - Localizable entanglement hierarchies under local noise"""

from closed_forms import GGHZConfigLabel, closed_form_profile, closed_form_rle
from config import ScanConfig, __version__
from experiments import ExperimentRunner, build_profile
from hierarchy_engine import LEProfile, delta_b, verdict3, verdict4
from localizable import OptimizerOptions, le, rle
from negativity import negativity
from noise_channels import ChannelKind, NoiseConfig, apply_local_noise
from state_ensembles import EnsembleKind, gghz, gw, sample

__all__ = [
    "__version__",
    "ChannelKind",
    "EnsembleKind",
    "ExperimentRunner",
    "GGHZConfigLabel",
    "LEProfile",
    "NoiseConfig",
    "OptimizerOptions",
    "ScanConfig",
    "apply_local_noise",
    "build_profile",
    "closed_form_profile",
    "closed_form_rle",
    "delta_b",
    "gghz",
    "gw",
    "le",
    "negativity",
    "rle",
    "sample",
    "verdict3",
    "verdict4",
]
