"""Reversible data hiding with matching-optimised histogram shifting."""
from .codec import EmbedConfig, MarkedImage, multi_layer_embed, multi_layer_extract
from .errors import HSMatchError
from .histogram import PEHistogram, build_histogram
from .image import GrayImage, load_pgm, psnr, save_pgm
from .planner import EXHAUSTIVE, HEURISTIC, ShiftPlan, enumerate_plans
from .predictor import predict

__version__ = "0.1.0"
