"""Radon inversion on the unit disk with SVD and needlet thresholding estimators."""
from .svd_basis import SvdCoeffs, SvdIndex
from .sim import Observation, get_phantom, observe, true_coeffs
from .needlet import NeedletCoeffs, analysis, synthesis
from .estimators import ReconstructedImage, ThresholdRule, reconstruct

__version__ = "0.1.0"

__all__ = [
    "NeedletCoeffs",
    "Observation",
    "ReconstructedImage",
    "SvdCoeffs",
    "SvdIndex",
    "ThresholdRule",
    "analysis",
    "get_phantom",
    "observe",
    "reconstruct",
    "synthesis",
    "true_coeffs",
]
