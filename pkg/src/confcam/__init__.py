"""Conformal camera imaging: Möbius image transformations, log-polar sampling,
the discrete projective Fourier transform and its retinotopic applications."""
from .camera import (INFINITY, EulerAngles, MoebiusMap, Translation3, apply, compose, cross_ratio,
                     h_from_translation, inverse, inverse_stereographic, k_from_euler, project,
                     stereographic)
from .grid import GridSpec, ImageGeometry, RetinalSamples, derive_grid, sample_image
from .kernels import BACKEND
from .pft import (CorticalImage, Spectrum, continuous_pft, dpft_forward, dpft_inverse,
                  projective_render, read_spectrum, write_spectrum)
from .retinotopy import assemble, schwartz_map, split_hemispheres
from .saccade import FlashSet, SaccadeEvent, mislocalization_report, perceived_positions, remap

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "INFINITY", "CorticalImage", "EulerAngles", "FlashSet", "GridSpec", "ImageGeometry",
    "MoebiusMap", "RetinalSamples", "SaccadeEvent", "Spectrum", "Translation3", "apply", "assemble",
    "compose", "continuous_pft", "cross_ratio", "derive_grid", "dpft_forward", "dpft_inverse",
    "h_from_translation", "inverse", "inverse_stereographic", "k_from_euler", "mislocalization_report",
    "perceived_positions", "project", "projective_render", "read_spectrum", "remap", "sample_image",
    "schwartz_map", "split_hemispheres", "stereographic", "write_spectrum",
]
