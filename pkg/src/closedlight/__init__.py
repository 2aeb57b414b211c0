"""Closed-form direct lighting from rectangular area lights and DCT cubemaps."""

from .arealight import Material, RectAreaLight, shade_lambert_const, shade_phong_const
from .dct import DctFace, dct_forward, load_coeffs, reconstruct, save_coeffs
from .envlight import EnvCubemap, shade_lambert_env, shade_lambert_env_dc
from .metrics import psnr, rel_error_pct, rgb_to_hsi
from .montecarlo import McConfig, mc_shade, mc_variance
from .shading import shade_dispatch

__version__ = "0.1.0"
