"""Rate-distortion evaluation: correlation, PSNR, SSIM, sweep tables.

SSIM uses the standard configuration (11x11 Gaussian window, sigma 1.5,
K1 = 0.01, K2 = 0.03, dynamic range 255) computed over valid windows only.
PSNR defaults to peak 255 to match the 8-bit mapped domain the per-band
quality numbers are quoted in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codec import EncoderConfig, bitrate, decode_cube, encode_cube_full
from .compensate import CompensationConfig
from .cube import HyperCube
from .errors import DimensionError, UndefinedCorrelationError

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
SSIM_RANGE = 255.0


@dataclass
class MetricsRecord:
    band_index: int
    mse: float
    psnr_db: float
    ssim: float
    cc_next: float | None  # correlation with the following band, None for the last


def correlation_coefficient(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation over all pixels of two equally shaped bands."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    da = a - a.mean()
    db = b - b.mean()
    denom = math.sqrt(float(np.sum(da * da)) * float(np.sum(db * db)))
    if denom == 0.0:
        raise UndefinedCorrelationError("correlation undefined for constant bands")
    return float(np.clip(np.sum(da * db) / denom, -1.0, 1.0))


def band_mse(ref: np.ndarray, test: np.ndarray) -> float:
    ref = np.asarray(ref, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if ref.shape != test.shape:
        raise DimensionError(f"shape mismatch {ref.shape} vs {test.shape}")
    diff = ref - test
    return float(np.mean(diff * diff))


def psnr(ref: np.ndarray, test: np.ndarray, peak: int = 255) -> float:
    """10 log10(peak^2 / MSE) in dB, +inf for identical bands."""
    if peak <= 0:
        raise ValueError("peak must be positive")
    err = band_mse(ref, test)
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / err)


def _gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    half = (size - 1) / 2
    coords = np.arange(size) - half
    g = np.exp(-(coords * coords) / (2.0 * sigma * sigma))
    kernel = np.outer(g, g)
    return kernel / kernel.sum()


def _window_means(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Valid-mode weighted window means via sliding windows."""
    view = np.lib.stride_tricks.sliding_window_view(img, kernel.shape)
    return np.einsum("ijkl,kl->ij", view, kernel)


def ssim(ref: np.ndarray, test: np.ndarray) -> float:
    """Mean structural similarity over valid 11x11 Gaussian windows."""
    ref = np.asarray(ref, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if ref.shape != test.shape:
        raise DimensionError(f"shape mismatch {ref.shape} vs {test.shape}")
    if min(ref.shape) < SSIM_WINDOW:
        raise DimensionError(
            f"band {ref.shape} smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window"
        )
    kernel = _gaussian_kernel(SSIM_WINDOW, SSIM_SIGMA)
    c1 = (SSIM_K1 * SSIM_RANGE) ** 2
    c2 = (SSIM_K2 * SSIM_RANGE) ** 2

    mu_x = _window_means(ref, kernel)
    mu_y = _window_means(test, kernel)
    var_x = _window_means(ref * ref, kernel) - mu_x * mu_x
    var_y = _window_means(test * test, kernel) - mu_y * mu_y
    cov = _window_means(ref * test, kernel) - mu_x * mu_y

    num = (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    return float(np.mean(num / den))


def band_records(ref_bands, test_bands, peak: int = 255) -> list[MetricsRecord]:
    """Per-band MSE/SSIM/PSNR of test vs ref, plus ref's band-to-band correlation."""
    if len(ref_bands) != len(test_bands):
        raise DimensionError(
            f"band count mismatch: {len(ref_bands)} reference vs {len(test_bands)} test"
        )
    records = []
    for k, (ref, test) in enumerate(zip(ref_bands, test_bands)):
        if k + 1 < len(ref_bands):
            try:
                cc = correlation_coefficient(ref, ref_bands[k + 1])
            except UndefinedCorrelationError:
                cc = None
        else:
            cc = None
        records.append(
            MetricsRecord(
                band_index=k,
                mse=band_mse(ref, test),
                psnr_db=psnr(ref, test, peak),
                ssim=ssim(ref, test),
                cc_next=cc,
            )
        )
    return records


@dataclass
class RdPoint:
    lam: float
    bpppb: float
    mean_psnr_db: float
    mean_ssim: float


def rd_points(cube: HyperCube, lambda_sweep, cfg: EncoderConfig) -> list[RdPoint]:
    """Encode once per tolerance value and measure rate and mean quality.

    Quality is averaged over the predicted bands; the first band is stored
    losslessly, so including it would pin every mean at +inf.
    """
    if not lambda_sweep:
        raise ValueError("lambda sweep must be non-empty")
    points = []
    for lam in lambda_sweep:
        comp = CompensationConfig(
            lam=float(lam), q_step=cfg.compensation.q_step, enabled=cfg.compensation.enabled
        )
        run_cfg = EncoderConfig(
            train=cfg.train, compensation=comp, band_exclusions=cfg.band_exclusions
        )
        result = encode_cube_full(cube, run_cfg)
        decoded = decode_cube(result.bitstream)
        rate = bitrate(result.bitstream)
        psnrs = [
            psnr(ref, decoded.band(k))
            for k, ref in enumerate(result.resized_bands)
            if k > 0
        ]
        ssims = [
            ssim(ref, decoded.band(k))
            for k, ref in enumerate(result.resized_bands)
            if k > 0
        ]
        points.append(
            RdPoint(
                lam=float(lam),
                bpppb=rate,
                mean_psnr_db=float(np.mean(psnrs)) if psnrs else math.inf,
                mean_ssim=float(np.mean(ssims)) if ssims else 1.0,
            )
        )
    points.sort(key=lambda p: p.bpppb)
    return points


def rd_csv(points: list[RdPoint]) -> str:
    """CSV table: lambda,bpppb,mean_psnr_db,mean_ssim at 6 significant digits."""
    lines = ["lambda,bpppb,mean_psnr_db,mean_ssim"]
    for p in points:
        lines.append(
            f"{p.lam:.6g},{p.bpppb:.6g},{p.mean_psnr_db:.6g},{p.mean_ssim:.6g}"
        )
    return "\n".join(lines) + "\n"
