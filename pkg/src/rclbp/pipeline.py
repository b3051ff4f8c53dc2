"""NL-means + wavelet texture restoration denoiser.

In ``rclbp`` mode the image ``v`` is filtered (``I_F``), the residual
``MN = v - I_F`` is shrunk in the wavelet domain to a detail estimate ``D``,
and the result is ``I_F + D``. Nothing is clamped.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .imagecore import as_gray
from .nlmeans import NlMeansParams, nl_means_filter
from .wavelet import ShrinkReport, WaveletParams, denoise_method_noise

DENOISE_MODES = ("none", "nlmeans_only", "rclbp")


@dataclass(frozen=True)
class DenoiseConfig:
    mode: str = "rclbp"
    nl: NlMeansParams = field(default_factory=NlMeansParams)
    wav: WaveletParams = field(default_factory=WaveletParams)

    def __post_init__(self):
        if self.mode not in DENOISE_MODES:
            raise ValueError(f"unknown denoise mode {self.mode!r}; expected one of {DENOISE_MODES}")


@dataclass
class DenoiseStages:
    """Intermediate images of one ``rclbp`` run."""

    filtered: np.ndarray
    method_noise: np.ndarray
    detail: np.ndarray
    restored: np.ndarray
    shrink: ShrinkReport


def method_noise(v, i_f) -> np.ndarray:
    v = as_gray(v)
    i_f = as_gray(i_f)
    if v.shape != i_f.shape:
        raise ValueError(f"dimension mismatch: {v.shape} vs {i_f.shape}")
    return v - i_f


def rclbp_stages(v, cfg: DenoiseConfig | None = None) -> DenoiseStages:
    cfg = cfg or DenoiseConfig()
    v = as_gray(v)
    i_f = nl_means_filter(v, cfg.nl)
    mn = method_noise(v, i_f)
    detail, report = denoise_method_noise(mn, cfg.wav)
    return DenoiseStages(i_f, mn, detail, i_f + detail, report)


def rclbp_denoise(v, cfg: DenoiseConfig | None = None) -> np.ndarray:
    cfg = cfg or DenoiseConfig()
    v = as_gray(v)
    if cfg.mode == "none":
        return v.copy()
    if cfg.mode == "nlmeans_only":
        return nl_means_filter(v, cfg.nl)
    return rclbp_stages(v, cfg).restored


class BatchError(RuntimeError):
    def __init__(self, index: int, cause: BaseException):
        super().__init__(f"image {index}: {cause}")
        self.index = index


def denoise_batch(images, cfg: DenoiseConfig | None = None, workers: int = 1) -> list[np.ndarray]:
    """Denoise every image; output order follows input order.

    With ``workers > 1`` images are processed on a thread pool (the compiled
    kernel releases the GIL). The first failing index is reported.
    """
    cfg = cfg or DenoiseConfig()
    images = list(images)

    def one(idx):
        try:
            return rclbp_denoise(images[idx], cfg)
        except Exception as exc:
            raise BatchError(idx, exc) from exc

    if workers <= 1 or len(images) <= 1:
        return [one(i) for i in range(len(images))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(len(images))))
