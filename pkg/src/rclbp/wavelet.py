"""Orthonormal 2-D Haar transform and BayesShrink soft thresholding.

Subband naming follows the (horizontal, vertical) filter pair: ``HL`` is
high-pass along rows (x) and low-pass along columns (y), ``LH`` the reverse.
For a 2x2 block ``[[a, b], [c, d]]``::

    LL = (a + b + c + d) / 2      HL = (a - b + c - d) / 2
    LH = (a + b - c - d) / 2      HH = (a - b - c + d) / 2

Odd extents are mirror padded by one sample before each level and cropped
again on reconstruction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .imagecore import as_gray

MAD_CONSTANT = 0.6745

_SQRT_HALF = math.sqrt(0.5)
_BASES = ("haar",)


@dataclass(frozen=True)
class WaveletParams:
    levels: int = 2
    basis: str = "haar"

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        if self.basis not in _BASES:
            raise ValueError(f"unsupported wavelet basis {self.basis!r}; have {_BASES}")


@dataclass
class WaveletCoeffs:
    """Coefficient pyramid.

    ``details[k]`` holds ``(LH, HL, HH)`` of level ``k + 1``; level 1 is the
    finest. ``original_size`` is ``(width, height)`` of the analysed image.
    """

    approx: np.ndarray
    details: list[tuple[np.ndarray, np.ndarray, np.ndarray]]
    original_size: tuple[int, int]
    basis: str = "haar"

    @property
    def levels(self) -> int:
        return len(self.details)

    def level_shapes(self) -> list[tuple[int, int]]:
        """(rows, cols) entering each level, before padding."""
        w, h = self.original_size
        shapes = []
        for _ in range(self.levels):
            shapes.append((h, w))
            h, w = (h + 1) // 2, (w + 1) // 2
        return shapes

    def map_details(self, fn) -> "WaveletCoeffs":
        return WaveletCoeffs(
            self.approx.copy(),
            [tuple(fn(b) for b in lvl) for lvl in self.details],
            self.original_size,
            self.basis,
        )


def _pad_even(x: np.ndarray) -> np.ndarray:
    ph, pw = x.shape[0] % 2, x.shape[1] % 2
    if ph or pw:
        x = np.pad(x, ((0, ph), (0, pw)), mode="symmetric")
    return x


def _haar_level(x: np.ndarray):
    x = _pad_even(x)
    # rows first: low/high along x
    lo = (x[:, 0::2] + x[:, 1::2]) * _SQRT_HALF
    hi = (x[:, 0::2] - x[:, 1::2]) * _SQRT_HALF
    # then columns: low/high along y
    ll = (lo[0::2] + lo[1::2]) * _SQRT_HALF
    lh = (lo[0::2] - lo[1::2]) * _SQRT_HALF
    hl = (hi[0::2] + hi[1::2]) * _SQRT_HALF
    hh = (hi[0::2] - hi[1::2]) * _SQRT_HALF
    return ll, lh, hl, hh


def _haar_level_inverse(ll, lh, hl, hh) -> np.ndarray:
    h2, w2 = ll.shape
    lo = np.empty((2 * h2, w2))
    hi = np.empty((2 * h2, w2))
    lo[0::2] = (ll + lh) * _SQRT_HALF
    lo[1::2] = (ll - lh) * _SQRT_HALF
    hi[0::2] = (hl + hh) * _SQRT_HALF
    hi[1::2] = (hl - hh) * _SQRT_HALF
    x = np.empty((2 * h2, 2 * w2))
    x[:, 0::2] = (lo + hi) * _SQRT_HALF
    x[:, 1::2] = (lo - hi) * _SQRT_HALF
    return x


def dwt2(img, p: WaveletParams | None = None) -> WaveletCoeffs:
    """Multi-level separable Haar analysis."""
    p = p or WaveletParams()
    x = as_gray(img)
    if x.shape[0] < 2 or x.shape[1] < 2:
        raise ValueError(f"image {x.shape} too small for a wavelet decomposition (need >= 2x2)")
    size = (x.shape[1], x.shape[0])
    details = []
    for _ in range(p.levels):
        x, lh, hl, hh = _haar_level(x)
        details.append((lh, hl, hh))
    return WaveletCoeffs(x, details, size, p.basis)


def idwt2(coeffs: WaveletCoeffs) -> np.ndarray:
    """Inverse of :func:`dwt2`, cropped to ``coeffs.original_size``."""
    shapes = coeffs.level_shapes()
    x = np.asarray(coeffs.approx, dtype=np.float64)
    for k in range(coeffs.levels - 1, -1, -1):
        lh, hl, hh = coeffs.details[k]
        rows, cols = shapes[k]
        expect = ((rows + 1) // 2, (cols + 1) // 2)
        if x.shape != expect or lh.shape != expect or hl.shape != expect or hh.shape != expect:
            raise ValueError(
                f"inconsistent subband dimensions at level {k + 1}: expected {expect}, got "
                f"LL {x.shape}, LH {lh.shape}, HL {hl.shape}, HH {hh.shape}"
            )
        x = _haar_level_inverse(x, lh, hl, hh)[:rows, :cols]
    return x


# --------------------------------------------------------------------------
# BayesShrink
# --------------------------------------------------------------------------


@dataclass
class SubbandRecord:
    level: int
    name: str
    var_y: float
    var_w: float
    threshold: float  # math.inf marks a pure-noise subband
    zeroed: int
    size: int

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "subband": self.name,
            "var_y": self.var_y,
            "var_w": self.var_w,
            "threshold": "infinite" if math.isinf(self.threshold) else self.threshold,
            "zeroed": self.zeroed,
            "size": self.size,
        }


@dataclass
class ShrinkReport:
    sigma_noise: float
    subbands: list[SubbandRecord] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"sigma_noise": self.sigma_noise, "subbands": [s.to_dict() for s in self.subbands]}


def estimate_noise_sigma(coeffs: WaveletCoeffs) -> float:
    """Robust noise std from the finest diagonal subband: ``median(|HH1|) / 0.6745``."""
    hh1 = coeffs.details[0][2]
    if hh1.size == 0:
        raise ValueError("HH1 subband is empty")
    return float(np.median(np.abs(hh1))) / MAD_CONSTANT


def compute_bayes_threshold(subband, sigma: float) -> float:
    """BayesShrink threshold ``sigma**2 / sigma_w``; ``math.inf`` when ``sigma_w == 0``."""
    y = np.asarray(subband, dtype=np.float64)
    if y.size == 0:
        raise ValueError("empty subband")
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    var_y = float(np.mean(y * y))
    sigma_w = math.sqrt(max(var_y - sigma * sigma, 0.0))
    if sigma_w == 0.0:
        return math.inf
    return sigma * sigma / sigma_w


def soft_threshold(subband, threshold: float) -> np.ndarray:
    y = np.asarray(subband, dtype=np.float64)
    if math.isinf(threshold):
        return np.zeros_like(y)
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    return np.sign(y) * np.maximum(np.abs(y) - threshold, 0.0)


def denoise_method_noise(mn, p: WaveletParams | None = None) -> tuple[np.ndarray, ShrinkReport]:
    """Recover the structured part of a residual image by BayesShrink.

    The single noise estimate from HH1 is used for every detail subband; the
    coarsest approximation band is kept as is.
    """
    p = p or WaveletParams()
    coeffs = dwt2(mn, p)
    sigma = estimate_noise_sigma(coeffs)
    report = ShrinkReport(sigma)
    details = []
    for k, bands in enumerate(coeffs.details):
        shrunk = []
        for name, y in zip(("LH", "HL", "HH"), bands):
            t = compute_bayes_threshold(y, sigma)
            var_y = float(np.mean(y * y))
            report.subbands.append(
                SubbandRecord(
                    level=k + 1,
                    name=name,
                    var_y=var_y,
                    var_w=max(var_y - sigma * sigma, 0.0),
                    threshold=t,
                    zeroed=int(np.count_nonzero(np.abs(y) <= t)),
                    size=int(y.size),
                )
            )
            shrunk.append(soft_threshold(y, t))
        details.append(tuple(shrunk))
    out = idwt2(WaveletCoeffs(coeffs.approx, details, coeffs.original_size, coeffs.basis))
    return out, report
