"""Completed local binary patterns (sign, magnitude and centre components).

Neighbour ``p`` of a centre at ``(x, y)`` sits at
``(x + R cos(2 pi p / P), y - R sin(2 pi p / P))``: ``g_0`` is due right and
the order is counterclockwise on screen. Off-lattice neighbours are bilinearly
interpolated. Only interior pixels (at least ``ceil(R)`` from every border)
are coded.

Codes use the ``>=`` comparisons literally: zero differences count as
positive signs, and ties with the magnitude or gray-level thresholds set the
bit. On whole images, comparisons are made with a tolerance of ``1e-9`` times
the image's gray range (plus ``1e-12`` of its peak magnitude), so that values
equal up to floating-point rounding (e.g. after ``a * img + b``) code
identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .imagecore import as_gray

TIE_RTOL = 1e-9


@dataclass(frozen=True)
class ClbpParams:
    neighbors: int = 8
    radius: float = 1.0
    mapping: str = "riu2"

    def __post_init__(self):
        if self.neighbors < 4:
            raise ValueError("neighbors must be >= 4")
        if self.neighbors > 62:
            raise ValueError("neighbors must be <= 62")
        if self.radius < 1:
            raise ValueError("radius must be >= 1")
        if self.mapping != "riu2":
            raise ValueError(f"unsupported mapping {self.mapping!r}; only 'riu2'")

    @property
    def n_patterns(self) -> int:
        return self.neighbors + 2

    @property
    def clbp_dim(self) -> int:
        return self.n_patterns * self.n_patterns * 2

    @property
    def border(self) -> int:
        return int(math.ceil(self.radius))


@dataclass(frozen=True)
class GlobalThresholds:
    c: float
    c_i: float


@dataclass
class ClbpFeature:
    histogram: np.ndarray
    params: ClbpParams

    def joint(self) -> np.ndarray:
        """Histogram as a ``(P+2, P+2, 2)`` array indexed ``[s, m, c]``."""
        n = self.params.n_patterns
        return self.histogram.reshape(n, n, 2)


def _offsets(p: ClbpParams) -> list[tuple[float, float]]:
    """(dx, dy) image-coordinate offsets, snapped to the lattice when within 1e-10."""
    out = []
    for k in range(p.neighbors):
        a = 2.0 * math.pi * k / p.neighbors
        dx = p.radius * math.cos(a)
        dy = -p.radius * math.sin(a)
        rx, ry = round(dx), round(dy)
        out.append((float(rx) if abs(dx - rx) < 1e-10 else dx, float(ry) if abs(dy - ry) < 1e-10 else dy))
    return out


def _neighbor_differences(img: np.ndarray, p: ClbpParams) -> np.ndarray:
    """``d[k] = g_k - g_c`` for every interior centre, shape ``(P, h, w)``.

    Interpolated neighbours are formed directly as weighted differences to the
    centre, so a flat neighbourhood gives exactly 0.
    """
    b = p.border
    H, W = img.shape
    h, w = H - 2 * b, W - 2 * b
    centre = img[b : b + h, b : b + w]

    def shifted(oy, ox):
        return img[b + oy : b + oy + h, b + ox : b + ox + w] - centre

    d = np.empty((p.neighbors, h, w))
    for k, (dx, dy) in enumerate(_offsets(p)):
        if dx.is_integer() and dy.is_integer():
            d[k] = shifted(int(dy), int(dx))
            continue
        x0, y0 = math.floor(dx), math.floor(dy)
        tx, ty = dx - x0, dy - y0
        w00 = (1 - tx) * (1 - ty)
        w01 = tx * (1 - ty)
        w10 = (1 - tx) * ty
        w11 = tx * ty
        d[k] = (
            w00 * shifted(y0, x0)
            + w01 * shifted(y0, x0 + 1)
            + w10 * shifted(y0 + 1, x0)
            + w11 * shifted(y0 + 1, x0 + 1)
        )
    return d


def _check_interior(img: np.ndarray, p: ClbpParams) -> None:
    b = p.border
    if img.shape[0] <= 2 * b or img.shape[1] <= 2 * b:
        raise ValueError(f"image {img.shape} has no interior pixels for radius {p.radius}")


def sample_neighbors(img, x: int, y: int, p: ClbpParams | None = None) -> np.ndarray:
    """Gray values ``g_0 .. g_{P-1}`` around column ``x``, row ``y``."""
    p = p or ClbpParams()
    arr = as_gray(img)
    b = p.border
    if not (b <= x < arr.shape[1] - b and b <= y < arr.shape[0] - b):
        raise ValueError(f"({x}, {y}) is not an interior pixel for radius {p.radius}")
    patch = arr[y - b : y + b + 1, x - b : x + b + 1]
    return patch[b, b] + _neighbor_differences(patch, p)[:, 0, 0]


def _tolerance(img: np.ndarray) -> float:
    # second term absorbs rounding in the mean of a (near) constant image
    return TIE_RTOL * float(img.max() - img.min()) + 1e-12 * float(np.abs(img).max())


def compute_global_thresholds(img, p: ClbpParams | None = None) -> GlobalThresholds:
    """Mean neighbour-difference magnitude over the interior, and mean gray level."""
    p = p or ClbpParams()
    arr = as_gray(img)
    _check_interior(arr, p)
    d = _neighbor_differences(arr, p)
    return GlobalThresholds(c=float(np.mean(np.abs(d))), c_i=float(np.mean(arr)))


def clbp_codes(center: float, neighbors, thr: GlobalThresholds, tol: float = 0.0) -> tuple[int, int, int]:
    """Sign code, magnitude code and centre bit of one neighbourhood."""
    d = np.asarray(neighbors, dtype=np.float64) - center
    weights = 1 << np.arange(d.size, dtype=np.int64)
    s_code = int(np.sum(weights[d >= -tol]))
    m_code = int(np.sum(weights[np.abs(d) >= thr.c - tol]))
    c_bit = int(center >= thr.c_i - tol)
    return s_code, m_code, c_bit


def _popcount(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64)
    count = np.zeros(x.shape, dtype=np.int64)
    while np.any(x):
        count += (x & np.uint64(1)).astype(np.int64)
        x = x >> np.uint64(1)
    return count


def riu2_map(code, P: int):
    """Rotation-invariant uniform label: popcount if <= 2 circular transitions, else ``P + 1``.

    Works elementwise on integer arrays as well as on a single int.
    """
    arr = np.asarray(code, dtype=np.int64)
    if np.any(arr < 0) or np.any(arr >= (1 << P)):
        raise ValueError(f"code out of range for P={P}")
    mask = (1 << P) - 1
    rot = ((arr << 1) | (arr >> (P - 1))) & mask
    transitions = _popcount(arr ^ rot)
    out = np.where(transitions <= 2, _popcount(arr), P + 1)
    return int(out) if out.ndim == 0 else out


def code_maps(img, p: ClbpParams | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-interior-pixel ``(riu2(s), riu2(m), c)`` label maps."""
    p = p or ClbpParams()
    arr = as_gray(img)
    _check_interior(arr, p)
    d = _neighbor_differences(arr, p)
    tol = _tolerance(arr)
    c = float(np.mean(np.abs(d)))
    c_i = float(np.mean(arr))
    b = p.border
    centre = arr[b : arr.shape[0] - b, b : arr.shape[1] - b]
    weights = (1 << np.arange(p.neighbors, dtype=np.int64))[:, None, None]
    s_code = np.sum(np.where(d >= -tol, weights, 0), axis=0)
    m_code = np.sum(np.where(np.abs(d) >= c - tol, weights, 0), axis=0)
    c_bit = (centre >= c_i - tol).astype(np.int64)
    return riu2_map(s_code, p.neighbors), riu2_map(m_code, p.neighbors), c_bit


def joint_bin_index(s_label, m_label, c_bit, P: int):
    n = P + 2
    return s_label * n * 2 + m_label * 2 + c_bit


def extract_clbp_histogram(img, p: ClbpParams | None = None) -> ClbpFeature:
    """L1-normalised joint S/M/C histogram of length ``(P+2)**2 * 2``."""
    p = p or ClbpParams()
    s, m, c = code_maps(img, p)
    idx = joint_bin_index(s, m, c, p.neighbors)
    hist = np.bincount(idx.ravel(), minlength=p.clbp_dim).astype(np.float64)
    return ClbpFeature(hist / hist.sum(), p)


def extract_lbp_histogram(img, p: ClbpParams | None = None) -> np.ndarray:
    """L1-normalised riu2 histogram of the sign codes alone (classic LBP)."""
    p = p or ClbpParams()
    s, _, _ = code_maps(img, p)
    hist = np.bincount(s.ravel(), minlength=p.n_patterns).astype(np.float64)
    return hist / hist.sum()


def extract_features(img, feature_mode: str, p: ClbpParams | None = None) -> np.ndarray:
    if feature_mode == "clbp":
        return extract_clbp_histogram(img, p).histogram
    if feature_mode == "lbp":
        return extract_lbp_histogram(img, p)
    raise ValueError(f"unknown feature mode {feature_mode!r}; expected 'lbp' or 'clbp'")
