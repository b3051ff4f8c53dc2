"""Non-local means filtering.

Each pixel is replaced by a weighted average of the pixels in its search
window, weighted by ``exp(-d / h**2)`` where ``d`` is the Gaussian-weighted
squared distance between the two surrounding patches. The centre pixel keeps
its literal self-weight of 1 (``d = 0``). Patch reads use symmetric mirror
padding; search windows are cropped at the image border.

The filter itself runs in a compiled kernel when the extension is built and
falls back to a numpy implementation otherwise, see :func:`get_backend`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _nlmeans_py
from .imagecore import as_gray

try:
    from . import _nlmeans_ext
except ImportError:  # extension not built
    _nlmeans_ext = None

_KERNELS = {"python": _nlmeans_py.nlmeans_kernel}
if _nlmeans_ext is not None:
    _KERNELS["cython"] = _nlmeans_ext.nlmeans_kernel

_backend = "cython" if "cython" in _KERNELS else "python"


def available_backends() -> list[str]:
    return sorted(_KERNELS)


def get_backend() -> str:
    """Name of the kernel used by default: ``"cython"`` or ``"python"``."""
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in _KERNELS:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}")
    _backend = name


@dataclass(frozen=True)
class NlMeansParams:
    search_radius: int = 10
    patch_radius: int = 3
    h: float = 12.0
    kernel_sigma: float = 3.0

    def __post_init__(self):
        if self.patch_radius < 1:
            raise ValueError("patch_radius must be >= 1")
        if self.search_radius < self.patch_radius:
            raise ValueError("search_radius must be >= patch_radius")
        if not self.h > 0:
            raise ValueError("h must be > 0")
        if not self.kernel_sigma > 0:
            raise ValueError("kernel_sigma must be > 0")


def gaussian_kernel_1d(radius: int, sigma: float) -> np.ndarray:
    """Normalised 1-D Gaussian over ``-radius..radius``; its outer product sums to 1."""
    k = np.arange(-radius, radius + 1, dtype=np.float64)
    g = np.exp(-(k * k) / (2.0 * sigma * sigma))
    return g / g.sum()


def gaussian_kernel_2d(radius: int, sigma: float) -> np.ndarray:
    g = gaussian_kernel_1d(radius, sigma)
    return np.outer(g, g)


def _check_pixel(shape, i, name):
    r, c = i
    if not (0 <= r < shape[0] and 0 <= c < shape[1]):
        raise IndexError(f"pixel {name}={i} outside image of shape {shape}")


def patch_distance(img, i, j, p: NlMeansParams) -> float:
    """Gaussian-weighted squared distance between the patches centred at ``i`` and ``j``.

    ``i`` and ``j`` are ``(row, col)`` tuples.
    """
    arr = as_gray(img)
    _check_pixel(arr.shape, i, "i")
    _check_pixel(arr.shape, j, "j")
    rp = p.patch_radius
    pad = np.pad(arr, rp, mode="symmetric")
    n = 2 * rp + 1
    a = pad[i[0] : i[0] + n, i[1] : i[1] + n]
    b = pad[j[0] : j[0] + n, j[1] : j[1] + n]
    G = gaussian_kernel_2d(rp, p.kernel_sigma)
    return float(np.sum(G * (a - b) ** 2))


def search_window(shape, i, search_radius: int) -> tuple[slice, slice]:
    """Search window around ``i``, cropped to the image."""
    H, W = shape
    r, c = i
    return (
        slice(max(0, r - search_radius), min(H, r + search_radius + 1)),
        slice(max(0, c - search_radius), min(W, c + search_radius + 1)),
    )


def nl_weights(img, i, p: NlMeansParams) -> tuple[np.ndarray, tuple[slice, slice]]:
    """Normalised weights over the search window of pixel ``i``.

    Returns
    -------
    weights : ndarray
        ``weights[a, b]`` is ``w(i, j)`` for ``j = (rows.start + a, cols.start + b)``.
    window : (slice, slice)
        The cropped search window in image coordinates.
    """
    arr = as_gray(img)
    _check_pixel(arr.shape, i, "i")
    rows, cols = search_window(arr.shape, i, p.search_radius)
    rp = p.patch_radius
    n = 2 * rp + 1
    pad = np.pad(arr, rp, mode="symmetric")
    G = gaussian_kernel_2d(rp, p.kernel_sigma)
    ref = pad[i[0] : i[0] + n, i[1] : i[1] + n]
    w = np.empty((rows.stop - rows.start, cols.stop - cols.start))
    for a, r in enumerate(range(rows.start, rows.stop)):
        for b, c in enumerate(range(cols.start, cols.stop)):
            d = float(np.sum(G * (ref - pad[r : r + n, c : c + n]) ** 2))
            w[a, b] = np.exp(-d / (p.h * p.h))
    return w / w.sum(), (rows, cols)


def nl_means_filter(img, p: NlMeansParams | None = None, backend: str | None = None) -> np.ndarray:
    """NL-means filtered copy of ``img``."""
    p = p or NlMeansParams()
    arr = as_gray(img)
    n = 2 * p.patch_radius + 1
    if arr.shape[0] < n or arr.shape[1] < n:
        raise ValueError(f"image {arr.shape} smaller than one {n}x{n} patch")
    name = backend or _backend
    if name not in _KERNELS:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}")
    g = gaussian_kernel_1d(p.patch_radius, p.kernel_sigma)
    return _KERNELS[name](np.ascontiguousarray(arr), p.search_radius, p.patch_radius, float(p.h), g)
