"""Grayscale rasters, 8-bit file I/O, SNR-calibrated noise and synthetic textures.

Images are plain 2-D ``float64`` numpy arrays indexed ``[row, col]``. Nothing
in the float pipeline clamps; values are only clamped and rounded when written
to an 8-bit file.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

TEXTURE_KINDS = ("checker", "stripes", "sinusoid", "blobs", "grating", "speckle")

_MASK64 = (1 << 64) - 1

# per-instance variation of the synthetic corpus
PERIOD_RANGE = (4, 12)
CONTRAST_RANGE = (0.2, 0.6)
MEAN_RANGE = (96.0, 160.0)
GRAIN_RANGE = (0.5, 1.5)


class ImageFormatError(ValueError):
    """Raised for files that are not 8-bit grayscale PGM or PNG."""


@dataclass(frozen=True)
class NoiseSpec:
    """Target SNR in decibels and the seed for the Gaussian stream.

    ``snr_db = math.inf`` means no noise.
    """

    snr_db: float
    seed: int = 0

    def __post_init__(self):
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ValueError(f"snr_db must be finite or +inf, got {self.snr_db}")


def as_gray(img) -> np.ndarray:
    """Validate and convert ``img`` to a 2-D float64 array (copy-free when possible)."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D grayscale image, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("image has a zero dimension")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains NaN or Inf")
    return arr


# --------------------------------------------------------------------------
# File I/O
# --------------------------------------------------------------------------


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        if data[pos : pos + 1].isspace():
            pos += 1
        elif data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise ImageFormatError("truncated PGM header")
    return data[start:pos], pos


def _load_pgm(data: bytes) -> np.ndarray:
    pos = 2
    fields = []
    for _ in range(3):
        tok, pos = _read_token(data, pos)
        try:
            fields.append(int(tok))
        except ValueError:
            raise ImageFormatError(f"bad PGM header field {tok!r}") from None
    width, height, maxval = fields
    if width == 0 or height == 0:
        raise ImageFormatError("image has a zero dimension")
    if maxval > 255:
        raise ImageFormatError("unsupported bit depth (16-bit PGM)")
    # exactly one whitespace byte separates the header from the raster
    pos += 1
    raster = data[pos : pos + width * height]
    if len(raster) != width * height:
        raise ImageFormatError("truncated PGM raster")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).astype(np.float64)


def _load_png(path: Path) -> np.ndarray:
    with Image.open(path) as im:
        if im.format != "PNG":
            raise ImageFormatError(f"{path}: not a PNG file")
        if im.mode != "L":
            if im.mode in ("I;16", "I;16B", "I;16L", "I"):
                raise ImageFormatError(f"{path}: unsupported bit depth (16-bit PNG)")
            raise ImageFormatError(f"{path}: unsupported PNG mode {im.mode!r}, need 8-bit grayscale")
        arr = np.array(im, dtype=np.float64)
    if arr.size == 0:
        raise ImageFormatError(f"{path}: image has a zero dimension")
    return arr


def load_image(path) -> np.ndarray:
    """Read an 8-bit grayscale binary PGM (P5) or PNG into a float64 array."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from exc
    if data[:2] == b"P5":
        try:
            return _load_pgm(data)
        except ImageFormatError as exc:
            raise ImageFormatError(f"{path}: {exc}") from None
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        return _load_png(path)
    raise ImageFormatError(f"{path}: unsupported format (need binary P5 PGM or PNG)")


def to_uint8(img) -> np.ndarray:
    """Clamp to [0, 255] and round half away from zero."""
    arr = np.asarray(img, dtype=np.float64)
    # after clamping all values are >= 0, so floor(x + 0.5) is half-away-from-zero
    return np.floor(np.clip(arr, 0.0, 255.0) + 0.5).astype(np.uint8)


def save_image(img, path) -> None:
    """Write ``img`` as 8-bit PGM (``.pgm``) or PNG (``.png``), chosen by extension."""
    path = Path(path)
    data = to_uint8(as_gray(img))
    suffix = path.suffix.lower()
    try:
        if suffix == ".pgm":
            h, w = data.shape
            with open(path, "wb") as fh:
                fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
                fh.write(data.tobytes())
        elif suffix == ".png":
            Image.fromarray(data, mode="L").save(path, format="PNG")
        else:
            raise ImageFormatError(f"{path}: unsupported extension {suffix!r}, use .pgm or .png")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


# --------------------------------------------------------------------------
# Noise
# --------------------------------------------------------------------------


def derive_seed(master: int, index: int, stream: int = 0) -> int:
    """Per-item 64-bit seed: ``master XOR index``, then mixed with a stream tag.

    The stream tag separates independent sweeps (e.g. one per SNR level) so
    the seed of one item never depends on which other items are scheduled.
    """
    x = ((master ^ index) + 0x9E3779B97F4A7C15 * (stream + 1)) & _MASK64
    # splitmix64 finalizer
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def gaussian_samples(n: int, seed: int) -> np.ndarray:
    """``n`` standard normal samples via Box-Muller over a PCG64 stream.

    Uniforms come from ``numpy.random.PCG64(seed)`` and are consumed in pairs
    ``(u1, u2)``; each pair yields ``r*cos(t)`` then ``r*sin(t)``.
    """
    pairs = (n + 1) // 2
    rng = np.random.Generator(np.random.PCG64(seed & _MASK64))
    u = rng.random(2 * pairs)
    u1 = 1.0 - u[0::2]  # (0, 1], keeps log finite
    u2 = u[1::2]
    r = np.sqrt(-2.0 * np.log(u1))
    t = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(t)
    out[1::2] = r * np.sin(t)
    return out[:n]


def signal_power(img) -> float:
    arr = as_gray(img)
    return float(np.mean(arr * arr))


def inject_gaussian_noise(img, spec: NoiseSpec) -> np.ndarray:
    """Add i.i.d. zero-mean Gaussian noise scaled to hit ``spec.snr_db``.

    Noise variance is ``mean(img**2) / 10**(snr_db / 10)``. The result is not
    clamped and is a pure function of ``(img, spec)``.
    """
    arr = as_gray(img)
    if spec.snr_db == math.inf:
        return arr.copy()
    ps = signal_power(arr)
    if ps == 0.0:
        raise ValueError("zero signal power")
    sigma = math.sqrt(ps / 10.0 ** (spec.snr_db / 10.0))
    noise = gaussian_samples(arr.size, spec.seed).reshape(arr.shape)
    return arr + sigma * noise


def measure_snr(clean, noisy) -> float:
    """SNR in dB of ``noisy`` against ``clean``."""
    c = as_gray(clean)
    v = as_gray(noisy)
    if c.shape != v.shape:
        raise ValueError(f"dimension mismatch: {c.shape} vs {v.shape}")
    ps = float(np.sum(c * c))
    if ps == 0.0:
        raise ValueError("zero signal power")
    diff = v - c
    pn = float(np.sum(diff * diff))
    if pn == 0.0:
        raise ValueError("zero noise power")
    return 10.0 * math.log10(ps / pn)


def rmse(a, b) -> float:
    a = as_gray(a)
    b = as_gray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.mean((a - b) ** 2)))


# --------------------------------------------------------------------------
# Synthetic textures
# --------------------------------------------------------------------------


def _kind_tag(kind: str) -> int:
    return zlib.crc32(kind.encode("ascii"))


def synth_texture(kind: str, size: int = 64, period: int = 8, seed: int = 0) -> np.ndarray:
    """Deterministic ``size x size`` texture with values in [0, 255].

    ``checker`` and ``stripes`` are binary 0/255 patterns with block width
    ``period``; ``sinusoid`` is a 2-D product of cosines, ``grating`` an
    oriented 1-D cosine, ``blobs`` smoothed random cells and ``speckle``
    fine-grained random noise. The seed drives phases, orientation and the
    random fields; ``checker`` and ``stripes`` ignore it.
    """
    if kind not in TEXTURE_KINDS:
        raise ValueError(f"unknown texture kind {kind!r}; expected one of {TEXTURE_KINDS}")
    if size < 4:
        raise ValueError(f"size must be >= 4, got {size}")
    if period < 2:
        raise ValueError(f"period must be >= 2, got {period}")

    rng = np.random.Generator(np.random.PCG64((seed ^ _kind_tag(kind)) & _MASK64))
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)

    if kind == "checker":
        cells = (np.arange(size) // period) % 2
        img = 255.0 * (cells[:, None] ^ cells[None, :])
    elif kind == "stripes":
        cells = (np.arange(size) // period) % 2
        img = np.broadcast_to(255.0 * cells[None, :], (size, size)).copy()
    elif kind == "sinusoid":
        px, py = rng.uniform(0, 2 * np.pi, size=2)
        w = 2 * np.pi / period
        img = 127.5 + 127.5 * np.cos(w * xx + px) * np.cos(w * yy + py)
    elif kind == "grating":
        theta = rng.uniform(0, np.pi)
        phase = rng.uniform(0, 2 * np.pi)
        w = 2 * np.pi / period
        img = 127.5 + 127.5 * np.cos(w * (xx * np.cos(theta) + yy * np.sin(theta)) + phase)
    elif kind == "blobs":
        n = max(2, -(-size // period))
        cells = rng.random((n + 2, n + 2))
        # bilinear upsampling of a coarse random grid gives smooth blobs
        src = (np.arange(size) + 0.5) / period + 0.5
        i0 = np.floor(src).astype(int)
        f = src - i0
        rows = cells[i0] * (1 - f)[:, None] + cells[i0 + 1] * f[:, None]
        img = rows[:, i0] * (1 - f)[None, :] + rows[:, i0 + 1] * f[None, :]
        lo, hi = img.min(), img.max()
        img = 255.0 * (img - lo) / (hi - lo) if hi > lo else np.full_like(img, 127.5)
    else:  # speckle
        img = rng.random((size, size)) * 255.0
    return np.ascontiguousarray(img, dtype=np.float64)


def synth_instance(kind: str, index: int, size: int = 64, seed: int = 0) -> np.ndarray:
    """One corpus sample of ``kind``.

    The base texture gets a random period and cyclic shift, is rescaled to a
    random contrast around a random mean gray level, and carries fine Gaussian
    grain of random strength, so clean samples are never exactly flat.
    """
    rng = np.random.Generator(np.random.PCG64(derive_seed(seed, index, _kind_tag(kind))))
    period = int(rng.integers(PERIOD_RANGE[0], PERIOD_RANGE[1] + 1))
    img = synth_texture(kind, size, period, int(rng.integers(0, 2**63)))
    img = np.roll(img, (int(rng.integers(0, 2 * period)), int(rng.integers(0, 2 * period))), axis=(0, 1))
    contrast = rng.uniform(CONTRAST_RANGE[0], CONTRAST_RANGE[1])
    mean = rng.uniform(MEAN_RANGE[0], MEAN_RANGE[1])
    grain = rng.uniform(GRAIN_RANGE[0], GRAIN_RANGE[1])
    return mean + contrast * (img - 127.5) + grain * rng.standard_normal((size, size))


def synth_corpus(n_per_class: int = 300, size: int = 64, seed: int = 0, kinds=TEXTURE_KINDS):
    """``(images, labels)`` with ``n_per_class`` samples of each kind, class-major order."""
    images, labels = [], []
    for kind in kinds:
        for i in range(n_per_class):
            images.append(synth_instance(kind, i, size, seed))
            labels.append(kind)
    return images, labels
