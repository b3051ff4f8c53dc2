"""Pure numpy NL-means kernel, used when the compiled extension is missing.

Loops over search offsets and vectorises over pixels. The Gaussian patch
kernel is the outer product of a normalised 1-D kernel, so the weighted
patch distance is two 1-D passes over the squared-difference image. Patch
distance is symmetric, so each offset pair ``(o, -o)`` is evaluated once and
scattered to both pixels.
"""

import numpy as np


def half_offsets(rs):
    """Offsets ``(dy, dx)`` with ``dy > 0`` or ``dy == 0, dx > 0``."""
    for dy in range(0, rs + 1):
        for dx in range(-rs, rs + 1):
            if dy > 0 or dx > 0:
                yield dy, dx


def nlmeans_kernel(img, search_radius, patch_radius, h, kernel1d):
    img = np.ascontiguousarray(img, dtype=np.float64)
    g = np.asarray(kernel1d, dtype=np.float64)
    H, W = img.shape
    rs, rp = int(search_radius), int(patch_radius)
    npatch = 2 * rp + 1
    inv_h2 = 1.0 / (h * h)
    pad = np.pad(img, rp, mode="symmetric")

    # self-weight exp(0) = 1
    num = img.copy()
    den = np.ones((H, W))
    for dy, dx in half_offsets(rs):
        # pixels i with i + (dy, dx) inside the image
        y0, y1 = 0, H - dy
        x0, x1 = max(0, -dx), min(W, W - dx)
        if y0 >= y1 or x0 >= x1:
            continue
        ny, nx = y1 - y0, x1 - x0
        a = pad[y0 : y1 + 2 * rp, x0 : x1 + 2 * rp]
        b = pad[y0 + dy : y1 + dy + 2 * rp, x0 + dx : x1 + dx + 2 * rp]
        d = a - b
        d *= d
        rows = g[0] * d[:, 0:nx]
        for k in range(1, npatch):
            rows += g[k] * d[:, k : k + nx]
        dist = g[0] * rows[0:ny, :]
        for k in range(1, npatch):
            dist += g[k] * rows[k : k + ny, :]
        w = np.exp(-dist * inv_h2)
        num[y0:y1, x0:x1] += w * img[y0 + dy : y1 + dy, x0 + dx : x1 + dx]
        den[y0:y1, x0:x1] += w
        num[y0 + dy : y1 + dy, x0 + dx : x1 + dx] += w * img[y0:y1, x0:x1]
        den[y0 + dy : y1 + dy, x0 + dx : x1 + dx] += w
    return num / den
