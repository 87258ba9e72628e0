"""Pixel-feature image segmentation."""

from __future__ import annotations

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import ConfigError, DataError
from .knn import normalize_minmax
from .pipeline import TangoResult, tango

MAX_PIXELS = 1_000_000

# distinct colours for up to 20 segments, then a seeded random tail
_BASE_PALETTE = [
    (230, 25, 75), (60, 180, 75), (255, 225, 25), (0, 130, 200), (245, 130, 48),
    (145, 30, 180), (70, 240, 240), (240, 50, 230), (210, 245, 60), (250, 190, 212),
    (0, 128, 128), (220, 190, 255), (170, 110, 40), (255, 250, 200), (128, 0, 0),
    (170, 255, 195), (128, 128, 0), (255, 215, 180), (0, 0, 128), (128, 128, 128),
]


def load_rgb(path, max_pixels=MAX_PIXELS) -> np.ndarray:
    try:
        with Image.open(path) as im:
            if im.width * im.height > max_pixels:
                raise DataError(
                    f"{path}: {im.width}x{im.height} exceeds the {max_pixels}-pixel limit"
                )
            return np.asarray(im.convert("RGB"), dtype=np.uint8)
    except (OSError, UnidentifiedImageError) as exc:
        raise DataError(f"cannot read image {path}: {exc}") from None


def pixel_features(rgb) -> np.ndarray:
    """(row, col, R, G, B) per pixel in row-major order, raw units."""
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise DataError(f"expected an H x W x 3 image, got shape {rgb.shape}")
    h, w, _ = rgb.shape
    rows, cols = np.mgrid[0:h, 0:w]
    return np.column_stack([rows.ravel(), cols.ravel(), rgb.reshape(-1, 3)]).astype(np.float64)


def palette(n_colors: int) -> list[int]:
    colors = list(_BASE_PALETTE[:n_colors])
    if n_colors > len(colors):
        rng = np.random.default_rng(0)
        colors += [tuple(int(v) for v in c) for c in rng.integers(0, 256, (n_colors - len(colors), 3))]
    flat = [v for c in colors for v in c]
    return flat + [0] * (768 - len(flat))


def label_image(labels, height, width) -> Image.Image:
    labels = np.asarray(labels)
    if labels.max() >= 256:
        raise ConfigError("palette images hold at most 256 segments")
    im = Image.fromarray(labels.reshape(height, width).astype(np.uint8), mode="P")
    im.putpalette(palette(int(labels.max()) + 1))
    return im


def segment_rgb(rgb, k=50, clusters=5, seed=0, workers=None) -> TangoResult:
    x = normalize_minmax(pixel_features(rgb))
    return tango(x, k, clusters, seed, workers)


def segment_image(path, k=50, clusters=5, seed=0, out=None, workers=None):
    """Segment an image file; returns ``(label_map, result)``.

    ``label_map`` is an H x W integer array. When ``out`` is given an
    indexed-palette image is written there.
    """
    rgb = load_rgb(path)
    result = segment_rgb(rgb, k, clusters, seed, workers)
    h, w, _ = rgb.shape
    if out:
        label_image(result.labels, h, w).save(out)
    return result.labels.reshape(h, w), result
