"""Exact Euclidean distance transform, marker extraction and
marker-based watershed.

The distance transform uses the two-pass lower-envelope method: a
column sweep producing per-column distances, then a per-row parabola
envelope.  All intermediate values are integers held in float64, so the
result is exact, not approximate.

The watershed is a priority flood over altitude ``-d``: deepest basins
flood first; ties are broken by heap insertion order, which makes the
labeling fully deterministic.  Ridge pixels where two basins meet are
labeled -1.
"""

from __future__ import annotations

import heapq

import numpy as np

from ._accel import NUMBA_ENABLED, njit
from .errors import EmptyMarkersError, NoBackgroundError
from .morphology import StructuringElement, dilate
from .raster import as_mask

# Marker maps use -2 for pixels the flood has not claimed yet; final label
# maps only carry {-1, 0, 1..M}.
UNLABELED = -2


def _column_distances(mask: np.ndarray) -> np.ndarray:
    """Per-column distance (in rows) to the nearest background pixel of
    the same column; columns without background get a sentinel larger
    than any true distance."""
    h, w = mask.shape
    sentinel = float(h + w + 1)
    g = np.where(mask[0], sentinel, 0.0)[np.newaxis, :].repeat(h, axis=0)
    for y in range(1, h):
        g[y] = np.where(mask[y], np.minimum(sentinel, g[y - 1] + 1.0), 0.0)
    for y in range(h - 2, -1, -1):
        g[y] = np.minimum(g[y], g[y + 1] + 1.0)
    return g


def _envelope_rows_kernel(f, d2):
    """Lower envelope of parabolas per row: d2[y,x] = min_k (x-k)^2 + f[y,k]."""
    h, w = f.shape
    v = np.empty(w, dtype=np.int64)
    z = np.empty(w + 1, dtype=np.float64)
    big = 1e30
    for y in range(h):
        k = 0
        v[0] = 0
        z[0] = -big
        z[1] = big
        for q in range(1, w):
            fq = f[y, q] + q * q
            s = (fq - (f[y, v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k])
            while s <= z[k]:
                k -= 1
                s = (fq - (f[y, v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k])
            k += 1
            v[k] = q
            z[k] = s
            z[k + 1] = big
        k = 0
        for q in range(w):
            while z[k + 1] < q:
                k += 1
            d2[y, q] = (q - v[k]) * (q - v[k]) + f[y, v[k]]


_envelope_rows_jit = njit(_envelope_rows_kernel)


def _envelope_rows_numpy(f: np.ndarray) -> np.ndarray:
    """Vectorized quadratic-time envelope used on the no-numba path."""
    h, w = f.shape
    xs = np.arange(w, dtype=np.float64)
    sq = (xs[np.newaxis, :] - xs[:, np.newaxis]) ** 2  # sq[k, x] = (x-k)^2
    d2 = np.empty_like(f)
    chunk = max(1, int(4_000_000 // (w * w)) or 1)
    for y0 in range(0, h, chunk):
        block = f[y0 : y0 + chunk]  # (c, w)
        d2[y0 : y0 + chunk] = (block[:, :, np.newaxis] + sq[np.newaxis]).min(axis=1)
    return d2


def distance_transform(mask: np.ndarray) -> np.ndarray:
    """Exact Euclidean distance from each foreground pixel to the nearest
    background pixel; zero on background."""
    mask = as_mask(mask)
    if mask.all():
        raise NoBackgroundError("mask has no background pixel")
    g = _column_distances(mask)
    f = g * g
    if NUMBA_ENABLED:
        d2 = np.empty_like(f)
        _envelope_rows_jit(f, d2)
    else:
        d2 = _envelope_rows_numpy(f)
    return np.sqrt(d2)


def _label_components_kernel(mask, labels, stack):
    h, w = mask.shape
    nxt = 0
    for sy in range(h):
        for sx in range(w):
            if not mask[sy, sx] or labels[sy, sx] != 0:
                continue
            nxt += 1
            top = 0
            stack[top] = sy * w + sx
            labels[sy, sx] = nxt
            while top >= 0:
                p = stack[top]
                top -= 1
                y = p // w
                x = p % w
                if y > 0 and mask[y - 1, x] and labels[y - 1, x] == 0:
                    labels[y - 1, x] = nxt
                    top += 1
                    stack[top] = p - w
                if y < h - 1 and mask[y + 1, x] and labels[y + 1, x] == 0:
                    labels[y + 1, x] = nxt
                    top += 1
                    stack[top] = p + w
                if x > 0 and mask[y, x - 1] and labels[y, x - 1] == 0:
                    labels[y, x - 1] = nxt
                    top += 1
                    stack[top] = p - 1
                if x < w - 1 and mask[y, x + 1] and labels[y, x + 1] == 0:
                    labels[y, x + 1] = nxt
                    top += 1
                    stack[top] = p + 1
    return nxt


_label_components_jit = njit(_label_components_kernel)


def label_components(mask: np.ndarray) -> tuple[np.ndarray, int]:
    """4-connected component labeling, labels 1..M in row-major scan order
    of each component's first pixel.  Background stays 0."""
    mask = as_mask(mask)
    labels = np.zeros(mask.shape, dtype=np.int32)
    stack = np.empty(mask.size, dtype=np.int64)
    if NUMBA_ENABLED:
        n = int(_label_components_jit(mask, labels, stack))
    else:
        n = int(_label_components_kernel(mask, labels, stack))
    return labels, n


def extract_markers(field: np.ndarray, binary: np.ndarray, tau: float) -> np.ndarray:
    """Seed map for the watershed flood.

    Foreground markers are the 4-connected components of
    ``field > tau * field.max()`` labeled 1..M; the background marker (0)
    is everything outside a 2-pixel dilation of the binary map; the rest
    is left unclaimed (UNLABELED).
    """
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    binary = as_mask(binary)
    peak = float(field.max()) if field.size else 0.0
    if peak <= 0.0:
        raise EmptyMarkersError("distance field is empty, no markers")
    fg = field > tau * peak
    fg_labels, _ = label_components(fg)
    markers = np.full(field.shape, UNLABELED, dtype=np.int32)
    markers[~dilate(binary, StructuringElement("square", 2))] = 0
    markers[fg] = fg_labels[fg]
    return markers


_NEIGH = ((-1, 0), (1, 0), (0, -1), (0, 1))


def _flood_python(field: np.ndarray, labels: np.ndarray) -> None:
    h, w = labels.shape
    heap: list[tuple[float, int, int, int, int]] = []
    order = 0
    for y in range(h):
        for x in range(w):
            lab = labels[y, x]
            if lab < 0:
                continue
            for dy, dx in _NEIGH:
                ny, nx = y + dy, x + dx
                if 0 <= ny < h and 0 <= nx < w and labels[ny, nx] == UNLABELED:
                    heapq.heappush(heap, (-field[ny, nx], order, ny, nx, lab))
                    order += 1
    while heap:
        _, _, y, x, lab = heapq.heappop(heap)
        if labels[y, x] != UNLABELED:
            continue
        first = -1
        ridge = False
        for dy, dx in _NEIGH:
            ny, nx = y + dy, x + dx
            if 0 <= ny < h and 0 <= nx < w:
                nl = labels[ny, nx]
                if nl >= 0:
                    if first == -1:
                        first = nl
                    elif nl != first:
                        ridge = True
        if ridge:
            labels[y, x] = -1
            continue
        labels[y, x] = lab
        for dy, dx in _NEIGH:
            ny, nx = y + dy, x + dx
            if 0 <= ny < h and 0 <= nx < w and labels[ny, nx] == UNLABELED:
                heapq.heappush(heap, (-field[ny, nx], order, ny, nx, lab))
                order += 1


def _heap_swap(halt, hord, hpix, hlab, i, j):
    halt[i], halt[j] = halt[j], halt[i]
    hord[i], hord[j] = hord[j], hord[i]
    hpix[i], hpix[j] = hpix[j], hpix[i]
    hlab[i], hlab[j] = hlab[j], hlab[i]


def _heap_push(halt, hord, hpix, hlab, size, alt, o, p, lb):
    i = size
    halt[i] = alt
    hord[i] = o
    hpix[i] = p
    hlab[i] = lb
    while i > 0:
        parent = (i - 1) // 2
        if halt[i] < halt[parent] or (halt[i] == halt[parent] and hord[i] < hord[parent]):
            _heap_swap(halt, hord, hpix, hlab, i, parent)
            i = parent
        else:
            break
    return size + 1


def _heap_pop(halt, hord, hpix, hlab, size):
    """Move the minimum to index size-1 and restore the heap on the rest;
    returns the shrunk size (popped entry sits at the returned index)."""
    size -= 1
    _heap_swap(halt, hord, hpix, hlab, 0, size)
    i = 0
    while True:
        left = 2 * i + 1
        right = left + 1
        m = i
        if left < size and (
            halt[left] < halt[m] or (halt[left] == halt[m] and hord[left] < hord[m])
        ):
            m = left
        if right < size and (
            halt[right] < halt[m] or (halt[right] == halt[m] and hord[right] < hord[m])
        ):
            m = right
        if m == i:
            break
        _heap_swap(halt, hord, hpix, hlab, i, m)
        i = m
    return size


def _flood_kernel(field, labels):
    h, w = labels.shape
    cap = 4 * h * w + 4
    halt = np.empty(cap, dtype=np.float64)
    hord = np.empty(cap, dtype=np.int64)
    hpix = np.empty(cap, dtype=np.int64)
    hlab = np.empty(cap, dtype=np.int32)
    size = 0
    order = 0

    for y in range(h):
        for x in range(w):
            lab = labels[y, x]
            if lab < 0:
                continue
            for d in range(4):
                ny = y + (-1 if d == 0 else (1 if d == 1 else 0))
                nx = x + (-1 if d == 2 else (1 if d == 3 else 0))
                if 0 <= ny < h and 0 <= nx < w and labels[ny, nx] == UNLABELED:
                    size = _heap_push(
                        halt, hord, hpix, hlab, size, -field[ny, nx], order, ny * w + nx, lab
                    )
                    order += 1

    while size > 0:
        size = _heap_pop(halt, hord, hpix, hlab, size)
        p = hpix[size]
        lab = hlab[size]
        y = p // w
        x = p % w
        if labels[y, x] != UNLABELED:
            continue
        first = -1
        ridge = False
        for d in range(4):
            ny = y + (-1 if d == 0 else (1 if d == 1 else 0))
            nx = x + (-1 if d == 2 else (1 if d == 3 else 0))
            if 0 <= ny < h and 0 <= nx < w:
                nl = labels[ny, nx]
                if nl >= 0:
                    if first == -1:
                        first = nl
                    elif nl != first:
                        ridge = True
        if ridge:
            labels[y, x] = -1
            continue
        labels[y, x] = lab
        for d in range(4):
            ny = y + (-1 if d == 0 else (1 if d == 1 else 0))
            nx = x + (-1 if d == 2 else (1 if d == 3 else 0))
            if 0 <= ny < h and 0 <= nx < w and labels[ny, nx] == UNLABELED:
                size = _heap_push(
                    halt, hord, hpix, hlab, size, -field[ny, nx], order, ny * w + nx, lab
                )
                order += 1


if NUMBA_ENABLED:
    _heap_swap = njit(_heap_swap)
    _heap_push = njit(_heap_push)
    _heap_pop = njit(_heap_pop)
_flood_jit = njit(_flood_kernel)


def watershed(field: np.ndarray, markers: np.ndarray) -> np.ndarray:
    """Priority flood of the marker map over altitude ``-field``.

    Each unclaimed pixel takes the label of the first basin to reach it;
    pixels where two different basins meet become -1.  Unclaimed pockets
    fully enclosed by ridges (rare) also resolve to -1 so the output only
    carries {-1, 0, 1..M}.
    """
    field = np.ascontiguousarray(field, dtype=np.float64)
    labels = np.ascontiguousarray(markers, dtype=np.int32).copy()
    if field.shape != labels.shape:
        raise ValueError("field and marker shapes differ")
    if NUMBA_ENABLED:
        _flood_jit(field, labels)
    else:
        _flood_python(field, labels)
    labels[labels == UNLABELED] = -1
    return labels
