"""Pixel-lattice energy construction and exact max-flow/min-cut labeling.

The solver is the two-tree growth/augment/adopt max-flow algorithm on a
flat arc representation (arc ``a`` and ``a ^ 1`` are opposite directions),
with terminal capacities folded into a per-node residual.  The same code
runs numba-jitted or as plain Python depending on the acceleration flag.

Cut-side ties are pinned: the foreground is exactly the set of nodes
reachable from the source in the final residual graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gmm
from ._accel import NUMBA_ENABLED, njit
from .raster import as_image, to_unit

HARD = 1e9

TRIMAP_FREE = 0
TRIMAP_FG = 1
TRIMAP_BG = 2

_TREE_FREE = 0
_TREE_S = 1
_TREE_T = 2

_P_NONE = -1
_P_TERM = -2
_P_ORPH = -3


def _build_adjacency(arc_from, first, nxt):
    # Push-front in reverse arc order so lists iterate in arc-id order.
    for a in range(arc_from.shape[0] - 1, -1, -1):
        v = arc_from[a]
        nxt[a] = first[v]
        first[v] = a


def _bk_kernel(first, nxt, arc_to, cap, tr_cap, tree):
    n = first.shape[0]
    parent = np.full(n, _P_NONE, dtype=np.int64)
    dist = np.zeros(n, dtype=np.int64)
    ts = np.zeros(n, dtype=np.int64)

    queue = np.empty(n + 1, dtype=np.int64)
    q_head = 0
    q_tail = 0
    in_q = np.zeros(n, dtype=np.bool_)

    orph = np.empty(n + 1, dtype=np.int64)
    o_head = 0
    o_tail = 0

    for v in range(n):
        tree[v] = _TREE_FREE
        if tr_cap[v] > 0.0:
            tree[v] = _TREE_S
            parent[v] = _P_TERM
            dist[v] = 1
            queue[q_tail] = v
            q_tail = (q_tail + 1) % (n + 1)
            in_q[v] = True
        elif tr_cap[v] < 0.0:
            tree[v] = _TREE_T
            parent[v] = _P_TERM
            dist[v] = 1
            queue[q_tail] = v
            q_tail = (q_tail + 1) % (n + 1)
            in_q[v] = True

    flow = 0.0
    time = 0

    while q_head != q_tail:
        p = queue[q_head]
        q_head = (q_head + 1) % (n + 1)
        in_q[p] = False
        tp = tree[p]
        if tp == _TREE_FREE:
            continue

        # Growth: scan p's arcs for free neighbors or the opposite tree.
        a = first[p]
        mid = np.int64(-1)
        while a != -1:
            if tp == _TREE_S:
                residual = cap[a]
            else:
                residual = cap[a ^ 1]
            if residual > 0.0:
                q = arc_to[a]
                tq = tree[q]
                if tq == _TREE_FREE:
                    tree[q] = tp
                    parent[q] = a ^ 1
                    ts[q] = ts[p]
                    dist[q] = dist[p] + 1
                    if not in_q[q]:
                        queue[q_tail] = q
                        q_tail = (q_tail + 1) % (n + 1)
                        in_q[q] = True
                elif tq != tp:
                    if tp == _TREE_S:
                        mid = a
                    else:
                        mid = a ^ 1
                    break
            a = nxt[a]
        if mid < 0:
            continue

        # p still has unscanned arcs; requeue it behind the path work.
        if not in_q[p]:
            queue[q_tail] = p
            q_tail = (q_tail + 1) % (n + 1)
            in_q[p] = True

        time += 1

        # Augment along source path + mid + sink path.  The tail of mid is
        # the growth node itself when it grew from S, otherwise the S-side
        # endpoint it touched.
        if tp == _TREE_S:
            s_start = p
        else:
            s_start = arc_to[mid ^ 1]
        t_start = arc_to[mid]

        bottleneck = cap[mid]
        v = s_start
        while parent[v] != _P_TERM:
            pa = parent[v]
            if cap[pa ^ 1] < bottleneck:
                bottleneck = cap[pa ^ 1]
            v = arc_to[pa]
        if tr_cap[v] < bottleneck:
            bottleneck = tr_cap[v]
        v = t_start
        while parent[v] != _P_TERM:
            pa = parent[v]
            if cap[pa] < bottleneck:
                bottleneck = cap[pa]
            v = arc_to[pa]
        if -tr_cap[v] < bottleneck:
            bottleneck = -tr_cap[v]

        cap[mid] -= bottleneck
        cap[mid ^ 1] += bottleneck
        v = s_start
        while parent[v] != _P_TERM:
            pa = parent[v]
            cap[pa] += bottleneck
            cap[pa ^ 1] -= bottleneck
            if cap[pa ^ 1] <= 0.0:
                parent[v] = _P_ORPH
                orph[o_tail] = v
                o_tail = (o_tail + 1) % (n + 1)
            v = arc_to[pa]
        tr_cap[v] -= bottleneck
        if tr_cap[v] <= 0.0:
            parent[v] = _P_ORPH
            orph[o_tail] = v
            o_tail = (o_tail + 1) % (n + 1)
        v = t_start
        while parent[v] != _P_TERM:
            pa = parent[v]
            cap[pa] -= bottleneck
            cap[pa ^ 1] += bottleneck
            if cap[pa] <= 0.0:
                parent[v] = _P_ORPH
                orph[o_tail] = v
                o_tail = (o_tail + 1) % (n + 1)
            v = arc_to[pa]
        tr_cap[v] += bottleneck
        if tr_cap[v] >= 0.0:
            parent[v] = _P_ORPH
            orph[o_tail] = v
            o_tail = (o_tail + 1) % (n + 1)
        flow += bottleneck

        # Adoption: find new parents for orphans or free them.
        while o_head != o_tail:
            v = orph[o_head]
            o_head = (o_head + 1) % (n + 1)
            tv = tree[v]

            d_min = np.int64(1 << 60)
            best = np.int64(-1)
            a = first[v]
            while a != -1:
                if tv == _TREE_S:
                    residual = cap[a ^ 1]
                else:
                    residual = cap[a]
                if residual > 0.0:
                    q = arc_to[a]
                    if tree[q] == tv:
                        # Walk q's chain to check it still reaches a terminal.
                        d = np.int64(0)
                        u = q
                        ok = False
                        while True:
                            if ts[u] == time:
                                d += dist[u]
                                ok = True
                                break
                            pa = parent[u]
                            d += 1
                            if pa == _P_TERM:
                                ts[u] = time
                                dist[u] = 1
                                ok = True
                                break
                            if pa == _P_ORPH or pa == _P_NONE:
                                break
                            u = arc_to[pa]
                        if ok:
                            if d < d_min:
                                d_min = d
                                best = a
                            u = q
                            dd = d
                            while ts[u] != time:
                                ts[u] = time
                                dist[u] = dd
                                dd -= 1
                                u = arc_to[parent[u]]
                a = nxt[a]

            if best >= 0:
                parent[v] = best
                ts[v] = time
                dist[v] = d_min + 1
            else:
                # No parent: v leaves the tree; neighbors may need attention.
                a = first[v]
                while a != -1:
                    q = arc_to[a]
                    if tree[q] == tv:
                        if tv == _TREE_S:
                            residual = cap[a ^ 1]
                        else:
                            residual = cap[a]
                        if residual > 0.0 and not in_q[q]:
                            queue[q_tail] = q
                            q_tail = (q_tail + 1) % (n + 1)
                            in_q[q] = True
                        if parent[q] == (a ^ 1):
                            parent[q] = _P_ORPH
                            orph[o_tail] = q
                            o_tail = (o_tail + 1) % (n + 1)
                    a = nxt[a]
                tree[v] = _TREE_FREE
                parent[v] = _P_NONE

    return flow


_bk_jit = njit(_bk_kernel)
_adj_jit = njit(_build_adjacency)


def _solve(
    n: int,
    arc_from: np.ndarray,
    arc_to: np.ndarray,
    arc_cap: np.ndarray,
    tr_cap: np.ndarray,
) -> tuple[float, np.ndarray]:
    """Run the solver on flat arrays; returns (flow, source-side mask)."""
    first = np.full(n, -1, dtype=np.int64)
    nxt = np.empty(arc_from.shape[0], dtype=np.int64)
    tree = np.zeros(n, dtype=np.int8)
    cap = arc_cap.astype(np.float64).copy()
    tr = tr_cap.astype(np.float64).copy()
    if NUMBA_ENABLED:
        _adj_jit(arc_from, first, nxt)
        flow = float(_bk_jit(first, nxt, arc_to, cap, tr, tree))
    else:
        _build_adjacency(arc_from, first, nxt)
        flow = float(_bk_kernel(first, nxt, arc_to, cap, tr, tree))
    return flow, tree == _TREE_S


class FlowNetwork:
    """General s-t flow network; nodes are 0..n-1, terminals implicit.

    Terminal capacities of a node collapse into a single residual, so the
    guaranteed flow ``min(cap_source, cap_sink)`` is collected up front.
    """

    def __init__(self, n_nodes: int):
        if n_nodes < 1:
            raise ValueError("network needs at least one node")
        self.n = n_nodes
        self._arc_from: list[int] = []
        self._arc_to: list[int] = []
        self._arc_cap: list[float] = []
        self._src = np.zeros(n_nodes, dtype=np.float64)
        self._snk = np.zeros(n_nodes, dtype=np.float64)

    def add_edge(self, u: int, v: int, cap: float, rev_cap: float = 0.0) -> None:
        if cap < 0 or rev_cap < 0:
            raise ValueError("capacities must be nonnegative")
        self._arc_from += [u, v]
        self._arc_to += [v, u]
        self._arc_cap += [float(cap), float(rev_cap)]

    def add_terminal(self, v: int, cap_source: float, cap_sink: float) -> None:
        if cap_source < 0 or cap_sink < 0:
            raise ValueError("capacities must be nonnegative")
        self._src[v] += cap_source
        self._snk[v] += cap_sink

    def solve(self) -> tuple[float, np.ndarray]:
        """(max flow, source-side membership).  The source side is the set
        of nodes reachable from the source in the final residual graph."""
        base = float(np.minimum(self._src, self._snk).sum())
        tr = self._src - self._snk
        flow, side = _solve(
            self.n,
            np.asarray(self._arc_from, dtype=np.int64),
            np.asarray(self._arc_to, dtype=np.int64),
            np.asarray(self._arc_cap, dtype=np.float64),
            tr,
        )
        return flow + base, side


@dataclass(frozen=True)
class EnergyParams:
    """Smoothness strength (gamma) and its weight in the total energy
    (lam); the contrast scale beta is derived from the image."""

    gamma: float = 50.0
    lam: float = 1.0

    def __post_init__(self):
        if self.gamma <= 0 or self.lam <= 0:
            raise ValueError("gamma and lam must be positive")


# Unique 8-neighbor offsets: east, south, south-east, south-west.
_OFFSETS = ((0, 1, 1.0), (1, 0, 1.0), (1, 1, np.sqrt(2.0)), (1, -1, np.sqrt(2.0)))


def _pair_sq_diffs(colors: np.ndarray) -> list[np.ndarray]:
    """Squared color differences for the four unique neighbor offsets."""
    diffs = []
    for dy, dx, _ in _OFFSETS:
        if dx >= 0:
            d = colors[dy:, dx:] - colors[: colors.shape[0] - dy, : colors.shape[1] - dx]
        else:
            d = colors[dy:, : colors.shape[1] + dx] - colors[: colors.shape[0] - dy, -dx:]
        diffs.append(np.sum(d * d, axis=2))
    return diffs


def contrast_scale(image: np.ndarray) -> float:
    """beta = 1 / (2 * mean squared neighbor color difference); zero on a
    perfectly uniform image (which makes every contrast factor 1)."""
    colors = to_unit(as_image(image))
    diffs = _pair_sq_diffs(colors)
    total = sum(float(d.sum()) for d in diffs)
    count = sum(d.size for d in diffs)
    mean = total / count if count else 0.0
    return 0.0 if mean == 0.0 else 1.0 / (2.0 * mean)


@dataclass
class GridGraph:
    """Capacities over the pixel lattice.

    ``offset`` is the sum of the per-pixel normalization subtracted from
    both t-links of every free pixel (so capacities stay nonnegative);
    adding it back turns the raw max flow into the labeling energy.
    """

    src_cap: np.ndarray  # (H, W)
    snk_cap: np.ndarray  # (H, W)
    nlink: list[np.ndarray]  # per _OFFSETS: east, south, south-east, south-west
    offset: float
    beta: float

    @property
    def shape(self) -> tuple[int, int]:
        return self.src_cap.shape


def build_graph(
    image: np.ndarray,
    fg: gmm.GmmModel,
    bg: gmm.GmmModel,
    trimap: np.ndarray,
    params: EnergyParams = EnergyParams(),
) -> GridGraph:
    """Data term from the two mixtures, contrast-sensitive smoothness term
    over the 8-neighborhood, hard seeds pinned with HARD capacities."""
    image = as_image(image)
    trimap = np.asarray(trimap)
    if trimap.shape != image.shape[:2]:
        raise ValueError("trimap shape does not match image")
    colors = to_unit(image)
    h, w = trimap.shape

    beta = contrast_scale(image)
    gammas = params.lam * params.gamma
    nlink = []
    for (dy, dx, dist), d2 in zip(_OFFSETS, _pair_sq_diffs(colors)):
        nlink.append(gammas / dist * np.exp(-beta * d2))

    flat = colors.reshape(-1, 3)
    data_fg = -gmm.log_prob(fg, flat).reshape(h, w)
    data_bg = -gmm.log_prob(bg, flat).reshape(h, w)

    free = trimap == TRIMAP_FREE
    src = np.zeros((h, w), dtype=np.float64)
    snk = np.zeros((h, w), dtype=np.float64)
    shift = np.minimum(data_bg, data_fg)
    src[free] = (data_bg - shift)[free]
    snk[free] = (data_fg - shift)[free]
    offset = float(shift[free].sum())
    src[trimap == TRIMAP_FG] = HARD
    snk[trimap == TRIMAP_BG] = HARD
    return GridGraph(src_cap=src, snk_cap=snk, nlink=nlink, offset=offset, beta=beta)


def _grid_arcs(graph: GridGraph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    h, w = graph.shape
    ids = np.arange(h * w, dtype=np.int64).reshape(h, w)
    froms = []
    tos = []
    caps = []
    for (dy, dx, _), link in zip(_OFFSETS, graph.nlink):
        if dx >= 0:
            a = ids[: h - dy, : w - dx]
            b = ids[dy:, dx:]
        else:
            a = ids[: h - dy, -dx:]
            b = ids[dy:, : w + dx]
        froms.append(a.ravel())
        tos.append(b.ravel())
        caps.append(link.ravel())
    m = sum(f.size for f in froms)
    arc_from = np.empty(2 * m, dtype=np.int64)
    arc_to = np.empty(2 * m, dtype=np.int64)
    arc_cap = np.empty(2 * m, dtype=np.float64)
    arc_from[0::2] = np.concatenate(froms)
    arc_to[0::2] = np.concatenate(tos)
    arc_from[1::2] = arc_to[0::2]
    arc_to[1::2] = arc_from[0::2]
    arc_cap[0::2] = np.concatenate(caps)
    arc_cap[1::2] = arc_cap[0::2]
    return arc_from, arc_to, arc_cap


def max_flow(graph: GridGraph) -> tuple[float, np.ndarray]:
    """Exact min cut of the grid; returns the energy-scale flow value and
    the source-side (foreground) pixel mask."""
    h, w = graph.shape
    arc_from, arc_to, arc_cap = _grid_arcs(graph)
    tr = (graph.src_cap - graph.snk_cap).ravel()
    base = float(np.minimum(graph.src_cap, graph.snk_cap).sum())
    flow, side = _solve(h * w, arc_from, arc_to, arc_cap, tr)
    return flow + base + graph.offset, side.reshape(h, w)


def segment(
    image: np.ndarray,
    fg: gmm.GmmModel,
    bg: gmm.GmmModel,
    trimap: np.ndarray,
    params: EnergyParams = EnergyParams(),
) -> np.ndarray:
    """Minimum-energy binary labeling; source side is foreground."""
    _, mask = max_flow(build_graph(image, fg, bg, trimap, params))
    return mask
