"""Undirected simple graphs, independent sets and the graph constants alpha, alpha_w and m."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from . import kernels
from .errors import CapExceeded, SingularAfterReduction

MIS_CAP = 20
# Pivot / conditioning threshold for declaring (A+I) singular.
SINGULAR_RCOND = 1e-10


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes ``0..n-1``.

    Edges are stored as sorted ``(u, v)`` pairs with ``u < v``.
    """

    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"graph needs n >= 1 nodes, got {self.n!r}")
        canon = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside [0, {self.n})")
            canon.add((min(u, v), max(u, v)))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "edges", frozenset(canon))

    @classmethod
    def from_edges(cls, n, edges):
        """Build a graph, rejecting duplicate edges (in either orientation)."""
        seen = set()
        for u, v in edges:
            key = (min(int(u), int(v)), max(int(u), int(v)))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
        return cls(n, frozenset(seen))

    @cached_property
    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1
        a.setflags(write=False)
        return a

    @cached_property
    def neighbor_masks(self) -> np.ndarray:
        masks = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            masks[u] |= np.int64(1) << v
            masks[v] |= np.int64(1) << u
        return masks

    def neighbors(self, k):
        return np.flatnonzero(self.adjacency[k])

    def degrees(self):
        return self.adjacency.sum(axis=1)

    def sorted_edges(self):
        return sorted(self.edges)


def adjacency_matrix(g: Graph) -> np.ndarray:
    return g.adjacency.copy()


def closed_adjacency(g: Graph) -> np.ndarray:
    """``A_G + I_n`` as float64."""
    return g.adjacency.astype(float) + np.eye(g.n)


def is_independent(g: Graph, nodes) -> bool:
    nodes = list(nodes)
    a = g.adjacency
    return not any(a[u, v] for i, u in enumerate(nodes) for v in nodes[i + 1 :])


def is_maximal_independent(g: Graph, nodes) -> bool:
    s = set(nodes)
    if not is_independent(g, s):
        return False
    a = g.adjacency
    return all(any(a[k, j] for j in s) for k in range(g.n) if k not in s)


def _mask_to_set(mask, n):
    return frozenset(i for i in range(n) if (int(mask) >> i) & 1)


def _check_cap(g, cap):
    if g.n > cap:
        raise CapExceeded(g.n, cap, "independent-set enumeration")


def maximal_independent_sets(g: Graph, cap: int = MIS_CAP) -> list[frozenset]:
    """All maximal independent sets, ordered by their sorted node tuples."""
    _check_cap(g, cap)
    masks = kernels.maximal_independent_masks(g.neighbor_masks, g.n)
    sets = [_mask_to_set(m, g.n) for m in masks]
    return sorted(sets, key=lambda s: tuple(sorted(s)))


def independence_number(g: Graph, cap: int = MIS_CAP) -> int:
    return max(len(s) for s in maximal_independent_sets(g, cap))


def weighted_max_independent_set(g: Graph, w, cap: int = MIS_CAP) -> tuple[frozenset, float]:
    """Maximal independent set of largest total weight.

    Ties go to the lexicographically smallest sorted node tuple.
    """
    w = np.asarray(w, dtype=float)
    if w.shape != (g.n,):
        raise ValueError(f"weights must have length {g.n}, got shape {w.shape}")
    if (w < 0).any():
        raise ValueError("weights must be nonnegative")
    best, best_w = None, -np.inf
    for s in maximal_independent_sets(g, cap):
        total = float(w[sorted(s)].sum())
        if total > best_w:
            best, best_w = s, total
    return best, best_w


def degree_plus_one_weights(g: Graph) -> np.ndarray:
    """The weight vector ``(A_G + I_n) 1``, i.e. ``deg(k) + 1``."""
    return (g.degrees() + 1).astype(float)


def twin_classes(g: Graph) -> list[list[int]]:
    """Closed-neighbourhood twin classes, each sorted, ordered by representative.

    Adjacent nodes with ``N[u] == N[v]`` are twins.  Merging a pair never creates
    new twins, so iterated lowest-index merging lands on these classes.
    """
    closed = closed_adjacency(g).astype(bool)
    rep = list(range(g.n))
    for v in range(g.n):
        for u in range(v):
            if rep[u] == u and g.adjacency[u, v] and np.array_equal(closed[u], closed[v]):
                rep[v] = u
                break
    classes: dict[int, list[int]] = {}
    for v, r in enumerate(rep):
        classes.setdefault(r, []).append(v)
    return [classes[r] for r in sorted(classes)]


def twin_reduce(g: Graph) -> Graph:
    """Keep one node (the lowest index) per twin class, relabelled in order."""
    keep = [cls[0] for cls in twin_classes(g)]
    relabel = {v: i for i, v in enumerate(keep)}
    edges = {(relabel[u], relabel[v]) for u, v in g.edges if u in relabel and v in relabel}
    return Graph(len(keep), frozenset(edges))


def _solve_closed(g: Graph, rhs=1.0):
    m = closed_adjacency(g)
    if np.linalg.cond(m) * SINGULAR_RCOND > 1.0:
        return None
    return np.linalg.solve(m, np.full(g.n, float(rhs)))


def reduced_closed_solve(g: Graph, rhs=1.0) -> tuple[np.ndarray, list[list[int]] | None]:
    """Solve ``(A+I) x = rhs * 1``, twin-reducing first if the matrix is singular.

    Returns the solution and, when a reduction was needed, the twin classes
    (solution entry ``i`` then belongs to class ``i``).
    """
    x = _solve_closed(g, rhs)
    if x is not None:
        return x, None
    classes = twin_classes(g)
    reduced = twin_reduce(g)
    x = _solve_closed(reduced, rhs)
    if x is None:
        raise SingularAfterReduction(
            f"A+I stays singular after twin reduction ({g.n} -> {reduced.n} nodes)"
        )
    return x, classes


def network_constant_m(g: Graph) -> float:
    """Sum of all entries of ``(A+I)^{-1}`` (of the twin-reduced graph if needed)."""
    x, _ = reduced_closed_solve(g)
    return float(x.sum())


# --- generators and edge-list files -----------------------------------------


def path_graph(n):
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def cycle_graph(n):
    if n < 3:
        raise ValueError("a cycle needs at least 3 nodes")
    return Graph(n, frozenset((min(i, (i + 1) % n), max(i, (i + 1) % n)) for i in range(n)))


def star_graph(n):
    """Star on ``n`` nodes with centre 0."""
    return Graph(n, frozenset((0, i) for i in range(1, n)))


def complete_graph(n):
    return Graph(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)))


def erdos_renyi(n, p, seed):
    """G(n, p) with each of the n(n-1)/2 pairs drawn in lexicographic order."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    draws = rng.random(len(iu))
    keep = draws < p
    return Graph(n, frozenset(zip(iu[keep].tolist(), ju[keep].tolist())))


GENERATORS = {
    "path": path_graph,
    "cycle": cycle_graph,
    "star": star_graph,
    "complete": complete_graph,
    "erdos_renyi": erdos_renyi,
}


def parse_edge_list(text, n=None, one_based=False) -> Graph:
    """Parse ``u v`` lines; ``#`` starts a comment, blank lines are skipped."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: node ids must be integers, got {raw!r}") from None
        if one_based:
            u, v = u - 1, v - 1
        if u < 0 or v < 0:
            raise ValueError(f"line {lineno}: negative node id")
        edges.append((u, v))
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    return Graph.from_edges(n, edges)


def read_edge_list(path, n=None, one_based=False) -> Graph:
    return parse_edge_list(Path(path).read_text(), n=n, one_based=one_based)


def format_edge_list(g: Graph, one_based=False) -> str:
    off = 1 if one_based else 0
    lines = [f"# n={g.n}"] + [f"{u + off} {v + off}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"
