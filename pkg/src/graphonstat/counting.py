"""Exact subgraph statistics on an observed graph.

Counts are injective-homomorphism based and exact.  Three strategies back the
public operations: closed forms for the workhorse motifs (edge, 2-star,
triangle, 4-cycle, bowtie) built from degree sums and matrix powers; ordered
backtracking with adjacency pruning for small graphs; and, for large graphs
and general motifs, Moebius inversion over vertex partitions which turns
injective counts into all-maps homomorphism counts evaluated by tensor
contraction.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._elim import contract
from .graphon import BlockGraphon, KernelMatrix, empirical_block_graphon
from .motifs import Motif, vertex_join, K_MAX, MotifSizeError

_BACKTRACK_N = 24          # below this, plain backtracking wins
_CLOSED_FORM_N = 1500      # closed-form float64 arithmetic stays exact (max n^5)


class GraphSizeError(ValueError):
    """Graph too small for the requested motif statistic."""


class CountOverflowError(OverflowError):
    """Requested count cannot be computed exactly in 64-bit arithmetic."""


class Graph:
    """Simple undirected graph as a symmetric 0/1 adjacency matrix."""

    def __init__(self, adjacency, latents=None):
        a = np.asarray(adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {a.shape}")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency is not symmetric")
        if np.any(np.diag(a) != 0):
            raise ValueError("adjacency has a self-loop")
        if not np.isin(a, (0, 1)).all():
            raise ValueError("adjacency entries must be 0 or 1")
        self.adj = a.astype(np.uint8)
        self.adj.flags.writeable = False
        self.latents = latents
        self._nbrs = None
        self._deg = None

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        if self._deg is None:
            self._deg = self.adj.sum(axis=1).astype(np.int64)
        return self._deg

    @property
    def n_edges(self) -> int:
        return int(self.degrees.sum()) // 2

    def neighbor_sets(self):
        if self._nbrs is None:
            self._nbrs = [frozenset(np.flatnonzero(row)) for row in self.adj]
        return self._nbrs

    def adj_float(self) -> np.ndarray:
        return self.adj.astype(np.float64)

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        a = np.zeros((n, n), dtype=np.uint8)
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            a[u, v] = a[v, u] = 1
        return cls(a)

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.n_edges})"


def parse_edge_list(text: str, n: int | None = None) -> Graph:
    """Edge list: one "u v" pair per line, 0-indexed, comments start with '#'.

    A comment of the form "# n=N" pins the vertex count; otherwise n is the
    largest index plus one (or the explicit n argument).
    """
    edges = []
    max_idx = -1
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("n=") and n is None:
                n = int(body[2:])
            continue
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {raw!r}")
        u, v = int(parts[0]), int(parts[1])
        edges.append((u, v))
        max_idx = max(max_idx, u, v)
    if n is None:
        n = max_idx + 1
    return Graph.from_edges(n, edges)


def load_edge_list(path: str, n: int | None = None) -> Graph:
    with open(path) as fh:
        return parse_edge_list(fh.read(), n=n)


def edge_list_lines(g: Graph) -> list[str]:
    lines = [f"# n={g.n}"]
    ii, jj = np.nonzero(np.triu(g.adj, k=1))
    lines.extend(f"{u} {v}" for u, v in zip(ii.tolist(), jj.tolist()))
    return lines


def empirical_graphon(g: Graph) -> BlockGraphon:
    """Step graphon of g: W(x,y) = 1 iff (ceil(nx), ceil(ny)) is an edge."""
    return empirical_block_graphon(g.adj, name=f"empirical[n={g.n}]")


# -- ordered backtracking -----------------------------------------------------

def _backtrack_order(h: Motif, pinned: tuple[int, ...]) -> list[int]:
    """Vertex order: pinned first, then greedily maximizing placed neighbors."""
    order = list(pinned)
    rest = [v for v in range(1, h.k + 1) if v not in order]
    while rest:
        best = max(rest, key=lambda v: (sum(1 for u in h.neighbors(v) if u in order),
                                        len(h.neighbors(v)), -v))
        order.append(best)
        rest.remove(best)
    return order


def _backtrack_count(h: Motif, g: Graph, assignment: dict[int, int]) -> int:
    """Injective homomorphisms of h into g extending the partial assignment."""
    nbrs = g.neighbor_sets()
    order = _backtrack_order(h, tuple(assignment))
    for a, v in assignment.items():
        for b in h.neighbors(a):
            if b in assignment and assignment[b] not in nbrs[v]:
                return 0
    used = set(assignment.values())
    if len(used) < len(assignment):
        return 0

    def extend(idx: int) -> int:
        if idx == len(order):
            return 1
        a = order[idx]
        placed = [b for b in h.neighbors(a) if b in assignment]
        if placed:
            cands = set(nbrs[assignment[placed[0]]])
            for b in placed[1:]:
                cands &= nbrs[assignment[b]]
            cands -= used
        else:
            cands = set(range(g.n)) - used
        total = 0
        for v in sorted(cands):
            assignment[a] = v
            used.add(v)
            total += extend(idx + 1)
            used.remove(v)
            del assignment[a]
        return total

    return extend(len(assignment))


# -- Moebius inversion over vertex partitions ----------------------------------

def _set_partitions(items: tuple[int, ...]):
    """All set partitions of items, as lists of tuples."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] + (first,)] + part[i + 1:]
        yield part + [(first,)]


def _mobius(blocks) -> int:
    mu = 1
    for b in blocks:
        s = len(b)
        mu *= (-1) ** (s - 1) * math.factorial(s - 1)
    return mu


def _quotient_edges(h: Motif, blocks):
    """Map h's edges through the partition; None when a loop appears."""
    rep = {}
    for i, b in enumerate(blocks):
        for v in b:
            rep[v] = i
    edges = set()
    for u, v in h.edges:
        a, b = rep[u], rep[v]
        if a == b:
            return None, rep
        edges.add((min(a, b), max(a, b)))
    return sorted(edges), rep


def _guard_int64(n: int, k: int):
    # Alternating partial sums can exceed the top term by a small factor.
    if n ** k >= 2 ** 61:
        raise CountOverflowError(
            f"exact count of a {k}-vertex motif in an n={n} graph exceeds 64-bit range")


def _hom_count_graph(edges, k: int, g: Graph, pins: dict[int, str] | None = None):
    """All-maps homomorphism count by contraction; pins keep named output axes.

    Counts below 2^53 run in float64 (BLAS-backed, still exact for integers in
    that range); larger ones fall back to int64 summation.
    """
    dtype = np.float64 if g.n ** k < 2 ** 53 else np.int64
    adj = g.adj.astype(dtype)
    pins = pins or {}
    rename = dict(pins)
    domains = {rename.get(v, v): g.n for v in range(k)}
    factors = [((rename.get(u, u), rename.get(v, v)), adj) for u, v in edges]
    touched = {v for vs, _ in factors for v in vs}
    ones = np.ones(g.n, dtype=dtype)
    for v in domains:
        if v not in touched:
            factors.append(((v,), ones))
    out = contract(factors, domains, keep=tuple(pins.values()))
    if dtype is np.float64:
        return np.round(out).astype(np.int64) if pins else int(round(float(out)))
    return out


def _mobius_injective(h: Motif, g: Graph, pins: tuple[int, ...] = ()):
    """Injective homomorphism count via hom counts of vertex-identified quotients.

    pins are motif vertices whose images stay free output axes.  Partitions
    merging two pinned vertices contribute only on the diagonal of the output,
    which the callers zero by convention, so they are skipped.
    """
    _guard_int64(g.n, h.k)
    if len(pins) == 0:
        # Group partitions by quotient isomorphism class so each hom count
        # runs once; the class multiplicity carries the Moebius weights.
        # Classes are bucketed by cheap invariants before the exact check.
        buckets: dict = {}
        for blocks in _set_partitions(tuple(range(1, h.k + 1))):
            edges, _ = _quotient_edges(h, blocks)
            if edges is None:
                continue
            q = Motif.from_edges(len(blocks), ((u + 1, v + 1) for u, v in edges))
            mu = _mobius(blocks)
            bucket = buckets.setdefault((q.k, q.n_edges, q.degree_sequence()), [])
            for entry in bucket:
                if _find_isomorphism(q, entry[0]) is not None:
                    entry[2] += mu
                    break
            else:
                bucket.append([q, edges, mu])
        total_scalar = 0
        for bucket in buckets.values():
            for q, edges, mu in bucket:
                if mu:
                    total_scalar += mu * int(_hom_count_graph(edges, q.k, g))
        return total_scalar
    total = np.zeros((g.n,) * len(pins), dtype=np.int64)
    for blocks in _set_partitions(tuple(range(1, h.k + 1))):
        if any(sum(1 for p in pins if p in b) > 1 for b in blocks):
            continue
        edges, rep = _quotient_edges(h, blocks)
        if edges is None:
            continue
        pin_axes = {rep[p]: f"pin{i}" for i, p in enumerate(pins)}
        val = _hom_count_graph(edges, len(blocks), g, pins=pin_axes)
        total += _mobius(blocks) * np.asarray(val)
    return total


# -- closed forms ---------------------------------------------------------------

_BOWTIE = vertex_join(Motif.from_edges(3, [(1, 2), (1, 3), (2, 3)]), 1,
                      Motif.from_edges(3, [(1, 2), (1, 3), (2, 3)]), 1)


@lru_cache(maxsize=1)
def _closed_form_keys() -> dict:
    from .motifs import K2, K3, C4, K12
    named = {"k2": K2, "k12": K12, "k3": K3, "c4": C4, "bowtie": _BOWTIE}
    return {motif.canonical_key(): name for name, motif in named.items()}


def _closed_injective_total(name: str, g: Graph) -> int:
    a = g.adj_float()
    d = g.degrees.astype(np.float64)
    n = g.n
    if name == "k2":
        return 2 * g.n_edges
    if name == "k12":
        return int(round((d * (d - 1)).sum()))
    a2 = a @ a
    if name == "k3":
        return int(round((a2 * a).sum()))
    if name == "c4":
        codeg = a2 - np.diag(np.diag(a2))
        return int(round((codeg * (codeg - 1)).sum()))
    if name == "bowtie":
        tri = ((a2 * a).sum(axis=1)) / 2          # triangles at each vertex
        per_vertex = (tri * (tri - 1) / 2).sum()
        codeg = a2 * a                            # codegree restricted to edges
        per_edge = (codeg * (codeg - 1) / 2).sum() / 2
        unlabeled = per_vertex - 2 * per_edge
        return int(round(unlabeled * _BOWTIE.aut))
    raise KeyError(name)


def _closed_one_point(name: str, g: Graph) -> np.ndarray:
    """X_a(v, .) for each vertex a of the canonical labeling; shape (k, n)."""
    a = g.adj_float()
    d = g.degrees.astype(np.float64)
    if name == "k2":
        return np.vstack([d, d])
    if name == "k12":
        leaf = a @ d - d
        return np.vstack([d * (d - 1), leaf, leaf])
    a2 = a @ a
    if name == "k3":
        closed3 = (a2 * a).sum(axis=1)
        return np.vstack([closed3] * 3)
    if name == "c4":
        closed4 = (a2 * a2.T).sum(axis=1)
        x = closed4 - d ** 2 - (a @ d) + d
        return np.vstack([x] * 4)
    raise KeyError(name)


def _closed_two_point(name: str, g: Graph) -> np.ndarray:
    """sum over ordered pairs a != b of X_{a,b}(u, v, .); zero diagonal."""
    a = g.adj_float()
    d = g.degrees.astype(np.float64)
    if name == "k2":
        total = 2 * a
    elif name == "k12":
        a2 = a @ a
        total = 2 * a * (d[:, None] + d[None, :] - 2) + 2 * a2
    elif name == "k3":
        a2 = a @ a
        total = 6 * a * a2
    elif name == "c4":
        a2 = a @ a
        p3 = a @ a2 - a * (d[:, None] + d[None, :] - 1)
        codeg = a2.copy()
        total = 8 * a * p3 + 4 * codeg * (codeg - 1)
    else:
        raise KeyError(name)
    np.fill_diagonal(total, 0.0)
    return total


def _registry_name(h: Motif) -> str | None:
    if h.k > K_MAX:
        return None
    return _closed_form_keys().get(h.canonical_key())


def _find_isomorphism(src: Motif, dst: Motif) -> dict[int, int] | None:
    """A bijection sigma with sigma(E(src)) = E(dst), or None."""
    if src.k != dst.k or src.n_edges != dst.n_edges:
        return None
    for p in itertools.permutations(range(1, src.k + 1)):
        perm = dict(zip(range(1, src.k + 1), p))
        if all(dst.has_edge(perm[u], perm[v]) for u, v in src.edges):
            return perm
    return None


_NAMED_MOTIFS: dict[str, Motif] = {}


def _named_motif(name: str) -> Motif:
    if not _NAMED_MOTIFS:
        from .motifs import K2, K3, C4, K12
        _NAMED_MOTIFS.update({"k2": K2, "k12": K12, "k3": K3, "c4": C4,
                              "bowtie": _BOWTIE})
    return _NAMED_MOTIFS[name]


# -- public operations ----------------------------------------------------------

def injective_hom_count(h: Motif, g: Graph) -> int:
    """Number of injective homomorphisms of h into g (equals |Aut(h)| X(h,g))."""
    if g.n < h.k:
        raise GraphSizeError(f"graph has {g.n} vertices, motif needs {h.k}")
    name = _registry_name(h)
    if name is not None and g.n <= _CLOSED_FORM_N:
        return _closed_injective_total(name, g)
    if g.n <= _BACKTRACK_N:
        return _backtrack_count(h, g, {})
    return _mobius_injective(h, g)


def count_copies(h: Motif, g: Graph) -> int:
    """X(h,g): unlabeled copies of h in g = injective homomorphisms / |Aut(h)|."""
    inj = injective_hom_count(h, g)
    aut = h.aut
    if inj % aut != 0:
        raise AssertionError(f"injective count {inj} not divisible by |Aut|={aut}")
    return inj // aut


def falling_factorial(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= n - i
    return out


def density_hat_t(h: Motif, g: Graph) -> float:
    """Unbiased density estimate |Aut(h)| X(h,g) / (n)_k, in [0,1]."""
    return h.aut * count_copies(h, g) / falling_factorial(g.n, h.k)


@dataclass(frozen=True)
class OnePointDensity:
    """Empirical 1-point subgraph densities: t_hat[v] plus the raw X_a rows."""

    motif: Motif
    t_hat: np.ndarray            # length n
    x_a: np.ndarray              # shape (k, n); row a-1 is X_a(., h, g)


def one_point_density(h: Motif, g: Graph) -> OnePointDensity:
    """t_hat(v,h,g) = (1/|Aut|) sum_a X_a(v,h,g) / n^(k-1) for every vertex v."""
    if g.n < h.k:
        raise GraphSizeError(f"graph has {g.n} vertices, motif needs {h.k}")
    name = _registry_name(h) if g.n <= _CLOSED_FORM_N else None
    if name == "bowtie":
        name = None
    if name is not None:
        canon = _named_motif(name)
        sigma = _find_isomorphism(h, canon)
        rows_canon = _closed_one_point(name, g)
        x_a = np.vstack([rows_canon[sigma[a] - 1] for a in range(1, h.k + 1)])
    elif g.n <= _BACKTRACK_N:
        x_a = np.zeros((h.k, g.n))
        for a in range(1, h.k + 1):
            for v in range(g.n):
                x_a[a - 1, v] = _backtrack_count(h, g, {a: v})
    else:
        x_a = np.vstack([np.asarray(_mobius_injective(h, g, pins=(a,)), dtype=float)
                         for a in range(1, h.k + 1)])
    t_hat = x_a.sum(axis=0) / (h.aut * float(g.n) ** (h.k - 1))
    return OnePointDensity(h, t_hat, x_a)


def two_point_matrix(h: Motif, g: Graph) -> KernelMatrix:
    """Empirical 2-point density matrix W_hat(u,v) with zero diagonal.

    W_hat(u,v) = (1/(2|Aut|)) sum over ordered pairs a != b of
    X_{a,b}(u,v,h,g) / n^(k-2).
    """
    if g.n < h.k:
        raise GraphSizeError(f"graph has {g.n} vertices, motif needs {h.k}")
    name = _registry_name(h) if g.n <= _CLOSED_FORM_N else None
    if name == "bowtie":
        name = None
    if name is not None:
        total = _closed_two_point(name, g)
    elif g.n <= _BACKTRACK_N:
        total = np.zeros((g.n, g.n))
        for a in range(1, h.k + 1):
            for b in range(1, h.k + 1):
                if a == b:
                    continue
                for u in range(g.n):
                    for v in range(g.n):
                        if u != v:
                            total[u, v] += _backtrack_count(h, g, {a: u, b: v})
    else:
        total = np.zeros((g.n, g.n))
        for a in range(1, h.k + 1):
            for b in range(1, h.k + 1):
                if a != b:
                    total += np.asarray(_mobius_injective(h, g, pins=(a, b)), dtype=float)
        np.fill_diagonal(total, 0.0)
    vals = total / (2 * h.aut * float(g.n) ** (h.k - 2))
    return KernelMatrix(vals, h, kind="empirical")


def regularity_R_empirical(h: Motif, g: Graph) -> float:
    """Plug-in regularity statistic R(h, g); negative finite-sample values kept.

    R = sum_{a,b} t_hat(h (+)_{a,b} h, g) - |V(h)|^2 t_hat(h,g)^2.
    """
    if g.n < 2 * h.k - 1:
        raise GraphSizeError(
            f"graph has {g.n} vertices; largest vertex join of a {h.k}-vertex "
            f"motif needs {2 * h.k - 1}")
    groups: dict = {}
    for a in range(1, h.k + 1):
        for b in range(1, h.k + 1):
            join = vertex_join(h, a, h, b)
            try:
                key = join.canonical_key()
            except MotifSizeError:
                key = (a, b)
            groups.setdefault(key, [0, join])
            groups[key][0] += 1
    s = 0.0
    for count, join in groups.values():
        s += count * density_hat_t(join, g)
    return s - h.k ** 2 * density_hat_t(h, g) ** 2
