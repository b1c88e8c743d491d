"""Small-graph algebra: motifs, automorphisms, and join operations.

Motifs are simple labeled graphs on vertex set {1..k}.  User-facing motifs
are capped at K_MAX vertices so the exhaustive permutation algorithms stay
exact and fast; join operations may produce graphs up to 2*K_MAX-1 vertices,
which are valid intermediates for density formulas.  Joins (vertex join,
weak/strong edge join) glue two motifs together; their homomorphism densities
parameterize every variance formula in the package.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

K_MAX = 8

# Joins of two K_MAX-vertex motifs are the largest graphs we ever build.
_HARD_VERTEX_CAP = 2 * K_MAX - 1

# 10! ~ 3.6M permutations is the practical limit for exhaustive |Aut|.
_AUT_CAP = 10

Edge = tuple[int, int]


class MotifSizeError(ValueError):
    """Motif exceeds the cap of an exhaustive exact algorithm."""


def _norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Motif:
    """Simple labeled graph on vertices {1..k} with cached automorphism count."""

    k: int
    edges: frozenset[Edge]
    _aut: int | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"motif needs at least 2 vertices, got k={self.k}")
        if self.k > _HARD_VERTEX_CAP:
            raise MotifSizeError(f"graph has {self.k} vertices, hard cap is {_HARD_VERTEX_CAP}")
        for (u, v) in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (1 <= u < v <= self.k):
                raise ValueError(f"edge {(u, v)} not a sorted pair in 1..{self.k}")

    @classmethod
    def from_edges(cls, k: int, edges) -> "Motif":
        return cls(k, frozenset(_norm_edge(u, v) for u, v in edges))

    @property
    def aut(self) -> int:
        """|Aut|: number of permutations of {1..k} preserving the edge set."""
        if self._aut is None:
            if self.k > _AUT_CAP:
                raise MotifSizeError(
                    f"automorphism count of a {self.k}-vertex graph exceeds the "
                    f"exhaustive cap ({_AUT_CAP})")
            object.__setattr__(self, "_aut", _automorphism_count(self.k, self.edges))
        return self._aut

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return _norm_edge(u, v) in self.edges

    def ordered_edges(self) -> list[Edge]:
        """E+: both orientations of every edge, sorted for determinism."""
        out = []
        for (u, v) in self.edges:
            out.append((u, v))
            out.append((v, u))
        return sorted(out)

    def neighbors(self, v: int) -> list[int]:
        return sorted(u for e in self.edges for u in e if v in e and u != v)

    def degree_sequence(self) -> tuple[int, ...]:
        deg = [0] * self.k
        for (u, v) in self.edges:
            deg[u - 1] += 1
            deg[v - 1] += 1
        return tuple(sorted(deg))

    def relabel(self, perm: dict[int, int]) -> "Motif":
        """Apply a bijection {1..k}->{1..k} to the vertex labels."""
        return Motif.from_edges(self.k, ((perm[u], perm[v]) for u, v in self.edges))

    def canonical_key(self):
        """Lexicographically smallest edge list over all relabelings."""
        if self.k > K_MAX:
            raise MotifSizeError(f"canonical form capped at {K_MAX} vertices, got {self.k}")
        best = None
        for p in itertools.permutations(range(1, self.k + 1)):
            perm = dict(zip(range(1, self.k + 1), p))
            cand = tuple(sorted(_norm_edge(perm[u], perm[v]) for u, v in self.edges))
            if best is None or cand < best:
                best = cand
        return (self.k, best)

    def __repr__(self):
        es = ",".join(f"{u}-{v}" for u, v in sorted(self.edges))
        return f"Motif(k={self.k}, edges=[{es}])"


@dataclass(frozen=True)
class MultiMotif:
    """Loopless multigraph on {1..k}: unordered pairs with multiplicities >= 1."""

    k: int
    edges: tuple[tuple[Edge, int], ...]

    def __post_init__(self):
        if self.k > _HARD_VERTEX_CAP:
            raise MotifSizeError(f"graph has {self.k} vertices, hard cap is {_HARD_VERTEX_CAP}")
        seen = set()
        for (u, v), m in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (1 <= u < v <= self.k):
                raise ValueError(f"edge {(u, v)} not a sorted pair in 1..{self.k}")
            if m < 1:
                raise ValueError(f"multiplicity {m} < 1 on edge {(u, v)}")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge entry {(u, v)}")
            seen.add((u, v))

    @classmethod
    def from_multiplicities(cls, k: int, mult: dict[Edge, int]) -> "MultiMotif":
        items = tuple(sorted((_norm_edge(u, v), m) for (u, v), m in mult.items()))
        return cls(k, items)

    @property
    def multiplicities(self) -> dict[Edge, int]:
        return dict(self.edges)

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.edges)

    def is_simple(self) -> bool:
        return all(m == 1 for _, m in self.edges)

    def as_motif(self) -> Motif:
        if not self.is_simple():
            raise ValueError("multigraph has a repeated edge; not a simple motif")
        return Motif.from_edges(self.k, (e for e, _ in self.edges))

    def drop_edge(self, u: int, v: int) -> "MultiMotif":
        mult = self.multiplicities
        mult.pop(_norm_edge(u, v), None)
        return MultiMotif.from_multiplicities(self.k, mult)

    def canonical_key(self):
        if self.k > K_MAX:
            raise MotifSizeError(f"canonical form capped at {K_MAX} vertices, got {self.k}")
        best = None
        for p in itertools.permutations(range(1, self.k + 1)):
            perm = dict(zip(range(1, self.k + 1), p))
            cand = tuple(sorted((_norm_edge(perm[u], perm[v]), m) for (u, v), m in self.edges))
            if best is None or cand < best:
                best = cand
        return (self.k, best)

    def __repr__(self):
        es = ",".join(f"{u}-{v}x{m}" if m > 1 else f"{u}-{v}" for (u, v), m in self.edges)
        return f"MultiMotif(k={self.k}, edges=[{es}])"


def as_multimotif(h: Motif | MultiMotif) -> MultiMotif:
    if isinstance(h, MultiMotif):
        return h
    return MultiMotif.from_multiplicities(h.k, {e: 1 for e in h.edges})


def _automorphism_count(k: int, edges: frozenset[Edge]) -> int:
    count = 0
    for p in itertools.permutations(range(1, k + 1)):
        perm = dict(zip(range(1, k + 1), p))
        if all(_norm_edge(perm[u], perm[v]) in edges for u, v in edges):
            count += 1
    return count


def automorphism_count(m: Motif) -> int:
    """|Aut(m)| by exhaustive permutation check (recomputed, ignores the cache)."""
    if m.k > K_MAX:
        raise MotifSizeError(f"motif has {m.k} vertices, cap is {K_MAX}")
    return _automorphism_count(m.k, m.edges)


def is_isomorphic(m1: Motif, m2: Motif) -> bool:
    """Edge-preserving bijection test by exhaustive search with cheap pre-filters."""
    if max(m1.k, m2.k) > K_MAX:
        raise MotifSizeError(f"isomorphism test capped at {K_MAX} vertices")
    if m1.k != m2.k or m1.n_edges != m2.n_edges:
        return False
    if m1.degree_sequence() != m2.degree_sequence():
        return False
    for p in itertools.permutations(range(1, m1.k + 1)):
        perm = dict(zip(range(1, m1.k + 1), p))
        if all(_norm_edge(perm[u], perm[v]) in m2.edges for u, v in m1.edges):
            return True
    return False


def vertex_join(h1: Motif, a: int, h2: Motif, b: int) -> Motif:
    """Identify vertex a of h1 with vertex b of h2.

    The result keeps h1's labels 1..k1 (the merged vertex is a) and h2's
    remaining vertices follow as k1+1, k1+2, ... in their original order,
    so joins are deterministic and fixtures stable.
    """
    if not (1 <= a <= h1.k):
        raise ValueError(f"vertex {a} not in 1..{h1.k}")
    if not (1 <= b <= h2.k):
        raise ValueError(f"vertex {b} not in 1..{h2.k}")
    relabel = {}
    nxt = h1.k + 1
    for v in range(1, h2.k + 1):
        if v == b:
            relabel[v] = a
        else:
            relabel[v] = nxt
            nxt += 1
    edges = set(h1.edges)
    edges.update(_norm_edge(relabel[u], relabel[v]) for u, v in h2.edges)
    return Motif(h1.k + h2.k - 1, frozenset(edges))


def edge_join(h1: Motif, pair1: Edge, h2: Motif, pair2: Edge,
              mode: str, strict: bool = True) -> MultiMotif:
    """Identify pair1 of h1 with pair2 of h2 (first with first, second with second).

    mode="weak" keeps a single edge between the identified vertices; "strong"
    keeps both.  With strict=True both pairs must be ordered edges (members of
    E+); strict=False extends the operation to arbitrary ordered vertex pairs,
    where the merged pair simply carries however many edges the operands
    contribute (so weak and strong coincide when either pair is a non-edge).
    """
    if mode not in ("weak", "strong"):
        raise ValueError(f"mode must be 'weak' or 'strong', got {mode!r}")
    a, b = pair1
    c, d = pair2
    for (u, v, h) in ((a, b, h1), (c, d, h2)):
        if u == v or not (1 <= u <= h.k) or not (1 <= v <= h.k):
            raise ValueError(f"pair {(u, v)} is not a pair of distinct vertices of {h!r}")
    if strict:
        if not h1.has_edge(a, b):
            raise ValueError(f"pair {pair1} is not an edge of {h1!r}")
        if not h2.has_edge(c, d):
            raise ValueError(f"pair {pair2} is not an edge of {h2!r}")
    relabel = {c: a, d: b}
    nxt = h1.k + 1
    for v in range(1, h2.k + 1):
        if v not in (c, d):
            relabel[v] = nxt
            nxt += 1
    mult: dict[Edge, int] = {e: 1 for e in h1.edges}
    for u, v in h2.edges:
        e = _norm_edge(relabel[u], relabel[v])
        mult[e] = mult.get(e, 0) + 1
    if mode == "weak":
        merged = _norm_edge(a, b)
        if merged in mult:
            mult[merged] = 1
    return MultiMotif.from_multiplicities(h1.k + h2.k - 2, mult)


# -- common motifs and the literal format ------------------------------------

def clique(k: int) -> Motif:
    return Motif.from_edges(k, itertools.combinations(range(1, k + 1), 2))


def cycle(k: int) -> Motif:
    if k < 3:
        raise ValueError("cycle needs at least 3 vertices")
    return Motif.from_edges(k, [(i, i + 1) for i in range(1, k)] + [(1, k)])


def path(k: int) -> Motif:
    """Path on k vertices (k-1 edges)."""
    return Motif.from_edges(k, [(i, i + 1) for i in range(1, k)])


def star(leaves: int) -> Motif:
    """K_{1,leaves} with the center labeled 1."""
    return Motif.from_edges(leaves + 1, [(1, j) for j in range(2, leaves + 2)])


_EXPLICIT_RE = re.compile(r"^n=(\d+);edges=(.*)$")


def parse_motif(text: str) -> Motif:
    """Parse a motif literal: "k3", "c4", "p3", "k12", or "n=4;edges=1-2,2-3,...".

    "kN" is the N-clique, "cN" the N-cycle, "pN" the path on N vertices, and
    "k1M" the star K_{1,M}.  Parsed motifs respect the K_MAX cap.
    """
    s = text.strip().lower()
    mo = _EXPLICIT_RE.match(s)
    if mo:
        k = int(mo.group(1))
        edges = []
        body = mo.group(2).strip()
        if body:
            for tok in body.split(","):
                u, _, v = tok.strip().partition("-")
                edges.append((int(u), int(v)))
        result = Motif.from_edges(k, edges)
    else:
        mo = re.match(r"^k1(\d)$", s)
        if mo:
            result = star(int(mo.group(1)))
        elif (mo := re.match(r"^k(\d+)$", s)):
            result = clique(int(mo.group(1)))
        elif (mo := re.match(r"^c(\d+)$", s)):
            result = cycle(int(mo.group(1)))
        elif (mo := re.match(r"^p(\d+)$", s)):
            result = path(int(mo.group(1)))
        else:
            raise ValueError(f"unrecognized motif literal {text!r}")
    if result.k > K_MAX:
        raise MotifSizeError(f"motif {text!r} has {result.k} vertices, cap is {K_MAX}")
    return result


K2 = clique(2)
K3 = clique(3)
C4 = cycle(4)
K12 = star(2)
