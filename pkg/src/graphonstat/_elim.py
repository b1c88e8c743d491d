"""Sum-product contraction over factor lists (variable elimination).

Homomorphism sums over small template graphs are products of edge factors
summed over all vertex assignments.  Eliminating one vertex at a time keeps
the cost at B^(treewidth+1) instead of B^k, which is what makes exact block
densities and large-n homomorphism counts feasible.  The same engine serves
float-weighted graphon sums and exact int64 counting.
"""

from __future__ import annotations

import numpy as np

# Largest intermediate tensor we are willing to materialize (entries).
SIZE_LIMIT = 1 << 27

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


class ContractionSizeError(MemoryError):
    """An intermediate tensor would exceed the size limit."""


def contract(factors, domains, keep=(), size_limit=SIZE_LIMIT):
    """Sum the product of factors over every variable not listed in `keep`.

    factors: iterable of (vars, array) with array.shape matching the domain
    sizes of vars; domains: dict var -> domain size; keep: ordered variables
    of the result.  Returns an ndarray indexed by `keep` (0-d if empty).
    Variables are eliminated greedily by smallest merged-factor size, which is
    optimal enough for graphs of <= 15 vertices.
    """
    factors = [(tuple(vs), np.asarray(arr)) for vs, arr in factors]
    keep = tuple(keep)
    for vs, arr in factors:
        if arr.shape != tuple(domains[v] for v in vs):
            raise ValueError(f"factor on {vs} has shape {arr.shape}, "
                             f"expected {tuple(domains[v] for v in vs)}")
    integer = bool(factors) and all(np.issubdtype(a.dtype, np.integer) for _, a in factors)
    ones_dtype = np.int64 if integer else np.float64

    elim = [v for v in domains if v not in keep]
    touched = {v for vs, _ in factors for v in vs}
    for v in elim:
        if v not in touched:
            factors.append(((v,), np.ones(domains[v], dtype=ones_dtype)))

    while elim:
        best_v, best_cost = None, None
        for v in elim:
            merged = set()
            for vs, _ in factors:
                if v in vs:
                    merged.update(vs)
            merged.discard(v)
            cost = 1
            for u in merged:
                cost *= domains[u]
            if best_cost is None or cost < best_cost or \
                    (cost == best_cost and str(v) < str(best_v)):
                best_v, best_cost = v, cost
        if best_cost > size_limit:
            raise ContractionSizeError(
                f"eliminating variable {best_v!r} needs a tensor of {best_cost} entries "
                f"(limit {size_limit})")
        v = best_v
        elim.remove(v)
        group = [(vs, arr) for vs, arr in factors if v in vs]
        rest = [(vs, arr) for vs, arr in factors if v not in vs]
        out_vars = tuple(sorted({u for vs, _ in group for u in vs if u != v}, key=str))
        new = _einsum(group, out_vars, domains, ones_dtype)
        factors = rest + [(out_vars, new)]

    if not factors:
        return np.asarray(1.0)
    return _einsum(factors, keep, domains, ones_dtype)


def _einsum(group, out_vars, domains, ones_dtype):
    """einsum the factor group down to out_vars, summing everything else."""
    letters = {}

    def letter(u):
        if u not in letters:
            if len(letters) >= len(_LETTERS):
                raise ValueError("too many distinct variables for einsum")
            letters[u] = _LETTERS[len(letters)]
        return letters[u]

    subs = []
    ops = []
    for vs, arr in group:
        subs.append("".join(letter(u) for u in vs))
        ops.append(arr)
    for u in out_vars:
        if u not in letters:
            # keep-variable no factor mentions: broadcast via explicit ones
            subs.append(letter(u))
            ops.append(np.ones(domains[u], dtype=ones_dtype))
    out = "".join(letters[u] for u in out_vars)
    expr = ",".join(subs) + "->" + out
    return np.einsum(expr, *ops, optimize=True)
