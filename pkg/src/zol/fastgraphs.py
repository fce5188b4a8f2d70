"""Vectorised exact counts over all graphs on a small labelled universe.

Everything here works on the single-symmetric-binary-symbol shape: a
graph on [n] is the integer whose bits are its edge slots, in the same
slot order the structure module uses, so masks convert to structures
directly. Arrays hold every mask at once; n is capped where the arrays
would stop fitting in memory.
"""

from itertools import combinations
from math import comb

import numpy as np

from .classes import AllStructures, ClassSpec, ForbiddenWeak
from .errors import BudgetExceeded
from .structures import canonical_form, graph

MASK_MAX_N = 7
CODE_MAX_K = 3


def applicable(c: ClassSpec):
    """'all' or 'triangle-free' when the fast kernels cover the class,
    else None."""
    if len(c.vocab.symbols) != 1:
        return None
    sym = c.vocab.symbols[0]
    if sym.arity != 2 or not sym.symmetric_irreflexive:
        return None
    if isinstance(c.rule, AllStructures):
        return "all"
    if isinstance(c.rule, ForbiddenWeak) and len(c.rule.members) == 1:
        f = c.rule.members[0]
        k3 = graph(3, [(1, 2), (1, 3), (2, 3)], symbol=sym.name)
        if f.n == 3 and canonical_form(f).rels == canonical_form(k3).rels:
            return "triangle-free"
    return None


def pair_bits(n: int):
    bits = {}
    b = 0
    for u in range(1, n + 1):
        for v in range(u + 1, n + 1):
            bits[(u, v)] = b
            b += 1
    return bits


def all_masks(n: int):
    if n > MASK_MAX_N:
        raise BudgetExceeded(f"mask arrays stop at n = {MASK_MAX_N}")
    return np.arange(1 << comb(n, 2), dtype=np.uint32)


def _adj(masks, bits, u, v):
    b = bits[(u, v) if u < v else (v, u)]
    return ((masks >> np.uint32(b)) & np.uint32(1)).astype(np.uint8)


def member_mask(kind: str, masks, n: int):
    if kind == "all":
        return np.ones(len(masks), dtype=bool)
    if kind != "triangle-free":
        raise ValueError(f"unknown kind {kind!r}")
    bits = pair_bits(n)
    ok = np.ones(len(masks), dtype=bool)
    for (x, y, z) in combinations(range(1, n + 1), 3):
        tri = (_adj(masks, bits, x, y) & _adj(masks, bits, x, z)
               & _adj(masks, bits, y, z))
        ok &= tri == 0
    return ok


def star_event_mask(masks, n: int, m: int):
    """Some edge present, and every nonadjacent pair has at least m
    common neighbours."""
    bits = pair_bits(n)
    ok = masks != 0
    for u in range(1, n + 1):
        for v in range(u + 1, n + 1):
            cnt = np.zeros(len(masks), dtype=np.uint8)
            for w in range(1, n + 1):
                if w in (u, v):
                    continue
                cnt += _adj(masks, bits, u, w) & _adj(masks, bits, v, w)
            ok &= (_adj(masks, bits, u, v) == 1) | (cnt >= m)
    return ok


def all_k_ext_mask(masks, n: int, k: int, kind: str):
    """Every extension axiom with at most k constrained elements holds.

    Works one point at a time: for each set X of at most k elements,
    each subset of X is a required trace of some outside element, unless
    the trace would leave the class (an edge inside the trace, in the
    triangle-free case).
    """
    if k > CODE_MAX_K:
        raise BudgetExceeded(f"trace codes stop at k = {CODE_MAX_K}")
    bits = pair_bits(n)
    ok = np.ones(len(masks), dtype=bool)
    for size in range(k + 1):
        for xs in combinations(range(1, n + 1), size):
            seen = np.zeros(len(masks), dtype=np.uint8)
            for w in range(1, n + 1):
                if w in xs:
                    continue
                code = np.zeros(len(masks), dtype=np.uint8)
                for i, x in enumerate(xs):
                    code |= _adj(masks, bits, w, x) << np.uint8(i)
                seen |= np.left_shift(np.uint8(1), code)
            for s in range(1 << size):
                realized = ((seen >> np.uint8(s)) & 1).astype(bool)
                if kind == "triangle-free":
                    escape = np.zeros(len(masks), dtype=bool)
                    chosen = [x for i, x in enumerate(xs) if s >> i & 1]
                    for a, b in combinations(chosen, 2):
                        escape |= _adj(masks, bits, a, b).astype(bool)
                    ok &= escape | realized
                else:
                    ok &= realized
    return ok


def count_star(kind: str, n: int, m: int):
    """(hits, members) for the star event among members on [n]."""
    masks = all_masks(n)
    members = member_mask(kind, masks, n)
    event = star_event_mask(masks, n, m)
    return int(np.count_nonzero(event & members)), int(
        np.count_nonzero(members))


def count_all_k_ext(kind: str, n: int, k: int):
    """(hits, members) for the all-k-extension event among members."""
    masks = all_masks(n)
    members = member_mask(kind, masks, n)
    event = all_k_ext_mask(masks, n, k, kind)
    return int(np.count_nonzero(event & members)), int(
        np.count_nonzero(members))
