"""Colourings of relational structures and the counting machinery
around them.

A colouring assigns each element one of l colours. A relational tuple is
satisfied multichromatically when its entries carry at least two
colours, and strongly when they carry pairwise distinct colours; the
plain notion is the default throughout.

The second half of the module builds two small auxiliary structures:
a link gadget whose endpoints are forced to share a colour in every
proper colouring, and a palette gadget whose proper colourings are
exactly the balanced ones. Together they let first-order formulas talk
about colours of a structure that carries no colour predicates.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .structures import (Structure, Vocabulary, find_embedding,
                         enumerate_embeddings, induced_substructure,
                         is_embedding, make_structure, relational_reduct)


# ---------------------------------------------------------------------------
# colourings as tuples, element e has colour gamma[e - 1]

def is_colouring(m: Structure, gamma, strong: bool = False) -> bool:
    """Does gamma satisfy every relational tuple of m?"""
    if len(gamma) != m.n:
        return False
    for i, sym in enumerate(m.vocab.symbols):
        if sym.colour_predicate:
            continue
        for tup in m.tuples(i):
            colours = {gamma[e - 1] for e in tup}
            if strong:
                if len(colours) < len(tup):
                    return False
            elif len(colours) < 2:
                return False
    return True


@lru_cache(maxsize=4096)
def _tuples_by_max(m: Structure):
    out = [[] for _ in range(m.n)]
    for i, sym in enumerate(m.vocab.symbols):
        if sym.colour_predicate:
            continue
        for tup in m.tuples(i):
            out[max(tup) - 1].append(tup)
    return tuple(tuple(ts) for ts in out)


def _violates(gamma, tup, strong):
    colours = {gamma[e - 1] for e in tup}
    if strong:
        return len(colours) < len(tup)
    return len(colours) < 2


def find_colouring(m: Structure, l: int, strong: bool = False):
    """A proper colouring with at most l colours, or None.

    The search fixes colours in order of first use, which loses nothing
    for existence and prunes the l! relabellings of each partition.
    """
    by_max = _tuples_by_max(m)
    gamma = [0] * m.n

    def walk(e, used):
        if e > m.n:
            return True
        for col in range(1, min(used + 1, l) + 1):
            gamma[e - 1] = col
            if not any(_violates(gamma, t, strong) for t in by_max[e - 1]):
                if walk(e + 1, max(used, col)):
                    return True
        gamma[e - 1] = 0
        return False

    if walk(1, 0):
        return tuple(gamma)
    return None


def is_l_colourable(m: Structure, l: int, strong: bool = False) -> bool:
    return find_colouring(m, l, strong) is not None


def enumerate_colourings(m: Structure, l: int, strong: bool = False,
                         canonical: bool = False):
    """All proper colourings with colours in [l].

    With canonical=True only first-use-ordered representatives are
    produced, one per partition into colour classes.
    """
    by_max = _tuples_by_max(m)
    gamma = [0] * m.n

    def walk(e, used):
        if e > m.n:
            yield tuple(gamma)
            return
        top = min(used + 1, l) if canonical else l
        for col in range(1, top + 1):
            gamma[e - 1] = col
            if not any(_violates(gamma, t, strong) for t in by_max[e - 1]):
                yield from walk(e + 1, max(used, col))
        gamma[e - 1] = 0

    yield from walk(1, 0)


def count_colour_partitions(m: Structure, l: int, strong: bool = False,
                            limit=None) -> int:
    """Number of proper colourings up to permuting colours, stopping
    early once limit is reached."""
    count = 0
    for _ in enumerate_colourings(m, l, strong, canonical=True):
        count += 1
        if limit is not None and count >= limit:
            break
    return count


def uniquely_colourable(m: Structure, l: int, strong: bool = False) -> bool:
    return count_colour_partitions(m, l, strong, limit=2) == 1


def colouring_from_predicates(m: Structure):
    """Read a colouring off the colour predicates, or None when some
    element does not hold exactly one of them."""
    colour_idx = [i for i, s in enumerate(m.vocab.symbols)
                  if s.colour_predicate]
    if not colour_idx:
        return None
    gamma = []
    for e in m.universe:
        held = [j + 1 for j, i in enumerate(colour_idx) if m.has(i, (e,))]
        if len(held) != 1:
            return None
        gamma.append(held[0])
    return tuple(gamma)


def class_sizes(gamma, l: int):
    sizes = [0] * l
    for col in gamma:
        sizes[col - 1] += 1
    return tuple(sizes)


# ---------------------------------------------------------------------------
# counting tuples against a fixed colouring

def multichromatic_tuple_count(sizes, m: int) -> int:
    """Ordered m-tuples (repeats allowed) meeting at least two colour
    classes: n^m minus the monochromatic ones."""
    n = sum(sizes)
    return n ** m - sum(p ** m for p in sizes)


def multichromatic_subset_count(sizes, i: int) -> int:
    """i-element subsets meeting at least two colour classes."""
    n = sum(sizes)
    return comb(n, i) - sum(comb(p, i) for p in sizes)


def surjection_count(i: int, k: int) -> int:
    """Surjections from a k-set onto an i-set, by inclusion-exclusion."""
    return sum((-1) ** j * comb(i, j) * (i - j) ** k for j in range(i + 1))


def elementary_symmetric(values, m: int):
    """e_m of the given values, by the product recurrence; works for any
    numeric type."""
    coeffs = [1] + [0] * m
    for v in values:
        for j in range(min(m, len(coeffs) - 1), 0, -1):
            coeffs[j] = coeffs[j] + v * coeffs[j - 1]
    return coeffs[m]


def rainbow_subset_count(sizes, m: int) -> int:
    """m-element subsets taking at most one element per colour class."""
    return elementary_symmetric(sizes, m)


def rainbow_tuple_count(sizes, m: int) -> int:
    """Ordered m-tuples with pairwise distinct entries and colours."""
    return factorial(m) * elementary_symmetric(sizes, m)


def power_sum(values, m: int):
    return sum(v ** m for v in values)


# ---------------------------------------------------------------------------
# richness

def is_rich(sizes, a: int) -> bool:
    """Every colour class holds at least n/a of the n elements."""
    n = sum(sizes)
    return all(p * a >= n for p in sizes)


def richness_threshold(l: int, max_arity: int) -> int:
    """Smallest a > l making the non-rich counting bounds effective for
    every tuple length up to max_arity."""
    if l < 2 or max_arity < 2:
        raise ValueError("need l >= 2 and max_arity >= 2")
    a = l + 1
    while True:
        if all((a - 1) ** m * l ** (m - 1) > a ** m * (l - 1) ** (m - 1)
               for m in range(2, max_arity + 1)):
            return a
        a += 1
        if a > 10 ** 6:
            raise RuntimeError("runaway threshold search")


def non_rich_multichromatic_bound(l: int, m: int, a: int) -> Fraction:
    """Upper bound, as a fraction of n^m, on multichromatic m-tuples
    under any colouring with a class below n/a."""
    return 1 - Fraction(a - 1, a) ** m / (l - 1) ** (m - 1)


def non_rich_rainbow_bound(l: int, m: int, a: int) -> Fraction:
    """Upper bound, as a fraction of n^m, on rainbow m-subsets under any
    colouring with a class below n/a."""
    return (Fraction(comb(l - 1, m), (l - 1) ** m)
            + Fraction(comb(l - 1, m - 1), a * (l - 1) ** (m - 1)))


# ---------------------------------------------------------------------------
# gadgets

@dataclass(frozen=True)
class LinkGadget:
    """Structure whose last two elements get equal colours in every
    proper colouring."""
    structure: Structure
    a: int
    b: int


@dataclass(frozen=True)
class PaletteGadget:
    """Structure whose proper colourings are exactly the balanced
    partitions; carries one such colouring and its equal-colour pairs."""
    structure: Structure
    colouring: tuple
    same_pairs: frozenset


def _gadget_symbol(vocab: Vocabulary, l: int, strong: bool):
    if vocab.colour_names():
        raise ValueError("gadgets are built over colour-free vocabularies")
    if strong:
        for i, sym in enumerate(vocab.symbols):
            if 2 <= sym.arity <= l:
                return i, sym
        raise ValueError(f"no symbol of arity between 2 and {l}")
    rel = [(i, s) for i, s in enumerate(vocab.symbols)]
    if not rel:
        raise ValueError("empty vocabulary")
    arity = min(s.arity for _, s in rel)
    if arity < 2:
        raise ValueError("gadgets need a symbol of arity at least 2")
    for i, sym in rel:
        if sym.arity == arity:
            return i, sym


def _all_tuples(sym, elements):
    if sym.symmetric_irreflexive:
        return [tuple(sorted(c))
                for c in itertools.combinations(sorted(elements), sym.arity)]
    return list(itertools.permutations(elements, sym.arity))


def build_colour_link(vocab: Vocabulary, l: int,
                      strong: bool = False) -> LinkGadget:
    """Two elements plus ballast forcing them to share a colour.

    Conceptually on {0, .., size-1}: every tuple of the chosen symbol is
    present within the complement of 0 and within the complement of 1,
    so each complement must be coloured as tightly as possible and the
    two excluded elements inherit the same colour. They are relabelled
    to the two largest labels.
    """
    if l < 2:
        raise ValueError("need at least two colours")
    _, sym = _gadget_symbol(vocab, l, strong)
    r = sym.arity
    size = l + 1 if strong else (r - 1) * l + 1
    conceptual = list(range(size))
    relabel = {0: size - 1, 1: size}
    relabel.update({j: j - 1 for j in range(2, size)})
    tuples = set()
    for excluded in (0, 1):
        rest = [relabel[j] for j in conceptual if j != excluded]
        tuples.update(_all_tuples(sym, rest))
    s = make_structure(vocab, size, {sym.name: sorted(tuples)})
    return LinkGadget(s, size - 1, size)


def verify_colour_link(g: LinkGadget, l: int, strong: bool = False) -> bool:
    """Exhaustively recheck the link gadget's defining properties."""
    found = False
    for gamma in enumerate_colourings(g.structure, l, strong, canonical=True):
        found = True
        if gamma[g.a - 1] != gamma[g.b - 1]:
            return False
        if len(set(gamma)) != l:
            return False
    return found


def build_palette(vocab: Vocabulary, l: int,
                  strong: bool = False) -> PaletteGadget:
    """A structure coloured properly by exactly the balanced partitions.

    All tuples of the chosen symbol are present, so each colour class
    must stay below the arity; the size makes that a tight fit.
    """
    if l < 2:
        raise ValueError("need at least two colours")
    _, sym = _gadget_symbol(vocab, l, strong)
    r = sym.arity
    u = l if strong else l * (r - 1)
    elements = list(range(1, u + 1))
    s = make_structure(vocab, u, {sym.name: sorted(_all_tuples(sym,
                                                                elements))})
    gamma = tuple((j - 1) % l + 1 for j in elements)
    same = frozenset(frozenset((x, y))
                     for x in elements for y in elements
                     if x < y and gamma[x - 1] == gamma[y - 1])
    return PaletteGadget(s, gamma, same)


def _balanced_colourings(n, l):
    size = n // l
    if size * l != n:
        return
    counts = [0] * (l + 1)
    gamma = [0] * n

    def walk(e):
        if e > n:
            yield tuple(gamma)
            return
        for col in range(1, l + 1):
            if counts[col] < size:
                counts[col] += 1
                gamma[e - 1] = col
                yield from walk(e + 1)
                counts[col] -= 1

    yield from walk(1)


def verify_palette(g: PaletteGadget, l: int, strong: bool = False) -> bool:
    """Exhaustively recheck the palette gadget's defining properties."""
    m = g.structure
    if not is_colouring(m, g.colouring, strong):
        return False
    if find_colouring(m, l - 1, strong) is not None:
        return False
    for gamma in _balanced_colourings(m.n, l):
        if not is_colouring(m, gamma, strong):
            return False
    if any(g.colouring[j - 1] != j for j in range(1, l + 1)):
        return False
    recomputed = frozenset(frozenset((x, y))
                           for x in m.universe for y in m.universe
                           if x < y
                           and g.colouring[x - 1] == g.colouring[y - 1])
    return recomputed == g.same_pairs


# ---------------------------------------------------------------------------
# colour talk without colour predicates

def _strip(m: Structure, vocab: Vocabulary) -> Structure:
    if m.vocab == vocab:
        return m
    reduced = relational_reduct(m)
    if reduced.vocab != vocab:
        raise ValueError("structure and gadget vocabularies disagree")
    return reduced


def same_colour_linked(m: Structure, x: int, y: int,
                       link: LinkGadget) -> bool:
    """Does a copy of the link gadget tie x and y together (or x = y)?"""
    if x == y:
        return True
    mm = _strip(m, link.structure.vocab)
    partial = {link.a: x, link.b: y}
    return find_embedding(link.structure, mm, partial=partial,
                          mode="strong") is not None


def anchors_palette(m: Structure, xs, palette: PaletteGadget,
                    link: LinkGadget) -> bool:
    """Is xs an induced palette copy whose link pattern matches the
    palette's equal-colour pairs exactly?"""
    mm = _strip(m, palette.structure.vocab)
    u = palette.structure.n
    if len(xs) != u or len(set(xs)) != u:
        return False
    f = {j: xs[j - 1] for j in range(1, u + 1)}
    if not is_embedding(f, palette.structure, mm):
        return False
    for i in range(1, u + 1):
        for j in range(i + 1, u + 1):
            want = frozenset((i, j)) in palette.same_pairs
            if same_colour_linked(mm, xs[i - 1], xs[j - 1], link) != want:
                return False
    return True


def satisfies_colour_compatible_axiom(m: Structure, a, b: Structure,
                                      l: int, strong: bool = False) -> bool:
    """Extension axiom for a pair (a, b) relative to gadget-defined
    colours.

    For every proper colouring of b, every palette copy in m with the
    right link pattern, and every induced copy of a whose elements link
    to the palette anchors of their colours, some completion to an
    induced copy of b must keep all elements linked to the anchors of
    their colours. The empty a is allowed and drops the premise.
    """
    vocab = b.vocab
    if a is None:
        a = make_structure(vocab, 0, {})
    if induced_substructure(b, range(1, a.n + 1)) != a:
        raise ValueError("first structure must be the initial segment "
                         "of the second")
    colourings = list(enumerate_colourings(b, l, strong, canonical=True))
    if not colourings:
        raise ValueError("the extending structure is not colourable")
    link = build_colour_link(vocab, l, strong)
    palette = build_palette(vocab, l, strong)
    mm = _strip(m, vocab)
    u = palette.structure.n
    anchor_tuples = [xs for xs in itertools.permutations(mm.universe, u)
                     if anchors_palette(mm, xs, palette, link)]
    for gamma in colourings:
        for xs in anchor_tuples:
            for ys in itertools.permutations(mm.universe, a.n):
                f = {j: ys[j - 1] for j in range(1, a.n + 1)}
                if not is_embedding(f, a, mm):
                    continue
                if not all(same_colour_linked(mm, xs[gamma[j - 1] - 1],
                                              ys[j - 1], link)
                           for j in range(1, a.n + 1)):
                    continue
                met = False
                for emb in enumerate_embeddings(b, mm, partial=dict(f),
                                                mode="strong"):
                    if all(same_colour_linked(mm, xs[gamma[j - 1] - 1],
                                              emb[j], link)
                           for j in range(a.n + 1, b.n + 1)):
                        met = True
                        break
                if not met:
                    return False
    return True
