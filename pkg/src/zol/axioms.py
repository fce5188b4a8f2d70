"""Extension axioms, multiplicity, saturation, and substitution image sets.

An extension pair (A, B) with a distinguished strong embedding of A into B
induces the axiom "every copy of A extends to a copy of B". Multiplicity
strengthens this to counting: the largest m such that every copy of A has
m extensions to B that are pairwise disjoint outside the copy of A. In
geometric mode all copies are required to have closed images.
"""

from dataclasses import dataclass
from itertools import permutations

from .errors import BudgetExceeded
from .pregeometry import TrivialGeometry
from .structures import (Structure, enumerate_embeddings, enumerate_structures,
                         induced_substructure, is_embedding,
                         relabel_structure, substitute)

GF2_PAIR_DIM_BUDGET = 3


@dataclass(frozen=True)
class ExtensionPair:
    small: Structure
    large: Structure
    inclusion: tuple  # inclusion[i-1] is the image of small's element i

    def __post_init__(self):
        a, b = self.small, self.large
        if a.vocab != b.vocab:
            raise ValueError("extension pair across different vocabularies")
        if a.n >= b.n:
            raise ValueError("the small side must be a proper substructure")
        if len(self.inclusion) != a.n:
            raise ValueError("inclusion must be total on the small universe")
        f = {i + 1: v for i, v in enumerate(self.inclusion)}
        if not is_embedding(f, a, b):
            raise ValueError("inclusion is not a strong embedding")

    @property
    def site(self):
        return frozenset(self.inclusion)

    def describe(self) -> str:
        return (f"pair(|A|={self.small.n}, |B|={self.large.n}, "
                f"site={sorted(self.site)})")


def extension_pair(small: Structure, large: Structure,
                   inclusion=None) -> ExtensionPair:
    """Build a pair; inclusion defaults to the initial-segment identity."""
    if inclusion is None:
        inclusion = tuple(range(1, small.n + 1))
    return ExtensionPair(small, large, tuple(inclusion))


def _closed_image(f: dict, g, n: int) -> bool:
    return g.is_closed(set(f.values()), n)


def _base_embeddings(m: Structure, p: ExtensionPair, g):
    for f in enumerate_embeddings(p.small, m, mode="strong"):
        if _closed_image(f, g, m.n):
            yield f


def _extensions(m: Structure, p: ExtensionPair, sigma: dict, g):
    partial = {p.inclusion[j - 1]: sigma[j] for j in sigma}
    for f in enumerate_embeddings(p.large, m, partial=partial, mode="strong"):
        if _closed_image(f, g, m.n):
            yield f


def satisfies_extension_axiom(m: Structure, p: ExtensionPair, g=None) -> bool:
    """True iff every copy of the small side extends to the large side."""
    g = g or TrivialGeometry()
    for sigma in _base_embeddings(m, p, g):
        for _ in _extensions(m, p, sigma, g):
            break
        else:
            return False
    return True


def _max_disjoint_packing(parts) -> int:
    # exact maximum number of pairwise disjoint sets, branch and bound
    parts = sorted(set(parts), key=len)
    best = 0

    def walk(i, used, count):
        nonlocal best
        if count > best:
            best = count
        if count + len(parts) - i <= best:
            return
        for j in range(i, len(parts)):
            part = parts[j]
            if used & part:
                continue
            walk(j + 1, used | part, count + 1)

    walk(0, frozenset(), 0)
    return best


def multiplicity(m: Structure, p: ExtensionPair, g=None) -> int:
    """Exact multiplicity of m with respect to an extension pair.

    The value is min over copies sigma of the small side of the largest
    family of extensions to the large side whose images pairwise intersect
    exactly in sigma's image. When NO copy of the small side exists the
    axiom is vacuous at every m; that case returns the sentinel m.n + 1,
    one more than any packing can reach.
    """
    g = g or TrivialGeometry()
    least = None
    for sigma in _base_embeddings(m, p, g):
        base = frozenset(sigma.values())
        parts = {frozenset(f.values()) - base
                 for f in _extensions(m, p, sigma, g)}
        if not parts:
            return 0
        packing = _max_disjoint_packing(parts)
        if least is None or packing < least:
            least = packing
            if least == 0:
                return 0
    if least is None:
        return m.n + 1
    return least


# ---------------------------------------------------------------------------
# enumerating the axiom pairs of a class

def _normalize_pair(b: Structure, site) -> tuple:
    # least relabelling of b sending the site to an initial segment;
    # the key identifies pairs up to joint isomorphism
    site = frozenset(site)
    a_size = len(site)
    best = None
    for perm in permutations(range(1, b.n + 1)):
        maps_site = all(perm[e - 1] <= a_size for e in site)
        if not maps_site:
            continue
        mapping = {i + 1: perm[i] for i in range(b.n)}
        cand = relabel_structure(b, mapping).rels
        if best is None or cand < best:
            best = cand
    return best


def _gf2_maps(g):
    # all linear bijections of the ambient space, as element relabellings
    d = g.ambient_dim
    if d > GF2_PAIR_DIM_BUDGET:
        raise BudgetExceeded(
            f"linear relabelling enumeration is capped at dimension "
            f"{GF2_PAIR_DIM_BUDGET}")
    n = g.universe_size
    vectors = list(range(1, n))  # nonzero vectors

    def independent(chosen, v):
        span = {0}
        for b in chosen + [v]:
            if b in span:
                return False
            span |= {w ^ b for w in span}
        return True

    bases = []

    def grow(chosen):
        if len(chosen) == d:
            bases.append(tuple(chosen))
            return
        for v in vectors:
            if independent(chosen, v):
                chosen.append(v)
                grow(chosen)
                chosen.pop()

    grow([])
    maps = []
    for basis in bases:
        mapping = {}
        for e in range(1, n + 1):
            v = e - 1
            image = 0
            for bit, b in enumerate(basis):
                if v >> bit & 1:
                    image ^= b
            mapping[e] = image + 1
        maps.append(mapping)
    return maps


def all_k_extension_pairs(c, g, k: int):
    """Every extension pair the class allows at level k, deduplicated.

    With the trivial geometry the large side has at most k+1 elements and
    the small side ranges over all proper subsets. With a gf2 geometry the
    large side is a whole space of dimension at most k+1 and the small
    side ranges over proper subspaces; deduplication then quotients by
    linear relabellings only.
    """
    from .classes import is_permitted
    g = g or TrivialGeometry()
    pairs = []
    seen = set()
    if g.kind == "trivial":
        for b_size in range(1, k + 2):
            for b in enumerate_structures(c.vocab, b_size,
                                          filter=lambda m: is_permitted(c, m)):
                sites = sorted(
                    (s for s in _subsets(b_size) if len(s) < b_size),
                    key=lambda s: (len(s), sorted(s)))
                for site in sites:
                    rels = _normalize_pair(b, site)
                    key = (b.n, len(site), rels)
                    if key in seen:
                        continue
                    seen.add(key)
                    b_norm = Structure(b.vocab, b.n, rels)
                    small = induced_substructure(b_norm,
                                                 range(1, len(site) + 1))
                    pairs.append(extension_pair(small, b_norm))
        return pairs
    if g.kind == "gf2":
        from .pregeometry import GF2Geometry
        for d in range(0, min(k + 1, g.ambient_dim) + 1):
            sub = GF2Geometry(d)
            maps = _gf2_maps(sub)
            closed = [s for s in sub.closed_subsets()
                      if len(s) < sub.universe_size]
            for b in enumerate_structures(c.vocab, sub.universe_size,
                                          filter=lambda m: is_permitted(c, m)):
                for site in closed:
                    key = min(
                        (relabel_structure(b, phi).rels,
                         tuple(sorted(phi[e] for e in site)))
                        for phi in maps)
                    if (d, key) in seen:
                        continue
                    seen.add((d, key))
                    b_norm = Structure(b.vocab, b.n, key[0])
                    norm_site = key[1]
                    small = induced_substructure(b_norm, norm_site)
                    pairs.append(ExtensionPair(small, b_norm, norm_site))
        return pairs
    raise ValueError(f"unknown geometry kind {g.kind!r}")


def _subsets(n):
    out = []
    for mask in range(1 << n):
        out.append(frozenset(i + 1 for i in range(n) if mask >> i & 1))
    return out


def is_m_k_saturated(m: Structure, c, g, mult: int, k: int) -> bool:
    """Every one-dimension-step pair up to level k has multiplicity >= mult."""
    if mult <= 0:
        return True
    g = g or TrivialGeometry()
    if k <= 0:
        return True
    for p in all_k_extension_pairs(c, g, k - 1):
        if g.dim(p.site, p.large.n) + 1 != g.dim(set(p.large.universe),
                                                 p.large.n):
            continue
        if multiplicity(m, p, g) < mult:
            return False
    return True


# ---------------------------------------------------------------------------
# substitution images

def substitution_images(m: Structure, s_p: Structure, s_f: Structure):
    """All results of replacing one copy of s_f inside m by s_p.

    Copies are strong embeddings; each image transports s_p through the
    copy. Images are deduplicated as labelled structures; no copy of s_f
    means an empty set.
    """
    if s_p.n != s_f.n:
        raise ValueError("the substituted structures must have equal size")
    if s_p.vocab != m.vocab or s_f.vocab != m.vocab:
        raise ValueError("vocabulary mismatch")
    images = set()
    for sigma in enumerate_embeddings(s_f, m, mode="strong"):
        site = sorted(sigma.values())
        rank = {v: i + 1 for i, v in enumerate(site)}
        transported = relabel_structure(s_p, {j: rank[sigma[j]]
                                              for j in sigma})
        images.add(substitute(m, transported, site))
    return images
