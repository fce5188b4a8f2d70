"""Closure and dimension engines, and dimension-bounded reducts.

Two geometries are implemented. The trivial one closes nothing: every set
is closed and dimension is cardinality. The GF(2) one identifies element i
of a universe of size 2^k with the bit-vector i-1 in F_2^k and closes under
linear span, so element 1 is the zero vector and belongs to every closure.

A structure's d-reduct keeps colour predicates untouched and keeps a
relational tuple exactly when the dimension of its range is at most d, so
reducts grow back to the full structure as d reaches the maximal arity.
"""

from dataclasses import dataclass
from functools import lru_cache

from .errors import BudgetExceeded
from .structures import Structure, slot_tuples

CLOSED_SET_MAX_N = 16


@dataclass(frozen=True)
class TrivialGeometry:
    # universe_size is advisory: the trivial geometry works at every size
    universe_size: int | None = None

    kind = "trivial"

    def valid_n(self, n: int) -> bool:
        return n >= 0

    def closure(self, X, n=None) -> frozenset:
        return frozenset(X)

    def dim(self, X, n=None) -> int:
        return len(set(X))

    def is_closed(self, X, n=None) -> bool:
        return True

    def u_bound(self, d: int) -> int:
        return d

    def closed_subsets(self, n=None, max_dim=None):
        n = self.universe_size if n is None else n
        if n is None:
            raise ValueError("trivial geometry needs an explicit universe size "
                             "to enumerate closed sets")
        if n > CLOSED_SET_MAX_N:
            raise BudgetExceeded(
                f"closed-set enumeration is capped at n = {CLOSED_SET_MAX_N}")
        limit = n if max_dim is None else min(max_dim, n)
        out = []
        for mask in range(1 << n):
            X = frozenset(i + 1 for i in range(n) if mask >> i & 1)
            if len(X) <= limit:
                out.append(X)
        out.sort(key=lambda s: (len(s), sorted(s)))
        return out


@dataclass(frozen=True)
class GF2Geometry:
    ambient_dim: int

    kind = "gf2"

    def __post_init__(self):
        if self.ambient_dim < 0:
            raise ValueError("ambient dimension must be >= 0")

    @property
    def universe_size(self) -> int:
        return 1 << self.ambient_dim

    def valid_n(self, n: int) -> bool:
        return n == self.universe_size

    def _check_n(self, n):
        n = self.universe_size if n is None else n
        if not self.valid_n(n):
            raise ValueError(
                f"gf2 geometry of dimension {self.ambient_dim} lives on a "
                f"universe of size {self.universe_size}, got {n}")
        return n

    def closure(self, X, n=None) -> frozenset:
        n = self._check_n(n)
        span = {0}
        for e in X:
            if not 1 <= e <= n:
                raise ValueError(f"element {e} outside the universe")
            v = e - 1
            if v not in span:
                span |= {w ^ v for w in span}
        return frozenset(w + 1 for w in span)

    def dim(self, X, n=None) -> int:
        self._check_n(n)
        basis = []
        for e in set(X):
            v = e - 1
            for b in basis:
                v = min(v, v ^ b)
            if v:
                basis.append(v)
        return len(basis)

    def is_closed(self, X, n=None) -> bool:
        return self.closure(X, n) == frozenset(X)

    def u_bound(self, d: int) -> int:
        return 1 << d

    def closed_subsets(self, n=None, max_dim=None):
        n = self._check_n(n)
        if n > CLOSED_SET_MAX_N:
            raise BudgetExceeded(
                f"closed-set enumeration is capped at n = {CLOSED_SET_MAX_N}")
        return _gf2_closed_subsets(self.ambient_dim, max_dim)


@lru_cache(maxsize=None)
def _gf2_closed_subsets(ambient_dim, max_dim):
    g = GF2Geometry(ambient_dim)
    n = g.universe_size
    seen = set()
    # every subspace is the closure of some subset; the full power set is
    # affordable at the sizes the budget admits
    for mask in range(1 << n):
        X = [i + 1 for i in range(n) if mask >> i & 1]
        seen.add(g.closure(X))
    out = [s for s in seen
           if max_dim is None or g.dim(s) <= max_dim]
    out.sort(key=lambda s: (len(s), sorted(s)))
    return out


def parse_geometry(text: str):
    """Parse a CLI geometry selector: 'trivial' or 'gf2:<k>'."""
    if text == "trivial":
        return TrivialGeometry()
    if text.startswith("gf2:"):
        try:
            k = int(text[4:])
        except ValueError:
            raise ValueError(f"bad gf2 dimension in {text!r}") from None
        return GF2Geometry(k)
    raise ValueError(f"unknown geometry {text!r}")


# spec-shaped entry points bound to the geometry's own universe size

def closure(g, X):
    return g.closure(X)


def dimension(g, X):
    return g.dim(X)


def closed_sets(g, max_dim=None):
    return g.closed_subsets(max_dim=max_dim)


def d_reduct(m: Structure, g, d: int) -> Structure:
    """Drop relational tuples whose range has dimension above d."""
    if d < 0:
        raise ValueError("reduct dimension must be >= 0")
    masks = []
    for i, sym in enumerate(m.vocab.symbols):
        if sym.colour_predicate:
            masks.append(m.rels[i])
            continue
        slots = slot_tuples(sym, m.n)
        mask = 0
        rest = m.rels[i]
        while rest:
            low = rest & -rest
            idx = low.bit_length() - 1
            if g.dim(set(slots[idx]), m.n) <= d:
                mask |= low
            rest ^= low
        masks.append(mask)
    return Structure(m.vocab, m.n, tuple(masks))
