"""Class specifications and bounded checks of their structural properties.

A class is a vocabulary plus a membership rule: everything, forbidden
(weak or induced) substructures, or colour constraints. The checks in
this module are explicitly bounded searches: a "holds_up_to_bound"
verdict claims nothing beyond the stated size.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import AgreementError, BudgetExceeded
from .pregeometry import GF2Geometry, TrivialGeometry
from .structures import (RelationSymbol, Structure, Vocabulary, Witness,
                         canonical_form, enumerate_embeddings,
                         enumerate_structures, find_embedding, graph,
                         induced_substructure, make_structure,
                         relabel_structure, slot_index, slot_tuples,
                         substitute, vocabulary)

FREE_SLOT_BUDGET = 20


# ---------------------------------------------------------------------------
# rules

@dataclass(frozen=True)
class AllStructures:
    pass


@dataclass(frozen=True)
class ForbiddenWeak:
    members: tuple


@dataclass(frozen=True)
class ForbiddenInduced:
    members: tuple


@dataclass(frozen=True)
class Coloured:
    l: int
    strong: bool = False


@dataclass(frozen=True)
class Colourable:
    l: int
    strong: bool = False


def _validate_forbidden(vocab, members):
    if not members:
        raise ValueError("forbidden rule needs at least one member")
    for f in members:
        if f.vocab != vocab:
            raise ValueError("forbidden member over a different vocabulary")
        if not any(f.tuple_count(i) for i in range(len(vocab.symbols))):
            raise ValueError("forbidden members must carry a tuple")


@dataclass(frozen=True)
class ClassSpec:
    vocab: Vocabulary
    rule: object
    geometry: object = TrivialGeometry()

    def __post_init__(self):
        rule = self.rule
        if isinstance(rule, (ForbiddenWeak, ForbiddenInduced)):
            _validate_forbidden(self.vocab, rule.members)
        elif isinstance(rule, (Coloured, Colourable)):
            if rule.l < 2:
                raise ValueError("colour rules need at least two colours")
            arities = [s.arity for s in self.vocab.relational()]
            if rule.strong and arities and max(arities) > rule.l:
                raise ValueError(
                    "strong colour rules need every relational arity <= l")
            if self.geometry.kind != "trivial":
                raise ValueError(
                    "colour rules are implemented over the trivial geometry")
            n_colours = len(self.vocab.colour_names())
            if isinstance(rule, Coloured) and n_colours != rule.l:
                raise ValueError(
                    f"coloured rule with l={rule.l} needs exactly that many "
                    f"colour predicates, vocabulary has {n_colours}")
            if isinstance(rule, Colourable) and n_colours:
                raise ValueError(
                    "colourable rule works on colour-free vocabularies")
        elif not isinstance(rule, AllStructures):
            raise ValueError(f"unknown rule {rule!r}")

    @property
    def l(self):
        return getattr(self.rule, "l", None)


# ---------------------------------------------------------------------------
# membership

def _weakly_forbids(members, m: Structure) -> bool:
    return any(find_embedding(f, m, mode="weak") is not None
               for f in members)


def is_permitted(c: ClassSpec, m: Structure) -> bool:
    if m.vocab != c.vocab:
        raise ValueError("structure over a different vocabulary")
    rule = c.rule
    if isinstance(rule, AllStructures):
        return True
    if isinstance(rule, ForbiddenWeak):
        return not _weakly_forbids(rule.members, m)
    if isinstance(rule, ForbiddenInduced):
        return not any(find_embedding(f, m, mode="strong") is not None
                       for f in rule.members)
    if isinstance(rule, Coloured):
        colour_idx = [i for i, s in enumerate(c.vocab.symbols)
                      if s.colour_predicate]
        colour_of = {}
        for e in m.universe:
            held = [i for i in colour_idx if m.has(i, (e,))]
            if len(held) != 1:
                return False
            colour_of[e] = held[0]
        for i, sym in enumerate(c.vocab.symbols):
            if sym.colour_predicate:
                continue
            for tup in m.tuples(i):
                colours = [colour_of[e] for e in tup]
                if rule.strong:
                    if len(set(colours)) != len(tup):
                        return False
                elif len(set(colours)) < 2:
                    return False
        return True
    if isinstance(rule, Colourable):
        from .colouring import find_colouring
        return find_colouring(m, rule.l, rule.strong) is not None
    raise ValueError(f"unknown rule {rule!r}")


def enumerate_members(c: ClassSpec, n: int, max_bits=None):
    """Members of the class on [n], deterministically ordered.

    The oriented-graph shape (one binary symbol, loops and opposite pairs
    forbidden) gets a direct three-states-per-pair generator; everything
    else filters the full enumeration, within its bit budget.
    """
    if _is_oriented(c):
        yield from _oriented_members(c.vocab, n)
        return
    kwargs = {} if max_bits is None else {"max_bits": max_bits}
    yield from enumerate_structures(c.vocab, n,
                                    filter=lambda m: is_permitted(c, m),
                                    **kwargs)


def count_members(c: ClassSpec, n: int) -> int:
    return sum(1 for _ in enumerate_members(c, n))


def _is_oriented(c: ClassSpec) -> bool:
    if len(c.vocab.symbols) != 1:
        return False
    sym = c.vocab.symbols[0]
    if sym.arity != 2 or sym.symmetric_irreflexive or sym.colour_predicate:
        return False
    if not isinstance(c.rule, ForbiddenWeak):
        return False
    keys = {canonical_form(f).rels + (f.n,) for f in c.rule.members}
    loop = make_structure(c.vocab, 1, {sym.name: [(1, 1)]})
    digon = make_structure(c.vocab, 2, {sym.name: [(1, 2), (2, 1)]})
    want = {canonical_form(loop).rels + (1,), canonical_form(digon).rels + (2,)}
    return keys == want


def _oriented_members(vocab, n):
    sym = vocab.symbols[0]
    index = slot_index(sym, n)
    pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]

    def walk(i, mask):
        if i == len(pairs):
            yield Structure(vocab, n, (mask,))
            return
        u, v = pairs[i]
        yield from walk(i + 1, mask)
        yield from walk(i + 1, mask | 1 << index[(u, v)])
        yield from walk(i + 1, mask | 1 << index[(v, u)])

    yield from walk(0, 0)


# ---------------------------------------------------------------------------
# minimal forbidden structures and the dichotomy condition

def _covers(f1: Structure, f0: Structure) -> bool:
    # some weak embedding of f1 into f0 misses nothing of f0
    if f1.n != f0.n:
        return False
    if any(f1.tuple_count(i) != f0.tuple_count(i)
           for i in range(len(f0.vocab.symbols))):
        return False
    return find_embedding(f1, f0, mode="weak") is not None


def minimal_forbidden(members):
    """Members all of whose proper weak substructures are permitted."""
    members = list(members)
    distinct = []
    seen = set()
    for f in members:
        key = (f.n, canonical_form(f).rels)
        if key not in seen:
            seen.add(key)
            distinct.append(f)
    out = []
    for f0 in distinct:
        minimal = True
        for f1 in distinct:
            for emb in enumerate_embeddings(f1, f0, mode="weak"):
                covered = (len(emb) == f0.n
                           and all(f1.tuple_count(i) == f0.tuple_count(i)
                                   for i in range(len(f0.vocab.symbols))))
                if not covered:
                    minimal = False
                    break
            if not minimal:
                break
        if minimal:
            out.append(f0)
    out.sort(key=lambda f: (f.n, canonical_form(f).rels))
    return out


def condition_star(members):
    """Search for a removable relationship on a proper subset of a
    minimal forbidden member.

    Returns a Witness naming the structure, symbol, and tuple whose sole
    removal yields a permitted structure while the tuple's range misses
    part of the universe; None when no forbidden member admits one.
    """
    for f0 in minimal_forbidden(members):
        cf = canonical_form(f0)
        for i, sym in enumerate(cf.vocab.symbols):
            index = slot_index(sym, cf.n)
            for tup in cf.tuples(i):
                if len(set(tup)) >= cf.n:
                    continue
                rels = list(cf.rels)
                rels[i] &= ~(1 << index[tup])
                removed = Structure(cf.vocab, cf.n, tuple(rels))
                if not _weakly_forbids(members, removed):
                    return Witness(cf, sym.name, tup)
    return None


def verify_star_witness(members, w: Witness) -> bool:
    """Recheck a witness against the defining conditions."""
    if len(set(w.tup)) >= w.structure.n:
        return False
    i = w.structure.vocab.index(w.symbol)
    index = slot_index(w.structure.vocab.symbols[i], w.structure.n)
    rels = list(w.structure.rels)
    rels[i] &= ~(1 << index[tuple(w.tup)])
    removed = Structure(w.structure.vocab, w.structure.n, tuple(rels))
    if _weakly_forbids(members, removed):
        return False
    return _weakly_forbids(members, w.structure)


def permitted_count_bound(c: ClassSpec, k: int):
    """Count permitted structures on [k] and the proportion bound
    1 - 1/(1 + count) that the count implies."""
    alpha = count_members(c, k)
    return alpha, Fraction(alpha, alpha + 1)


# ---------------------------------------------------------------------------
# verdicts

@dataclass(frozen=True)
class SubstitutionFailure:
    structure: Structure
    site: tuple
    image: Structure


@dataclass(frozen=True)
class AmalgamationFailure:
    base: Structure
    left: Structure
    right: Structure


@dataclass(frozen=True)
class Verdict:
    status: str  # "holds_up_to_bound" | "counterexample"
    bound: int
    counterexample: object = None
    witness: object = None

    @property
    def holds(self) -> bool:
        return self.status == "holds_up_to_bound"


def _transport(b: Structure, sigma: dict) -> tuple:
    # b relabelled onto sigma's image, as (sorted site, structure on it)
    site = sorted(sigma.values())
    rank = {v: i + 1 for i, v in enumerate(site)}
    moved = relabel_structure(b, {j: rank[sigma[j]] for j in sigma})
    return site, moved


# ---------------------------------------------------------------------------
# admitting substitutions

def check_admits_substitution(c: ClassSpec, a: Structure, b: Structure,
                              max_n: int) -> Verdict:
    """Does replacing a copy of `a` by `b` ever leave the class?

    Exhausts permitted structures up to max_n and all copies of `a`
    inside them; the first failing substitution is the counterexample.
    """
    if a.n != b.n:
        raise ValueError("substitution pair must have equal universe sizes")
    if not is_permitted(c, a) or not is_permitted(c, b):
        raise ValueError("substitution pair members must be permitted")
    for n in range(a.n, max_n + 1):
        for m in enumerate_members(c, n):
            for sigma in enumerate_embeddings(a, m, mode="strong"):
                site, moved = _transport(b, sigma)
                image = substitute(m, moved, site)
                if not is_permitted(c, image):
                    return Verdict("counterexample", max_n,
                                   SubstitutionFailure(m, tuple(site), image))
    return Verdict("holds_up_to_bound", max_n)


# ---------------------------------------------------------------------------
# accepting substitutions (dimension-aware variant)

def _agreement_check(g, a: Structure, b: Structure):
    if a.n != b.n:
        raise AgreementError("pair must share a universe size")
    if a.vocab != b.vocab:
        raise AgreementError("pair must share a vocabulary")
    for i, sym in enumerate(a.vocab.symbols):
        if sym.colour_predicate and a.rels[i] != b.rels[i]:
            raise AgreementError("pair disagrees on colour predicates")
    if g.kind == "gf2" and a.n != g.universe_size:
        # a closed d-dimensional set, sorted and relabelled, is again a
        # GF(2) space of dimension d in the standard labelling
        d = a.n.bit_length() - 1
        if 1 << d != a.n:
            raise AgreementError(
                "gf2 pair universes must be powers of two")
        g = GF2Geometry(d)
    for u in g.closed_subsets(n=a.n):
        if len(u) == a.n:
            continue
        if induced_substructure(a, u) != induced_substructure(b, u):
            raise AgreementError(
                f"pair disagrees on the closed proper subset {sorted(u)}")


def check_accepts_substitution(c: ClassSpec, g, a: Structure, b: Structure,
                               max_n: int) -> Verdict:
    """Can a copy of `a` always be rewritten to `b` while disturbing no
    other low-dimensional closed set?

    For every permitted structure containing a closed copy of `a`, a
    permitted replacement must exist that carries `b` on the site, keeps
    every other closed set of dimension at most dim(site) as it was, and
    keeps all colour predicates; slots above that dimension are free to
    move and are searched exhaustively.
    """
    g = g or TrivialGeometry()
    if not is_permitted(c, a) or not is_permitted(c, b):
        raise ValueError("substitution pair members must be permitted")
    _agreement_check(g, a, b)
    for n in range(a.n, max_n + 1):
        if not g.valid_n(n):
            continue
        for m in enumerate_members(c, n):
            for sigma in enumerate_embeddings(a, m, mode="strong"):
                site_set = frozenset(sigma.values())
                if not g.is_closed(site_set, n):
                    continue
                if not _accepts_one(c, g, b, m, sigma, site_set):
                    return Verdict(
                        "counterexample", max_n,
                        SubstitutionFailure(m, tuple(sorted(site_set)), b))
    return Verdict("holds_up_to_bound", max_n)


def _accepts_one(c, g, b, m, sigma, site_set) -> bool:
    n = m.n
    d_site = g.dim(site_set, n)
    _, moved = _transport(b, sigma)
    rank = {v: i + 1 for i, v in enumerate(sorted(site_set))}
    free = []
    base = []
    for i, sym in enumerate(m.vocab.symbols):
        index = slot_index(sym, n)
        mask = 0
        for tup in slot_tuples(sym, n):
            rng = set(tup)
            if rng <= site_set:
                if moved.has(i, tuple(rank[x] for x in tup)):
                    mask |= 1 << index[tup]
            elif g.dim(g.closure(rng, n), n) <= d_site:
                if m.has(i, tup):
                    mask |= 1 << index[tup]
            else:
                free.append((i, index[tup]))
                if m.has(i, tup):
                    mask |= 1 << index[tup]
        base.append(mask)
    if len(free) > FREE_SLOT_BUDGET:
        raise BudgetExceeded(
            f"{len(free)} free slots exceed the substitution search budget "
            f"of {FREE_SLOT_BUDGET}")
    # try the structure's own free-slot values first, then everything else
    own = Structure(m.vocab, n, tuple(base))
    if is_permitted(c, own):
        return True
    own_bits = sum(1 << j for j, (i, idx) in enumerate(free)
                   if m.rels[i] >> idx & 1)
    for bits in range(1 << len(free)):
        if bits == own_bits:
            continue
        rels = list(base)
        for j, (i, idx) in enumerate(free):
            if bits >> j & 1:
                rels[i] |= 1 << idx
            else:
                rels[i] &= ~(1 << idx)
        if is_permitted(c, Structure(m.vocab, n, tuple(rels))):
            return True
    return False


# ---------------------------------------------------------------------------
# amalgamation

def amalgamate_triple(c: ClassSpec, a: Structure, b1: Structure,
                      b2: Structure, g=None) -> Verdict:
    """Search for a permitted structure containing b1 and b2 glued
    exactly along their shared initial copy of `a`.

    The base `a` must be the initial segment of both sides. The amalgam
    is sought on the labelled union, trying the tuple-free gluing first
    and then every assignment of the cross tuples; for the hereditary
    classes implemented here that search is exhaustive.
    """
    for b in (b1, b2):
        if induced_substructure(b, range(1, a.n + 1)) != a:
            raise ValueError("base is not the initial segment of both sides")
    g = g or TrivialGeometry()
    if g.kind == "gf2":
        return _amalgamate_gf2(c, g, a, b1, b2)
    n1, n2 = b1.n, b2.n
    u = n1 + n2 - a.n
    shift = {j: j if j <= a.n else n1 + (j - a.n) for j in range(1, n2 + 1)}
    pinned = []
    free = []
    for i, sym in enumerate(c.vocab.symbols):
        index = slot_index(sym, u)
        mask = 0
        for tup in b1.tuples(i):
            mask |= 1 << index[tup]
        for tup in b2.tuples(i):
            moved = tuple(shift[e] for e in tup)
            if sym.symmetric_irreflexive:
                moved = tuple(sorted(moved))
            mask |= 1 << index[moved]
        pinned.append(mask)
        left_only = set(range(a.n + 1, n1 + 1))
        right_only = set(range(n1 + 1, u + 1))
        for tup in slot_tuples(sym, u):
            rng = set(tup)
            if rng & left_only and rng & right_only:
                free.append((i, index[tup]))
    if len(free) > FREE_SLOT_BUDGET:
        raise BudgetExceeded(
            f"{len(free)} cross slots exceed the amalgam search budget "
            f"of {FREE_SLOT_BUDGET}")
    for bits in range(1 << len(free)):
        rels = list(pinned)
        for j, (i, idx) in enumerate(free):
            if bits >> j & 1:
                rels[i] |= 1 << idx
        cand = Structure(c.vocab, u, tuple(rels))
        if is_permitted(c, cand):
            return Verdict("holds_up_to_bound", u, witness=cand)
    return Verdict("counterexample", u,
                   AmalgamationFailure(a, b1, b2))


def _amalgamate_gf2(c, g, a, b1, b2):
    # sides live on whole spaces and glue along an initial subspace;
    # a linear change of basis moves any amalgam into this layout, so
    # searching it is enough
    da, d1, d2 = (x.n.bit_length() - 1 for x in (a, b1, b2))
    for x, d in ((a, da), (b1, d1), (b2, d2)):
        if x.n != 1 << d:
            raise ValueError("gf2 amalgamation needs whole-space sides")
    du = d1 + d2 - da
    u = 1 << du

    def embed2(e):
        v = e - 1
        low = v & ((1 << da) - 1)
        high = v >> da
        return (low | high << d1) + 1

    f2 = {e: embed2(e) for e in range(1, b2.n + 1)}
    pinned = []
    free = []
    image1 = set(range(1, b1.n + 1))
    image2 = set(f2.values())
    for i, sym in enumerate(c.vocab.symbols):
        index = slot_index(sym, u)
        mask = 0
        for tup in b1.tuples(i):
            mask |= 1 << index[tup]
        for tup in b2.tuples(i):
            moved = tuple(f2[e] for e in tup)
            if sym.symmetric_irreflexive:
                moved = tuple(sorted(moved))
            mask |= 1 << index[moved]
        pinned.append(mask)
        for tup in slot_tuples(sym, u):
            rng = set(tup)
            if not (rng <= image1 or rng <= image2):
                free.append((i, index[tup]))
    if len(free) > FREE_SLOT_BUDGET:
        raise BudgetExceeded(
            f"{len(free)} cross slots exceed the amalgam search budget "
            f"of {FREE_SLOT_BUDGET}")
    for bits in range(1 << len(free)):
        rels = list(pinned)
        for j, (i, idx) in enumerate(free):
            if bits >> j & 1:
                rels[i] |= 1 << idx
        cand = Structure(c.vocab, u, tuple(rels))
        if is_permitted(c, cand):
            return Verdict("holds_up_to_bound", u, witness=cand)
    return Verdict("counterexample", u, AmalgamationFailure(a, b1, b2))


def check_disjoint_amalgamation(c: ClassSpec, g, max_n: int,
                                independent: bool = False) -> Verdict:
    """Try to amalgamate every permitted overlapping pair within budget.

    Enumerates bases `a` shared as initial segments of permitted sides
    b1, b2 whose labelled union fits in max_n, and searches an amalgam
    for each. The independent flag additionally requires the base to be
    closed in both sides, which only bites in geometric mode.
    """
    g = g or TrivialGeometry()
    if g.kind == "gf2":
        return _check_amalgamation_gf2(c, g, max_n, independent)
    members = {n: tuple(enumerate_members(c, n))
               for n in range(0, max_n + 1)}
    for a_size in range(0, max_n + 1):
        for n1 in range(a_size, max_n + 1):
            for n2 in range(n1, max_n + 1):
                u = n1 + n2 - a_size
                if u > max_n or u == 0:
                    continue
                base_set = frozenset(range(1, a_size + 1))
                if independent and not (g.is_closed(base_set, n1)
                                        and g.is_closed(base_set, n2)):
                    continue
                by_base = {}
                for b2 in members[n2]:
                    base = induced_substructure(b2, base_set)
                    by_base.setdefault(base, []).append(b2)
                for b1 in members[n1]:
                    a = induced_substructure(b1, base_set)
                    for b2 in by_base.get(a, ()):
                        verdict = amalgamate_triple(c, a, b1, b2, g)
                        if not verdict.holds:
                            return Verdict("counterexample", max_n,
                                           verdict.counterexample)
    return Verdict("holds_up_to_bound", max_n)


def _check_amalgamation_gf2(c, g, max_n, independent):
    dims = []
    d = 0
    while 1 << d <= max_n:
        dims.append(d)
        d += 1
    members = {d: tuple(enumerate_members(c, 1 << d)) for d in dims}
    for da in dims:
        for d1 in dims:
            if d1 < da:
                continue
            for d2 in dims:
                if d2 < d1:
                    continue
                du = d1 + d2 - da
                if 1 << du > max_n:
                    continue
                base_range = range(1, (1 << da) + 1)
                by_base = {}
                for b2 in members[d2]:
                    base = induced_substructure(b2, base_range)
                    by_base.setdefault(base, []).append(b2)
                for b1 in members[d1]:
                    a = induced_substructure(b1, base_range)
                    for b2 in by_base.get(a, ()):
                        verdict = _amalgamate_gf2(c, g, a, b1, b2)
                        if not verdict.holds:
                            return Verdict("counterexample", max_n,
                                           verdict.counterexample)
    return Verdict("holds_up_to_bound", max_n)


# ---------------------------------------------------------------------------
# builtin classes

def _k3():
    return graph(3, [(1, 2), (1, 3), (2, 3)])


def builtin_class(name: str) -> ClassSpec:
    """Look up a named class; colour classes parse a ':l' suffix."""
    if name == "graphs":
        return ClassSpec(vocabulary(("E", 2, "symirr")), AllStructures())
    if name == "digraphs":
        return ClassSpec(vocabulary(("R", 2)), AllStructures())
    if name == "oriented":
        vocab = vocabulary(("R", 2))
        loop = make_structure(vocab, 1, {"R": [(1, 1)]})
        digon = make_structure(vocab, 2, {"R": [(1, 2), (2, 1)]})
        return ClassSpec(vocab, ForbiddenWeak((loop, digon)))
    if name == "triangle-free":
        return ClassSpec(vocabulary(("E", 2, "symirr")),
                         ForbiddenWeak((_k3(),)))
    if name == "guarded-edges":
        vocab = vocabulary(("Q", 1), ("E", 2, "symirr"))
        guard = make_structure(vocab, 2, {"Q": [(1,)], "E": [(1, 2)]})
        return ClassSpec(vocab, ForbiddenWeak((guard,)))
    if name == "partial-2-coloured":
        vocab = vocabulary(("R", 2, "symirr"),
                           ("P1", 1, "colour"), ("P2", 1, "colour"))
        both = make_structure(vocab, 1, {"P1": [(1,)], "P2": [(1,)]})
        mono1 = make_structure(vocab, 2, {"R": [(1, 2)],
                                          "P1": [(1,), (2,)]})
        mono2 = make_structure(vocab, 2, {"R": [(1, 2)],
                                          "P2": [(1,), (2,)]})
        return ClassSpec(vocab, ForbiddenWeak((both, mono1, mono2)))
    for prefix, strong, colour_preds in (
            ("coloured:", False, True),
            ("strong-coloured:", True, True),
            ("colourable:", False, False),
            ("strong-colourable:", True, False)):
        if name.startswith(prefix):
            l = int(name[len(prefix):])
            symbols = [("E", 2, "symirr")]
            if colour_preds:
                symbols += [(f"P{i}", 1, "colour") for i in range(1, l + 1)]
            rule = (Coloured if colour_preds else Colourable)(l, strong)
            return ClassSpec(vocabulary(*symbols), rule)
    raise ValueError(f"unknown class {name!r}")


def class_names():
    return ("graphs", "digraphs", "oriented", "triangle-free",
            "guarded-edges", "partial-2-coloured",
            "coloured:2", "coloured:3", "strong-coloured:2",
            "strong-coloured:3", "colourable:2", "colourable:3",
            "strong-colourable:2", "strong-colourable:3")


def companion_coloured(c: ClassSpec) -> ClassSpec:
    """The coloured class whose colour-stripped members form this
    colourable class."""
    if not isinstance(c.rule, Colourable):
        raise ValueError("only colourable classes have a coloured companion")
    extra = tuple(RelationSymbol(f"P{i}", 1, colour_predicate=True)
                  for i in range(1, c.rule.l + 1))
    vocab = Vocabulary(c.vocab.symbols + extra)
    return ClassSpec(vocab, Coloured(c.rule.l, c.rule.strong), c.geometry)
