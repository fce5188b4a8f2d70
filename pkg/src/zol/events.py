"""The named events the experiment harness can measure.

Events form a closed catalogue rather than a formula language, so every
name maps to one well-defined predicate on members (and, where we know
one, an exact closed form or vectorised count). Event names take their
integer parameters after a colon, e.g. all-k-ext:2.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from . import fastgraphs
from .axioms import (ExtensionPair, all_k_extension_pairs, multiplicity,
                     satisfies_extension_axiom)
from .classes import (ClassSpec, Coloured, Colourable, ForbiddenWeak,
                      condition_star, _is_oriented)
from .colouring import (build_colour_link, class_sizes,
                        colouring_from_predicates, enumerate_colourings,
                        is_colouring, is_rich, same_colour_linked,
                        satisfies_colour_compatible_axiom,
                        uniquely_colourable)
from .measures import exact_probability
from .pregeometry import TrivialGeometry
from .structures import (Structure, Vocabulary, find_embedding,
                         induced_substructure, relational_reduct, slot_index)


@dataclass(frozen=True)
class EventSpec:
    name: str
    description: str
    test: object                 # callable(member) -> bool
    exact_uniform: object = None  # callable(n) -> Fraction | None
    exact_delta: object = None


def catalogue():
    """Name patterns and what they mean, for the CLI listing."""
    return (
        ("all-k-ext:<k>",
         "every extension axiom constraining at most k elements holds"),
        ("each-1-ext",
         "expands to one row per single-point extension axiom"),
        ("1-ext:<i>",
         "the i-th single-point extension axiom, 1-based, in catalogue "
         "order"),
        ("star-mult-ge:<m>",
         "the removable-tuple pattern occurs and every copy of the "
         "reduced site extends in at least m disjoint ways"),
        ("uniquely-colourable",
         "exactly one proper colour partition exists"),
        ("xi-defines-colour",
         "the gadget-definable same-colour relation is an equivalence "
         "with at most l classes inducing a proper colouring"),
        ("richly-coloured:<a>",
         "every colour class of the carried colouring holds at least "
         "n/a elements"),
        ("all-colourings-rich:<a>",
         "every proper colouring has all l classes of size at least "
         "n/a"),
        ("all-k-colour-compat:<k>",
         "every colour-compatible extension axiom on at most k+1 "
         "elements holds"),
        ("unary-empty:<sym>",
         "no element satisfies the named unary predicate"),
    )


# ---------------------------------------------------------------------------
# helpers

def _relational_vocab(vocab: Vocabulary) -> Vocabulary:
    return Vocabulary(tuple(s for s in vocab.symbols
                            if not s.colour_predicate))


def _strip(m: Structure) -> Structure:
    return relational_reduct(m) if m.vocab.colour_names() else m


def one_step_pairs(c: ClassSpec, g, k: int):
    """Extension pairs adding exactly one dimension, in catalogue
    order."""
    g = g or TrivialGeometry()
    out = []
    for p in all_k_extension_pairs(c, g, k):
        n = p.large.n
        if g.dim(set(p.site), n) + 1 == g.dim(set(p.large.universe), n):
            out.append(p)
    return out


def _class_l(c: ClassSpec):
    if not isinstance(c.rule, (Coloured, Colourable)):
        raise ValueError("event needs a colour-rule class")
    return c.rule.l, c.rule.strong


# ---------------------------------------------------------------------------
# closed forms for the loop-free antisymmetric digraph axioms

def _oriented_one_step_prob(p: ExtensionPair, n: int) -> Fraction:
    third = Fraction(1, 3)
    two_thirds = Fraction(2, 3)
    if p.small.n == 0:
        return Fraction(1) if n >= 1 else Fraction(0)
    out_edge = p.large.has(0, (1, 2))
    in_edge = p.large.has(0, (2, 1))
    if out_edge or in_edge:
        # every element needs an out- (or in-) neighbour; a failing set
        # has no arrows leaving it in the chosen direction
        total = Fraction(0)
        for s in range(n + 1):
            total += ((-1) ** s * comb(n, s)
                      * third ** comb(s, 2)
                      * two_thirds ** (s * (n - s)))
        return total
    # every element needs a nonneighbour; a failing set is adjacent,
    # one way or the other, to everything else
    total = Fraction(0)
    for s in range(n + 1):
        total += ((-1) ** s * comb(n, s)
                  * two_thirds ** (comb(s, 2) + s * (n - s)))
    return total


# ---------------------------------------------------------------------------
# event construction

def resolve_events(name: str, c: ClassSpec, g=None):
    """Named event(s) for a class; each-1-ext expands to several."""
    g = g or TrivialGeometry()

    if name.startswith("all-k-ext:"):
        k = int(name.split(":")[1])
        pairs = tuple(all_k_extension_pairs(c, g, k))

        def test(m, pairs=pairs):
            return all(satisfies_extension_axiom(m, p) for p in pairs)

        exact = None
        kind = fastgraphs.applicable(c)
        if kind is not None and g.kind == "trivial" \
                and k <= fastgraphs.CODE_MAX_K:
            def exact(n, kind=kind, k=k):
                hits, total = fastgraphs.count_all_k_ext(kind, n, k)
                return Fraction(hits, total)

        return [EventSpec(name, f"all extension axioms up to {k} "
                          "constrained elements", test,
                          exact_uniform=exact)]

    if name == "each-1-ext" or name.startswith("1-ext:"):
        pairs = one_step_pairs(c, g, 1)
        if name == "each-1-ext":
            wanted = list(enumerate(pairs))
        else:
            i = int(name.split(":")[1])
            if not 1 <= i <= len(pairs):
                raise ValueError(
                    f"1-ext index out of range 1..{len(pairs)}")
            wanted = [(i - 1, pairs[i - 1])]
        out = []
        for i, p in wanted:
            def test(m, p=p):
                return satisfies_extension_axiom(m, p)

            exact = None
            if _is_oriented(c) and g.kind == "trivial":
                def exact(n, p=p):
                    return _oriented_one_step_prob(p, n)

            out.append(EventSpec(f"1-ext:{i + 1}", p.describe(), test,
                                 exact_uniform=exact))
        return out

    if name.startswith("star-mult-ge:"):
        thresh = int(name.split(":")[1])
        if not isinstance(c.rule, ForbiddenWeak):
            raise ValueError("event needs a forbidden-substructure class")
        w = condition_star(c.rule.members)
        if w is None:
            raise ValueError("the class has no removable-tuple witness")
        site = sorted(set(w.tup))
        i = w.structure.vocab.index(w.symbol)
        rels = list(w.structure.rels)
        sym = w.structure.vocab.symbols[i]
        rels[i] &= ~(1 << slot_index(sym, w.structure.n)[tuple(w.tup)])
        reduced = Structure(w.structure.vocab, w.structure.n, tuple(rels))
        small = induced_substructure(reduced, site)
        pattern = induced_substructure(w.structure, site)
        pair = ExtensionPair(small, reduced, tuple(site))

        def test(m, pattern=pattern, pair=pair, thresh=thresh):
            if find_embedding(pattern, m, mode="weak") is None:
                return False
            return multiplicity(m, pair) >= thresh

        exact = None
        kind = fastgraphs.applicable(c)
        if kind == "triangle-free" and g.kind == "trivial" \
                and pattern.tuple_count(0) == 1 and reduced.n == 3:
            def exact(n, kind=kind, thresh=thresh):
                hits, total = fastgraphs.count_star(kind, n, thresh)
                return Fraction(hits, total)

        return [EventSpec(name, "removable pattern present and site "
                          f"multiplicity at least {thresh}", test,
                          exact_uniform=exact)]

    if name == "uniquely-colourable":
        l, strong = _class_l(c)

        def test(m, l=l, strong=strong):
            return uniquely_colourable(_strip(m), l, strong)

        return [EventSpec(name, f"exactly one proper {l}-colour "
                          "partition", test)]

    if name == "xi-defines-colour":
        l, strong = _class_l(c)
        link = build_colour_link(_relational_vocab(c.vocab), l, strong)

        def test(m, l=l, strong=strong, link=link):
            mr = _strip(m)
            n = mr.n
            linked = [[False] * (n + 1) for _ in range(n + 1)]
            for x in range(1, n + 1):
                for y in range(1, n + 1):
                    linked[x][y] = same_colour_linked(mr, x, y, link)
            for x in range(1, n + 1):
                for y in range(1, n + 1):
                    if linked[x][y] != linked[y][x]:
                        return False
                    for z in range(1, n + 1):
                        if linked[x][y] and linked[y][z] \
                                and not linked[x][z]:
                            return False
            colour = {}
            reps = []
            for x in range(1, n + 1):
                for r in reps:
                    if linked[x][r]:
                        colour[x] = colour[r]
                        break
                else:
                    reps.append(x)
                    colour[x] = len(reps)
            if len(reps) > l:
                return False
            gamma = tuple(colour[x] for x in range(1, n + 1))
            return is_colouring(mr, gamma, strong)

        return [EventSpec(name, "the definable same-colour relation is "
                          f"an equivalence with at most {l} classes "
                          "inducing a proper colouring", test)]

    if name.startswith("richly-coloured:"):
        a = int(name.split(":")[1])
        l, _ = _class_l(c)
        if not isinstance(c.rule, Coloured):
            raise ValueError("event needs carried colour predicates")

        def test(m, l=l, a=a):
            gamma = colouring_from_predicates(m)
            if gamma is None:
                return False
            return is_rich(class_sizes(gamma, l), a)

        return [EventSpec(name, "every carried colour class has at "
                          f"least n/{a} elements", test)]

    if name.startswith("all-colourings-rich:"):
        a = int(name.split(":")[1])
        l, strong = _class_l(c)

        def test(m, l=l, strong=strong, a=a):
            mr = _strip(m)
            for gamma in enumerate_colourings(mr, l, strong,
                                              canonical=True):
                if not is_rich(class_sizes(gamma, l), a):
                    return False
            return True

        return [EventSpec(name, f"every proper {l}-colouring has all "
                          f"classes of size at least n/{a}", test)]

    if name.startswith("all-k-colour-compat:"):
        k = int(name.split(":")[1])
        l, strong = _class_l(c)
        if not isinstance(c.rule, Colourable):
            raise ValueError("colour-compatible axioms read colour-free "
                             "members")
        pairs = tuple(all_k_extension_pairs(c, g, k))

        def test(m, pairs=pairs, l=l, strong=strong):
            mr = _strip(m)
            return all(satisfies_colour_compatible_axiom(mr, p.small,
                                                         p.large, l,
                                                         strong)
                       for p in pairs)

        return [EventSpec(name, "every colour-compatible extension "
                          f"axiom on at most {k + 1} elements holds",
                          test)]

    if name.startswith("unary-empty:"):
        sym = name.split(":")[1]
        try:
            i = c.vocab.index(sym)
        except KeyError:
            raise ValueError(f"no symbol named {sym!r}") from None
        if c.vocab.symbols[i].arity != 1:
            raise ValueError(f"{sym} is not unary")

        def test(m, i=i):
            return m.rels[i] == 0

        return [EventSpec(name, f"no element satisfies {sym}", test)]

    raise ValueError(f"unknown event {name!r}")


def exact_event_probability(c: ClassSpec, g, ev: EventSpec, n: int,
                            measure: str) -> Fraction:
    """Closed form or vectorised count when available, else full
    enumeration."""
    if measure == "uniform" and ev.exact_uniform is not None:
        value = ev.exact_uniform(n)
        if value is not None:
            return value
    if measure == "delta" and ev.exact_delta is not None:
        value = ev.exact_delta(n)
        if value is not None:
            return value
    return exact_probability(c, n, ev.test, measure, g)
