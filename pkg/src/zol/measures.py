"""Probability measures on the members of a class at a fixed size.

Two kinds are implemented. Uniform counts every member once. The
dimension-conditional measure builds a structure level by level along
its dimension reducts: the level-0 part is uniform over the possible
level-0 structures, and each later level is uniform among the one-step
expansions of what is already fixed. All chain probabilities are exact
rationals; floats appear only in Monte Carlo summaries.

Classes whose members are colour patterns plus relations admit a fast
sampling path (colours independently uniform, each eligible relational
slot a fair coin) that provably coincides with the chain; the exact
comparison at small n is part of the test suite.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .classes import (AllStructures, ClassSpec, Coloured, Colourable,
                      ForbiddenWeak, _is_oriented, companion_coloured,
                      enumerate_members, is_permitted)
from .errors import BudgetExceeded
from .pregeometry import TrivialGeometry, d_reduct
from .rng import Rng, wilson_interval
from .structures import (Structure, canonical_form, make_structure,
                         relational_reduct, slot_index, slot_tuples,
                         structure_bits)

SAMPLE_ENUMERATION_BITS = 20


@dataclass(frozen=True)
class ProbResult:
    value: float
    exact: object = None  # Fraction for exact modes
    ci_low: float = None
    ci_high: float = None
    trials: int = None
    successes: int = None


# ---------------------------------------------------------------------------
# the dimension-conditional chain, exactly

@lru_cache(maxsize=256)
def _chain_data(c: ClassSpec, n: int, g):
    members = tuple(enumerate_members(c, n))
    if not members:
        raise ValueError(f"no members on a universe of size {n}")
    rho = c.vocab.max_arity
    chains = [tuple(d_reduct(m, g, r) for r in range(rho + 1))
              for m in members]
    level0 = {ch[0] for ch in chains}
    # factor at level r: distinct level-r values among members agreeing
    # one level down
    values_by_prefix = [None] * (rho + 1)
    for r in range(1, rho + 1):
        seen = {}
        for ch in chains:
            seen.setdefault(ch[r - 1], set()).add(ch[r])
        values_by_prefix[r] = {k: len(v) for k, v in seen.items()}
    comps = {}
    for m, ch in zip(members, chains):
        parts = [Fraction(1, len(level0))]
        for r in range(1, rho + 1):
            parts.append(Fraction(1, values_by_prefix[r][ch[r - 1]]))
        comps[m] = tuple(parts)
    return members, comps


def delta_components(c: ClassSpec, n: int, m: Structure, g=None):
    """The chain factors of m: one per level, multiplying to delta(m)."""
    g = g or TrivialGeometry()
    if isinstance(c.rule, Colourable):
        raise ValueError("colourable classes inherit their measure; "
                         "no chain of their own")
    _, comps = _chain_data(c, n, g)
    if m not in comps:
        raise ValueError("not a member of the class")
    return comps[m]


def delta_table(c: ClassSpec, n: int, g=None):
    """Exact delta probability of every member on [n]."""
    g = g or TrivialGeometry()
    if isinstance(c.rule, Colourable):
        companion = companion_coloured(c)
        table = {}
        for m, p in delta_table(companion, n, g).items():
            reduced = relational_reduct(m)
            table[reduced] = table.get(reduced, Fraction(0)) + p
        return table
    _, comps = _chain_data(c, n, g)
    out = {}
    for m, parts in comps.items():
        p = Fraction(1)
        for f in parts:
            p *= f
        out[m] = p
    return out


def delta_probability(c: ClassSpec, n: int, m: Structure, g=None) -> Fraction:
    table = delta_table(c, n, g)
    if m not in table:
        raise ValueError("not a member of the class")
    return table[m]


def delta_level_mass(c: ClassSpec, n: int, r: int, g=None):
    """Chain probability of each level-r reduct: the prefix product up
    to level r."""
    g = g or TrivialGeometry()
    members, comps = _chain_data(c, n, g)
    out = {}
    for m in members:
        red = d_reduct(m, g, r)
        if red not in out:
            p = Fraction(1)
            for f in comps[m][:r + 1]:
                p *= f
            out[red] = p
    return out


# ---------------------------------------------------------------------------
# fast sampling paths

@dataclass(frozen=True)
class FastPath:
    kind: str
    sample: object  # callable(n, rng) -> Structure
    prob: object    # callable(m) -> Fraction, 0 off the class


def _random_bits(rng: Rng, k: int) -> int:
    out = 0
    shift = 0
    while shift < k:
        out |= rng.next64() << shift
        shift += 64
    return out & ((1 << k) - 1)


def _is_guarded(c: ClassSpec) -> bool:
    syms = c.vocab.symbols
    if len(syms) != 2:
        return False
    q, e = syms
    if q.arity != 1 or q.colour_predicate:
        return False
    if e.arity != 2 or not e.symmetric_irreflexive:
        return False
    if not isinstance(c.rule, ForbiddenWeak) or len(c.rule.members) != 1:
        return False
    guard = make_structure(c.vocab, 2, {q.name: [(1,)], e.name: [(1, 2)]})
    f = c.rule.members[0]
    return f.n == 2 and canonical_form(f).rels == canonical_form(guard).rels


def _is_partial_two_coloured(c: ClassSpec) -> bool:
    syms = c.vocab.symbols
    if len(syms) != 3:
        return False
    r, p1, p2 = syms
    if r.arity != 2 or not r.symmetric_irreflexive:
        return False
    if not (p1.colour_predicate and p2.colour_predicate):
        return False
    if not isinstance(c.rule, ForbiddenWeak) or len(c.rule.members) != 3:
        return False
    keys = {(f.n, canonical_form(f).rels) for f in c.rule.members}
    both = make_structure(c.vocab, 1, {p1.name: [(1,)], p2.name: [(1,)]})
    mono1 = make_structure(c.vocab, 2, {r.name: [(1, 2)],
                                        p1.name: [(1,), (2,)]})
    mono2 = make_structure(c.vocab, 2, {r.name: [(1, 2)],
                                        p2.name: [(1,), (2,)]})
    want = {(f.n, canonical_form(f).rels) for f in (both, mono1, mono2)}
    return keys == want


def _coloured_shape(c: ClassSpec):
    # one symmetric binary relation plus the colour predicates
    if not isinstance(c.rule, Coloured):
        return None
    rel = [(i, s) for i, s in enumerate(c.vocab.symbols)
           if not s.colour_predicate]
    if len(rel) != 1:
        return None
    i, sym = rel[0]
    if sym.arity != 2 or not sym.symmetric_irreflexive:
        return None
    colour_idx = [j for j, s in enumerate(c.vocab.symbols)
                  if s.colour_predicate]
    return i, colour_idx


def fast_path(c: ClassSpec):
    """A direct sampler/probability pair equal to the chain measure, or
    None when the class has no such shortcut."""
    vocab = c.vocab
    if isinstance(c.rule, AllStructures):
        def sample(n, rng):
            masks = tuple(_random_bits(rng, len(slot_tuples(sym, n)))
                          for sym in vocab.symbols)
            return Structure(vocab, n, masks)

        def prob(m):
            return Fraction(1, 1 << structure_bits(vocab, m.n))

        return FastPath("uniform", sample, prob)

    if _is_oriented(c):
        sym = vocab.symbols[0]

        def sample(n, rng):
            index = slot_index(sym, n)
            mask = 0
            for u in range(1, n + 1):
                for v in range(u + 1, n + 1):
                    state = rng.randint(3)
                    if state == 1:
                        mask |= 1 << index[(u, v)]
                    elif state == 2:
                        mask |= 1 << index[(v, u)]
            return Structure(vocab, n, (mask,))

        def prob(m):
            n = m.n
            for u in range(1, n + 1):
                if m.has(0, (u, u)):
                    return Fraction(0)
                for v in range(u + 1, n + 1):
                    if m.has(0, (u, v)) and m.has(0, (v, u)):
                        return Fraction(0)
            return Fraction(1, 3 ** (n * (n - 1) // 2))

        return FastPath("oriented", sample, prob)

    if _is_guarded(c):
        def sample(n, rng):
            q_mask = _random_bits(rng, n)
            q = {e for e in range(1, n + 1) if q_mask >> (e - 1) & 1}
            sym = vocab.symbols[1]
            index = slot_index(sym, n)
            e_mask = 0
            for u in range(1, n + 1):
                for v in range(u + 1, n + 1):
                    if u not in q and v not in q and rng.bernoulli(0.5):
                        e_mask |= 1 << index[(u, v)]
            return Structure(vocab, n, (q_mask, e_mask))

        def prob(m):
            n = m.n
            q = {e for e in range(1, n + 1) if m.has(0, (e,))}
            for (u, v) in m.tuples(1):
                if u in q or v in q:
                    return Fraction(0)
            plain = n - len(q)
            return Fraction(1, 1 << (n + plain * (plain - 1) // 2))

        return FastPath("guarded", sample, prob)

    shape = _coloured_shape(c)
    if shape is not None:
        rel_i, colour_idx = shape
        l = c.rule.l
        sym = vocab.symbols[rel_i]

        def sample(n, rng):
            colours = [rng.randint(l) + 1 for _ in range(n)]
            masks = [0] * len(vocab.symbols)
            for e in range(1, n + 1):
                masks[colour_idx[colours[e - 1] - 1]] |= 1 << (e - 1)
            index = slot_index(sym, n)
            for u in range(1, n + 1):
                for v in range(u + 1, n + 1):
                    if colours[u - 1] != colours[v - 1] and rng.bernoulli(0.5):
                        masks[rel_i] |= 1 << index[(u, v)]
            return Structure(vocab, n, tuple(masks))

        def prob(m):
            n = m.n
            colours = []
            for e in range(1, n + 1):
                held = [j for j in colour_idx if m.has(j, (e,))]
                if len(held) != 1:
                    return Fraction(0)
                colours.append(held[0])
            eligible = 0
            for u in range(1, n + 1):
                for v in range(u + 1, n + 1):
                    if colours[u - 1] != colours[v - 1]:
                        eligible += 1
                    elif m.has(rel_i, (u, v)):
                        return Fraction(0)
            return Fraction(1, l ** n * (1 << eligible))

        return FastPath("coloured", sample, prob)

    if _is_partial_two_coloured(c):
        def sample(n, rng):
            states = [rng.randint(3) for _ in range(n)]
            masks = [0, 0, 0]
            for e in range(1, n + 1):
                if states[e - 1]:
                    masks[states[e - 1]] |= 1 << (e - 1)
            sym = vocab.symbols[0]
            index = slot_index(sym, n)
            for u in range(1, n + 1):
                for v in range(u + 1, n + 1):
                    same = (states[u - 1] == states[v - 1] != 0)
                    if not same and rng.bernoulli(0.5):
                        masks[0] |= 1 << index[(u, v)]
            return Structure(vocab, n, tuple(masks))

        def prob(m):
            n = m.n
            states = []
            for e in range(1, n + 1):
                held = [j for j in (1, 2) if m.has(j, (e,))]
                if len(held) > 1:
                    return Fraction(0)
                states.append(held[0] if held else 0)
            eligible = 0
            for u in range(1, n + 1):
                for v in range(u + 1, n + 1):
                    same = (states[u - 1] == states[v - 1] != 0)
                    if not same:
                        eligible += 1
                    elif m.has(0, (u, v)):
                        return Fraction(0)
            return Fraction(1, 3 ** n * (1 << eligible))

        return FastPath("partial", sample, prob)

    return None


# ---------------------------------------------------------------------------
# samplers

@lru_cache(maxsize=64)
def _categorical(c: ClassSpec, n: int, g):
    table = delta_table(c, n, g)
    items = sorted(table.items(), key=lambda kv: kv[0].rels)
    cumulative = []
    acc = 0.0
    for m, p in items:
        acc += float(p)
        cumulative.append((acc, m))
    return tuple(cumulative)


def sample_delta(c: ClassSpec, n: int, rng: Rng, g=None) -> Structure:
    """One draw from the dimension-conditional measure."""
    g = g or TrivialGeometry()
    if isinstance(c.rule, Colourable):
        return relational_reduct(sample_delta(companion_coloured(c), n,
                                              rng, g))
    fp = fast_path(c)
    if fp is not None and g.kind == "trivial":
        return fp.sample(n, rng)
    if structure_bits(c.vocab, n) > SAMPLE_ENUMERATION_BITS:
        raise BudgetExceeded(
            "no fast path and the exact expansion table is out of reach "
            f"at n = {n}")
    cumulative = _categorical(c, n, g)
    r = rng.random() * cumulative[-1][0]
    for acc, m in cumulative:
        if r < acc:
            return m
    return cumulative[-1][1]


def sample_colourable(c: ClassSpec, n: int, rng: Rng, g=None) -> Structure:
    """Draw from the coloured companion and drop the colours."""
    if not isinstance(c.rule, Colourable):
        raise ValueError("class is not a colourable one")
    return sample_delta(c, n, rng, g)


def sample_uniform(c: ClassSpec, n: int, rng: Rng) -> Structure:
    """One member uniformly at random; exact enumeration beyond the
    product classes, so small n only."""
    if isinstance(c.rule, AllStructures):
        return fast_path(c).sample(n, rng)
    if _is_oriented(c):
        return fast_path(c).sample(n, rng)
    if structure_bits(c.vocab, n) > SAMPLE_ENUMERATION_BITS:
        raise BudgetExceeded(
            f"uniform sampling needs full enumeration at n = {n}")
    members = _members_tuple(c, n)
    return members[rng.randint(len(members))]


@lru_cache(maxsize=64)
def _members_tuple(c: ClassSpec, n: int):
    return tuple(enumerate_members(c, n))


# ---------------------------------------------------------------------------
# exact and sampled event probabilities

def exact_probability(c: ClassSpec, n: int, event, measure="uniform",
                      g=None) -> Fraction:
    """Probability of the event by full enumeration, as a Fraction.

    The event is any predicate on members. For colourable classes under
    the inherited measure, the event is evaluated on the colour-stripped
    companion members.
    """
    g = g or TrivialGeometry()
    if measure == "uniform":
        members = _members_tuple(c, n)
        hits = sum(1 for m in members if event(m))
        return Fraction(hits, len(members))
    if measure != "delta":
        raise ValueError(f"unknown measure {measure!r}")
    if isinstance(c.rule, Colourable):
        companion = companion_coloured(c)
        total = Fraction(0)
        for m, p in delta_table(companion, n, g).items():
            if event(relational_reduct(m)):
                total += p
        return total
    total = Fraction(0)
    for m, p in delta_table(c, n, g).items():
        if event(m):
            total += p
    return total


def monte_carlo(event, sampler, trials: int, seed: int,
                stream_base: int = 0) -> ProbResult:
    """Estimate P(event) over independent draws; trial i uses the
    deterministic substream (seed, stream_base + i)."""
    if trials <= 0:
        raise ValueError("need at least one trial")
    successes = 0
    for i in range(trials):
        rng = Rng(seed, stream_base + i)
        if event(sampler(rng)):
            successes += 1
    low, high = wilson_interval(successes, trials)
    return ProbResult(value=successes / trials, ci_low=low, ci_high=high,
                      trials=trials, successes=successes)
