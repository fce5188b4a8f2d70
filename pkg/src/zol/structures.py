"""Finite relational structures with universe {1..n}.

Relations are stored per symbol as an integer bitmask over that symbol's
slot list. A slot is a canonical tuple position: for an ordinary symbol of
arity r the slots are all of [n]^r in lexicographic order, for a symmetric
irreflexive symbol they are the strictly increasing r-tuples. Bit i of the
mask says whether slot i is in the relation, which makes labelled equality,
hashing and enumeration cheap.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations, product

from .errors import BudgetExceeded, ParseError

ENUMERATION_BIT_BUDGET = 24
CANONICAL_MAX_N = 9


@dataclass(frozen=True)
class RelationSymbol:
    name: str
    arity: int
    symmetric_irreflexive: bool = False
    colour_predicate: bool = False

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError(f"symbol {self.name}: arity must be positive")
        if self.symmetric_irreflexive and self.arity < 2:
            raise ValueError(
                f"symbol {self.name}: symmetric irreflexive needs arity >= 2")
        if self.colour_predicate and self.arity != 1:
            raise ValueError(f"symbol {self.name}: colour predicates are unary")


@dataclass(frozen=True)
class Vocabulary:
    symbols: tuple

    def __post_init__(self):
        names = [s.name for s in self.symbols]
        if len(set(names)) != len(names):
            raise ValueError("duplicate symbol names")

    def index(self, name: str) -> int:
        for i, s in enumerate(self.symbols):
            if s.name == name:
                return i
        raise KeyError(name)

    def symbol(self, name: str) -> RelationSymbol:
        return self.symbols[self.index(name)]

    @property
    def max_arity(self) -> int:
        return max((s.arity for s in self.symbols), default=0)

    def colour_names(self):
        return tuple(s.name for s in self.symbols if s.colour_predicate)

    def relational(self):
        """Symbols that are not colour predicates."""
        return tuple(s for s in self.symbols if not s.colour_predicate)


def vocabulary(*specs) -> Vocabulary:
    """Shorthand: vocabulary(("E", 2, "symirr"), ("P1", 1, "colour"), ...)."""
    syms = []
    for spec in specs:
        name, arity, *flags = spec
        syms.append(RelationSymbol(
            name, arity,
            symmetric_irreflexive="symirr" in flags,
            colour_predicate="colour" in flags,
        ))
    return Vocabulary(tuple(syms))


@lru_cache(maxsize=None)
def slot_tuples(sym: RelationSymbol, n: int):
    base = range(1, n + 1)
    if sym.symmetric_irreflexive:
        return tuple(combinations(base, sym.arity))
    return tuple(product(base, repeat=sym.arity))


@lru_cache(maxsize=None)
def slot_index(sym: RelationSymbol, n: int):
    return {t: i for i, t in enumerate(slot_tuples(sym, n))}


def _canonical_tuple(sym, tup):
    if sym.symmetric_irreflexive:
        if len(set(tup)) != len(tup):
            raise ValueError(
                f"symbol {sym.name}: repeated entries in {tup} "
                "violate irreflexivity")
        return tuple(sorted(tup))
    return tuple(tup)


@dataclass(frozen=True)
class Structure:
    vocab: Vocabulary
    n: int
    rels: tuple  # one int bitmask per symbol, in vocabulary order

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("universe size must be >= 0")
        if len(self.rels) != len(self.vocab.symbols):
            raise ValueError("one relation mask per symbol required")

    @property
    def universe(self):
        return range(1, self.n + 1)

    def mask(self, name: str) -> int:
        return self.rels[self.vocab.index(name)]

    def has(self, sym_i: int, tup) -> bool:
        sym = self.vocab.symbols[sym_i]
        if sym.symmetric_irreflexive:
            if len(set(tup)) != len(tup):
                return False
            tup = tuple(sorted(tup))
        idx = slot_index(sym, self.n).get(tuple(tup))
        if idx is None:
            return False
        return bool(self.rels[sym_i] >> idx & 1)

    def has_named(self, name: str, tup) -> bool:
        return self.has(self.vocab.index(name), tup)

    def tuples(self, sym_i: int):
        """Stored canonical tuples of one symbol, in slot order."""
        slots = slot_tuples(self.vocab.symbols[sym_i], self.n)
        mask = self.rels[sym_i]
        while mask:
            low = mask & -mask
            yield slots[low.bit_length() - 1]
            mask ^= low

    def tuple_count(self, sym_i: int) -> int:
        return self.rels[sym_i].bit_count()

    def colour_set(self, element: int):
        """Names of the colour predicates holding on one element."""
        out = []
        for i, sym in enumerate(self.vocab.symbols):
            if sym.colour_predicate and self.has(i, (element,)):
                out.append(sym.name)
        return frozenset(out)


def make_structure(vocab: Vocabulary, n: int, rels=None) -> Structure:
    """Build a structure from explicit tuple collections.

    rels maps symbol name to an iterable of tuples; entries are validated
    against the universe and the symmetry flags.
    """
    masks = [0] * len(vocab.symbols)
    for name, tuples in (rels or {}).items():
        i = vocab.index(name)
        sym = vocab.symbols[i]
        index = slot_index(sym, n)
        for tup in tuples:
            tup = tuple(tup)
            if len(tup) != sym.arity:
                raise ValueError(f"symbol {name}: arity mismatch on {tup}")
            if not all(1 <= e <= n for e in tup):
                raise ValueError(f"symbol {name}: entry out of range in {tup}")
            canon = _canonical_tuple(sym, tup)
            masks[i] |= 1 << index[canon]
    return Structure(vocab, n, tuple(masks))


def graph(n: int, edges=(), symbol="E") -> Structure:
    """Undirected graph on [n] as a one-symbol structure."""
    vocab = vocabulary((symbol, 2, "symirr"))
    return make_structure(vocab, n, {symbol: edges})


def relational_reduct(m: Structure) -> Structure:
    """Drop all colour predicates, keeping the relational symbols."""
    keep = [(i, s) for i, s in enumerate(m.vocab.symbols)
            if not s.colour_predicate]
    vocab = Vocabulary(tuple(s for _, s in keep))
    return Structure(vocab, m.n, tuple(m.rels[i] for i, _ in keep))


@dataclass(frozen=True)
class Witness:
    """A relationship inside a structure, named by symbol and tuple."""
    structure: Structure
    symbol: str
    tup: tuple

    def __post_init__(self):
        i = self.structure.vocab.index(self.symbol)
        if not self.structure.has(i, self.tup):
            raise ValueError("witness tuple is not in the relation")


# ---------------------------------------------------------------------------
# parsing and serialization

def parse_vocabulary(text: str) -> Vocabulary:
    """Parse `sym <name> <arity> [symirr] [colour]` lines."""
    syms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "sym":
            raise ParseError(f"expected 'sym', got {parts[0]!r}", lineno)
        if len(parts) < 3:
            raise ParseError("need a name and an arity", lineno)
        name = parts[1]
        try:
            arity = int(parts[2])
        except ValueError:
            raise ParseError(f"bad arity {parts[2]!r}", lineno) from None
        flags = parts[3:]
        for f in flags:
            if f not in ("symirr", "colour"):
                raise ParseError(f"unknown flag {f!r}", lineno)
        try:
            syms.append(RelationSymbol(
                name, arity,
                symmetric_irreflexive="symirr" in flags,
                colour_predicate="colour" in flags))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    try:
        return Vocabulary(tuple(syms))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def parse_structures(text: str, vocab: Vocabulary):
    """Parse one or more `structure <name> ... end` blocks.

    Returns a dict name -> Structure preserving file order.
    """
    out = {}
    name = None
    n = None
    rels = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "structure":
            if name is not None:
                raise ParseError("previous structure not closed with 'end'",
                                 lineno)
            if len(parts) != 2:
                raise ParseError("structure needs exactly one name", lineno)
            name, n, rels = parts[1], None, {}
        elif head == "n":
            if name is None:
                raise ParseError("'n' outside a structure block", lineno)
            if n is not None:
                raise ParseError("duplicate 'n' line", lineno)
            try:
                n = int(parts[1])
            except (IndexError, ValueError):
                raise ParseError("bad universe size", lineno) from None
            if n < 0:
                raise ParseError("universe size must be >= 0", lineno)
        elif head == "rel":
            if name is None or n is None:
                raise ParseError("'rel' before 'n'", lineno)
            if len(parts) < 2:
                raise ParseError("rel needs a symbol name", lineno)
            sym_name = parts[1]
            try:
                sym = vocab.symbol(sym_name)
            except KeyError:
                raise ParseError(f"unknown symbol {sym_name!r}",
                                 lineno) from None
            try:
                entries = tuple(int(p) for p in parts[2:])
            except ValueError:
                raise ParseError("relation entries must be integers",
                                 lineno) from None
            if len(entries) != sym.arity:
                raise ParseError(
                    f"symbol {sym_name} has arity {sym.arity}, "
                    f"got {len(entries)} entries", lineno)
            if not all(1 <= e <= n for e in entries):
                raise ParseError(f"entry out of range in {entries}", lineno)
            try:
                _canonical_tuple(sym, entries)
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            rels.setdefault(sym_name, []).append(entries)
        elif head == "end":
            if name is None:
                raise ParseError("'end' without a structure", lineno)
            if n is None:
                raise ParseError("structure closed without 'n'", lineno)
            if name in out:
                raise ParseError(f"duplicate structure name {name!r}", lineno)
            out[name] = make_structure(vocab, n, rels)
            name, n, rels = None, None, None
        else:
            raise ParseError(f"unknown directive {head!r}", lineno)
    if name is not None:
        raise ParseError("unterminated structure block")
    return out


def parse_structure(text: str, vocab: Vocabulary) -> Structure:
    parsed = parse_structures(text, vocab)
    if len(parsed) != 1:
        raise ParseError(f"expected exactly one structure, got {len(parsed)}")
    return next(iter(parsed.values()))


def serialize_structure(m: Structure, name="m") -> str:
    lines = [f"structure {name}", f"n {m.n}"]
    for i, sym in enumerate(m.vocab.symbols):
        for tup in m.tuples(i):
            lines.append("rel " + sym.name + " " + " ".join(map(str, tup)))
    lines.append("end")
    return "\n".join(lines) + "\n"


def serialize_vocabulary(vocab: Vocabulary) -> str:
    lines = []
    for s in vocab.symbols:
        flags = ""
        if s.symmetric_irreflexive:
            flags += " symirr"
        if s.colour_predicate:
            flags += " colour"
        lines.append(f"sym {s.name} {s.arity}{flags}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# substructures and relabelling

def induced_substructure(m: Structure, elements) -> Structure:
    """Restrict to a subset of the universe, relabelled 1..k.

    Elements are relabelled in increasing order of their original label.
    """
    keep = sorted(set(elements))
    if not all(1 <= e <= m.n for e in keep):
        raise ValueError("elements outside the universe")
    relabel = {e: i + 1 for i, e in enumerate(keep)}
    keepset = set(keep)
    masks = []
    for i, sym in enumerate(m.vocab.symbols):
        index = slot_index(sym, len(keep))
        mask = 0
        for tup in m.tuples(i):
            if all(e in keepset for e in tup):
                mask |= 1 << index[tuple(relabel[e] for e in tup)]
        masks.append(mask)
    return Structure(m.vocab, len(keep), tuple(masks))


def relabel_structure(m: Structure, mapping) -> Structure:
    """Apply a bijection [n] -> [n], given as a dict or a callable."""
    get = mapping.__getitem__ if isinstance(mapping, dict) else mapping
    masks = []
    for i, sym in enumerate(m.vocab.symbols):
        index = slot_index(sym, m.n)
        mask = 0
        for tup in m.tuples(i):
            moved = tuple(get(e) for e in tup)
            if sym.symmetric_irreflexive:
                moved = tuple(sorted(moved))
            mask |= 1 << index[moved]
        masks.append(mask)
    return Structure(m.vocab, m.n, tuple(masks))


def substitute(m: Structure, b_new: Structure, site) -> Structure:
    """Replace everything induced on a site by another structure.

    The site (a subset of m's universe, |site| = b_new.n) is identified with
    b_new's universe in increasing order. Tuples of m lying entirely inside
    the site are discarded; b_new's tuples are transported in; every tuple
    touching the outside survives unchanged.
    """
    if b_new.vocab != m.vocab:
        raise ValueError("vocabulary mismatch")
    site = sorted(set(site))
    if len(site) != b_new.n:
        raise ValueError("site size must equal the replacement's universe")
    if not all(1 <= e <= m.n for e in site):
        raise ValueError("site outside the universe")
    into = {i + 1: e for i, e in enumerate(site)}
    siteset = set(site)
    masks = []
    for i, sym in enumerate(m.vocab.symbols):
        index = slot_index(sym, m.n)
        mask = 0
        for tup in m.tuples(i):
            if not all(e in siteset for e in tup):
                mask |= 1 << index[tup]
        for tup in b_new.tuples(i):
            moved = tuple(into[e] for e in tup)
            if sym.symmetric_irreflexive:
                moved = tuple(sorted(moved))
            mask |= 1 << index[moved]
        masks.append(mask)
    return Structure(m.vocab, m.n, tuple(masks))


# ---------------------------------------------------------------------------
# embeddings

def is_weak_embedding(f: dict, a: Structure, m: Structure) -> bool:
    """Injective map preserving relations forward only."""
    if a.vocab != m.vocab:
        return False
    if set(f.keys()) != set(a.universe):
        return False
    values = list(f.values())
    if len(set(values)) != len(values):
        return False
    if not all(1 <= v <= m.n for v in values):
        return False
    for i in range(len(a.vocab.symbols)):
        for tup in a.tuples(i):
            if not m.has(i, tuple(f[e] for e in tup)):
                return False
    return True


def is_embedding(f: dict, a: Structure, m: Structure) -> bool:
    """Injective map preserving relations in both directions."""
    if not is_weak_embedding(f, a, m):
        return False
    for i, sym in enumerate(a.vocab.symbols):
        for tup in slot_tuples(sym, a.n):
            if not a.has(i, tup) and m.has(i, tuple(f[e] for e in tup)):
                return False
    return True


def _step_constraints(a: Structure, mode: str):
    # For element j, the canonical a-slots whose largest entry is j, split
    # into required-present and (strong mode) required-absent.
    present = [[] for _ in range(a.n + 1)]
    absent = [[] for _ in range(a.n + 1)]
    for i, sym in enumerate(a.vocab.symbols):
        for tup in slot_tuples(sym, a.n):
            top = max(tup)
            if a.has(i, tup):
                present[top].append((i, tup))
            elif mode == "strong":
                absent[top].append((i, tup))
    return present, absent


def enumerate_embeddings(a: Structure, m: Structure, partial=None,
                         mode="strong"):
    """All embeddings of a into m extending a partial map.

    mode "strong" yields embeddings, mode "weak" yields weak embeddings.
    Results come in lexicographic order of the assigned target vector
    (f(1), ..., f(a.n)), so the output order is deterministic.
    """
    if mode not in ("strong", "weak"):
        raise ValueError(f"unknown mode {mode!r}")
    if a.vocab != m.vocab:
        raise ValueError("vocabulary mismatch")
    partial = dict(partial or {})
    for e, v in partial.items():
        if not (1 <= e <= a.n) or not (1 <= v <= m.n):
            raise ValueError("partial map out of range")
    if len(set(partial.values())) != len(partial):
        return

    present, absent = _step_constraints(a, mode)
    f = dict(partial)
    used = set(partial.values())

    def consistent_at(j):
        for i, tup in present[j]:
            if not m.has(i, tuple(f[e] for e in tup)):
                return False
        for i, tup in absent[j]:
            if m.has(i, tuple(f[e] for e in tup)):
                return False
        return True

    def walk(j):
        if j > a.n:
            yield dict(f)
            return
        if j in f:
            if consistent_at(j):
                yield from walk(j + 1)
            return
        for v in m.universe:
            if v in used:
                continue
            f[j] = v
            used.add(v)
            if consistent_at(j):
                yield from walk(j + 1)
            del f[j]
            used.remove(v)

    yield from walk(1)


def find_embedding(a, m, partial=None, mode="strong"):
    """First embedding or None; early exit for existence checks."""
    for f in enumerate_embeddings(a, m, partial, mode):
        return f
    return None


def _profile(m: Structure):
    # per-element incidence counts, one entry per symbol; isomorphism invariant
    counts = [[0] * len(m.vocab.symbols) for _ in range(m.n + 1)]
    for i in range(len(m.vocab.symbols)):
        for tup in m.tuples(i):
            for e in set(tup):
                counts[e][i] += 1
    return sorted(tuple(c) for c in counts[1:])


def are_isomorphic(a: Structure, b: Structure) -> bool:
    if a.vocab != b.vocab or a.n != b.n:
        return False
    if a.rels == b.rels:
        return True
    if any(x.bit_count() != y.bit_count() for x, y in zip(a.rels, b.rels)):
        return False
    if _profile(a) != _profile(b):
        return False
    return find_embedding(a, b, mode="strong") is not None


@lru_cache(maxsize=65536)
def canonical_form(m: Structure) -> Structure:
    """The relabelling with the least relation-bitmask vector.

    The same bit order drives enumerate_structures, so canonical forms are
    comparable with enumeration output. Exhaustive over all n! relabellings,
    refused above CANONICAL_MAX_N.
    """
    if m.n > CANONICAL_MAX_N:
        raise BudgetExceeded(
            f"canonical form is exhaustive and capped at n = {CANONICAL_MAX_N}")
    if m.n <= 1:
        return m
    best = m.rels
    for perm in permutations(range(1, m.n + 1)):
        mapping = {i + 1: p for i, p in enumerate(perm)}
        cand = relabel_structure(m, mapping).rels
        if cand < best:
            best = cand
    return Structure(m.vocab, m.n, best)


# ---------------------------------------------------------------------------
# enumeration

def structure_bits(vocab: Vocabulary, n: int) -> int:
    return sum(len(slot_tuples(s, n)) for s in vocab.symbols)


def enumerate_structures(vocab: Vocabulary, n: int, filter=None,
                         max_bits=ENUMERATION_BIT_BUDGET):
    """Every structure on [n], in increasing relation-bitmask order.

    The masks are compared as one vector with the first symbol most
    significant. Without a filter the count is 2^(total slot count).
    """
    bits = [len(slot_tuples(s, n)) for s in vocab.symbols]
    total = sum(bits)
    if total > max_bits:
        raise BudgetExceeded(
            f"{total} relation bits exceeds the enumeration budget "
            f"of {max_bits}")
    for combo in product(*(range(1 << b) for b in bits)):
        m = Structure(vocab, n, combo)
        if filter is None or filter(m):
            yield m
