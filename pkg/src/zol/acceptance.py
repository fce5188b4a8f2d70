"""The go/no-go checks behind `zol verify`.

Each criterion is a self-contained function returning a CriterionResult;
run_all executes the lot in order. The same results back the pytest
gate, so the CLI and the test suite cannot drift apart.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb, sqrt

from .axioms import ExtensionPair, multiplicity, substitution_images
from .classes import (builtin_class, class_names, condition_star,
                      check_disjoint_amalgamation, amalgamate_triple,
                      enumerate_members, verify_star_witness)
from .colouring import (build_colour_link, build_palette, class_sizes,
                        colouring_from_predicates, elementary_symmetric,
                        is_rich, multichromatic_subset_count,
                        multichromatic_tuple_count,
                        non_rich_multichromatic_bound,
                        non_rich_rainbow_bound, power_sum,
                        rainbow_subset_count, rainbow_tuple_count,
                        richness_threshold, same_colour_linked,
                        surjection_count, verify_colour_link,
                        verify_palette)
from .events import exact_event_probability, resolve_events
from .measures import (delta_table, exact_probability, fast_path,
                       monte_carlo, sample_delta)
from .pregeometry import GF2Geometry, TrivialGeometry
from .rng import Rng
from .structures import graph, vocabulary

TRIALS = 2000
SEED = 2026


@dataclass(frozen=True)
class CriterionResult:
    cid: str
    description: str
    passed: bool
    details: str


def _result(cid, description, passed, details):
    return CriterionResult(cid, description, bool(passed), details)


# ---------------------------------------------------------------------------

def criterion_1():
    """Triangle-free star bound: the uniform proportion of members
    carrying the removable pattern with site multiplicity >= 2 stays
    at or below 2/3 for n = 3..7."""
    c = builtin_class("triangle-free")
    g = TrivialGeometry()
    ev = resolve_events("star-mult-ge:2", c, g)[0]
    bound = Fraction(2, 3)
    values = []
    ok = True
    for n in range(3, 8):
        p = exact_event_probability(c, g, ev, n, "uniform")
        values.append(f"n={n}: {p}")
        ok = ok and p <= bound
    return _result("1", "triangle-free star proportion <= 2/3, n=3..7",
                   ok, "; ".join(values))


def criterion_2():
    """Replacing any edge copy by a nonedge drops the common-neighbour
    pair multiplicity to exactly 0, for every triangle-free structure
    with an edge on at most 6 elements."""
    c = builtin_class("triangle-free")
    vocab = c.vocab
    edge = graph(2, [(1, 2)])
    nonedge = graph(2, [])
    pair = ExtensionPair(nonedge, graph(3, [(1, 3), (2, 3)]), (1, 2))
    checked = 0
    bad = None
    for n in range(2, 7):
        for m in enumerate_members(c, n):
            if m.rels[0] == 0:
                continue
            for image in substitution_images(m, nonedge, edge):
                checked += 1
                if multiplicity(image, pair) != 0:
                    bad = (m, image)
                    break
            if bad:
                break
        if bad:
            break
    detail = f"{checked} substitution images checked, all multiplicity 0"
    if bad:
        detail = f"counterexample after {checked} images: {bad[1].rels}"
    return _result("2", "edge-to-nonedge substitution kills the pair "
                   "multiplicity (n <= 6)", bad is None, detail)


def criterion_3():
    """The removable-tuple witness exists for the triangle pattern and
    is absent for the loop/opposite-pair patterns, with the witness
    re-verified independently."""
    tf = builtin_class("triangle-free")
    w = condition_star(tf.rule.members)
    ok_tf = w is not None and verify_star_witness(tf.rule.members, w)
    oriented = builtin_class("oriented")
    w2 = condition_star(oriented.rule.members)
    ok_or = w2 is None
    detail = (f"triangle witness: {None if w is None else (w.symbol, w.tup)}"
              f"; loop/opposite-pair witness: "
              f"{None if w2 is None else (w2.symbol, w2.tup)}")
    return _result("3", "removable-tuple witness found and verified / "
                   "correctly absent", ok_tf and ok_or, detail)


def _colour_maps(n, l):
    gamma = [1] * n
    while True:
        yield tuple(gamma)
        i = n - 1
        while i >= 0 and gamma[i] == l:
            gamma[i] = 1
            i -= 1
        if i < 0:
            return
        gamma[i] += 1


def criterion_4():
    """Closed-form colour counts agree with brute force for every
    colour map with n <= 6, l <= 3, m <= 3, and the surjection identity
    linking tuple and subset counts holds exactly up to m = 4."""
    checked = 0
    for l in (2, 3):
        for n in range(0, 7):
            for gamma in _colour_maps(n, l):
                sizes = class_sizes(gamma, l)
                for m in (1, 2, 3):
                    brute_t = 0
                    for code in range(n ** m):
                        tup, c0 = [], code
                        for _ in range(m):
                            tup.append(c0 % n + 1)
                            c0 //= n
                        if len({gamma[e - 1] for e in tup}) >= 2:
                            brute_t += 1
                    if multichromatic_tuple_count(sizes, m) != brute_t:
                        return _result("4", "colour counting closed forms "
                                       "match brute force", False,
                                       f"tuples l={l} n={n} m={m} "
                                       f"gamma={gamma}")
                    brute_r = 0
                    for code in range(n ** m):
                        tup, c0 = [], code
                        for _ in range(m):
                            tup.append(c0 % n + 1)
                            c0 //= n
                        cols = [gamma[e - 1] for e in tup]
                        if len(set(cols)) == m:
                            brute_r += 1
                    if rainbow_tuple_count(sizes, m) != brute_r:
                        return _result("4", "colour counting closed forms "
                                       "match brute force", False,
                                       f"rainbow tuples l={l} n={n} m={m} "
                                       f"gamma={gamma}")
                    subsets = _subsets_of(n, m)
                    brute_s = sum(
                        1 for s in subsets
                        if len({gamma[e - 1] for e in s}) >= 2)
                    if multichromatic_subset_count(sizes, m) != brute_s:
                        return _result("4", "colour counting closed forms "
                                       "match brute force", False,
                                       f"subsets l={l} n={n} m={m} "
                                       f"gamma={gamma}")
                    brute_rs = sum(
                        1 for s in subsets
                        if len({gamma[e - 1] for e in s}) == m)
                    if rainbow_subset_count(sizes, m) != brute_rs:
                        return _result("4", "colour counting closed forms "
                                       "match brute force", False,
                                       f"rainbow subsets l={l} n={n} "
                                       f"m={m} gamma={gamma}")
                    checked += 4
                for m in (1, 2, 3, 4):
                    lhs = multichromatic_tuple_count(sizes, m)
                    rhs = sum(multichromatic_subset_count(sizes, i)
                              * surjection_count(i, m)
                              for i in range(2, m + 1))
                    if lhs != rhs:
                        return _result("4", "colour counting closed forms "
                                       "match brute force", False,
                                       f"identity l={l} n={n} m={m} "
                                       f"gamma={gamma}")
                    checked += 1
    return _result("4", "colour counting closed forms match brute force "
                   "(n <= 6, l <= 3)", True, f"{checked} comparisons")


def _subsets_of(n, m):
    if m > n:
        return []
    out = []
    idx = list(range(1, m + 1))
    while True:
        out.append(tuple(idx))
        i = m - 1
        while i >= 0 and idx[i] == n - (m - 1 - i):
            i -= 1
        if i < 0:
            return out
        idx[i] += 1
        for j in range(i + 1, m):
            idx[j] = idx[j - 1] + 1


def criterion_5():
    """Deficient-colouring bounds hold on 10^4 random non-rich colour
    maps per shape; both symmetric-function extremes sit at the balanced
    point; the balanced rainbow density strictly drops when a colour is
    removed, for all 2 <= m <= l <= 8."""
    for l in (2, 3):
        for m in (2, 3):
            a = richness_threshold(l, m)
            rng = Rng(50, (l << 8) | m)
            bound_t = non_rich_multichromatic_bound(l, m, a)
            bound_r = non_rich_rainbow_bound(l, m, a)
            for _ in range(10_000):
                n = a + 1 + rng.randint(50)
                p_def = rng.randint((n - 1) // a + 1)
                rest = n - p_def
                if l == 2:
                    sizes = (p_def, rest)
                else:
                    p2 = rng.randint(rest + 1)
                    sizes = (p_def, p2, rest - p2)
                if is_rich(sizes, a):
                    return _result("5", "deficient-colouring bounds",
                                   False, f"sampler produced a rich map "
                                   f"{sizes}")
                if multichromatic_tuple_count(sizes, m) > bound_t * n ** m:
                    return _result("5", "deficient-colouring bounds",
                                   False, f"tuple bound fails l={l} m={m} "
                                   f"sizes={sizes}")
                if rainbow_subset_count(sizes, m) > bound_r * n ** m:
                    return _result("5", "deficient-colouring bounds",
                                   False, f"rainbow bound fails l={l} "
                                   f"m={m} sizes={sizes}")
    for l in (2, 3):
        for m in (2, 3):
            rng = Rng(51, (l << 8) | m)
            balanced = (1.0 / l,) * l
            ps_bal = power_sum(balanced, m)
            em_bal = elementary_symmetric(balanced, m)
            for _ in range(1000):
                cuts = sorted(rng.random() for _ in range(l - 1))
                xs = []
                prev = 0.0
                for c0 in cuts + [1.0]:
                    xs.append(c0 - prev)
                    prev = c0
                if power_sum(xs, m) < ps_bal - 1e-9:
                    return _result("5", "deficient-colouring bounds",
                                   False, f"power-sum minimum beaten at "
                                   f"{xs}")
                if elementary_symmetric(xs, m) > em_bal + 1e-9:
                    return _result("5", "deficient-colouring bounds",
                                   False, f"symmetric maximum beaten at "
                                   f"{xs}")
    for l in range(2, 9):
        for m in range(2, l + 1):
            lhs = Fraction(comb(l, m), l ** m)
            rhs = Fraction(comb(l - 1, m), (l - 1) ** m)
            if not lhs > rhs:
                return _result("5", "deficient-colouring bounds", False,
                               f"balanced density not strict at l={l} "
                               f"m={m}")
    return _result("5", "deficient-colouring bounds, balanced extremes, "
                   "strict density drop", True,
                   "4 x 10^4 random maps, 4 x 10^3 sweep points, 28 "
                   "exact density pairs")


def criterion_6():
    """Both gadgets verify their invariants exhaustively for l in
    {2,3,4} and arity 2 and 3, plain always and strong when the arity
    fits under l."""
    cells = []
    ok = True
    for r in (2, 3):
        vocab = vocabulary(("R", r))
        for l in (2, 3, 4):
            for strong in (False, True):
                if strong and r > l:
                    continue
                link = build_colour_link(vocab, l, strong)
                pal = build_palette(vocab, l, strong)
                good = (verify_colour_link(link, l, strong)
                        and verify_palette(pal, l, strong))
                ok = ok and good
                cells.append(f"l={l},r={r},{'s' if strong else 'p'}:"
                             f"{'ok' if good else 'FAIL'}")
    return _result("6", "colour-link and palette gadgets verify "
                   "exhaustively", ok, " ".join(cells))


def criterion_7():
    """Measure sanity: total mass one for every registry class at
    n <= 4 (and under the rank-2 linear geometry), the guard-free event
    has probability exactly 2^-n, and the fast samplers agree with the
    chain exactly and empirically."""
    g = TrivialGeometry()
    details = []
    for name in class_names():
        c = builtin_class(name)
        for n in range(1, 5):
            total = sum(delta_table(c, n, g).values())
            if total != 1:
                return _result("7", "measure sanity", False,
                               f"mass {total} for {name} at n={n}")
    details.append("mass 1 on all 14 registry classes, n <= 4")
    for n, geo in ((2, GF2Geometry(1)), (4, GF2Geometry(2))):
        total = sum(delta_table(builtin_class("graphs"), n, geo).values())
        if total != 1:
            return _result("7", "measure sanity", False,
                           f"mass {total} under gf2 at n={n}")
    details.append("mass 1 under gf2 geometry")

    guarded = builtin_class("guarded-edges")
    ev = resolve_events("unary-empty:Q", guarded, g)[0]
    for n in range(1, 6):
        p = exact_probability(guarded, n, ev.test, measure="delta")
        if p != Fraction(1, 2 ** n):
            return _result("7", "measure sanity", False,
                           f"guard-free probability {p} at n={n}")
    details.append("guard-free probability 2^-n, n <= 5")

    for name in ("graphs", "oriented", "guarded-edges", "coloured:2",
                 "partial-2-coloured"):
        c = builtin_class(name)
        fp = fast_path(c)
        if fp is None:
            return _result("7", "measure sanity", False,
                           f"no fast path for {name}")
        for n in range(1, 5):
            table = delta_table(c, n, g)
            for m, p in table.items():
                if fp.prob(m) != p:
                    return _result("7", "measure sanity", False,
                                   f"fast path disagrees on {name} n={n}")
    details.append("fast paths equal the chain exactly, n <= 4")

    c2 = builtin_class("coloured:2")
    table = delta_table(c2, 3, g)
    counts = {}
    rng = Rng(70, 0)
    draws = 100_000
    for _ in range(draws):
        m = sample_delta(c2, 3, rng)
        counts[m] = counts.get(m, 0) + 1
    worst = 0.0
    for m, p in table.items():
        p = float(p)
        freq = counts.get(m, 0) / draws
        sigma = sqrt(p * (1 - p) / draws)
        worst = max(worst, abs(freq - p) / sigma)
        if abs(freq - p) > 3 * sigma:
            return _result("7", "measure sanity", False,
                           f"cell off by {abs(freq - p) / sigma:.2f} "
                           "sigma")
    details.append(f"10^5 draws within 3 sigma per cell "
                   f"(worst {worst:.2f})")
    return _result("7", "measure sanity: mass, guard-free probability, "
                   "fast paths", True, "; ".join(details))


def criterion_8():
    """Linked elements always share their carried colour: zero
    violations over 10^3 sampled 2-coloured structures at each
    n = 6..12."""
    c = builtin_class("coloured:2")
    link = build_colour_link(
        vocabulary(("E", 2, "symirr")), 2, strong=False)
    checked = 0
    for n in range(6, 13):
        rng = Rng(80, n)
        for _ in range(1000):
            m = sample_delta(c, n, rng)
            gamma = colouring_from_predicates(m)
            for x in range(1, n + 1):
                for y in range(x + 1, n + 1):
                    if same_colour_linked(m, x, y, link):
                        checked += 1
                        if gamma[x - 1] != gamma[y - 1]:
                            return _result(
                                "8", "linked implies same colour", False,
                                f"violation at n={n}, pair ({x},{y})")
    return _result("8", "linked implies same colour on sampled "
                   "2-coloured structures", True,
                   f"{checked} linked pairs, zero violations")


def criterion_9a():
    """Single-point extension axiom probabilities for loop-free
    antisymmetric digraphs: nondecreasing over n = 3..7 and at least
    0.9 at n = 7."""
    c = builtin_class("oriented")
    g = TrivialGeometry()
    events = resolve_events("each-1-ext", c, g)
    lines = []
    ok = True
    for ev in events:
        vals = [exact_event_probability(c, g, ev, n, "uniform")
                for n in range(3, 8)]
        trend = all(a <= b for a, b in zip(vals, vals[1:]))
        high = vals[-1] >= Fraction(9, 10)
        ok = ok and trend and high
        lines.append(f"{ev.name}: n=7 value {float(vals[-1]):.4f} "
                     f"(trend {'ok' if trend else 'BROKEN'}, "
                     f"threshold {'ok' if high else 'MISSED'})")
    return _result("9a", "one-point extension probabilities "
                   "nondecreasing and >= 0.9 at n = 7", ok,
                   "; ".join(lines))


def criterion_9b():
    """Sampled 2-colourable structures: the fractions that are uniquely
    colourable and whose linked relation defines the colouring are
    nondecreasing over n in {8,10,12,14}."""
    c = builtin_class("colourable:2")
    g = TrivialGeometry()
    ns = (8, 10, 12, 14)
    lines = []
    ok = True
    row = 0
    for name in ("uniquely-colourable", "xi-defines-colour"):
        ev = resolve_events(name, c, g)[0]
        fracs = []
        for n in ns:
            def sampler(rng, n=n):
                return sample_delta(c, n, rng, g)
            r = monte_carlo(ev.test, sampler, TRIALS, SEED,
                            stream_base=row << 32)
            fracs.append(r.value)
            row += 1
        trend = all(a <= b for a, b in zip(fracs, fracs[1:]))
        ok = ok and trend
        lines.append(f"{name}: "
                     + " ".join(f"{f:.3f}" for f in fracs)
                     + (" (nondecreasing)" if trend else " (BROKEN)"))
    return _result("9b", "unique-colouring and linked-colouring "
                   "fractions nondecreasing", ok, "; ".join(lines))


def criterion_9c():
    """Sampled 2-coloured structures at n in {20,30,40}: over 95
    percent carry a colouring with both classes of size at least n/4."""
    c = builtin_class("coloured:2")
    g = TrivialGeometry()
    a = richness_threshold(2, 2)
    if a != 4:
        return _result("9c", "sampled colourings are n/4-rich", False,
                       f"richness threshold came out {a}")
    ev = resolve_events(f"richly-coloured:{a}", c, g)[0]
    lines = []
    ok = True
    for row, n in enumerate((20, 30, 40)):
        def sampler(rng, n=n):
            return sample_delta(c, n, rng, g)
        r = monte_carlo(ev.test, sampler, TRIALS, SEED,
                        stream_base=(100 + row) << 32)
        good = r.value > 0.95
        ok = ok and good
        lines.append(f"n={n}: {r.value:.3f}"
                     + ("" if good else " (<= 0.95)"))
    return _result("9c", "sampled colourings are n/4-rich over 95 "
                   "percent of the time", ok, "; ".join(lines))


def criterion_10():
    """Disjoint amalgamation holds for triangle-free structures up to
    n = 6, and the 2-colourable class rejects the odd-cycle triple with
    a concrete counterexample."""
    tf = builtin_class("triangle-free")
    g = TrivialGeometry()
    v1 = check_disjoint_amalgamation(tf, g, 6)
    c2 = builtin_class("colourable:2")
    base = graph(2, [])
    b1 = graph(3, [(1, 3), (2, 3)])
    b2 = graph(4, [(1, 3), (3, 4), (2, 4)])
    v2 = amalgamate_triple(c2, base, b1, b2)
    ok = v1.holds and not v2.holds and v2.counterexample is not None
    detail = (f"triangle-free up to 6: {v1.status}; odd-cycle triple: "
              f"{v2.status}")
    return _result("10", "amalgamation holds for triangle-free, fails "
                   "on the odd-cycle triple", ok, detail)


# ---------------------------------------------------------------------------

CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4,
            criterion_5, criterion_6, criterion_7, criterion_8,
            criterion_9a, criterion_9b, criterion_9c, criterion_10)


def run_all():
    return [fn() for fn in CRITERIA]


def format_report(results) -> str:
    lines = []
    for r in results:
        tag = "PASS" if r.passed else "FAIL"
        lines.append(f"[{tag}] {r.cid}: {r.description}")
        lines.append(f"       {r.details}")
    failed = sum(1 for r in results if not r.passed)
    lines.append(f"{len(results) - failed}/{len(results)} criteria "
                 "passed")
    return "\n".join(lines)
