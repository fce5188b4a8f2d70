"""Colourings, gadgets, and the closed-form counting layer."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import (colourings_oracle, multichromatic_subsets_oracle,
                     multichromatic_tuples_oracle, rainbow_subsets_oracle,
                     rainbow_tuples_oracle, surjections_oracle)
from zol.classes import builtin_class
from zol.colouring import (build_colour_link, build_palette, class_sizes,
                           colouring_from_predicates, count_colour_partitions,
                           elementary_symmetric, enumerate_colourings,
                           find_colouring, is_colouring, is_l_colourable,
                           is_rich, multichromatic_subset_count,
                           multichromatic_tuple_count,
                           non_rich_multichromatic_bound,
                           non_rich_rainbow_bound, power_sum,
                           rainbow_subset_count, rainbow_tuple_count,
                           richness_threshold, same_colour_linked,
                           satisfies_colour_compatible_axiom,
                           surjection_count, uniquely_colourable,
                           verify_colour_link, verify_palette)
from zol.structures import graph, make_structure, vocabulary

K3 = graph(3, [(1, 2), (2, 3), (1, 3)])
PATH3 = graph(3, [(1, 2), (2, 3)])
EDGE = graph(2, [(1, 2)])
C5 = graph(5, [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)])


def sizes_st(l):
    return st.tuples(*[st.integers(min_value=0, max_value=6)] * l) \
        .filter(lambda p: sum(p) >= 1)


class TestIsColouring:
    def test_path_alternation(self):
        assert is_colouring(PATH3, (1, 2, 1))
        assert is_colouring(PATH3, (1, 2, 1), strong=True)

    def test_triangle_cannot_reuse_a_colour(self):
        assert not is_colouring(K3, (1, 2, 1))
        assert not is_colouring(K3, (1, 2, 1), strong=True)
        assert is_colouring(K3, (1, 2, 3))

    def test_constant_map_fails_any_tuple(self):
        assert not is_colouring(EDGE, (1, 1))

    def test_colour_predicates_do_not_constrain(self):
        c = builtin_class("coloured:2")
        m = make_structure(c.vocab, 2, {"P1": [(1,), (2,)]})
        assert is_colouring(m, (1, 1))

    def test_plain_unary_tuples_block_everything(self):
        v = vocabulary(("Q", 1), ("E", 2, "symirr"))
        m = make_structure(v, 2, {"Q": [(1,)]})
        assert not is_colouring(m, (1, 2))

    @given(st.data())
    @settings(max_examples=40)
    def test_matches_oracle(self, data):
        n = data.draw(st.integers(min_value=1, max_value=4))
        edges = data.draw(st.lists(
            st.tuples(st.integers(1, n), st.integers(1, n))
            .filter(lambda e: e[0] < e[1]), unique=True))
        m = graph(n, edges)
        l = data.draw(st.integers(min_value=1, max_value=3))
        want = set(colourings_oracle(m, l))
        want_strong = set(colourings_oracle(m, l, strong=True))
        got = set(enumerate_colourings(m, l))
        got_strong = set(enumerate_colourings(m, l, strong=True))
        assert got == want and got_strong == want_strong


class TestEnumeration:
    def test_edge_is_uniquely_two_colourable(self):
        assert len(list(enumerate_colourings(EDGE, 2))) == 2
        assert len(list(enumerate_colourings(EDGE, 2, canonical=True))) == 1
        assert count_colour_partitions(EDGE, 2) == 1
        assert uniquely_colourable(EDGE, 2)

    def test_free_pair_is_not(self):
        free = graph(2)
        assert len(list(enumerate_colourings(free, 2))) == 4
        assert not uniquely_colourable(free, 2)

    def test_odd_cycle_has_no_two_colouring(self):
        assert list(enumerate_colourings(C5, 2)) == []
        assert not is_l_colourable(C5, 2)
        assert find_colouring(C5, 2) is None

    def test_strong_triangle_needs_all_colours(self):
        assert len(list(enumerate_colourings(K3, 3, strong=True))) == 6

    def test_find_colouring_is_proper(self):
        gamma = find_colouring(PATH3, 2)
        assert gamma is not None and is_colouring(PATH3, gamma)


class TestClosedForms:
    def test_spec_values(self):
        assert multichromatic_tuple_count((2, 2), 2) == 8
        assert multichromatic_tuple_count((2, 2, 2), 3) == 192
        assert surjection_count(2, 3) == 6
        assert multichromatic_subset_count((2, 2), 2) == 4
        assert multichromatic_tuple_count((2, 2), 2) \
            == multichromatic_subset_count((2, 2), 2) * surjection_count(2, 2)
        assert elementary_symmetric((2, 2, 2), 2) == 12
        assert rainbow_tuple_count((2, 2, 2), 2) == 24
        assert rainbow_subset_count((1, 1), 2) == 1
        assert rainbow_tuple_count((1, 1), 2) == 2
        assert power_sum((2, 2), 2) == 8

    @given(st.integers(2, 3).flatmap(sizes_st), st.integers(1, 3))
    @settings(max_examples=60)
    def test_against_oracles(self, sizes, m):
        assert multichromatic_tuple_count(sizes, m) \
            == multichromatic_tuples_oracle(sizes, m)
        assert multichromatic_subset_count(sizes, m) \
            == multichromatic_subsets_oracle(sizes, m)
        assert rainbow_tuple_count(sizes, m) \
            == rainbow_tuples_oracle(sizes, m)
        assert rainbow_subset_count(sizes, m) \
            == rainbow_subsets_oracle(sizes, m)

    @given(st.integers(1, 4), st.integers(1, 4))
    def test_surjections_against_oracle(self, i, k):
        assert surjection_count(i, k) == surjections_oracle(i, k)

    @given(st.integers(2, 3).flatmap(sizes_st), st.integers(2, 4))
    @settings(max_examples=60)
    def test_tuples_decompose_into_subsets(self, sizes, m):
        total = sum(multichromatic_subset_count(sizes, i)
                    * surjection_count(i, m)
                    for i in range(2, m + 1))
        assert multichromatic_tuple_count(sizes, m) == total


class TestRichness:
    def test_thresholds(self):
        assert richness_threshold(2, 2) == 4
        assert richness_threshold(3, 2) == 6

    def test_is_rich(self):
        assert is_rich((3, 3), 2)
        assert not is_rich((1, 5), 2)
        assert is_rich((2, 10), 6)

    def test_spec_bound_instances(self):
        # plain bound at l=2, m=2, a=4 with the lopsided split 2+10
        assert multichromatic_tuple_count((2, 10), 2) == 40
        assert non_rich_multichromatic_bound(2, 2, 4) * 144 == 63
        # strong bound at l=3, m=2, a=6 with the split 1+5+6
        assert rainbow_subset_count((1, 5, 6), 2) == 41
        assert non_rich_rainbow_bound(3, 2, 6) * 144 == 60

    @given(st.integers(2, 3), st.integers(2, 3), st.data())
    @settings(max_examples=60)
    def test_bounds_hold_for_non_rich_sizes(self, l, m, data):
        if m > l:
            return
        a = richness_threshold(l, 2)
        sizes = data.draw(sizes_st(l).filter(
            lambda p: not is_rich(p, a)))
        n = sum(sizes)
        assert multichromatic_tuple_count(sizes, m) \
            <= non_rich_multichromatic_bound(l, m, a) * n ** m
        assert rainbow_subset_count(sizes, m) \
            <= non_rich_rainbow_bound(l, m, a) * n ** m


class TestGadgets:
    def test_binary_two_colour_link_is_the_cherry(self):
        link = build_colour_link(vocabulary(("R", 2)), 2)
        assert link.structure.n == 3
        assert (link.a, link.b) == (2, 3)
        got = {frozenset(t) for t in link.structure.tuples(0)}
        assert got == {frozenset((1, 2)), frozenset((1, 3))}

    def test_link_sizes(self):
        for l in (2, 3, 4):
            for r in (2, 3):
                link = build_colour_link(vocabulary(("R", r)), l)
                assert link.structure.n == (r - 1) * l + 1
                assert verify_colour_link(link, l)

    def test_strong_link(self):
        for l in (2, 3, 4):
            for r in (2, 3):
                if r > l:
                    continue
                link = build_colour_link(vocabulary(("R", r)), l,
                                         strong=True)
                assert link.structure.n == l + 1
                assert verify_colour_link(link, l, strong=True)

    def test_ternary_palette_pairs(self):
        pal = build_palette(vocabulary(("R", 3)), 2)
        assert pal.structure.n == 4
        assert pal.colouring == (1, 2, 1, 2)
        assert pal.same_pairs == {frozenset((1, 3)), frozenset((2, 4))}
        assert verify_palette(pal, 2)

    def test_palettes_verify(self):
        for l in (2, 3):
            for r in (2, 3):
                pal = build_palette(vocabulary(("R", r)), l)
                assert verify_palette(pal, l)
                assert not verify_palette(pal, l + 1)


class TestLinkSemantics:
    def test_large_bipartite_soundness(self):
        # the two sides of a complete bipartite graph are exactly the
        # link-connected components, even at n = 300
        half = 150
        edges = [(i, half + j) for i in range(1, half + 1)
                 for j in range(1, half + 1)]
        m = graph(2 * half, edges)
        link = build_colour_link(vocabulary(("E", 2, "symirr")), 2)
        assert same_colour_linked(m, 1, 2, link)
        assert same_colour_linked(m, 151, 300, link)
        assert not same_colour_linked(m, 1, 151, link)
        assert same_colour_linked(m, 7, 7, link)

    def test_adjacent_ends_cannot_link(self):
        # the link copy must be induced, so its ends stay nonadjacent
        link = build_colour_link(vocabulary(("E", 2, "symirr")), 2)
        assert not same_colour_linked(K3, 1, 2, link)
        assert same_colour_linked(PATH3, 1, 3, link)

    def test_single_edge_fails_colour_compatibility(self):
        b = graph(2)
        assert not satisfies_colour_compatible_axiom(EDGE, graph(1), b, 2)

    def test_initial_segment_precondition(self):
        with pytest.raises(ValueError):
            satisfies_colour_compatible_axiom(EDGE, EDGE, graph(3), 2)

    def test_uncolourable_extension_rejected(self):
        with pytest.raises(ValueError):
            satisfies_colour_compatible_axiom(EDGE, graph(1), K3, 2)


class TestPredicateColourings:
    def test_roundtrip(self):
        c = builtin_class("coloured:2")
        m = make_structure(c.vocab, 3,
                           {"P1": [(1,), (3,)], "P2": [(2,)],
                            "E": [(1, 2)]})
        gamma = colouring_from_predicates(m)
        assert gamma == (1, 2, 1)
        assert class_sizes(gamma, 2) == (2, 1)

    def test_class_sizes_account_for_everything(self):
        assert class_sizes((1, 2, 2, 1, 1), 3) == (3, 2, 0)
