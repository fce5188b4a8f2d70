"""Class rules, condition-star witnesses, substitutions, amalgamation."""

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from zol.classes import (AllStructures, ClassSpec, Colourable, Coloured,
                         ForbiddenInduced, ForbiddenWeak, amalgamate_triple,
                         builtin_class, check_accepts_substitution,
                         check_admits_substitution,
                         check_disjoint_amalgamation, class_names,
                         companion_coloured, condition_star, count_members,
                         enumerate_members, is_permitted, minimal_forbidden,
                         permitted_count_bound, verify_star_witness)
from zol.errors import AgreementError
from zol.pregeometry import GF2Geometry, TrivialGeometry
from zol.structures import (Witness, graph, make_structure, vocabulary)

GRAPH_VOCAB = vocabulary(("E", 2, "symirr"))
K3 = graph(3, [(1, 2), (2, 3), (1, 3)])
K4 = graph(4, [(i, j) for i in range(1, 5) for j in range(i + 1, 5)])
PATH3 = graph(3, [(1, 2), (2, 3)])
EDGE = graph(2, [(1, 2)])
NONEDGE = graph(2)


class TestRegistry:
    def test_every_name_constructs(self):
        names = class_names()
        assert len(names) == 14
        for name in names:
            c = builtin_class(name)
            assert isinstance(c, ClassSpec)

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            builtin_class("hypergraphs")

    def test_specs_are_hashable(self):
        assert builtin_class("graphs") == builtin_class("graphs")
        assert len({builtin_class(n) for n in class_names()}) == 14

    def test_companion_strips_the_rule_only(self):
        assert companion_coloured(builtin_class("colourable:2")) \
            == builtin_class("coloured:2")
        assert companion_coloured(builtin_class("strong-colourable:3")) \
            == builtin_class("strong-coloured:3")

    def test_colour_rules_reject_nontrivial_geometry(self):
        with pytest.raises(ValueError):
            ClassSpec(GRAPH_VOCAB, Coloured(2), GF2Geometry(2))
        with pytest.raises(ValueError):
            ClassSpec(GRAPH_VOCAB, Colourable(2), GF2Geometry(1))

    def test_forbidden_members_need_a_tuple(self):
        with pytest.raises(ValueError):
            ClassSpec(GRAPH_VOCAB, ForbiddenWeak((NONEDGE,)))


class TestMembership:
    def test_triangle_forbidden_weakly(self):
        assert not is_permitted(builtin_class("triangle-free"), K3)
        assert not is_permitted(builtin_class("triangle-free"), K4)

    def test_triangle_has_no_induced_path(self):
        c = ClassSpec(GRAPH_VOCAB, ForbiddenInduced((PATH3,)))
        assert is_permitted(c, K3)
        assert not is_permitted(c, PATH3)

    def test_empty_structure_is_everywhere(self):
        for name in class_names():
            c = builtin_class(name)
            assert is_permitted(c, make_structure(c.vocab, 0))

    def test_coloured_needs_a_partition(self):
        c = builtin_class("coloured:2")
        both = make_structure(c.vocab, 1, {"P1": [(1,)], "P2": [(1,)]})
        neither = make_structure(c.vocab, 1)
        one = make_structure(c.vocab, 1, {"P1": [(1,)]})
        assert not is_permitted(c, both)
        assert not is_permitted(c, neither)
        assert is_permitted(c, one)

    def test_coloured_tuples_must_be_multichromatic(self):
        c = builtin_class("coloured:2")
        mono = make_structure(c.vocab, 2,
                              {"P1": [(1,), (2,)], "E": [(1, 2)]})
        mixed = make_structure(c.vocab, 2,
                               {"P1": [(1,)], "P2": [(2,)], "E": [(1, 2)]})
        assert not is_permitted(c, mono)
        assert is_permitted(c, mixed)

    def test_colourable_is_rule_by_search(self):
        c = builtin_class("colourable:2")
        assert is_permitted(c, graph(4, [(1, 2), (2, 3), (3, 4), (4, 1)]))
        assert not is_permitted(
            c, graph(5, [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)]))


class TestEnumeration:
    def test_counts(self):
        assert count_members(builtin_class("graphs"), 3) == 8
        assert count_members(builtin_class("triangle-free"), 3) == 7
        assert count_members(builtin_class("oriented"), 2) == 3
        assert count_members(builtin_class("partial-2-coloured"), 1) == 3

    def test_oriented_fast_path_matches_filter(self):
        c = builtin_class("oriented")
        fast = {m.rels for m in enumerate_members(c, 3)}
        assert len(fast) == 27
        slow = {m.rels
                for m in enumerate_members(
                    builtin_class("digraphs"), 3)
                if is_permitted(c, m)}
        assert fast == slow

    def test_members_are_permitted(self):
        for name in ("triangle-free", "coloured:2", "colourable:2",
                     "guarded-edges"):
            c = builtin_class(name)
            for m in enumerate_members(c, 3):
                assert is_permitted(c, m)


class TestMinimalForbidden:
    def test_single_member(self):
        assert minimal_forbidden((K3,)) == [K3]

    def test_weak_containment_prunes(self):
        assert minimal_forbidden((K3, K4)) == [K3]

    def test_edge_is_minimal(self):
        assert minimal_forbidden((EDGE,)) == [EDGE]


class TestConditionStar:
    def test_triangle_witness(self):
        w = condition_star((K3,))
        assert w is not None and w.symbol == "E"
        assert len(set(w.tup)) == 2 and w.structure == K3
        assert verify_star_witness((K3,), w)

    def test_oriented_forbiddens_have_none(self):
        members = builtin_class("oriented").rule.members
        assert condition_star(members) is None

    def test_spanning_relationship_cannot_witness(self):
        v = vocabulary(("R", 2))
        arc = make_structure(v, 2, {"R": [(1, 2)]})
        assert condition_star((arc,)) is None

    def test_tampered_witness_rejected(self):
        # a witness naming a structure that is not minimal forbidden
        fake = Witness(PATH3, "E", (1, 2))
        assert not verify_star_witness((K3,), fake)


class TestCountBound:
    def test_triangle_free_two_sites(self):
        assert permitted_count_bound(builtin_class("triangle-free"), 2) \
            == (2, pytest.approx(2 / 3))

    def test_partial_coloured_points(self):
        alpha, bound = permitted_count_bound(
            builtin_class("partial-2-coloured"), 1)
        assert alpha == 3 and float(bound) == 0.75

    def test_single_point_class_all(self):
        alpha, bound = permitted_count_bound(builtin_class("graphs"), 1)
        assert alpha == 1 and float(bound) == 0.5


class TestAdmitsSubstitution:
    def test_removing_edges_is_safe(self):
        v = check_admits_substitution(builtin_class("triangle-free"),
                                      EDGE, NONEDGE, 5)
        assert v.holds and v.bound == 5

    def test_adding_edges_is_not(self):
        v = check_admits_substitution(builtin_class("triangle-free"),
                                      NONEDGE, EDGE, 3)
        assert not v.holds
        ce = v.counterexample
        # a two-edge path whose open pair gets closed into a triangle
        assert ce.structure.tuple_count(0) == 2 and ce.structure.n == 3
        assert not is_permitted(builtin_class("triangle-free"), ce.image)

    def test_identity_always_holds(self):
        for name in ("graphs", "triangle-free", "coloured:2"):
            c = builtin_class(name)
            a = next(iter(enumerate_members(c, 2)))
            assert check_admits_substitution(c, a, a, 4).holds


class TestAcceptsSubstitution:
    def test_coloured_accepts_relational_changes(self):
        c = builtin_class("coloured:2")
        a = make_structure(c.vocab, 2, {"P1": [(1,)], "P2": [(2,)]})
        b = make_structure(c.vocab, 2,
                           {"P1": [(1,)], "P2": [(2,)], "E": [(1, 2)]})
        assert check_accepts_substitution(
            c, TrivialGeometry(), a, b, 4).holds
        assert check_accepts_substitution(
            c, TrivialGeometry(), b, a, 4).holds

    def test_colourable_rejects_edge_addition(self):
        v = check_accepts_substitution(builtin_class("colourable:2"),
                                       TrivialGeometry(), NONEDGE, EDGE, 5)
        assert not v.holds
        # the first failure is the 2-path whose completion is an odd cycle
        assert v.counterexample.structure.n == 3

    def test_colour_disagreement_is_reported(self):
        c = builtin_class("coloured:2")
        a = make_structure(c.vocab, 2, {"P1": [(1,)], "P2": [(2,)]})
        b = make_structure(c.vocab, 2, {"P1": [(1,), (2,)]})
        with pytest.raises(AgreementError):
            check_accepts_substitution(c, TrivialGeometry(), a, b, 3)

    def test_gf2_sites_free_the_high_dimension_slots(self):
        v = check_accepts_substitution(builtin_class("triangle-free"),
                                       GF2Geometry(2), NONEDGE, EDGE, 4)
        assert v.holds


class TestAmalgamation:
    def test_triangle_free_amalgamates(self):
        v = check_disjoint_amalgamation(builtin_class("triangle-free"),
                                        TrivialGeometry(), 5)
        assert v.holds

    def test_class_all_amalgamates_freely(self):
        v = check_disjoint_amalgamation(builtin_class("graphs"),
                                        TrivialGeometry(), 5)
        assert v.holds

    def test_odd_cycle_blocks_two_colourable(self):
        # gluing a 1-path and a 2-path over nonadjacent ends closes an
        # odd cycle whichever cross edges are drawn
        a = graph(2)
        b1 = graph(3, [(1, 3), (2, 3)])
        b2 = graph(4, [(1, 3), (3, 4), (2, 4)])
        v = amalgamate_triple(builtin_class("colourable:2"), a, b1, b2)
        assert not v.holds

    def test_same_triple_amalgamates_without_the_rule(self):
        a = graph(2)
        b1 = graph(3, [(1, 3), (2, 3)])
        b2 = graph(4, [(1, 3), (3, 4), (2, 4)])
        assert amalgamate_triple(builtin_class("graphs"), a, b1, b2).holds

    def test_base_must_be_initial(self):
        with pytest.raises(ValueError):
            amalgamate_triple(builtin_class("graphs"), EDGE, NONEDGE,
                              NONEDGE)
