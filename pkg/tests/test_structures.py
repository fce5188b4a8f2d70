"""Structure type, embeddings, substitution, enumeration."""

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from oracles import embeddings_oracle, isomorphic_oracle
from zol.errors import BudgetExceeded, ParseError
from zol.structures import (CANONICAL_MAX_N, Structure, are_isomorphic,
                            canonical_form, enumerate_embeddings,
                            enumerate_structures, find_embedding, graph,
                            induced_substructure, is_embedding,
                            is_weak_embedding, make_structure,
                            parse_structure, parse_structures,
                            parse_vocabulary, relabel_structure,
                            serialize_structure, serialize_vocabulary,
                            structure_bits, substitute, vocabulary)

GRAPH_VOCAB = vocabulary(("E", 2, "symirr"))
MIXED_VOCAB = vocabulary(("P", 1), ("R", 2))

K3 = graph(3, [(1, 2), (2, 3), (1, 3)])
PATH3 = graph(3, [(1, 2), (2, 3)])
EDGE = graph(2, [(1, 2)])
NONEDGE = graph(2)


@st.composite
def graphs_st(draw, max_n=5):
    n = draw(st.integers(min_value=0, max_value=max_n))
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs \
        else []
    return graph(n, edges)


@st.composite
def mixed_st(draw, max_n=4):
    n = draw(st.integers(min_value=1, max_value=max_n))
    elems = range(1, n + 1)
    points = draw(st.lists(st.sampled_from(list(elems)), unique=True))
    arcs = draw(st.lists(
        st.tuples(st.sampled_from(list(elems)), st.sampled_from(list(elems))),
        unique=True))
    return make_structure(MIXED_VOCAB, n,
                          {"P": [(x,) for x in points], "R": arcs})


class TestVocabulary:
    def test_spec_tuple_forms(self):
        v = vocabulary(("E", 2, "symirr"), ("P1", 1, "colour"), ("R", 3))
        assert [s.name for s in v.symbols] == ["E", "P1", "R"]
        assert v.symbols[0].symmetric_irreflexive
        assert v.symbols[1].colour_predicate
        assert v.symbols[2].arity == 3

    def test_symirr_needs_arity_two(self):
        with pytest.raises(ValueError):
            vocabulary(("P", 1, "symirr"))

    def test_colour_predicates_are_unary(self):
        with pytest.raises(ValueError):
            vocabulary(("P", 2, "colour"))

    def test_serialize_roundtrip(self):
        v = vocabulary(("E", 2, "symirr"), ("P1", 1, "colour"), ("R", 3))
        assert parse_vocabulary(serialize_vocabulary(v)) == v


class TestParsing:
    def test_triangle_text(self):
        text = "structure t\nn 3\nrel E 1 2\nrel E 2 3\nrel E 1 3\nend"
        assert parse_structure(text, GRAPH_VOCAB) == K3

    def test_empty_universe(self):
        m = parse_structure("structure e\nn 0\nend", GRAPH_VOCAB)
        assert m.n == 0 and m.tuple_count(0) == 0

    def test_reflexive_tuple_rejected(self):
        with pytest.raises(ParseError):
            parse_structure("structure t\nn 2\nrel E 1 1\nend", GRAPH_VOCAB)

    def test_entry_out_of_range(self):
        with pytest.raises(ParseError) as err:
            parse_structure("structure t\nn 2\nrel E 1 5\nend", GRAPH_VOCAB)
        assert err.value.line == 3

    def test_multiple_structures(self):
        text = (serialize_structure(K3, name="a")
                + serialize_structure(EDGE, name="b"))
        assert parse_structures(text, GRAPH_VOCAB) == {"a": K3, "b": EDGE}

    @given(graphs_st())
    def test_roundtrip_graphs(self, m):
        assert parse_structure(serialize_structure(m), GRAPH_VOCAB) == m

    @given(mixed_st())
    def test_roundtrip_mixed(self, m):
        assert parse_structure(serialize_structure(m), MIXED_VOCAB) == m


class TestInduced:
    def test_triangle_restricts_to_edge(self):
        assert induced_substructure(K3, {1, 2}) == EDGE

    def test_full_restriction_is_identity(self):
        assert induced_substructure(PATH3, [1, 2, 3]) == PATH3

    def test_path_endpoints_lose_their_tuples(self):
        assert induced_substructure(PATH3, {1, 3}) == NONEDGE

    def test_out_of_range_element(self):
        with pytest.raises(ValueError):
            induced_substructure(K3, {1, 4})


class TestEmbeddings:
    def test_identity_edge_into_triangle(self):
        f = {1: 1, 2: 2}
        assert is_weak_embedding(f, EDGE, K3)
        assert is_embedding(f, EDGE, K3)

    def test_weak_but_not_strong(self):
        f = {1: 1, 2: 2}
        assert is_weak_embedding(f, NONEDGE, K3)
        assert not is_embedding(f, NONEDGE, K3)
        g = {1: 1, 2: 2, 3: 3}
        assert is_weak_embedding(g, PATH3, K3)
        assert not is_embedding(g, PATH3, K3)

    def test_vertex_into_triangle(self):
        assert len(list(enumerate_embeddings(graph(1), K3))) == 3

    def test_edge_into_triangle(self):
        assert len(list(enumerate_embeddings(EDGE, K3))) == 6

    def test_no_weak_triangle_in_triangle_free(self):
        m = graph(4, [(1, 2), (2, 3), (3, 4), (4, 1)])
        assert list(enumerate_embeddings(K3, m, mode="weak")) == []

    def test_partial_constrains_the_search(self):
        embs = list(enumerate_embeddings(EDGE, K3, partial={1: 2}))
        assert {f[1] for f in embs} == {2} and len(embs) == 2

    def test_find_embedding_consistent(self):
        assert find_embedding(K3, PATH3) is None
        assert find_embedding(EDGE, PATH3) is not None

    @given(graphs_st(max_n=4), graphs_st(max_n=4))
    @settings(max_examples=60)
    def test_matches_oracle(self, a, m):
        for mode in ("weak", "strong"):
            got = {tuple(sorted(f.items()))
                   for f in enumerate_embeddings(a, m, mode=mode)}
            want = {tuple(sorted(f.items()))
                    for f in embeddings_oracle(a, m, mode)}
            assert got == want

    @given(mixed_st(), st.data())
    @settings(max_examples=40)
    def test_restriction_chain_composes(self, m, data):
        y = data.draw(st.sets(st.sampled_from(list(m.universe))))
        ys = sorted(y)
        x = data.draw(st.sets(st.sampled_from(ys))) if ys else set()
        xs = sorted(x)
        a = induced_substructure(m, xs)
        b = induced_substructure(m, ys)
        f = {i: ys.index(xs[i - 1]) + 1 for i in a.universe}
        g = {j: ys[j - 1] for j in b.universe}
        assert is_embedding(f, a, b)
        assert is_embedding(g, b, m)
        assert is_embedding({i: g[f[i]] for i in a.universe}, a, m)

    @given(mixed_st(), st.data())
    @settings(max_examples=60)
    def test_strong_iff_isomorphism_onto_image(self, m, data):
        a = induced_substructure(
            m, data.draw(st.sets(st.sampled_from(list(m.universe)))))
        if a.n > m.n:
            return
        image = data.draw(st.permutations(list(m.universe)))[:a.n]
        f = {i: image[i - 1] for i in a.universe}
        ranked = sorted(image)
        onto = {i: ranked.index(f[i]) + 1 for i in a.universe}
        target = induced_substructure(m, image)
        assert is_embedding(f, a, m) == is_embedding(onto, a, target)


class TestIsomorphism:
    def test_relabelled_triangle(self):
        assert are_isomorphic(K3, relabel_structure(K3, {1: 2, 2: 3, 3: 1}))

    def test_path_is_not_triangle(self):
        assert not are_isomorphic(PATH3, K3)

    def test_two_edge_graphs_on_three_collapse(self):
        twos = [m for m in enumerate_structures(GRAPH_VOCAB, 3)
                if m.tuple_count(0) == 2]
        assert len(twos) == 3
        assert all(isomorphic_oracle(a, b)
                   for a, b in itertools.combinations(twos, 2))
        assert len({canonical_form(m).rels for m in twos}) == 1

    def test_canonical_refuses_large(self):
        with pytest.raises(BudgetExceeded):
            canonical_form(graph(CANONICAL_MAX_N + 1))

    @given(graphs_st(max_n=4), st.data())
    @settings(max_examples=60)
    def test_canonical_soundness(self, m, data):
        canon = canonical_form(m)
        assert are_isomorphic(canon, m)
        perm = data.draw(st.permutations(list(m.universe)))
        relabelled = relabel_structure(
            m, {i: perm[i - 1] for i in m.universe})
        assert canonical_form(relabelled) == canon
        assert are_isomorphic(m, relabelled) == isomorphic_oracle(
            m, relabelled)


class TestSubstitution:
    def test_triangle_edge_to_nonedge_gives_path(self):
        assert substitute(K3, NONEDGE, {1, 2}) \
            == graph(3, [(1, 3), (2, 3)])

    def test_identity_substitution(self):
        site = {1, 3}
        assert substitute(PATH3, induced_substructure(PATH3, site), site) \
            == PATH3

    def test_edge_into_induced_path_makes_triangle(self):
        m = graph(3, [(1, 3), (2, 3)])
        widened = substitute(m, EDGE, {1, 2})
        assert widened == K3

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            substitute(K3, EDGE, {1, 2, 3})

    @given(graphs_st(max_n=5), st.data())
    @settings(max_examples=60)
    def test_involution(self, m, data):
        site = sorted(data.draw(st.sets(st.sampled_from(list(m.universe)))) if m.n else [])
        pairs = list(itertools.combinations(range(1, len(site) + 1), 2))
        edges = data.draw(st.lists(st.sampled_from(pairs), unique=True)) \
            if pairs else []
        b_new = graph(len(site), edges)
        once = substitute(m, b_new, site)
        assert substitute(once, induced_substructure(m, site), site) == m


class TestEnumeration:
    def test_all_graphs_on_three(self):
        assert len(list(enumerate_structures(GRAPH_VOCAB, 3))) == 8

    def test_triangle_free_filter(self):
        free = list(enumerate_structures(
            GRAPH_VOCAB, 3,
            filter=lambda m: find_embedding(K3, m, mode="weak") is None))
        assert len(free) == 7

    def test_bit_order_is_monotone(self):
        masks = [m.rels[0] for m in enumerate_structures(GRAPH_VOCAB, 3)]
        assert masks == sorted(masks)

    def test_budget_refusal(self):
        assert structure_bits(GRAPH_VOCAB, 8) == 28
        with pytest.raises(BudgetExceeded):
            list(enumerate_structures(GRAPH_VOCAB, 8))

    def test_mixed_vocabulary_count(self):
        # 2 elements: 2 unary slots + 4 ordered pairs = 64 structures
        assert len(list(enumerate_structures(MIXED_VOCAB, 2))) == 64
