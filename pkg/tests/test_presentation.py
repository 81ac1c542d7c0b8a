"""Words, relations, the generating presentation, and Tietze moves."""

import pytest
from hypothesis import given, strategies as st

from igmax.combinatorics import Partition, Subset
from igmax.errors import InvalidParameters, NotEliminable
from igmax.presentation import (
    AbstractGenerator,
    GeneratorId,
    GroupPresentation,
    Relation,
    build_presentation,
    canonical_relator_key,
    concat,
    coxeter_presentation,
    eliminate_generator,
    free_reduce,
    generic_tietze_simplify,
    inverse_word,
    solve_for,
    substitute,
    word_str,
)

G, H, K = (AbstractGenerator(x) for x in "ghk")


# ---------------------------------------------------------------------------
# free-group word layer
# ---------------------------------------------------------------------------


def test_free_reduce():
    assert free_reduce(((G, 1), (G, -1), (H, 1))) == ((H, 1),)
    assert free_reduce(((G, 1), (H, 1), (H, -1), (G, -1))) == ()
    assert free_reduce(()) == ()
    with pytest.raises(InvalidParameters):
        free_reduce(((G, 2),))


def test_inverse_word():
    w = ((G, 1), (H, -1))
    assert inverse_word(w) == ((H, 1), (G, -1))
    assert concat(w, inverse_word(w)) == ()


def test_concat_reduces_across_boundaries():
    assert concat(((G, 1), (H, 1)), ((H, -1), (K, 1))) == ((G, 1), (K, 1))


def test_substitute():
    w = ((G, 1), (H, 1), (G, -1))
    out = substitute(w, G, ((K, 1), (K, 1)))
    assert out == ((K, 1), (K, 1), (H, 1), (K, -1), (K, -1))
    # substituting a gen by itself is a no-op
    assert substitute(w, H, ((H, 1),)) == w


def test_word_str():
    assert word_str(()) == "1"
    assert word_str(((G, 1), (H, -1))) == "g * h^-1"


def test_relation_relator_and_triviality():
    rel = Relation(((G, 1), (H, 1)), ((H, 1), (G, 1)), "t")
    assert rel.relator() == ((G, 1), (H, 1), (G, -1), (H, -1))
    assert not rel.is_trivial()
    assert Relation(((G, 1),), ((G, 1),), "t").is_trivial()
    assert rel.gens() == {G, H}


@given(
    st.lists(
        st.tuples(st.sampled_from([G, H, K]), st.sampled_from([1, -1])),
        max_size=8,
    ),
    st.integers(min_value=0, max_value=7),
)
def test_canonical_relator_key_invariances(word, rot):
    """The key must not see rotation or inversion of the relator."""
    rel = Relation(tuple(word), (), "t")
    rho = rel.relator()
    key = canonical_relator_key(rel)
    cyclically_reduced = not rho or rho[0] != (rho[-1][0], -rho[-1][1])
    if rho and cyclically_reduced:
        k = rot % len(rho)
        rotated = Relation(rho[k:] + rho[:k], (), "t")
        assert canonical_relator_key(rotated) == key
    inverted = Relation(inverse_word(rho), (), "t")
    assert canonical_relator_key(inverted) == key
    # and swapping the sides of the equation
    swapped = Relation((), inverse_word(rho), "t")
    assert canonical_relator_key(swapped) == key


# ---------------------------------------------------------------------------
# generator ids
# ---------------------------------------------------------------------------


def test_generator_id_of():
    p = Partition.parse("{{1},{2,3,5},{4,7},{6}}")
    a = Subset.parse("{1,4,5,6}", 7)
    g = GeneratorId.of(p, a)
    assert g.label.cycle_form() == "(2 3)"
    assert g.display() == "f[{{1},{2,3,5},{4,7},{6}}|{1,4,5,6}]"


def test_generator_id_label_checked():
    p = Partition.parse("{{1},{2,3,4}}")
    a = Subset.parse("{1,3}", 4)
    from igmax.perms import Permutation

    with pytest.raises(InvalidParameters):
        GeneratorId(p, a, Permutation.parse("(1 2)", 2))


def test_generator_id_equality_ignores_label_slot():
    p = Partition.parse("{{1},{2,3,4}}")
    a = Subset.parse("{1,3}", 4)
    assert GeneratorId.of(p, a) == GeneratorId.of(p, a)
    assert hash(GeneratorId.of(p, a)) == hash(GeneratorId.of(p, a))


# ---------------------------------------------------------------------------
# the generating presentation
# ---------------------------------------------------------------------------


def test_build_presentation_four_two():
    pres = build_presentation(4, 2)
    assert len(pres.generators) == 24
    assert pres.counts_by_tag() == {"top": 5, "middle": 7, "bottom": 48}
    assert pres.meta["top_ordered"] == 5
    pres.validate()


def test_build_presentation_relation_shapes():
    pres = build_presentation(4, 2)
    for rel in pres.relations:
        if rel.tag == "middle":
            assert len(rel.lhs) == 1 and rel.rhs == ()
            g = rel.lhs[0][0]
            assert g.subset == g.partition.min_transversal()
        elif rel.tag == "top":
            assert len(rel.lhs) == 1 and len(rel.rhs) == 1
            assert rel.lhs[0][0].partition == rel.rhs[0][0].partition
        else:
            assert len(rel.lhs) == 2 and len(rel.rhs) == 2
            assert rel.lhs[0][1] == -1 and rel.lhs[1][1] == 1


def test_build_presentation_boundary_warns():
    with pytest.warns(UserWarning):
        pres = build_presentation(4, 3)
    assert pres.counts_by_tag().get("bottom", 0) == 0


def test_build_presentation_rejects_full_rank():
    with pytest.raises(InvalidParameters):
        build_presentation(4, 4)


@pytest.mark.parametrize("n,r,total", [(3, 1, 3), (4, 2, 60), (5, 3, 394)])
def test_relation_totals(n, r, total):
    assert len(build_presentation(n, r).relations) == total


def test_presentation_text_round():
    pres = build_presentation(4, 2)
    text = pres.to_text()
    lines = text.splitlines()
    assert lines[0] == "generators: 24"
    assert lines[25] == "relations: 60"
    assert lines[26].endswith("## top")


# ---------------------------------------------------------------------------
# the Coxeter target
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "r,gens,rels",
    [(1, 0, 0), (2, 1, 1), (3, 2, 3), (4, 3, 6), (5, 4, 10)],
)
def test_coxeter_presentation_counts(r, gens, rels):
    pres = coxeter_presentation(r)
    assert len(pres.generators) == gens
    assert len(pres.relations) == rels
    # involutions (r-1) + braids (r-2) + commutes (C(r-1,2) - (r-2))
    if r >= 2:
        assert sum(1 for rel in pres.relations if rel.rhs == ()) == r - 1


def test_coxeter_relations_hold_in_symmetric_group():
    from igmax.perms import Permutation, contiguous_cycle

    r = 5
    pres = coxeter_presentation(r)
    value = {g: contiguous_cycle(k + 1, 1, r) for k, g in enumerate(pres.generators)}

    def ev(word):
        out = Permutation.identity(r)
        for g, e in word:
            out = out * (value[g] if e == 1 else value[g].inverse())
        return out

    for rel in pres.relations:
        assert ev(rel.lhs) == ev(rel.rhs)


# ---------------------------------------------------------------------------
# Tietze moves
# ---------------------------------------------------------------------------


def test_solve_for():
    rel = Relation(((G, 1), (H, 1)), ((K, 1),), "t")
    assert solve_for(rel, G) == ((K, 1), (H, -1))
    assert solve_for(rel, K) == ((G, 1), (H, 1))
    double = Relation(((G, 1), (G, 1)), (), "t")
    assert solve_for(double, G) is None  # two occurrences


def test_eliminate_generator():
    rels = (
        Relation(((G, 1),), ((H, 1), (H, 1)), "t"),
        Relation(((G, 1), (H, 1)), (), "t"),
    )
    pres = GroupPresentation((G, H), rels)
    out = eliminate_generator(pres, G, ((H, 1), (H, 1)))
    assert out.generators == (H,)
    assert len(out.relations) == 1
    assert out.relations[0].relator() == ((H, 1), (H, 1), (H, 1))


def test_eliminate_generator_requires_defining_relation():
    pres = GroupPresentation((G, H), (Relation(((G, 1), (G, 1)), (), "t"),))
    with pytest.raises(NotEliminable):
        eliminate_generator(pres, G, ((H, 1),))
    with pytest.raises(NotEliminable):
        eliminate_generator(pres, K, ())


def test_generic_tietze_simplify_collapses_the_small_case():
    # (4,2): the group is S_2; greedy elimination should reach one generator
    pres = build_presentation(4, 2)
    out = generic_tietze_simplify(pres)
    assert len(out.generators) == 1
    assert len(out.relations) == 1
    # the surviving relation says the generator is an involution
    rel = out.relations[0]
    rho = rel.relator()
    assert len(rho) == 2 and rho[0][0] == rho[1][0]
