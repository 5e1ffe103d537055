import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compactological.finkit import (FinFun, FinPartition, FinSet, FinTop, FinkitError,
                                    EnumerationCapExceeded, enumerate_maps,
                                    enumerate_partitions, enumerate_topologies,
                                    equivalence_closure, factor_through, fin, fin_coequalizer,
                                    fin_coproduct, fin_equalizer, fin_product, fin_pullback,
                                    min_equivalence_bruteforce, quotient_topology, top_product,
                                    wh_reflect, wh_reflect_fixpoint)

import oracles


def sierpinski():
    return FinTop(fin(2), frozenset({frozenset(), frozenset({0}), frozenset({0, 1})}))


def test_finset_rejects_duplicates():
    with pytest.raises(FinkitError):
        FinSet((1, 1))


def test_partition_numbering_is_canonical():
    p = FinPartition.from_labels(fin(4), lambda x: x % 2)
    assert p.class_of == (0, 1, 0, 1)
    assert p.representatives() == (0, 1)
    with pytest.raises(FinkitError):
        FinPartition(fin(2), (1, 0))


def test_bell_numbers():
    assert [len(enumerate_partitions(fin(n))) for n in range(6)] == [1, 1, 2, 5, 15, 52]


def test_topology_counts():
    # labelled topologies on 0..3 points
    assert [len(enumerate_topologies(fin(n))) for n in range(4)] == [1, 1, 4, 29]


def test_enumerate_maps_count_and_cap():
    assert len(enumerate_maps(fin(3), fin(2))) == 8
    assert len(enumerate_maps(fin(0), fin(0))) == 1
    with pytest.raises(EnumerationCapExceeded):
        enumerate_maps(fin(5), fin(5), cap=100)


pair_lists = st.integers(0, 5).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.tuples(st.integers(0, max(n - 1, 0)),
                                                        st.integers(0, max(n - 1, 0))),
                                              max_size=6 if n else 0)))


@given(pair_lists)
@settings(max_examples=150, deadline=None)
def test_union_find_matches_exhaustive_oracle(case):
    n, pairs = case
    uf = equivalence_closure(fin(n), pairs)
    assert uf.pairs() == oracles.least_equivalence(range(n), pairs)
    assert uf == min_equivalence_bruteforce(fin(n), pairs)


def test_coequalizer_exhaustive_small():
    for a, b in [(1, 3), (2, 3), (2, 4), (3, 3)]:
        for f, g in itertools.product(enumerate_maps(fin(a), fin(b)), repeat=2):
            part, q = fin_coequalizer(f, g)
            assert part.pairs() == oracles.least_equivalence(range(b), zip(f.images, g.images))
            assert all(q(f(x)) == q(g(x)) for x in fin(a))


@given(st.integers(1, 3), st.integers(1, 3), st.data())
@settings(max_examples=60, deadline=None)
def test_coequalizer_universal_property(a, b, data):
    f = FinFun(fin(a), fin(b), tuple(data.draw(st.integers(0, b - 1)) for _ in range(a)))
    g = FinFun(fin(a), fin(b), tuple(data.draw(st.integers(0, b - 1)) for _ in range(a)))
    _, q = fin_coequalizer(f, g)
    for h in enumerate_maps(fin(b), fin(3)):
        u = factor_through(q, h)
        coequalizes = all(h(f(x)) == h(g(x)) for x in fin(a))
        assert (u is not None) == coequalizes
        if u is not None:
            assert all(u(q(y)) == h(y) for y in fin(b))


def test_equalizer_and_product():
    f = FinFun(fin(3), fin(2), (0, 1, 0))
    g = FinFun(fin(3), fin(2), (0, 0, 0))
    eq, inc = fin_equalizer(f, g)
    assert eq.elements == (0, 2)
    prod, p1, p2 = fin_product(fin(2), fin(3))
    assert len(prod) == 6 and p1((1, 2)) == 1 and p2((1, 2)) == 2
    total, injections = fin_coproduct([fin(1), fin(2)])
    assert len(total) == 3 and injections[1](1) == (1, 1)


def test_pullback_universal_property():
    for f, g in itertools.product(enumerate_maps(fin(2), fin(2)), enumerate_maps(fin(3), fin(2))):
        pb, p1, p2 = fin_pullback(f, g)
        expected = {(x, y) for x in fin(2) for y in fin(3) if f(x) == g(y)}
        assert set(pb) == expected
        # any commuting cone from a point factors uniquely
        for x, y in itertools.product(fin(2), fin(3)):
            hits = [p for p in pb if p1(p) == x and p2(p) == y]
            assert len(hits) == (1 if f(x) == g(y) else 0)


def test_factor_through_rejects_non_constant_fibers():
    q = FinFun(fin(3), fin(2), (0, 0, 1))
    assert factor_through(q, FinFun(fin(3), fin(2), (0, 1, 1))) is None


def test_quotient_topology_of_discrete_is_discrete():
    t = FinTop.discrete(fin(3))
    q = FinFun(fin(3), fin(2), (0, 0, 1))
    assert quotient_topology(t, q).is_discrete()


def test_wh_reflect_small_spaces():
    space, q = wh_reflect(sierpinski())
    assert len(space.carrier) == 1
    space, q = wh_reflect(FinTop.indiscrete(fin(2)))
    assert len(space.carrier) == 1
    space, q = wh_reflect(FinTop.discrete(fin(3)))
    assert len(space.carrier) == 3


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_wh_reflect_against_oracles(n):
    for t in enumerate_topologies(fin(n)):
        _, q = wh_reflect(t)
        kernel = frozenset((x, y) for x in t.carrier for y in t.carrier if q(x) == q(y))
        assert kernel == wh_reflect_fixpoint(t).pairs()
        assert kernel == oracles.least_closed_equivalence(list(t.carrier), t.closed_sets)


def test_wh_reflect_is_idempotent():
    for t in enumerate_topologies(fin(3)):
        once, _ = wh_reflect(t)
        twice, q = wh_reflect(once)
        assert q.is_injective() and once.is_discrete()


def test_product_topology_matches_oracle():
    tops = enumerate_topologies(fin(2))
    for a, b in itertools.product(tops, repeat=2):
        prod, _, _ = top_product(a, b)
        assert set(prod.closed_sets) == oracles.product_closed_sets(
            a.closed_sets, b.closed_sets, list(fin(2)), list(fin(2)))
