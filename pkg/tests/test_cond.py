import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compactological import cmp as cm
from compactological import cond
from compactological import towers as tw
from compactological.finkit import FinFun, enumerate_partitions, enumerate_topologies, fin
from compactological.towers import INF

from catalogue import cmp_catalogue


def test_representable_sections():
    two = cond.representable(cm.discrete(2))
    secs = two.sections(tw.fin_tower(3))
    assert len(secs) == 8 and secs.certificate.exact
    assert len(two.sections(tw.empty_tower())) == 1
    over_ninf = two.sections(tw.ninf(), 3, 2)
    # window sections are level-2 functions; the true hom set is countable
    assert len(over_ninf) == 8 and over_ninf.certificate.label() == "window(3, 2)"


def test_sheaf_check_examples():
    x = cond.representable(cm.discrete(2))
    v = cond.sheaf_check(x, [tw.fin_tower(2), tw.fin_tower(3)], cond.finite_cover(3, 2, [0, 0, 1]))
    assert v.ok and v.certificate.status == "yes"
    assert v.counts["coproduct"] == (32, 32)
    assert v.counts["descent"] == (4, 4, 5)
    ident = tw.identity(tw.fin_tower(3))
    assert cond.sheaf_check(x, [tw.fin_tower(1)], ident).ok


def test_sheaf_check_needs_certified_epi():
    inc = tw.level_map(tw.fin_tower(1), tw.fin_tower(2), 0, FinFun(fin(1), fin(2), (0,)))
    with pytest.raises(cond.CondError):
        cond.sheaf_check(cond.representable(cm.discrete(2)), [], inc)


def test_sheaf_check_detects_a_presheaf():
    # a formal quotient identifying the two points is still a sheaf; a broken restriction is not
    class Broken(cond.CondObject):
        def restrict(self, phi, along, depth=tw.DEFAULT_DEPTH):
            return tuple(phi[:1]) * len(along.src.level(depth))

    broken = Broken("representable", base=cm.discrete(2))
    v = cond.sheaf_check(broken, [tw.fin_tower(2)], cond.finite_cover(2, 1))
    assert not v.ok and v.certificate.status == "no"


def test_phi_star_examples():
    k = tw.fin_tower(3)
    x = cond.representable(cm.discrete(3))
    ident = tuple(k.level(0))
    assert cond.phi_star(x, ident, k).table == {0: 0, 1: 1, 2: 2}
    assert set(cond.phi_star(x, (1, 1, 1), k).images) == {1}
    two = cond.representable(cm.discrete(2))
    ninf = tw.ninf()
    eventually_zero = (1, 0, 0)  # values on level 2: 0, 1, inf
    phi = cond.phi_star(two, eventually_zero, ninf, 0, 2)
    assert phi.table == {0: 1, 1: 0, INF: 0}


def test_underlying_cmp_examples():
    rt = cond.underlying_cmp(cond.representable(cm.discrete(3)))
    assert rt.certificate.status == "iso"
    ranges = cond.compactology_ranges(cond.representable(cm.discrete(3)))
    assert ranges.members == cm.compactology_of(cm.discrete(3)).members
    only_points = cond.compactology_ranges(cond.representable(cm.discrete(3)), [tw.fin_tower(1)])
    assert only_points.members == {frozenset({i}) for i in range(3)}
    with pytest.raises(cond.CondError):
        cond.underlying_cmp(cond.formal_quotient(cond.make_quotient(cm.discrete(2), {(0, 1)})))


def test_quasicompact_examples():
    n = cm.from_compact(tw.ninf())
    assert cond.is_quasicompact(cond.representable(n)).status == "yes"
    dc = cm.discrete_countable()
    witness = cm.CmpMorphism(cm.discrete(2), dc, lambda l: 1, lambda l: tw.identity(dc.node(1)))
    cert = cond.is_quasicompact(cond.representable(dc), witness, 3, 0)
    assert cert.status == "no" and cert.witness == (2, 2)
    quot = cond.formal_quotient(cond.make_quotient(n, generators=[
        (cm.cmp_identity(n), cm.from_tower_map(n, n, tw.successor()))]))
    assert cond.is_quasicompact(quot).status == "yes"


def test_qs_pullback_examples():
    k = tw.ninf()
    x = cond.representable(cm.from_compact(k))
    diag = cond.qs_pullback_check(x, tw.identity(k), tw.identity(k))
    assert diag.pullback.sub.member(3) == {(a, a) for a in k.level(3)}
    two = cond.representable(cm.discrete(2))
    pt = tw.point_tower()
    a = tw.constant_map(pt, tw.fin_tower(2), 0)
    b = tw.constant_map(pt, tw.fin_tower(2), 1)
    v = cond.qs_pullback_check(two, a, b)
    assert v.pullback.sub.emptiness(2).status == "empty" and v.quasicompact.status == "yes"
    # the pullback of id against succ is the graph of succ, again a copy of ninf
    v = cond.qs_pullback_check(x, tw.identity(k), tw.successor())
    graph = v.pullback.sub.member(4)
    assert sorted(repr(b) for _, b in graph) == sorted(map(repr, k.level(4)))
    assert (INF, INF) in graph and (1, 0) in graph
    assert v.quasicompact.exact


def test_make_quotient_examples():
    three = cm.discrete(3)
    diag = cond.make_quotient(three, {(x, x) for x in range(3)})
    assert len(cond.formal_quotient(diag).points()) == 3
    q = cond.formal_quotient(cond.make_quotient(three, {(0, 1)}))
    assert len(q.points()) == 2
    assert len(q.sections(tw.fin_tower(2))) == 4
    n = cm.from_compact(tw.ninf())
    gens = [(cm.cmp_identity(n), cm.from_tower_map(n, n, tw.successor()))]
    closed = cond.make_quotient(n, generators=gens, closure="closed")
    assert len(cond.formal_quotient(closed).points()) == 1
    kernel, same = cond.kernel_pair_of_quotient(closed)
    assert same
    assert kernel.piece(0).member(3) == {(a, b) for a in tw.ninf().level(3)
                                         for b in tw.ninf().level(3)}


def test_validate_congruence_witnesses():
    carrier = fin(3)
    cert = cond.validate_congruence({(0, 0), (1, 1)}, carrier)
    assert cert.status == "no" and cert.witness == ("reflexive", 2)
    diag = {(x, x) for x in carrier}
    cert = cond.validate_congruence(diag | {(0, 1)}, carrier)
    assert cert.witness == ("symmetric", (0, 1))
    cert = cond.validate_congruence(diag | {(0, 1), (1, 0), (1, 2), (2, 1)}, carrier)
    assert cert.witness[0] == "transitive"


def test_relation_examples():
    three = cm.discrete(3)
    e = cond.make_quotient(three, {(0, 1)})
    ident = cond.identity_relation(e)
    h = FinFun(fin(3), fin(3), (0, 0, 2))
    r = cond.map_relation(h, e, e)
    assert cond.compose_relations(ident, r).same_as(r)
    assert cond.compose_relations(r, ident).same_as(r)
    k = FinFun(fin(3), fin(3), (2, 2, 0))
    composed = cond.compose_relations(r, cond.map_relation(k, e, e))
    assert composed.same_as(cond.map_relation(h.then(k), e, e))
    two = cond.make_quotient(cm.discrete(2), {(0, 0)})
    with pytest.raises(cond.CondError, match="totality fails, witness 1"):
        cond.FunctionalRelation(two, two, {(0, 0)})
    with pytest.raises(cond.CondError, match="single-valuedness"):
        cond.FunctionalRelation(two, two, {(0, 0), (0, 1), (1, 1)})


def test_kernel_pair_examples():
    three = cm.discrete(3)
    diag = cond.make_quotient(three, {(x, x) for x in range(3)})
    kernel, same = cond.kernel_pair_of_quotient(diag)
    assert same and kernel == {(x, x) for x in range(3)}
    kernel, same = cond.kernel_pair_of_quotient(cond.make_quotient(three, {(0, 1)}))
    assert same and kernel == {(0, 0), (1, 1), (2, 2), (0, 1), (1, 0)}


def test_compactologify_examples():
    n = cm.from_compact(tw.ninf())
    fixed = cond.compactologify(cond.representable(n))
    assert fixed.obj is n and fixed.unit.name == "id"
    gens = [(cm.cmp_identity(n), cm.from_tower_map(n, n, tw.successor()))]
    sheaf_quotient = cond.formal_quotient(cond.make_quotient(n, generators=gens))
    assert list(sheaf_quotient.points()) == [0, INF]
    point = cond.compactologify(sheaf_quotient)
    assert point.certificate.exact
    assert all(len(point.obj.node(0).level(d)) == 1 for d in range(5))


def test_algebraic_quotient_is_not_quasiseparated():
    n = cm.from_compact(tw.ninf())
    gens = [(cm.cmp_identity(n), cm.from_tower_map(n, n, tw.successor()))]
    x = cond.formal_quotient(cond.make_quotient(n, generators=gens))
    cert = cond.quasiseparated(x)
    assert cert.status == "not_qs_at"
    a, b = cert.witness
    assert {a[-1], b[-1]} == {0, INF}
    closed = cond.formal_quotient(cond.make_quotient(n, generators=gens, closure="closed"))
    assert cond.quasiseparated(closed).status == "yes"


def test_compactologify_preserves_products_on_finite_quotients():
    for a, b in itertools.product(range(1, 4), repeat=2):
        for pa in enumerate_partitions(fin(a)):
            for pb in enumerate_partitions(fin(b)):
                e = cond.make_quotient(cm.discrete(a), pa.pairs())
                f = cond.make_quotient(cm.discrete(b), pb.pairs())
                whole = cond.compactologify(cond.formal_quotient(cond.product_congruence(e, f)))
                left = cond.compactologify(cond.formal_quotient(e))
                right = cond.compactologify(cond.formal_quotient(f))
                assert len(whole.obj.finite_carrier()) == (
                    len(left.obj.finite_carrier()) * len(right.obj.finite_carrier()))


def test_space_qs_matches_t1_on_small_spaces():
    for n in range(4):
        for t in enumerate_topologies(fin(n)):
            verdict = cond.space_qs_check(t)
            assert (verdict.status == "yes") == t.is_t1()
            # independent route: some convergent-sequence section has a non-closed fiber
            bad = any(not cond.fiber_is_closed(s, y)
                      for s in cond.ninf_sections(t) for y in t.carrier)
            assert bad == (verdict.status == "no")


def test_exponential_sections_agree():
    for k in range(1, 3):
        for c in (cm.discrete(2), cm.discrete(3)):
            for test in (tw.fin_tower(1), tw.fin_tower(2)):
                left, right = cond.exponential_sections(k, c, test)
                assert left == right


def test_faithful_on_underlying_maps():
    for a, b in [(2, 2), (2, 3), (3, 2)]:
        tables = [tuple(sorted(cm.morphism_table(m).items()))
                  for m in cm.finite_homs(cm.discrete(a), cm.discrete(b))]
        assert len(set(tables)) == len(tables) == b ** a


def test_filtered_colimit_pointwise():
    dc = cond.representable(cm.discrete_countable())
    for l in range(4):
        assert len(dc.points(l, 0)) == l + 1
        assert cond.quasiseparated(dc, l, 0).status == "yes"


@given(st.integers(1, 4), st.data())
@settings(max_examples=40, deadline=None)
def test_finite_congruence_certificates(n, data):
    pairs = data.draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=5))
    e = cond.make_quotient(cm.discrete(n), pairs)
    assert all(c.status == "yes" for c in e.certificates().values())
    assert cond.validate_congruence(e.pairs(), fin(n)).status == "yes"


def test_finite_colimit_glues_points():
    one = cm.discrete(1)
    f = cm.finite_morphism(one, cm.discrete(2), {0: 1})
    g = cm.finite_morphism(one, cm.discrete(3), {0: 0})
    x = cond.finite_colimit([cm.discrete(2), cm.discrete(3)], [(f, 0, g, 1)])
    assert len(x.points()) == 4
    assert cond.quasiseparated(x).status == "yes"


def test_catalogue_objects_are_sheaves_at_small_window():
    for name, c in cmp_catalogue().items():
        x = cond.representable(c)
        v = cond.sheaf_check(x, [tw.fin_tower(1), tw.fin_tower(2)], cond.finite_cover(3, 2), 2, 1)
        assert v.ok, name
