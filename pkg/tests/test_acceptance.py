"""The twelve acceptance criteria, one check per criterion.

Run under pytest (a summary line per criterion is printed at the end of the
session) or directly with ``python3 tests/test_acceptance.py``.
"""
import itertools
import pathlib
import sys
import time

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from compactological import cmp as cm  # noqa: E402
from compactological import cond  # noqa: E402
from compactological import towers as tw  # noqa: E402
from compactological.finkit import (FinFun, FinSet, FinTop, enumerate_maps,  # noqa: E402
                                    enumerate_partitions, enumerate_topologies, fin,
                                    powerset, top_product, wh_reflect)
from compactological.towers import INF  # noqa: E402

import oracles  # noqa: E402
from catalogue import (cmp_catalogue, ninf_to_finite, random_surjection, random_table,  # noqa: E402
                       seeded, tower_parallel_pairs)


class Failed(AssertionError):
    pass


def need(cond_, why):
    if not cond_:
        raise Failed(why)


def surjections(k, j):
    return [f for f in enumerate_maps(fin(k), fin(j)) if len(f.image()) == j]


# 1 -------------------------------------------------------------------------

def checker_cross_validation():
    families = 0
    for n in range(4):
        x = fin(n)
        valid = []
        for c in cm.all_families(x):
            families += 1
            a, b = cm.check_compactology(c), cm.check_compactology_direct(c)
            need(a.valid == b.valid, f"checkers disagree on {sorted(map(sorted, c.family))}")
            if a.valid:
                valid.append(c.members)
        need(valid == [frozenset(powerset(x))], f"valid families on fin({n}): {valid}")
    return f"{families} families, one valid per carrier"


# 2 -------------------------------------------------------------------------

def _level_pairs(f, g, n):
    m = max(f.shift(n), g.shift(n))
    return list(zip(f.refined(n, m).images, g.refined(n, m).images))


def coequalizer_oracle():
    checked = 0
    for name, f, g in tower_parallel_pairs():
        _, q = tw.tower_coequalizer(f, g)
        for n in range(5):
            dst = f.dst.level(n)
            if len(dst) > 8:
                continue
            kernel = frozenset((x, y) for x in dst for y in dst
                               if q.component(n)(x) == q.component(n)(y))
            need(kernel == oracles.least_equivalence(dst, _level_pairs(f, g, n)),
                 f"{name} level {n}")
            checked += 1
    return f"{checked} pair-levels"


# 3 -------------------------------------------------------------------------

def ninf_collapse():
    n = cm.from_compact(tw.ninf())
    co = cm.cmp_coequalizer(cm.cmp_identity(n), cm.from_tower_map(n, n, tw.successor()))
    sizes = [len(co.obj.node(0).level(d)) for d in range(8)]
    need(co.certificate.exact, f"certificate {co.certificate.label()}")
    need(sizes == [1] * 8, f"level sizes {sizes}")
    need(co.obj.is_compact, "quotient is not compact")
    return "one point, exact"


# 4 -------------------------------------------------------------------------

def adjunction_bijection():
    pairs = 0
    for n, m in itertools.product(range(4), repeat=2):
        x, y = cm.discrete(n), cm.discrete(m)
        x_top, _ = cm.to_topological(x)
        y_top, _ = cm.to_topological(y)
        left = cm.finite_homs(x, y)
        right = {tuple(sorted(f.table.items()))
                 for f in enumerate_maps(x_top.carrier, y_top.carrier)
                 if cm.ContinuousMap(f, x_top, y_top).is_continuous()}
        need(len(left) == len(right), f"|Cmp| {len(left)} vs |CGWH| {len(right)} at {n},{m}")
        seen = set()
        for h in left:
            cont = cm.adjoint_transpose(h)
            need(cont.is_continuous(), "transpose is not continuous")
            need(cont.fun.table == cm.morphism_table(h), "transpose changes the underlying map")
            seen.add(tuple(sorted(cont.fun.table.items())))
            back = cm.adjoint_transpose(cont, dst=y, src=x)
            need(cm.morphisms_equal(back, h).status == "equal", "double transpose")
        need(seen == right, f"transposes miss continuous maps at {n},{m}")
        pairs += len(left)
    return f"{pairs} morphisms transposed both ways"


# 5 -------------------------------------------------------------------------

def sheaf_axioms():
    checks = 0
    covers = []
    for k in range(1, 5):
        for j in range(1, k + 1):
            for f in surjections(k, j):
                covers.append(([tw.fin_tower(1), tw.fin_tower(k - 1)] if k > 1
                               else [tw.fin_tower(1)],
                               tw.level_map(tw.fin_tower(k), tw.fin_tower(j), 0, f)))
    for d in range(3):
        covers.append(([tw.ninf()], tw.truncation(tw.ninf(), d)))
    for name, c in cmp_catalogue().items():
        x = cond.representable(c)
        chain, depth = (3, 1) if c.is_finite else (1, 1)
        for pieces, glue in covers:
            # a truncation reads a deeper source level than it produces
            v = cond.sheaf_check(x, pieces, glue, chain, max(depth, glue.shift(depth)))
            need(v.ok, f"{name} fails on {glue.name}: {v.counts}")
            need(v.certificate.exact, f"{name}: certificate {v.certificate.label()}")
            checks += 1
    return f"{checks} object-cover checks"


# 6 -------------------------------------------------------------------------

def round_trip():
    objects = {f"fin({n})": cm.discrete(n) for n in range(4)}
    cat = cmp_catalogue()
    for key in ("ninf", "cantor", "discrete_countable", "ninf+fin2"):
        objects[key] = cat[key]
    tests = [tw.fin_tower(n) for n in range(4)] + [tw.ninf(), tw.cantor()]
    windows = 0
    for name, c in objects.items():
        rt = cond.underlying_cmp(cond.representable(c))
        need(rt.certificate.status in ("iso", "window"), f"{name}: {rt.certificate.label()}")
        if c.is_compact:
            need(rt.certificate.status == "iso", f"{name}: compact but {rt.certificate.label()}")
        x, y = cond.representable(c), cond.representable(rt.obj)
        for k in tests:
            for chain, depth in itertools.product(range(4), repeat=2):
                if len(k.level(depth)) > 4 and not c.is_finite:
                    continue
                need(cond.sections_agree(x, y, k, chain, depth),
                     f"{name} over {k.expr} at window({chain}, {depth})")
                windows += 1
    return f"{len(objects)} objects, {windows} section windows"


# 7 -------------------------------------------------------------------------

def subobject_lattice():
    for n in range(4):
        subs = cm.subobjects_enumerate(cm.discrete(n))
        need(len(subs) == 2 ** n, f"|Sub(fin({n}))| = {len(subs)}")
    ab = FinSet.of("a", "b")
    bad = cm.is_subdiagram(tuple(frozenset(s) for s in ((), ("a",), ("b",))), powerset(ab))
    need(not bad.valid and bad.axiom == "finite unions", f"accepted {{∅, a, b}}: {bad}")
    cases = 0
    for xs, ys in itertools.product(range(4), repeat=2):
        x, y = cm.discrete(xs), cm.discrete(ys)
        subsets = powerset(fin(ys))
        for table in enumerate_maps(fin(xs), fin(ys)):
            f = cm.finite_morphism(x, y, table.table)
            for s, t in itertools.product(subsets, repeat=2):
                a, b = cm.subset_subobject(y, s), cm.subset_subobject(y, t)
                lhs = cm.subobject_points(cm.subobject_pullback(f, cm.subobject_union(a, b)))
                rhs = cm.subobject_points(cm.subobject_union(cm.subobject_pullback(f, a),
                                                             cm.subobject_pullback(f, b)))
                need(lhs == rhs == frozenset(table.preimage(s | t)), f"{table} {s} {t}")
                cases += 1
    return f"{cases} distributivity cases"


# 8 -------------------------------------------------------------------------

def _regular_epi(rng):
    if rng.random() < 0.5:
        # ninf → fin(k) through a truncation and a surjective table
        d = rng.randint(0, 3)
        trunc = tw.truncation(tw.ninf(), d)
        k = rng.randint(1, d + 1)
        top = trunc.dst.level(0)
        fun = FinFun.from_dict(top, fin(k), random_surjection(rng, top, fin(k)))
        onto = tw.compose(tw.level_map(trunc.dst, tw.fin_tower(k), 0, fun), trunc)
        return cm.from_tower_map(cm.from_compact(tw.ninf()), cm.discrete(k), onto)
    b = rng.randint(1, 3)
    a = rng.randint(b, 4)
    return cm.finite_morphism(cm.discrete(a), cm.discrete(b), random_surjection(rng, fin(a), fin(b)))


def regularity():
    rng = seeded(8)
    for i in range(50):
        e = _regular_epi(rng)
        need(cm.is_regular_epi(e).status == "yes", f"instance {i}: not a regular epi")
        k = len(e.dst.node(0).level(0))
        if rng.random() < 0.5:
            n = rng.randint(0, 3)
            g = cm.finite_morphism(cm.discrete(n), e.dst, random_table(rng, fin(n), fin(k)))
        else:
            g = ninf_to_finite(rng, rng.randint(0, 2), k)
        pb = cm.cmp_pullback(e, g)
        leg = pb.maps[1]
        cert = cm.is_regular_epi(leg)
        need(cert.status == "yes" and cert.exact, f"pullback {i}: {cert.label()}")
    for i in range(50):
        b = rng.randint(0, 3)
        a = rng.randint(0, b)
        inj = dict(zip(fin(a), rng.sample(list(fin(b)), a)))
        m = cm.finite_morphism(cm.discrete(a), cm.discrete(b), inj)
        need(cm.is_regular_mono(m).status == "yes", f"instance {i}: not a regular mono")
        c = rng.randint(1, 3)
        g = cm.finite_morphism(cm.discrete(a), cm.discrete(c), random_table(rng, fin(a), fin(c)))
        po = cm.cmp_pushout(m, g)
        cert = cm.is_regular_mono(po.maps[1])
        need(po.certificate.exact, f"pushout {i}: {po.certificate.label()}")
        need(cert.status == "yes" and cert.exact, f"pushout leg {i}: {cert.label()}")
    return "50 pullbacks, 50 pushouts, exact"


# 9 -------------------------------------------------------------------------

def _summand(rng):
    """A random catalogue summand with a few endomaps of its tower."""
    kind = rng.randrange(3)
    if kind == 0:
        n = rng.randint(0, 3)
        t = tw.fin_tower(n)
        ends = [tw.level_map(t, t, 0, FinFun.from_dict(fin(n), fin(n), random_table(rng, fin(n), fin(n))))
                for _ in range(2)]
        return cm.discrete(n), t, ends
    if kind == 1:
        t = tw.ninf()
        return cm.from_compact(t), t, [tw.identity(t), tw.successor(), tw.constant_map(t, t, INF)]
    t = tw.cantor()
    return cm.from_compact(t), t, [tw.identity(t), tw.bit_flip(0), tw.bit_flip(1)]


def disjunctivity():
    rng = seeded(9)
    for i in range(20):
        summands = [_summand(rng) for _ in range(2)]
        co = cm.cmp_coproduct([s[0] for s in summands])
        i0, i1 = co.maps
        for inj in (i0, i1):
            cert = cm.is_mono(inj)
            need(cert.status == "yes" and cert.exact, f"instance {i}: injection {cert.label()}")
        meet = cm.cmp_pullback(i0, i1)
        empty = meet.pieces(meet.obj.chain_stabilization).emptiness(3)
        need(empty.status == "empty" and empty.exact, f"instance {i}: summands meet")
        # distributivity: Z ≅ (Z ×_{A+B} A) + (Z ×_{A+B} B) for a random Z → A + B
        total = co.obj.node(0)
        pieces, legs = [], []
        for _ in range(rng.randint(1, 3)):
            side = rng.randrange(2)
            _, t, ends = summands[side]
            pieces.append(t)
            legs.append(tw.compose(tw.injection(total, side, t), rng.choice(ends)))
        z_tower = tw.tower_coproduct(pieces)
        z = cm.from_compact(z_tower)
        f = cm.from_tower_map(z, co.obj, tw.tower_copair(legs, z_tower, total))
        parts = [cm.cmp_pullback(f, inj) for inj in (i0, i1)]
        back = cm.cmp_coproduct([p.obj for p in parts])
        glued = cm.cmp_copair([p.maps[0] for p in parts], back)
        bijective = all(tw.level_bijection(glued.at_window(back.obj.chain_stabilization), d)
                        for d in range(4))
        need(bijective, f"instance {i}: coproduct of pullbacks is not Z")
        cert = cm.is_iso(glued)
        need(cert.status != "not_iso", f"instance {i}: {cert.label()}")
    return "20 instances"


# 10 ------------------------------------------------------------------------

def _pull_back(h: FinFun, cong_pairs):
    return {(x, x2) for x in h.src for x2 in h.src if (h(x), h(x2)) in cong_pairs}


def ex_reg():
    partitions = 0
    for n in range(5):
        for part in enumerate_partitions(fin(n)):
            e = cond.make_quotient(cm.discrete(n), part.pairs())
            kernel, same = cond.kernel_pair_of_quotient(e)
            need(same and kernel == part.pairs(), f"kernel pair on {part}")
            partitions += 1
    n = cm.from_compact(tw.ninf())
    gens = [(cm.cmp_identity(n), cm.from_tower_map(n, n, tw.successor()))]
    tail = cond.make_quotient(n, generators=gens, closure="closed")
    _, same = cond.kernel_pair_of_quotient(tail)
    need(same, "ninf tail collapse kernel pair")
    rng = seeded(10)
    for i in range(30):
        sizes = [rng.randint(1, 4) for _ in range(4)]
        maps = [FinFun.from_dict(fin(a), fin(b), random_table(rng, fin(a), fin(b)))
                for a, b in zip(sizes, sizes[1:])]
        top = rng.choice(enumerate_partitions(fin(sizes[-1])))
        congs = [top.pairs()]
        for h in reversed(maps):
            # any congruence inside the pulled-back one is respected by h
            finer = rng.choice(enumerate_partitions(h.src)).pairs()
            congs.insert(0, _pull_back(h, congs[0]) & finer)
        qs = [cond.make_quotient(cm.discrete(s), c) for s, c in zip(sizes, congs)]
        rels = [cond.map_relation(h, qs[j], qs[j + 1]) for j, h in enumerate(maps)]
        r, s, t = rels
        left = cond.compose_relations(cond.compose_relations(r, s), t)
        right = cond.compose_relations(r, cond.compose_relations(s, t))
        need(left.same_as(right), f"instance {i}: associativity")
        for j, rel in enumerate(rels):
            need(cond.compose_relations(cond.identity_relation(qs[j]), rel).same_as(rel),
                 f"instance {i}: left unit")
            need(cond.compose_relations(rel, cond.identity_relation(qs[j + 1])).same_as(rel),
                 f"instance {i}: right unit")
    return f"{partitions} partitions, tail collapse, 30 relation triples"


# 11 ------------------------------------------------------------------------

def reflector():
    n = cm.from_compact(tw.ninf())
    gens = [(cm.cmp_identity(n), cm.from_tower_map(n, n, tw.successor()))]
    x = cond.formal_quotient(cond.make_quotient(n, generators=gens))
    need(sorted(x.points(), key=repr) == sorted([0, INF], key=repr), f"points {x.points()}")
    point = cond.compactologify(x)
    need(point.certificate.exact, "certificate")
    need(all(len(point.obj.node(0).level(d)) == 1 for d in range(6)), "not a point")
    cases = 0
    for a, b in itertools.product(range(1, 4), repeat=2):
        for pa in enumerate_partitions(fin(a)):
            for pb in enumerate_partitions(fin(b)):
                e = cond.make_quotient(cm.discrete(a), pa.pairs())
                f = cond.make_quotient(cm.discrete(b), pb.pairs())
                whole = cond.compactologify(cond.formal_quotient(cond.product_congruence(e, f)))
                left = cond.compactologify(cond.formal_quotient(e))
                right = cond.compactologify(cond.formal_quotient(f))
                unit = cm.morphism_table(whole.unit)
                lu, ru = cm.morphism_table(left.unit), cm.morphism_table(right.unit)
                for p, q in itertools.product(unit, repeat=2):
                    need((unit[p] == unit[q]) == (lu[p[0]] == lu[q[0]] and ru[p[1]] == ru[q[1]]),
                         f"{pa} x {pb} at {p}, {q}")
                need(len(whole.obj.finite_carrier())
                     == len(left.obj.finite_carrier()) * len(right.obj.finite_carrier()),
                     f"{pa} x {pb}: sizes")
                cases += 1
    return f"{cases} product cases"


# 12 ------------------------------------------------------------------------

def h_reflector():
    sierpinski = FinTop(fin(2), frozenset({frozenset(), frozenset({0}), frozenset({0, 1})}))
    for name, t in (("Sierpinski", sierpinski), ("indiscrete-2", FinTop.indiscrete(fin(2)))):
        space, _ = wh_reflect(t)
        need(len(space.carrier) == 1, f"{name} reflects to {len(space.carrier)} points")
    spaces = [t for n in range(4) for t in enumerate_topologies(fin(n))]
    for s, t in itertools.product(spaces, repeat=2):
        prod, _, _ = top_product(s, t)
        whole, q = wh_reflect(prod)
        (ws, qs), (wt, qt) = wh_reflect(s), wh_reflect(t)
        target, _, _ = top_product(ws, wt)
        for p1, p2 in itertools.product(prod.carrier, repeat=2):
            need((q(p1) == q(p2)) == (qs(p1[0]) == qs(p2[0]) and qt(p1[1]) == qt(p2[1])),
                 "kernels differ")
        need(whole.is_discrete() and target.is_discrete(), "reflections not discrete")
        need(len(whole.carrier) == len(target.carrier), "carriers differ")
    return f"{len(spaces) ** 2} pairs of spaces"


CRITERIA = [
    (1, "axiom checkers cross-validate", checker_cross_validation),
    (2, "coequalizer matches the equivalence oracle", coequalizer_oracle),
    (3, "ninf collapses to a point", ninf_collapse),
    (4, "adjunction bijection", adjunction_bijection),
    (5, "representables are sheaves", sheaf_axioms),
    (6, "round trip through condensed sets", round_trip),
    (7, "subobject lattice", subobject_lattice),
    (8, "regular epis and monos are stable", regularity),
    (9, "coproducts are disjoint and universal", disjunctivity),
    (10, "kernel pairs and relation composition", ex_reg),
    (11, "compactologification", reflector),
    (12, "weak Hausdorff reflection", h_reflector),
]


def run(check):
    start = time.perf_counter()
    try:
        detail = check()
        ok = True
    except Failed as err:
        ok, detail = False, str(err)
    return ok, detail, time.perf_counter() - start


def line(number, title, ok, detail, seconds):
    return f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail} ({seconds:.1f}s)"


@pytest.mark.parametrize("number,title,check", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, check, acceptance_log):
    ok, detail, seconds = run(check)
    text = line(number, title, ok, detail, seconds)
    acceptance_log.append(text)
    print(text)
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for number, title, check in CRITERIA:
        ok, detail, seconds = run(check)
        failures += not ok
        print(line(number, title, ok, detail, seconds), flush=True)
    sys.exit(1 if failures else 0)
