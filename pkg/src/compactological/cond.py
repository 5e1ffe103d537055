"""Condensed sets over the Stone test site, and the congruence calculus.

Test objects are towers.  A section over a test object ``K`` at window
``(chain, depth)`` is a tuple of values indexed by ``K.level(depth)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from . import cmp as cm
from . import towers as tw
from .certs import Certificate, at_depth, exact, window
from .finkit import (ENUMERATION_CAP, EnumerationCapExceeded, FinFun, FinPartition, FinSet,
                     FinTop, equivalence_closure, fin, fin_pullback)
from .towers import DEFAULT_DEPTH, Tower, TowerMap

DEFAULT_CHAIN = cm.DEFAULT_CHAIN


class CondError(ValueError):
    pass


@dataclass(frozen=True)
class TestObject:
    tower: Tower
    chain: int = DEFAULT_CHAIN
    depth: int = DEFAULT_DEPTH


def catalogue_tests(finite_up_to: int = 3) -> list:
    """Finite sets plus the two infinite Stone spaces of the catalogue."""
    return [tw.fin_tower(k) for k in range(finite_up_to + 1)] + [tw.ninf(), tw.cantor()]


@dataclass
class Sections:
    domain: FinSet
    values: FinSet
    certificate: Certificate
    cap: int = ENUMERATION_CAP

    def __len__(self):
        return len(self.values) ** len(self.domain)

    def __iter__(self):
        if len(self) > self.cap:
            raise EnumerationCapExceeded(f"{len(self)} sections exceed the cap {self.cap}")
        return iter(itertools.product(self.values.elements, repeat=len(self.domain)))

    def __contains__(self, phi):
        return len(phi) == len(self.domain) and all(v in self.values for v in phi)

    def as_fun(self, phi) -> FinFun:
        return FinFun(self.domain, self.values, tuple(phi))


# -- points as threads -------------------------------------------------------

def canonical_thread(t: Tower, level: int, label, horizon: int) -> tuple:
    """The thread through ``label`` that always takes the last preimage above ``level``."""
    out = [t.project(level, n)(label) for n in range(level + 1)]
    for n in range(level + 1, horizon + 1):
        tr = t.transition(n)
        out.append([x for x in t.level(n) if tr(x) == out[-1]][-1])
    return tuple(out)


def apply_thread(f: TowerMap, thread: tuple) -> tuple:
    """Image of a thread, as far as the source thread reaches."""
    out = []
    for n in range(len(thread)):
        if f.shift(n) >= len(thread):
            break
        out.append(f.component(n)(thread[f.shift(n)]))
    return tuple(out)


# -- congruences -------------------------------------------------------------

class Congruence:
    """An equivalence relation on ``base``.

    ``kind`` is ``"finite"`` (an explicit partition of a finite base),
    ``"closed"`` (the smallest closed relation through parallel generators)
    or ``"algebraic"`` (the relation generated pointwise by the generators,
    as in the sheaf quotient).
    """

    def __init__(self, base: cm.CmpObject, kind: str, *, partition: FinPartition | None = None,
                 generators: Sequence = (), coequalizer: cm.Cone | None = None):
        self.base = base
        self.kind = kind
        self.partition = partition
        self.generators = list(generators)
        self.coequalizer = coequalizer
        self._product = None
        self._classes = tw._Memo(lambda key: self._point_classes(*key))

    def __repr__(self):
        return f"Congruence({self.kind}, {self.base!r})"

    @property
    def square(self) -> cm.Cone:
        if self._product is None:
            self._product = cm.cmp_product(self.base, self.base)
        return self._product

    def pairs(self) -> frozenset:
        if self.kind != "finite":
            raise CondError("explicit pairs exist for finite congruences only")
        return self.partition.pairs()

    @property
    def relation(self) -> cm.Subobject:
        """``E`` as a subobject of ``base × base``."""
        if self.kind == "finite":
            return cm.subset_subobject(self.square.obj, self.pairs())
        if self.kind == "closed":
            return _closure_subobject(self)
        raise CondError("the algebraic relation is not closed, hence not a subobject of a compact")

    def certificates(self, chain: int = DEFAULT_CHAIN, depth: int = DEFAULT_DEPTH) -> dict:
        if self.kind == "finite":
            ps = self.pairs()
            pts = self.base.finite_carrier()
            refl = all((x, x) in ps for x in pts)
            sym = all((y, x) in ps for x, y in ps)
            trans = all((x, z) in ps for x, y in ps for y2, z in ps if y == y2)
            return {"reflexive": exact("yes" if refl else "no"),
                    "symmetric": exact("yes" if sym else "no"),
                    "transitive": exact("yes" if trans else "no")}
        if self.kind == "closed":
            return _levelwise_equivalence(self.relation, self.base, chain, depth)
        # generated by union-find, so an equivalence relation on every window
        return {k: window(chain, depth) for k in ("reflexive", "symmetric", "transitive")}

    def point_classes(self, chain: int = DEFAULT_CHAIN, depth: int = DEFAULT_DEPTH):
        """Classes of points; finite/closed exactly at the window, algebraic via threads."""
        return self._classes((chain, depth))

    def _point_classes(self, chain, depth):
        if self.kind == "finite":
            return self.partition
        if self.kind == "closed":
            q = self.coequalizer.maps[0]
            carrier = self.base.carrier(chain, depth)
            f = q.pushed(chain, q.reach(chain))
            comp = f.refined(depth, max(depth, f.shift(depth)))
            return FinPartition.from_labels(carrier, lambda x: comp(x))
        return _thread_classes(self, chain, depth)


def _levelwise_equivalence(rel: cm.Subobject, base: cm.CmpObject, chain: int, depth: int) -> dict:
    s = base.clamp(chain)
    piece = rel.piece(s)
    out = {"reflexive": True, "symmetric": True, "transitive": True}
    for n in range(depth + 1):
        members = piece.member(n)
        lvl = base.node(s).level(n)
        out["reflexive"] &= all((x, x) in members for x in lvl)
        out["symmetric"] &= all((y, x) in members for x, y in members)
        # level-wise composition contains the true composite, so this is sound
        out["transitive"] &= all((x, z) in members for x, y in members
                                 for y2, z in members if y == y2)
    exact_window = base.window_exact(chain, depth)
    return {k: (exact("yes") if ok and exact_window else
                at_depth("yes", depth) if ok else exact("no")) for k, ok in out.items()}


def _closure_subobject(cong: Congruence) -> cm.Subobject:
    """Pairs joined by the level-wise union-find, pulled back to every node."""
    base = cong.base
    if not base.is_compact:
        raise CondError("closed congruences need a compact base")
    s = base.chain_stabilization
    f, g = cong.generators[0]
    t = f.src.chain_stabilization
    rel = tw.LevelRelation.generated_by(f.pushed(t, s), g.pushed(t, s))
    square = cong.square.obj

    def piece(l):
        inc = base.link_between(l, s)

        def member(n):
            m = max(n, inc.shift(n))
            comp = inc.refined(n, m)
            part = rel.partition(n)
            lvl = base.node(l).level(m)
            down = base.node(l).project(m, n)
            return {(down(a), down(b)) for a in lvl for b in lvl
                    if part.related(comp(a), comp(b))}

        return tw.closed_subspace(square.node(l), member)

    return cm.Subobject(square, piece)


def _kernel_subobject(q: cm.CmpMorphism, square: cm.Cone) -> cm.Subobject:
    p0, p1 = square.maps
    eq = cm.cmp_equalizer(cm.cmp_compose(q, p0), cm.cmp_compose(q, p1))
    return cm.Subobject(square.obj, eq.pieces)


def _thread_classes(cong: Congruence, chain: int, depth: int) -> FinPartition:
    base = cong.base
    if not base.is_compact:
        raise CondError("algebraic congruences need a compact base")
    top = base.top
    horizon = depth + chain + 2
    threads = [canonical_thread(top, depth, x, horizon) for x in top.level(depth)]
    pairs = []
    for f, g in cong.generators:
        s_node = f.src.node(chain)
        r = max(f.reach(chain), g.reach(chain), base.chain_stabilization)
        for x in s_node.level(depth):
            th = canonical_thread(s_node, depth, x, horizon)
            pairs.append((apply_thread(f.pushed(chain, r), th),
                          apply_thread(g.pushed(chain, r), th)))
    # threads are compared on their common length; generators may add new points
    length = min(len(t) for t in threads + [t for p in pairs for t in p])
    pairs = [(a[:length], b[:length]) for a, b in pairs]
    points = list(dict.fromkeys([t[:length] for t in threads] + [t for p in pairs for t in p]))
    return equivalence_closure(FinSet(tuple(points)), pairs)


def make_quotient(c: cm.CmpObject, e=None, *, generators: Sequence = (),
                  closure: str = "algebraic") -> Congruence:
    """A congruence on ``c`` from pairs of points or from parallel generating morphisms.

    ``e`` may be a set of pairs (finite ``c``) or a ``Subobject`` of ``c × c``.
    With generators, ``closure`` picks the pointwise (algebraic) relation or
    its closed closure.
    """
    if e is not None:
        if isinstance(e, cm.Subobject):
            e = cm.subobject_points(e)
        carrier = c.finite_carrier()
        part = equivalence_closure(carrier, e)
        cong = Congruence(c, "finite", partition=part)
        return cong
    if not generators:
        return Congruence(c, "finite", partition=FinPartition.discrete(c.finite_carrier()))
    if c.is_finite:
        pairs = []
        for f, g in generators:
            tf, tg = cm.morphism_table(f), cm.morphism_table(g)
            pairs.extend((tf[x], tg[x]) for x in tf)
        return Congruence(c, "finite", partition=equivalence_closure(c.finite_carrier(), pairs),
                          generators=generators)
    if closure == "closed":
        if len(generators) != 1:
            raise CondError("closed closure takes a single parallel pair")
        f, g = generators[0]
        return Congruence(c, "closed", generators=generators, coequalizer=cm.cmp_coequalizer(f, g))
    if closure == "algebraic":
        return Congruence(c, "algebraic", generators=generators)
    raise CondError(f"unknown closure {closure!r}")


def validate_congruence(pairs, carrier: FinSet) -> Certificate:
    """Check reflexivity, symmetry, transitivity of an explicit relation."""
    ps = frozenset(pairs)
    for x in carrier:
        if (x, x) not in ps:
            return exact("no", witness=("reflexive", x))
    for x, y in ps:
        if (y, x) not in ps:
            return exact("no", witness=("symmetric", (x, y)))
    for x, y in ps:
        for y2, z in ps:
            if y == y2 and (x, z) not in ps:
                return exact("no", witness=("transitive", (x, y, z)))
    return exact("yes")


# -- condensed objects -------------------------------------------------------

class CondObject:
    def __init__(self, kind: str, *, base: cm.CmpObject, congruence: Congruence | None = None):
        self.kind = kind
        self.base = base
        self.congruence = congruence

    def __repr__(self):
        return f"CondObject({self.kind}, {self.base!r})"

    def values(self, chain: int = DEFAULT_CHAIN, depth: int = DEFAULT_DEPTH) -> FinSet:
        """Labels that section values range over."""
        if self.kind == "representable":
            return self.base.carrier(chain, depth)
        names = self._names(chain, depth)
        return FinSet(tuple(names.values()))

    def _names(self, chain, depth) -> dict:
        part = self.congruence.point_classes(chain, depth)
        reps = part.representatives()
        if self.congruence.kind != "algebraic":
            return {r: r for r in reps}
        # a thread is named by its deepest label when that is unambiguous
        short = [r[-1] for r in reps]
        if len(set(short)) == len(short):
            return dict(zip(reps, short))
        return {r: r for r in reps}

    def normalize(self, value, chain: int = DEFAULT_CHAIN, depth: int = DEFAULT_DEPTH):
        if self.kind == "representable":
            return value
        part = self.congruence.point_classes(chain, depth)
        return self._names(chain, depth)[part.representative(value)]

    def sections(self, k: Tower, chain: int = DEFAULT_CHAIN, depth: int = DEFAULT_DEPTH,
                 cap: int = ENUMERATION_CAP) -> Sections:
        dom = k.level(depth)
        if self.kind == "representable":
            ok = k.is_stable_by(depth) and self.base.window_exact(chain, depth)
            cert = exact() if ok else window(chain, depth)
            return Sections(dom, self.values(chain, depth), cert, cap)
        cong = self.congruence
        if cong.kind == "algebraic" and not k.is_stable_by(depth):
            raise CondError("sections of an algebraic quotient are computed over finite test objects only")
        ok = (k.is_stable_by(depth) and cong.kind == "finite") or (
            cong.kind == "closed" and k.is_stable_by(depth) and self.base.window_exact(chain, depth))
        return Sections(dom, self.values(chain, depth), exact() if ok else window(chain, depth), cap)

    def restrict(self, phi: tuple, along: TowerMap, depth: int = DEFAULT_DEPTH) -> tuple:
        """Precompose a section over ``along.dst`` with ``along``."""
        if along.shift(depth) > depth:
            raise CondError("restriction reads below the window depth")
        comp = along.refined(depth, depth)
        src = along.dst.level(depth)
        return tuple(phi[src.index(comp(x))] for x in comp.src)

    def points(self, chain: int = DEFAULT_CHAIN, depth: int = DEFAULT_DEPTH) -> FinSet:
        """The underlying set ``X(*)`` at the window."""
        return self.values(chain, depth)


def representable(c: cm.CmpObject) -> CondObject:
    return CondObject("representable", base=c)


def formal_quotient(cong: Congruence) -> CondObject:
    return CondObject("formal_quotient", base=cong.base, congruence=cong)


def finite_colimit(objects: Sequence[cm.CmpObject], identifications: Sequence = (),
                   closure: str = "algebraic") -> CondObject:
    """Colimit of representables: the coproduct modulo identifications ``(f, i, g, j)``.

    Each identification glues ``objects[i]`` to ``objects[j]`` along
    ``f: S → objects[i]`` and ``g: S → objects[j]``.
    """
    co = cm.cmp_coproduct(list(objects))
    gens = [(cm.cmp_compose(co.maps[i], f), cm.cmp_compose(co.maps[j], g))
            for f, i, g, j in identifications]
    if not gens:
        return representable(co.obj)
    return formal_quotient(make_quotient(co.obj, generators=gens, closure=closure))


# -- sheaf axioms ------------------------------------------------------------

@dataclass
class SheafVerdict:
    coproduct: bool
    descent: bool
    certificate: Certificate
    counts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.coproduct and self.descent


def _fiber_pairs(glue: TowerMap, depth: int) -> frozenset:
    pb = tw.tower_pullback(glue, glue, depth)
    return pb.sub.member(depth)


def sheaf_check(x: CondObject, pieces: Sequence[Tower], glue: TowerMap,
                chain: int = DEFAULT_CHAIN, depth: int = DEFAULT_DEPTH,
                cap: int = ENUMERATION_CAP) -> SheafVerdict:
    """Finite-coproduct axiom on ``pieces`` and descent along the epimorphism ``glue``."""
    epi = tw.is_epi(glue, depth)
    if epi.status != "yes":
        raise CondError(f"glue map is not a certified epimorphism ({epi.label()})")
    pieces = list(pieces)
    total = tw.tower_coproduct(pieces)
    counts = {}

    # (1) sections over a disjoint union are tuples of sections
    whole = x.sections(total, chain, depth, cap)
    parts = [x.sections(p, chain, depth, cap) for p in pieces]
    injections = [tw.injection(total, i, p) for i, p in enumerate(pieces)]
    seen = set()
    coproduct_ok = True
    for phi in whole:
        restricted = tuple(x.restrict(phi, inj, depth) for inj in injections)
        if restricted in seen:
            coproduct_ok = False
        seen.add(restricted)
    expected = 1
    for s in parts:
        expected *= len(s)
    coproduct_ok = coproduct_ok and len(seen) == expected
    counts["coproduct"] = (len(whole), expected)

    # (2) sections over the base are the sections upstairs agreeing on the fiber product
    over_l = x.sections(glue.dst, chain, depth, cap)
    over_k = x.sections(glue.src, chain, depth, cap)
    pairs = _fiber_pairs(glue, depth)
    dom = over_k.domain
    descent = [phi for phi in over_k
               if all(phi[dom.index(a)] == phi[dom.index(b)] for a, b in pairs)]
    pulled = [x.restrict(phi, glue, depth) for phi in over_l]
    descent_ok = len(set(pulled)) == len(pulled) and set(pulled) == set(descent)
    counts["descent"] = (len(over_l), len(descent), len(pairs))

    # Each window is a finite-set instance of both axioms; passing them with a
    # certified surjective glue holds at every depth, since sections are level functions.
    if coproduct_ok and descent_ok and epi.exact:
        cert = exact("yes")
    elif coproduct_ok and descent_ok:
        cert = window(chain, depth)
    else:
        cert = exact("no")
    return SheafVerdict(coproduct_ok, descent_ok, cert, counts)


def finite_cover(k: int, j: int, fibers=None) -> TowerMap:
    """A surjection fin(k) ↠ fin(j); by default point ``i`` goes to ``min(i, j - 1)``."""
    if fibers is None:
        fibers = [min(i, j - 1) for i in range(k)]
    fun = FinFun(fin(k), fin(j), tuple(fibers))
    return tw.level_map(tw.fin_tower(k), tw.fin_tower(j), 0, fun)


# -- point evaluation and underlying objects ---------------------------------

def phi_star(x: CondObject, phi: tuple, k: Tower, chain: int = DEFAULT_CHAIN,
             depth: int = DEFAULT_DEPTH) -> FinFun:
    """``k ↦ X(k̄)(φ)``: evaluate a section at the points of the window."""
    dom = k.level(depth)
    pts = x.points(chain, depth)
    point = tw.point_tower()
    images = []
    for label in dom:
        pick = tw.thread_map(point, k, lambda n, label=label: _lift(k, depth, label, n))
        images.append(x.normalize(x.restrict(phi, pick, depth)[0], chain, depth))
    return FinFun(dom, pts, tuple(images))


def _lift(k: Tower, depth: int, label, n: int):
    return canonical_thread(k, depth, label, max(n, depth))[n]


def compactology_ranges(x: CondObject, tests: Sequence[Tower] | None = None,
                        chain: int = DEFAULT_CHAIN, depth: int = DEFAULT_DEPTH) -> cm.FiniteCompactology:
    """Ranges of ``φ_*`` over sections on the given test objects."""
    if tests is None:
        tests = [tw.fin_tower(n) for n in range(len(x.points(chain, depth)) + 1)]
    pts = x.points(chain, depth)
    ranges = set()
    for k in tests:
        for phi in x.sections(k, chain, depth):
            ranges.add(phi_star(x, phi, k, chain, depth).image())
    return cm.FiniteCompactology(pts, tuple(ranges))


@dataclass
class RoundTrip:
    obj: cm.CmpObject
    comparison: cm.CmpMorphism
    certificate: Certificate


def _generic_range(c: cm.CmpObject, l: int) -> tw.ClosedSubtower:
    # the inclusion of node l is a section over node l; its range is the whole node
    node = c.node(l)
    return tw.clopen_subspace(node, 0, node.level(0))


def underlying_cmp(x: CondObject, chain: int = DEFAULT_CHAIN,
                   depth: int = DEFAULT_DEPTH) -> RoundTrip:
    """The compactological set ``(X(*), ranges of φ_*)`` with its comparison map."""
    if x.kind != "representable":
        raise CondError("underlying compactologies are formed for quasiseparated objects; "
                        "use compactologify for quotients")
    c = x.base
    ranges = tw._Memo(lambda l: _generic_range(c, l))

    def link(l):
        inner = c.link(l)
        return TowerMap(ranges(l - 1).as_tower(), ranges(l).as_tower(),
                        lambda n, v: inner.component(n)(v), flags=inner.flags)

    obj = cm.CmpObject(lambda l: ranges(l).as_tower(), link,
                       chain_stabilization=c.chain_stabilization,
                       expr=("underlying", c.expr) if c.expr is not None else None)
    comparison = cm.CmpMorphism(obj, c, lambda l: l, lambda l: ranges(l).inclusion(),
                                name="comparison")
    return RoundTrip(obj, comparison, cm.is_iso(comparison, chain, depth))


def sections_agree(x: CondObject, y: CondObject, k: Tower, chain: int, depth: int) -> bool:
    """Same section sets over ``k`` at the window (value labels and domain)."""
    a, b = x.sections(k, chain, depth), y.sections(k, chain, depth)
    return a.domain == b.domain and set(a.values) == set(b.values)


# -- quasicompactness and quasiseparation ------------------------------------

def is_quasicompact(x: CondObject, witness: cm.CmpMorphism | None = None,
                    chain: int = DEFAULT_CHAIN, depth: int = DEFAULT_DEPTH) -> Certificate:
    """Is the witness out of a compact object epic?  Quotients use their quotient map."""
    if x.kind == "formal_quotient":
        if witness is None:
            if x.base.is_compact:
                # the base is representable by a compact and the quotient map is onto
                return exact("yes", witness="quotient")
            return window(chain, depth)
        x = representable(x.base)
    if witness is None:
        if x.base.is_compact:
            return exact("yes", witness="identity")
        raise CondError("a witness morphism is needed")
    if not witness.src.is_compact:
        raise CondError("witness must come from a compact object")
    fac = cm.image_factorize(witness, depth)
    dst = witness.dst
    for k in range(dst.clamp(chain) + 1):
        missed = set(dst.node(k).level(depth)) - fac.subobject.piece(k).member(depth)
        if missed:
            return exact("no", witness=(k, sorted(missed, key=repr)[0]))
    return cm.is_regular_epi(witness, chain, depth)


@dataclass
class QsVerdict:
    quasicompact: Certificate
    pullback: object = None


def qs_pullback_check(x: CondObject, f: TowerMap, g: TowerMap,
                      depth: int = DEFAULT_DEPTH) -> QsVerdict:
    """``y(K) ×_x y(L)`` for sections given as tower maps into nodes of the base."""
    if x.kind != "representable":
        raise CondError("pullbacks of sections are computed for representables")
    c = x.base
    rf = _node_index(c, f.dst)
    rg = _node_index(c, g.dst)
    r = max(rf, rg)
    f2 = tw.compose(c.link_between(rf, r), f)
    g2 = tw.compose(c.link_between(rg, r), g)
    pb = tw.tower_pullback(f2, g2, depth)
    # the pullback is a closed subtower of K × L, hence compact and representable
    cert = exact("yes") if pb.sub.exact else at_depth("yes", depth)
    return QsVerdict(cert, pb)


def _node_index(c: cm.CmpObject, t: Tower) -> int:
    for l in range(64):
        if c.node(l).same_as(t):
            return l
        if c.chain_stabilization is not None and l >= c.chain_stabilization:
            break
    raise CondError("section does not land in a node of the base")


def quasiseparated(x: CondObject, chain: int = DEFAULT_CHAIN,
                   depth: int = DEFAULT_DEPTH) -> Certificate:
    """Representables and closed quotients are; algebraic quotients are searched for a gap.

    A gap is a pair of points identified by the closed closure but by no
    finite stage of the generated relation: then the diagonal pullback is the
    relation itself, which is not compact.
    """
    if x.kind == "representable":
        return exact("yes")
    cong = x.congruence
    if cong.kind in ("finite", "closed"):
        return exact("yes")
    algebraic = cong.point_classes(chain, depth)
    closed = make_quotient(cong.base, generators=cong.generators, closure="closed")
    coeq = closed.coequalizer.maps[0]
    f = coeq.pushed(chain, coeq.reach(chain))
    for a, b in itertools.combinations(algebraic.carrier, 2):
        if algebraic.related(a, b):
            continue
        # threads are compared at every level of the window
        if all(f.component(n)(a[f.shift(n)]) == f.component(n)(b[f.shift(n)])
               for n in range(depth + 1) if f.shift(n) < len(a)):
            return Certificate("not_qs_at", depth=depth, chain=chain, witness=(a, b))
    return window(chain, depth)


def space_qs_check(t: FinTop) -> Certificate:
    """Quasiseparation of a finite space against convergent-sequence test sections.

    Sections over N∞ are eventually constant maps whose tail value converges
    to the value at ∞.  The pullback of a point section along such a map is
    the fiber; it is compact only when closed in N∞.
    """
    for limit in t.carrier:
        for tail in t.carrier:
            if limit == tail or limit not in t.closure({tail}):
                continue
            # the fiber over ``tail`` contains the tail but not ∞
            return exact("no", witness={"tail": tail, "limit": limit})
    return exact("yes")


def ninf_sections(t: FinTop, head: int = 1) -> list:
    """Continuous maps N∞ → t as (values on 0..head-1, tail value, value at ∞)."""
    out = []
    for vals in itertools.product(t.carrier.elements, repeat=head + 2):
        *first, tail, limit = vals
        if limit in t.closure({tail}):
            out.append((tuple(first), tail, limit))
    return out


def fiber_is_closed(section, y) -> bool:
    first, tail, limit = section
    return not (tail == y and limit != y)


# -- functional relations ----------------------------------------------------

class FunctionalRelation:
    """A saturated, total, single-valued relation between finite congruences."""

    def __init__(self, src: Congruence, dst: Congruence, graph):
        if src.kind != "finite" or dst.kind != "finite":
            raise CondError("functional relations are computed between finite congruences")
        self.src, self.dst = src, dst
        self.graph = frozenset(graph)
        a, b = src.base.finite_carrier(), dst.base.finite_carrier()
        for x, y in self.graph:
            a.index(x)
            b.index(y)
        bad = self.check()
        if bad is not None:
            raise CondError(f"{bad[0]} fails, witness {bad[1]!r}")

    def check(self):
        e, f = self.src.pairs(), self.dst.pairs()
        g = self.graph
        for x, x2 in e:
            for y in _image(g, x2):
                for y2 in _image(f, y):
                    if (x, y2) not in g:
                        return ("saturation", (x, y2))
        for x in self.src.base.finite_carrier():
            if not _image(g, x):
                return ("totality", x)
        for x, y in g:
            for y2 in _image(g, x):
                if (y, y2) not in f:
                    return ("single-valuedness", (x, y, y2))
        return None

    def certificates(self) -> dict:
        return {"saturation": exact("yes"), "totality": exact("yes"),
                "single_valued": exact("yes")}

    @property
    def subobject(self) -> cm.Subobject:
        prod = cm.cmp_product(self.src.base, self.dst.base)
        return cm.subset_subobject(prod.obj, self.graph)

    def same_as(self, other: "FunctionalRelation") -> bool:
        return self.graph == other.graph

    def __repr__(self):
        return f"FunctionalRelation({sorted(self.graph, key=repr)})"


def _image(rel, x) -> set:
    return {b for a, b in rel if a == x}


def identity_relation(e: Congruence) -> FunctionalRelation:
    return FunctionalRelation(e, e, e.pairs())


def map_relation(h: FinFun, src: Congruence, dst: Congruence) -> FunctionalRelation:
    """The saturated graph ``{(x, y) : h(x) F y}``."""
    f = dst.pairs()
    return FunctionalRelation(src, dst, {(x, y) for x in h.src for y in _image(f, h(x))})


def compose_relations(r: FunctionalRelation, s: FunctionalRelation) -> FunctionalRelation:
    """``s ∘ r`` through the pullback of the two graphs over the middle base."""
    if r.dst.base is not s.src.base and not r.dst.base.same_as(s.src.base):
        raise CondError("relations do not share the middle object")
    if r.dst.pairs() != s.src.pairs():
        raise CondError("relations do not share the middle congruence")
    gr, gs = FinSet(tuple(sorted(r.graph, key=repr))), FinSet(tuple(sorted(s.graph, key=repr)))
    mid = r.dst.base.finite_carrier()
    to_mid_r = FinFun.from_callable(gr, mid, lambda p: p[1])
    to_mid_s = FinFun.from_callable(gs, mid, lambda p: p[0])
    span, left, right = fin_pullback(to_mid_r, to_mid_s)
    # image of the span in src × dst
    graph = {(left(p)[0], right(p)[1]) for p in span}
    return FunctionalRelation(r.src, s.dst, graph)


def kernel_pair_of_quotient(q: Congruence, chain: int = DEFAULT_CHAIN,
                            depth: int = DEFAULT_DEPTH):
    """Kernel pair of ``(C, Δ) → (C, E)``; returns the relation and whether it equals ``E``."""
    if q.kind == "finite":
        diag = make_quotient(q.base, {(x, x) for x in q.base.finite_carrier()})
        quot = FunctionalRelation(diag, q, q.pairs())
        graph = quot.graph
        kernel = {(x, x2) for x, y in graph for x2, y2 in graph if y == y2}
        return frozenset(kernel), frozenset(kernel) == q.pairs()
    if q.kind == "closed":
        if not q.base.is_compact:
            raise CondError("kernel pairs need a compact base")
        sub = _kernel_subobject(q.coequalizer.maps[0], q.square)
        e = q.relation
        s = q.square.obj.chain_stabilization
        same = all(sub.piece(s).member(n) == e.piece(s).member(n) for n in range(depth + 1))
        return sub, same
    raise CondError("kernel pairs are computed for finite or closed congruences")


# -- the reflector -----------------------------------------------------------

@dataclass
class Compactologification:
    obj: cm.CmpObject
    unit: cm.CmpMorphism
    certificate: Certificate


def compactologify(x: CondObject, chain: int = DEFAULT_CHAIN,
                   depth: int = DEFAULT_DEPTH) -> Compactologification:
    """The closed quotient of a formal quotient; representables are fixed."""
    if x.kind == "representable":
        return Compactologification(x.base, cm.cmp_identity(x.base), exact())
    cong = x.congruence
    if cong.kind == "finite":
        obj, quot = _finite_quotient(cong)
        return Compactologification(obj, quot, exact())
    f, g = cong.generators[0]
    if len(cong.generators) > 1:
        co = cm.cmp_coproduct([a.src for a, _ in cong.generators])
        f = cm.cmp_copair([a for a, _ in cong.generators], co)
        g = cm.cmp_copair([b for _, b in cong.generators], co)
    coeq = cm.cmp_coequalizer(f, g, chain, depth)
    return Compactologification(coeq.obj, coeq.maps[0], coeq.certificate)


def _finite_quotient(cong: Congruence):
    part = cong.partition
    reps = FinSet(part.representatives())
    obj = cm.discrete(reps)
    quot = cm.finite_morphism(cong.base, obj, {x: part.representative(x) for x in part.carrier})
    return obj, quot


def product_congruence(a: Congruence, b: Congruence) -> Congruence:
    """``E × F`` on ``A × B`` for finite congruences."""
    prod = cm.cmp_product(a.base, b.base).obj
    pairs = {((x, y), (x2, y2)) for x, x2 in a.pairs() for y, y2 in b.pairs()}
    return make_quotient(prod, pairs)


# -- finite exponents --------------------------------------------------------

def exponential_sections(k: int, c: cm.CmpObject, test: Tower, chain: int = DEFAULT_CHAIN,
                         depth: int = DEFAULT_DEPTH) -> tuple[int, int]:
    """Section counts of ``y([k, c])`` and of ``[y(k), y(c)]`` over ``test``."""
    power = cm.internal_hom_finite_exponent(fin(k), c).obj
    left = len(representable(power).sections(test, chain, depth))
    prod = tw.tower_product(test, tw.fin_tower(k))
    right = len(representable(c).sections(prod, chain, depth))
    return left, right
