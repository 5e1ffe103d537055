"""Compactological sets.

Finite carriers are handled directly through their family of compact
subsets (``FiniteCompactology``).  Everything else is an ω-chain of towers
joined by embeddings (``CmpObject``): node ℓ is a compact, and the object is
the union of the chain.  A morphism sends each node into some node of the
target.

Chain index ``L`` and level depth ``D`` together form a window.  Results that
read only a window carry ``window(L, D)`` certificates.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import towers as tw
from .certs import Certificate, exact, window
from .finkit import (FinFun, FinSet, FinTop, enumerate_maps, enumerate_topologies, fin,
                     is_continuous, powerset)
from .towers import DEFAULT_DEPTH, EMBEDDING, INJECTIVE, SURJECTIVE, Tower, TowerMap

DEFAULT_CHAIN = 3


class CmpError(ValueError):
    pass


# -- finite compactologies ---------------------------------------------------

@dataclass(frozen=True)
class FiniteCompactology:
    carrier: FinSet
    family: tuple

    def __post_init__(self):
        fam = tuple(dict.fromkeys(frozenset(k) for k in self.family))
        object.__setattr__(self, "family", fam)
        full = frozenset(self.carrier)
        for k in fam:
            if not k <= full:
                raise CmpError(f"member {set(k)} leaves the carrier")

    @property
    def members(self) -> frozenset:
        return frozenset(self.family)


@dataclass(frozen=True)
class Verdict:
    valid: bool
    axiom: object = None
    witness: object = None
    topologies: dict = field(default_factory=dict, compare=False)

    def __str__(self):
        if self.valid:
            return "valid"
        return f"invalid at axiom ({self.axiom}), witness {self.witness!r}"


def _induced_topologies(c: FiniteCompactology) -> dict:
    # τ_K is {K ∖ K'}; as closed sets that is {K ∩ K'}
    return {k: FinTop(c.carrier.subset(k), frozenset(k & k2 for k2 in c.family))
            for k in c.family}


def check_compactology(c: FiniteCompactology) -> Verdict:
    """Check the six plain-set axioms; on success return the induced τ_K."""
    fam = c.members
    if frozenset() not in fam:
        return Verdict(False, 1, frozenset())
    covered = frozenset().union(*fam)
    for x in c.carrier:
        if x not in covered:
            return Verdict(False, 2, x)
    for k1, k2 in itertools.combinations(c.family, 2):
        if k1 | k2 not in fam:
            return Verdict(False, 3, (k1, k2))
    # pairwise intersections suffice for a finite family
    for k1, k2 in itertools.combinations(c.family, 2):
        if k1 & k2 not in fam:
            return Verdict(False, 4, (k1, k2))
    for k in c.family:
        for x, y in itertools.permutations(c.carrier.ordered(k), 2):
            avoid_x = [k1 for k1 in fam if k1 <= k and x not in k1]
            avoid_y = [k2 for k2 in fam if k2 <= k and y not in k2]
            if not any(k1 | k2 == k for k1 in avoid_x for k2 in avoid_y):
                return Verdict(False, 5, (x, y, k))
    # axiom (6) needs a finite subfamily with empty intersection; a finite
    # family is its own finite subfamily, so it holds automatically here
    return Verdict(True, topologies=_induced_topologies(c))


def _compact_hausdorff_topologies(k: FinSet) -> list:
    # every finite space is quasi-compact, so this is a Hausdorff filter
    return [t for t in enumerate_topologies(k) if t.is_hausdorff()]


def check_compactology_direct(c: FiniteCompactology) -> Verdict:
    """Search for topologies τ_K making the family a compactology in the original sense."""
    fam = c.members
    if not fam:
        return Verdict(False, "nonempty", None)
    covered = frozenset().union(*fam)
    for x in c.carrier:
        if x not in covered:
            return Verdict(False, "covering", x)
    for k1, k2 in itertools.combinations(c.family, 2):
        if not any(k1 | k2 <= k3 for k3 in fam):
            return Verdict(False, "filtering", (k1, k2))
    choices = [_compact_hausdorff_topologies(c.carrier.subset(k)) for k in c.family]
    failure = Verdict(False, "compact-hausdorff", None)
    for pick in itertools.product(*choices):
        tops = dict(zip(c.family, pick))
        bad = _direct_failure(c, tops)
        if bad is None:
            return Verdict(True, topologies=tops)
        failure = bad
    return failure


def _direct_failure(c: FiniteCompactology, tops: dict):
    for k1, k2 in itertools.permutations(c.family, 2):
        if k1 <= k2 and tops[k1].closed_sets != tops[k2].subspace(k1).closed_sets:
            return Verdict(False, "coherence", (k1, k2))
    for k in c.family:
        # in a finite space every subset is compact
        for sub in powerset(c.carrier.ordered(k)):
            if sub not in c.members:
                return Verdict(False, "compact-subsets", (k, sub))
    return None


def all_families(carrier: FinSet):
    subsets = powerset(carrier)
    for r in range(len(subsets) + 1):
        for fam in itertools.combinations(subsets, r):
            yield FiniteCompactology(carrier, fam)


def saturate_downward(c: FiniteCompactology) -> frozenset:
    """All subsets of members (the bornology generated by the compacts)."""
    if not check_compactology(c).valid:
        raise CmpError("saturation needs a valid compactology")
    return frozenset(s for k in c.family for s in powerset(c.carrier.ordered(k)))


def extract_compacts(carrier: FinSet, bornology) -> FiniteCompactology:
    """Members whose induced topology {B ∩ B'} is compact Hausdorff."""
    born = frozenset(frozenset(b) for b in bornology)
    keep = []
    for b in powerset(carrier):
        if b not in born:
            continue
        top = FinTop(carrier.subset(b), frozenset(b & b2 for b2 in born))
        if top.is_hausdorff():
            keep.append(b)
    return FiniteCompactology(carrier, tuple(keep))


def final_topology(c: FiniteCompactology) -> FinTop:
    """B is closed iff every B ∩ K is closed in τ_K."""
    tops = _induced_topologies(c)
    closed = [b for b in powerset(c.carrier)
              if all(tops[k].is_closed(b & k) for k in c.family)]
    return FinTop(c.carrier, frozenset(closed))


# -- chain presentations -----------------------------------------------------

class CmpObject:
    """An ω-chain of towers ``node(0) ↪ node(1) ↪ ...``.

    ``chain_stabilization`` is an index past which every link is the identity;
    the object is then compact.
    """

    def __init__(self, node: Callable[[int], Tower], link: Callable[[int], TowerMap] | None = None,
                 *, chain_stabilization: int | None = None, expr=None):
        self._node_fn = node
        self._link_fn = link
        self.chain_stabilization = chain_stabilization
        self.expr = expr
        self._nodes = tw._Memo(self._make_node)
        self._links = tw._Memo(self._make_link)
        self._between = tw._Memo(self._make_between)

    def __repr__(self):
        return f"CmpObject({self.expr!r})" if self.expr is not None else super().__repr__()

    def clamp(self, l: int) -> int:
        s = self.chain_stabilization
        return l if s is None else min(l, s)

    def node(self, l: int) -> Tower:
        return self._nodes(self.clamp(l))

    def _make_node(self, l):
        return self._node_fn(l)

    def link(self, l: int) -> TowerMap:
        """Embedding ``node(l-1) ↪ node(l)``."""
        if l < 1:
            raise CmpError("node 0 has no incoming link")
        return self._links(l)

    def _make_link(self, l):
        if self.clamp(l) != l or self._link_fn is None:
            return tw.identity(self.node(l))
        return self._link_fn(l)

    def link_between(self, i: int, j: int) -> TowerMap:
        if i > j:
            raise CmpError(f"no link from node {i} down to node {j}")
        return self._between((self.clamp(i), self.clamp(j)))

    def _make_between(self, key):
        i, j = key
        if i == j:
            return tw.identity(self.node(i))
        return tw.compose(self.link(j), self.link_between(i, j - 1))

    @property
    def is_compact(self) -> bool:
        return self.chain_stabilization is not None

    @property
    def top(self) -> Tower:
        if not self.is_compact:
            raise CmpError("object is not compact")
        return self.node(self.chain_stabilization)

    @property
    def is_finite(self) -> bool:
        return self.is_compact and self.top.stabilization is not None

    def window_exact(self, chain: int, depth: int) -> bool:
        return (self.is_compact and self.chain_stabilization <= chain
                and self.top.is_stable_by(depth))

    def carrier(self, chain: int = DEFAULT_CHAIN, depth: int = DEFAULT_DEPTH) -> FinSet:
        """Approximate points: level ``depth`` of node ``chain``."""
        return self.node(chain).level(depth)

    def finite_carrier(self) -> FinSet:
        if not self.is_finite:
            raise CmpError("object is not finite")
        return self.top.level(self.top.stabilization)

    def same_as(self, other: "CmpObject") -> bool:
        return self is other or (self.expr is not None and self.expr == other.expr)


_catalogue_lock = threading.Lock()
_catalogue: dict = {}


def _cached(key, build):
    with _catalogue_lock:
        if key not in _catalogue:
            _catalogue[key] = build()
        return _catalogue[key]


def from_compact(t: Tower) -> CmpObject:
    key = ("compact", t.expr) if t.expr is not None else ("compact-id", id(t))
    return _cached(key, lambda: CmpObject(lambda l: t, chain_stabilization=0,
                                          expr=("compact", t.expr)))


def discrete(s) -> CmpObject:
    """A finite discrete set with all its subsets compact."""
    if isinstance(s, int):
        return from_compact(tw.fin_tower(s))
    return from_compact(tw.constant_tower(s))


def _inclusion(a: Tower, b: Tower) -> TowerMap:
    return TowerMap(a, b, lambda n, x: x, flags={INJECTIVE, EMBEDDING}, name="incl")


def discrete_countable() -> CmpObject:
    """ℕ with the finite subsets as compacts: node ℓ is {0, ..., ℓ}."""
    def build():
        return CmpObject(lambda l: tw.fin_tower(l + 1),
                         lambda l: _inclusion(tw.fin_tower(l), tw.fin_tower(l + 1)),
                         expr=("discrete_countable",))
    return _cached(("discrete_countable",), build)


def refine_chain(c: CmpObject) -> CmpObject:
    """Insert a copy of every node, linked by the identity."""
    def link(i):
        if i % 2 == 1:
            return tw.identity(c.node(i // 2))
        return c.link(i // 2)

    stab = None if c.chain_stabilization is None else 2 * c.chain_stabilization
    return CmpObject(lambda i: c.node(i // 2), link, chain_stabilization=stab,
                     expr=("refined", c.expr) if c.expr is not None else None)


# -- morphisms ---------------------------------------------------------------

class CmpMorphism:
    """Node ℓ of ``src`` goes to node ``target(ℓ)`` of ``dst`` by ``node_map(ℓ)``."""

    def __init__(self, src: CmpObject, dst: CmpObject, target: Callable[[int], int],
                 node_map: Callable[[int], TowerMap], name=None):
        self.src, self.dst = src, dst
        self._target = target
        self._node_map = tw._Memo(lambda l: node_map(l))
        self._pushed = tw._Memo(self._make_pushed)
        self.name = name

    def __repr__(self):
        return f"CmpMorphism({self.name or '?'}: {self.src!r} -> {self.dst!r})"

    def target(self, l: int) -> int:
        return self.dst.clamp(self._target(self.src.clamp(l)))

    def node_map(self, l: int) -> TowerMap:
        return self._node_map(self.src.clamp(l))

    def reach(self, l: int) -> int:
        """A dst node receiving every src node up to ``l``."""
        return max(self.target(i) for i in range(self.src.clamp(l) + 1))

    def pushed(self, l: int, r: int) -> TowerMap:
        """Node map ``l`` followed by the dst links up to node ``r``."""
        return self._pushed((self.src.clamp(l), self.dst.clamp(r)))

    def _make_pushed(self, key):
        l, r = key
        t = self.target(l)
        if r < t:
            raise CmpError(f"node {l} lands in node {t}, beyond node {r}")
        return tw.compose(self.dst.link_between(t, r), self.node_map(l))

    def at_window(self, chain: int) -> TowerMap:
        """Node ``chain`` of the source into the node reached by it."""
        return self.pushed(chain, self.reach(chain))

    def window_function(self, chain: int, depth: int) -> FinFun:
        """The induced map of window carriers, for maps that read no deeper than ``depth``."""
        l = self.src.clamp(chain)
        r = max(self.reach(chain), self.dst.clamp(chain))
        f = self.pushed(l, r)
        if f.shift(depth) > depth:
            raise CmpError("morphism reads beyond the window depth")
        return f.refined(depth, depth).corestrict(self.dst.node(r).level(depth))

    def verify(self, chain: int = DEFAULT_CHAIN, depth: int = DEFAULT_DEPTH) -> Certificate:
        """Coherence of node maps and refinement compatibility inside the window."""
        top = self.src.clamp(chain)
        for l in range(top + 1):
            try:
                self.node_map(l).validate(depth)
            except tw.TowerError as exc:
                return exact("no", witness=("node", l, str(exc)))
            if not self.node_map(l).src.same_as(self.src.node(l)):
                return exact("no", witness=("source", l))
            if not self.node_map(l).dst.same_as(self.dst.node(self.target(l))):
                return exact("no", witness=("target", l))
        for l in range(top):
            for l2 in range(l + 1, top + 1):
                r = max(self.target(l), self.target(l2))
                a = tw.compose(self.pushed(l2, r), self.src.link_between(l, l2))
                c = tw.maps_equal(a, self.pushed(l, r), depth)
                if c.status == "differ":
                    return exact("no", witness=("refinement", l, l2, c.witness))
        if self.src.window_exact(chain, depth) and self.dst.window_exact(chain, depth):
            return exact("yes")
        return window(chain, depth)


def cmp_identity(c: CmpObject) -> CmpMorphism:
    return CmpMorphism(c, c, lambda l: l, lambda l: tw.identity(c.node(l)), name="id")


def cmp_compose(g: CmpMorphism, f: CmpMorphism) -> CmpMorphism:
    """``g ∘ f``."""
    if not f.dst.same_as(g.src):
        raise CmpError("composition of non-matching morphisms")
    return CmpMorphism(f.src, g.dst, lambda l: g.target(f.target(l)),
                       lambda l: tw.compose(g.node_map(f.target(l)), f.node_map(l)))


def from_tower_map(src: CmpObject, dst: CmpObject, f: TowerMap, name=None) -> CmpMorphism:
    """A morphism out of a compact object given on its top node."""
    if not src.is_compact:
        raise CmpError("tower maps define morphisms out of compact objects only")
    s = src.chain_stabilization
    r = next((j for j in range(s + 64) if dst.node(j).same_as(f.dst)), None)
    if r is None:
        raise CmpError("the tower map does not land in a node of the target")
    return CmpMorphism(src, dst, lambda l: r,
                       lambda l: tw.compose(f, src.link_between(l, s)), name=name)


def finite_morphism(src: CmpObject, dst: CmpObject, table) -> CmpMorphism:
    """Morphism between finite objects from a dict on carriers."""
    if not (src.is_finite and dst.is_finite):
        raise CmpError("finite_morphism needs finite objects")
    a, b = src.top, dst.top
    d = max(a.stabilization, b.stabilization)
    ca, cb = src.finite_carrier(), dst.finite_carrier()
    # carriers are read at the stabilization levels; move them to level d
    up_a = {x: y for x, y in zip(a.level(d), a.project(d, a.stabilization).images)}
    down_b = {x: y for x, y in zip(b.level(d), b.project(d, b.stabilization).images)}
    lift_b = {y: x for x, y in down_b.items()}
    fun = FinFun(a.level(d), b.level(d), tuple(lift_b[table[up_a[x]]] for x in a.level(d)))
    for x in ca:
        if table[x] not in cb:
            raise CmpError(f"{table[x]!r} is not a target point")
    return from_tower_map(src, dst, tw.level_map(a, b, d, fun))


def morphism_table(m: CmpMorphism) -> dict:
    """Underlying map of a morphism between finite objects."""
    if not (m.src.is_finite and m.dst.is_finite):
        raise CmpError("underlying tables exist for finite objects only")
    a, b = m.src.top, m.dst.top
    s = m.src.chain_stabilization
    f = m.pushed(s, m.dst.chain_stabilization)
    d = max(b.stabilization, 0)
    m_lvl = max(a.stabilization, f.shift(d))
    comp = f.refined(d, m_lvl)
    to_a = a.project(m_lvl, a.stabilization)
    to_b = b.project(d, b.stabilization) if d >= b.stabilization else None
    out = {}
    for x, y in zip(comp.src, comp.images):
        out[to_a(x)] = to_b(y) if to_b is not None else y
    return out


def morphisms_equal(f: CmpMorphism, g: CmpMorphism, chain: int = DEFAULT_CHAIN,
                    depth: int = DEFAULT_DEPTH) -> Certificate:
    if not (f.src.same_as(g.src) and f.dst.same_as(g.dst)):
        raise CmpError("morphisms are not parallel")
    top = f.src.clamp(chain)
    certs = []
    for l in range(top + 1):
        r = max(f.target(l), g.target(l))
        c = tw.maps_equal(f.pushed(l, r), g.pushed(l, r), depth)
        if c.status == "differ":
            return exact("differ", witness=(l,) + c.witness)
        certs.append(c)
    if f.src.is_compact and f.src.chain_stabilization <= chain and all(c.exact for c in certs):
        return exact("equal")
    return window(chain, depth)


# -- hom sets ----------------------------------------------------------------

@dataclass
class HomWindow:
    src: CmpObject
    dst: CmpObject
    chain: int
    depth: int
    maps: list
    certificate: Certificate

    def __len__(self):
        return len(self.maps)

    def morphism(self, fun: FinFun) -> CmpMorphism:
        """Promote a window map to a morphism (compact source, target node stabilized)."""
        src, dst = self.src, self.dst
        if not src.is_compact:
            raise CmpError("only maps out of compact objects promote to morphisms")
        a = src.top
        r = dst.clamp(self.chain)
        b = dst.node(r)
        if not b.is_stable_by(self.depth):
            raise CmpError("target node is not stabilized inside the window")
        f = tw.level_map(a, b, self.depth, fun)
        return CmpMorphism(src, dst, lambda l: r,
                           lambda l: tw.compose(f, src.link_between(l, src.chain_stabilization)))


class HomSet:
    def __init__(self, src: CmpObject, dst: CmpObject):
        self.src, self.dst = src, dst

    def verify(self, m: CmpMorphism, chain: int = DEFAULT_CHAIN,
               depth: int = DEFAULT_DEPTH) -> Certificate:
        if not (m.src.same_as(self.src) and m.dst.same_as(self.dst)):
            return exact("no", witness="endpoints")
        return m.verify(chain, depth)

    def enumerate(self, chain: int = DEFAULT_CHAIN, depth: int = DEFAULT_DEPTH,
                  cap: int | None = None) -> HomWindow:
        """Maps between the window carriers; exact when both objects are finite inside it."""
        a = self.src.carrier(chain, depth)
        b = self.dst.carrier(chain, depth)
        kwargs = {} if cap is None else {"cap": cap}
        maps = enumerate_maps(a, b, **kwargs)
        if self.src.window_exact(chain, depth) and self.dst.window_exact(chain, depth):
            cert = exact()
        else:
            cert = window(chain, depth)
        return HomWindow(self.src, self.dst, chain, depth, maps, cert)


def hom_set(a: CmpObject, b: CmpObject) -> HomSet:
    return HomSet(a, b)


def finite_homs(a: CmpObject, b: CmpObject) -> list:
    """All morphisms between finite objects."""
    if not (a.is_finite and b.is_finite):
        raise CmpError("finite_homs needs finite objects")
    ca, cb = a.finite_carrier(), b.finite_carrier()
    return [finite_morphism(a, b, f.table) for f in enumerate_maps(ca, cb)]


# -- limits and colimits -----------------------------------------------------

@dataclass
class Cone:
    """A (co)limit object with its structure maps and a certificate."""
    obj: CmpObject
    maps: list
    certificate: Certificate = field(default_factory=exact)
    pieces: Callable | None = None


def _product_link(objs, l):
    links = [c.link(l) for c in objs]
    src = tw.tower_product_many([c.node(l - 1) for c in objs])
    dst = tw.tower_product_many([c.node(l) for c in objs])
    return TowerMap(src, dst, lambda n, p: tuple(k.component(n)(x) for k, x in zip(links, p)),
                    flags={INJECTIVE, EMBEDDING})


def cmp_product(*objs: CmpObject) -> Cone:
    objs = list(objs)
    stab = None
    if all(c.is_compact for c in objs):
        stab = max((c.chain_stabilization for c in objs), default=0)
    nodes = tw._Memo(lambda l: tw.tower_product_many([c.node(l) for c in objs]))
    expr = None
    if all(c.expr is not None for c in objs):
        expr = ("product",) + tuple(c.expr for c in objs)
    obj = CmpObject(nodes, lambda l: _retarget_link(_product_link(objs, l), nodes(l - 1), nodes(l)),
                    chain_stabilization=stab, expr=expr)
    projections = []
    for i, c in enumerate(objs):
        projections.append(CmpMorphism(
            obj, c, lambda l: l,
            lambda l, i=i: tw.projection(obj.node(l), [o.node(l) for o in objs], i),
            name=f"pr{i}"))
    return Cone(obj, projections)


def _retarget_link(f: TowerMap, src: Tower, dst: Tower) -> TowerMap:
    """Same labels, but between the given (memoized) node towers."""
    return TowerMap(src, dst, f._fn, shift=f.shift, flags=f.flags, name=f.name)


def cmp_pair(maps: Sequence[CmpMorphism], product: Cone) -> CmpMorphism:
    maps = list(maps)
    obj = product.obj
    src = maps[0].src

    def target(l):
        return max(m.target(l) for m in maps)

    def node_map(l):
        r = target(l)
        pushed = [tw.compose(p.dst.link_between(m.target(l), r), m.node_map(l))
                  for m, p in zip(maps, product.maps)]
        return tw.tower_pair(pushed, obj.node(r))

    return CmpMorphism(src, obj, target, node_map, name="pair")


def _coproduct_link(objs, l, src, dst):
    links = [c.link(l) for c in objs]
    return TowerMap(src, dst, lambda n, p: (p[0], links[p[0]].component(n)(p[1])),
                    flags={INJECTIVE, EMBEDDING})


def cmp_coproduct(objs: Sequence[CmpObject]) -> Cone:
    objs = list(objs)
    stab = None
    if all(c.is_compact for c in objs):
        stab = max((c.chain_stabilization for c in objs), default=0)
    nodes = tw._Memo(lambda l: tw.tower_coproduct([c.node(l) for c in objs]))
    expr = None
    if all(c.expr is not None for c in objs):
        expr = ("coproduct",) + tuple(c.expr for c in objs)
    obj = CmpObject(nodes, lambda l: _coproduct_link(objs, l, nodes(l - 1), nodes(l)),
                    chain_stabilization=stab, expr=expr)
    injections = [CmpMorphism(c, obj, lambda l: l,
                              lambda l, i=i, c=c: tw.injection(obj.node(l), i, c.node(l)),
                              name=f"in{i}")
                  for i, c in enumerate(objs)]
    return Cone(obj, injections)


def cmp_copair(maps: Sequence[CmpMorphism], coproduct: Cone) -> CmpMorphism:
    maps = list(maps)
    dst = maps[0].dst

    def target(l):
        return max(m.target(l) for m in maps)

    def node_map(l):
        r = target(l)
        pushed = [tw.compose(dst.link_between(m.target(l), r), m.node_map(l)) for m in maps]
        return tw.tower_copair(pushed, coproduct.obj.node(l), dst.node(r))

    return CmpMorphism(coproduct.obj, dst, target, node_map, name="copair")


def _check_parallel(f: CmpMorphism, g: CmpMorphism):
    if not (f.src.same_as(g.src) and f.dst.same_as(g.dst)):
        raise CmpError("morphisms are not parallel")


def cmp_equalizer(f: CmpMorphism, g: CmpMorphism, depth: int = DEFAULT_DEPTH,
                  chain: int = DEFAULT_CHAIN) -> Cone:
    """Node-wise closed subtower of the source where the two maps agree."""
    _check_parallel(f, g)
    src = f.src

    def sub(l):
        r = max(f.target(l), g.target(l))
        return tw.tower_equalizer(f.pushed(l, r), g.pushed(l, r), depth)

    subs = tw._Memo(sub)

    def link(l):
        base = src.link(l)
        return TowerMap(subs(l - 1).as_tower(), subs(l).as_tower(),
                        lambda n, x: base.component(n)(x), flags={INJECTIVE, EMBEDDING})

    obj = CmpObject(lambda l: subs(l).as_tower(), link,
                    chain_stabilization=src.chain_stabilization)
    incl = CmpMorphism(obj, src, lambda l: l, lambda l: subs(l).inclusion(), name="eq")
    top = src.clamp(chain)
    if src.is_compact and all(subs(l).exact for l in range(top + 1)):
        cert = exact()
    else:
        cert = window(chain, depth)
    return Cone(obj, [incl], cert, pieces=subs)


def cmp_coequalizer(f: CmpMorphism, g: CmpMorphism, chain: int = DEFAULT_CHAIN,
                    depth: int = DEFAULT_DEPTH) -> Cone:
    """Quotient of the target by the smallest closed equivalence relation.

    When the source is compact all generating pairs live in one target node
    and the construction is exact.  Otherwise the relation generated by the
    source node ``chain`` is used and the result is certified only for that
    window.
    """
    _check_parallel(f, g)
    if f.src.is_compact:
        return _coequalizer_exact(f, g)
    return _coequalizer_window(f, g, chain, depth)


def _coequalizer_exact(f, g) -> Cone:
    dst = f.dst
    s = f.src.chain_stabilization
    base = max(f.target(s), g.target(s))
    fs, gs = f.pushed(s, base), g.pushed(s, base)

    def quotient_at(j):
        link = dst.link_between(base, base + j)
        return tw.tower_coequalizer(tw.compose(link, fs), tw.compose(link, gs))

    quotients = tw._Memo(quotient_at)

    def link(j):
        q = quotients(j)[1]
        inner = dst.link(base + j)
        return TowerMap(quotients(j - 1)[0], quotients(j)[0],
                        lambda n, r: q.component(n)(inner.component(n)(r)),
                        flags={INJECTIVE, EMBEDDING})

    stab = None
    if dst.chain_stabilization is not None:
        stab = max(dst.chain_stabilization - base, 0)
    obj = CmpObject(lambda j: quotients(j)[0], link, chain_stabilization=stab)

    def target(l):
        return max(l - base, 0)

    def node_map(l):
        j = target(l)
        return tw.compose(quotients(j)[1], dst.link_between(l, base + j))

    quot = CmpMorphism(dst, obj, target, node_map, name="quotient")
    return Cone(obj, [quot], exact())


def _coequalizer_window(f, g, chain, depth) -> Cone:
    dst = f.dst
    base = max(f.target(chain), g.target(chain), dst.clamp(chain))
    q_tower, q = tw.tower_coequalizer(f.pushed(chain, base), g.pushed(chain, base))

    def into(l):
        return tw.compose(q, dst.link_between(l, base))

    images = tw._Memo(lambda l: tw.image(into(l), depth))
    obj = CmpObject(lambda j: images(j).as_tower(),
                    lambda j: TowerMap(images(j - 1).as_tower(), images(j).as_tower(),
                                       lambda n, x: x, flags={INJECTIVE, EMBEDDING}),
                    chain_stabilization=chain)

    def node_map(l):
        if l > chain:
            raise CmpError(f"node {l} lies outside the window at chain index {chain}")
        return tw.corestrict(into(l), images(l), flags={SURJECTIVE})

    quot = CmpMorphism(dst, obj, lambda l: min(l, chain), node_map, name="quotient")
    return Cone(obj, [quot], window(chain, depth))


def cmp_pullback(f: CmpMorphism, g: CmpMorphism, depth: int = DEFAULT_DEPTH,
                 chain: int = DEFAULT_CHAIN) -> Cone:
    if not f.dst.same_as(g.dst):
        raise CmpError("pullback of morphisms with different targets")
    prod = cmp_product(f.src, g.src)
    p0, p1 = prod.maps
    eq = cmp_equalizer(cmp_compose(f, p0), cmp_compose(g, p1), depth, chain)
    e = eq.maps[0]
    legs = [cmp_compose(p0, e), cmp_compose(p1, e)]
    if eq.obj.is_compact:
        sub = eq.pieces(eq.obj.chain_stabilization)
        if sub.clopen_level is not None:
            legs = [_flag_onto(leg, sub, i, eq.obj) for i, leg in enumerate(legs)]
    return Cone(eq.obj, legs, eq.certificate, pieces=eq.pieces)


def _flag_onto(leg: CmpMorphism, sub: tw.ClosedSubtower, i: int, obj: CmpObject) -> CmpMorphism:
    """Mark the top node map of a leg surjective when the clopen pullback covers that factor."""
    s = obj.chain_stabilization
    factor = leg.dst.node(leg.target(s))
    if not tw._covers(sub, factor, i):
        return leg
    top = leg.node_map(s)
    onto = TowerMap(top.src, top.dst, top._fn, shift=top.shift, flags={SURJECTIVE},
                    name=f"pb{i}")
    return CmpMorphism(leg.src, leg.dst, leg.target,
                       lambda l: onto if obj.clamp(l) == s else leg.node_map(l), name=f"pb{i}")


def cmp_pushout(f: CmpMorphism, g: CmpMorphism, chain: int = DEFAULT_CHAIN,
                depth: int = DEFAULT_DEPTH) -> Cone:
    if not f.src.same_as(g.src):
        raise CmpError("pushout of morphisms with different sources")
    co = cmp_coproduct([f.dst, g.dst])
    i0, i1 = co.maps
    coeq = cmp_coequalizer(cmp_compose(i0, f), cmp_compose(i1, g), chain, depth)
    q = coeq.maps[0]
    return Cone(coeq.obj, [cmp_compose(q, i0), cmp_compose(q, i1)], coeq.certificate)


# -- verdicts on morphisms ---------------------------------------------------

def is_regular_epi(m: CmpMorphism, chain: int = DEFAULT_CHAIN,
                   depth: int = DEFAULT_DEPTH) -> Certificate:
    """Every compact of the target is the image of a compact of the source.

    Between compact objects this is plain surjectivity of the top-node map.
    """
    if m.src.is_compact and m.dst.is_compact:
        s, t = m.src.chain_stabilization, m.dst.chain_stabilization
        return tw.is_epi(m.pushed(s, max(m.target(s), t)), depth)
    top = m.src.clamp(chain)
    r = max(m.reach(chain), m.dst.clamp(chain))
    f = m.pushed(top, r)
    for k in range(m.dst.clamp(chain) + 1):
        node = tw.compose(m.dst.link_between(k, r), tw.identity(m.dst.node(k)))
        for n in range(depth + 1):
            img = f.component(n).image()
            for y in node.component(n).images:
                if y not in img:
                    return exact("no", witness=(k, n, y))
    return window(chain, depth)


def is_mono(m: CmpMorphism, chain: int = DEFAULT_CHAIN, depth: int = DEFAULT_DEPTH) -> Certificate:
    if m.src.is_compact:
        s = m.src.chain_stabilization
        return tw.is_mono(m.at_window(s), depth)
    top = m.src.clamp(chain)
    c = tw.is_mono(m.at_window(top), depth)
    if c.status == "no":
        return c
    return window(chain, depth)


def is_regular_mono(m: CmpMorphism, chain: int = DEFAULT_CHAIN,
                    depth: int = DEFAULT_DEPTH) -> Certificate:
    """Between compact objects an injective map is a closed embedding, hence regular."""
    c = is_mono(m, chain, depth)
    if m.src.is_compact and m.dst.is_compact:
        return c
    if c.status == "no":
        return c
    return window(chain, depth)


def is_iso(m: CmpMorphism, chain: int = DEFAULT_CHAIN, depth: int = DEFAULT_DEPTH) -> Certificate:
    e, n = is_regular_epi(m, chain, depth), is_mono(m, chain, depth)
    if e.status == "no" or n.status == "no":
        return exact("not_iso", witness=e.witness if e.status == "no" else n.witness)
    if e.status == "yes" and n.status == "yes":
        return exact("iso")
    return window(chain, depth)


# -- topological side --------------------------------------------------------

def compactology_of(c: CmpObject) -> FiniteCompactology:
    """The compacts of a finite object: closed subsets of its nodes, on the top carrier."""
    if not c.is_finite:
        raise CmpError("explicit compactologies exist for finite objects only")
    s = c.chain_stabilization
    carrier = c.finite_carrier()
    family = []
    for l in range(s + 1):
        node = c.node(l)
        inc = c.link_between(l, s)
        d = max(node.stabilization or 0, c.top.stabilization)
        pts = [inc.refined(d, max(d, inc.shift(d)))(x) for x in node.level(max(d, inc.shift(d)))]
        pts = [c.top.project(d, c.top.stabilization)(y) for y in pts]
        family.extend(powerset(carrier.ordered(pts)))
    return FiniteCompactology(carrier, tuple(family))


def to_topological(c: CmpObject, depth: int = DEFAULT_DEPTH,
                   chain: int = DEFAULT_CHAIN) -> tuple[FinTop, Certificate]:
    """Final topology for finite objects; the discrete window quotient otherwise."""
    if c.is_finite:
        return final_topology(compactology_of(c)), exact()
    return FinTop.discrete(c.carrier(chain, depth)), window(chain, depth)


@dataclass(frozen=True)
class ContinuousMap:
    fun: FinFun
    src: FinTop
    dst: FinTop

    def __post_init__(self):
        if self.fun.src != self.src.carrier or self.fun.dst != self.dst.carrier:
            raise CmpError("map and spaces do not match")

    def is_continuous(self) -> bool:
        return is_continuous(self.fun, self.src, self.dst)


def adjoint_transpose(m, dst: CmpObject | None = None, src: CmpObject | None = None,
                      chain: int = DEFAULT_CHAIN, depth: int = DEFAULT_DEPTH):
    """Both directions of Cmp(X, ι Y) ≅ CGWH(X_top, Y); the underlying map is unchanged."""
    if isinstance(m, CmpMorphism):
        if not m.dst.is_compact:
            raise CmpError("target is not in the image of the compact spaces")
        x_top, _ = to_topological(m.src, depth, chain)
        y_top, _ = to_topological(m.dst, depth, chain)
        if m.src.is_finite and m.dst.is_finite:
            table = morphism_table(m)
            fun = FinFun.from_dict(x_top.carrier, y_top.carrier, table)
        else:
            fun = m.window_function(chain, depth).corestrict(y_top.carrier)
        return ContinuousMap(fun.corestrict(y_top.carrier), x_top, y_top)
    if isinstance(m, ContinuousMap):
        if dst is None or src is None:
            raise CmpError("transposing a continuous map needs its source and target objects")
        if not dst.is_finite or not m.dst.is_hausdorff():
            raise CmpError("target is not in the image of the compact spaces")
        if not m.is_continuous():
            raise CmpError("map is not continuous")
        if src.is_finite:
            return finite_morphism(src, dst, m.fun.table)
        hw = HomWindow(src, dst, chain, depth, [], window(chain, depth))
        return hw.morphism(FinFun(src.carrier(chain, depth), dst.carrier(chain, depth),
                                  m.fun.images))
    raise CmpError(f"cannot transpose {m!r}")


# -- factorization and subobjects --------------------------------------------

class Subobject:
    """Closed subtowers ``piece(ℓ)`` of the nodes of ``of``, compatible along links."""

    def __init__(self, of: CmpObject, piece: Callable[[int], tw.ClosedSubtower]):
        self.of = of
        self._piece = tw._Memo(piece)

    def piece(self, l: int) -> tw.ClosedSubtower:
        return self._piece(self.of.clamp(l))

    def points(self, chain: int = DEFAULT_CHAIN, depth: int = DEFAULT_DEPTH) -> frozenset:
        return self.piece(chain).member(depth)

    def as_object(self) -> tuple[CmpObject, CmpMorphism]:
        of = self.of

        def link(l):
            base = of.link(l)
            return TowerMap(self.piece(l - 1).as_tower(), self.piece(l).as_tower(),
                            lambda n, x: base.component(n)(x), flags={INJECTIVE, EMBEDDING})

        obj = CmpObject(lambda l: self.piece(l).as_tower(), link,
                        chain_stabilization=of.chain_stabilization)
        incl = CmpMorphism(obj, of, lambda l: l, lambda l: self.piece(l).inclusion())
        return obj, incl

    def equals(self, other: "Subobject", chain: int = DEFAULT_CHAIN,
               depth: int = DEFAULT_DEPTH) -> bool:
        if not self.of.same_as(other.of):
            return False
        return all(self.piece(l).member(n) == other.piece(l).member(n)
                   for l in range(self.of.clamp(chain) + 1) for n in range(depth + 1))

    def certificate(self, chain: int = DEFAULT_CHAIN, depth: int = DEFAULT_DEPTH) -> Certificate:
        top = self.of.clamp(chain)
        if self.of.is_compact and all(self.piece(l).exact for l in range(top + 1)):
            return exact()
        return window(chain, depth)


def _node_points(c: CmpObject, l: int):
    """Level and embedding of node ``l`` into the top node of a finite object."""
    s = c.chain_stabilization
    node = c.node(l)
    d = node.stabilization
    if d is None:
        raise CmpError(f"node {l} is not stabilized")
    d = max(d, c.top.stabilization)
    inc = c.link_between(l, s)
    to_top = inc.refined(d, max(d, inc.shift(d)))
    down = c.top.project(d, c.top.stabilization)
    return node, max(d, inc.shift(d)), lambda x: down(to_top(x))


def subset_subobject(c: CmpObject, subset) -> Subobject:
    """The subobject of a finite object carried by a subset of its points."""
    subset = frozenset(subset)
    carrier = c.finite_carrier()
    for x in subset:
        carrier.index(x)

    def piece(l):
        node, lvl, to_top = _node_points(c, l)
        return tw.clopen_subspace(node, lvl, {x for x in node.level(lvl) if to_top(x) in subset})

    return Subobject(c, piece)


def subobject_points(s: Subobject) -> frozenset:
    """Points of a subobject of a finite object, as top-carrier labels."""
    c = s.of
    top = c.chain_stabilization
    node, lvl, to_top = _node_points(c, top)
    return frozenset(to_top(x) for x in s.piece(top).member(lvl))


def top_subobject(c: CmpObject) -> Subobject:
    return Subobject(c, lambda l: tw.clopen_subspace(c.node(l), 0, c.node(l).level(0)))


def bottom_subobject(c: CmpObject) -> Subobject:
    return Subobject(c, lambda l: tw.clopen_subspace(c.node(l), 0, ()))


def subobject_union(a: Subobject, b: Subobject) -> Subobject:
    if not a.of.same_as(b.of):
        raise CmpError("union of subobjects of different objects")
    return Subobject(a.of, lambda l: tw.subtower_union(a.piece(l), b.piece(l)))


def subobject_pullback(f: CmpMorphism, s: Subobject, depth: int = DEFAULT_DEPTH) -> Subobject:
    if not f.dst.same_as(s.of):
        raise CmpError("pullback along a morphism into a different object")
    return Subobject(f.src, lambda l: tw.preimage(f.node_map(l), s.piece(f.target(l)), depth))


def is_subdiagram(sub, family) -> Verdict:
    """Downward closed inside ``family`` and closed under finite unions (the empty one too)."""
    sub = frozenset(frozenset(k) for k in sub)
    family = frozenset(frozenset(k) for k in family)
    if not sub <= family:
        return Verdict(False, "inside", next(iter(sub - family)))
    if frozenset() not in sub:
        return Verdict(False, "finite unions", frozenset())
    for k in sub:
        for k2 in family:
            if k2 <= k and k2 not in sub:
                return Verdict(False, "downward closed", (k, k2))
    for k1, k2 in itertools.combinations(sub, 2):
        if k1 | k2 not in sub:
            return Verdict(False, "finite unions", k1 | k2)
    return Verdict(True)


def enumerate_subdiagrams(family) -> list:
    family = sorted(frozenset(frozenset(k) for k in family), key=lambda k: (len(k), sorted(map(repr, k))))
    out = []
    for r in range(len(family) + 1):
        for sub in itertools.combinations(family, r):
            if is_subdiagram(sub, family).valid:
                out.append(frozenset(sub))
    return out


def subobjects_enumerate(c: CmpObject) -> list:
    """Subobjects of a finite object, one per admissible subdiagram of its compactology."""
    if not c.is_finite:
        raise CmpError("subobjects are enumerated for finite objects only")
    out = []
    for sub in enumerate_subdiagrams(compactology_of(c).family):
        points = frozenset().union(*sub)
        out.append((sub, subset_subobject(c, points)))
    return out


@dataclass
class Factorization:
    quotient: CmpMorphism
    embedding: CmpMorphism
    image: CmpObject
    subobject: Subobject | None


def image_factorize(m: CmpMorphism, depth: int = DEFAULT_DEPTH) -> Factorization:
    """``m = embedding ∘ quotient`` through the node-wise images."""
    dst = m.dst

    def reach(j):
        return m.reach(j)

    images = tw._Memo(lambda j: tw.image(m.pushed(j, reach(j)), depth))

    def link(j):
        inner = dst.link_between(reach(j - 1), reach(j))
        return TowerMap(images(j - 1).as_tower(), images(j).as_tower(),
                        lambda n, x: inner.component(n)(x), flags={INJECTIVE, EMBEDDING})

    obj = CmpObject(lambda j: images(j).as_tower(), link,
                    chain_stabilization=m.src.chain_stabilization)
    quotient = CmpMorphism(m.src, obj, lambda l: l,
                           lambda l: tw.corestrict(m.pushed(l, reach(l)), images(l),
                                                   flags={SURJECTIVE}),
                           name="onto image")
    embedding = CmpMorphism(obj, dst, reach, lambda j: images(j).inclusion(), name="image")
    sub = None
    if m.src.is_compact:
        s = m.src.chain_stabilization
        r = reach(s)
        top_image = images(s)

        def piece(k):
            if k >= r:
                return tw.image(tw.compose(dst.link_between(r, k), top_image.inclusion()), depth)
            return tw.preimage(dst.link_between(k, r), top_image, depth)

        sub = Subobject(dst, piece)
    return Factorization(quotient, embedding, obj, sub)


# -- finite exponents --------------------------------------------------------

def internal_hom_finite_exponent(k, c: CmpObject) -> Cone:
    """``[k, c]`` for a finite discrete ``k``: the ``|k|``-fold power of ``c``."""
    if isinstance(k, int):
        k = fin(k)
    if not isinstance(k, FinSet):
        raise CmpError("exponent must be a finite set")
    return cmp_product(*([c] * len(k)))


def curry_finite(m: CmpMorphism, a: CmpObject, k: FinSet, power: Cone) -> CmpMorphism:
    """``a × discrete(k) → C`` becomes ``a → C^k`` for finite objects."""
    table = morphism_table(m)
    return finite_morphism(a, power.obj, {x: tuple(table[(x, j)] for j in k)
                                          for x in a.finite_carrier()})


def uncurry_finite(m: CmpMorphism, product: Cone, k: FinSet, c: CmpObject) -> CmpMorphism:
    """Inverse of ``curry_finite``; ``product`` is ``a × discrete(k)``."""
    table = morphism_table(m)
    return finite_morphism(product.obj, c, {(x, j): table[x][i]
                                            for x in table for i, j in enumerate(k)})
