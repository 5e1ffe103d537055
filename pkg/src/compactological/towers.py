"""Stone spaces as towers of finite sets with surjective transitions.

A ``Tower`` materializes its levels lazily and caches them behind a lock.
A ``TowerMap`` is a continuous map given level by level: level ``n`` of the
target is computed from level ``shift(n)`` of the source.

Every question that could depend on levels beyond the depth budget returns
a ``Certificate`` whose status ends in ``_at`` unless a stabilization index
or a structural flag settles it.
"""
from __future__ import annotations

import threading
from typing import Callable, Iterable, Sequence

from .certs import Certificate, at_depth, exact
from .finkit import (FinFun, FinPartition, FinSet, enumerate_maps, equivalence_closure,
                     fin)

INF = "inf"
DEFAULT_DEPTH = 4

INJECTIVE = "injective"
SURJECTIVE = "surjective"
EMBEDDING = "embedding"


class TowerError(ValueError):
    pass


class NonSurjectiveTransition(TowerError):
    def __init__(self, level, element):
        super().__init__(f"transition into level {level} misses {element!r}")
        self.level, self.element = level, element


class IncoherentMap(TowerError):
    def __init__(self, level, element, detail=""):
        super().__init__(f"coherence square fails at level {level} on {element!r}{detail}")
        self.level, self.element = level, element


class IncoherentSubsets(TowerError):
    def __init__(self, level, element):
        super().__init__(f"member {element!r} at level {level} escapes the lower member")
        self.level, self.element = level, element


class _Memo:
    """Thread-safe memo table for lazily materialized levels."""

    def __init__(self, compute):
        self._compute = compute
        self._cache = {}
        self._lock = threading.RLock()

    def __call__(self, key):
        try:
            return self._cache[key]
        except KeyError:
            pass
        with self._lock:
            if key not in self._cache:
                self._cache[key] = self._compute(key)
            return self._cache[key]


class Tower:
    """A profinite space presented by levels ``0, 1, 2, ...``.

    ``level(n)`` returns the labels of level ``n`` and ``step(n, x)`` sends a
    level-``n`` label to level ``n - 1``.  ``stabilization`` is an index past
    which all transitions are bijections, when known.
    """

    def __init__(self, level: Callable[[int], Iterable], step: Callable, *,
                 stabilization: int | None = None, expr=None):
        self._level_fn = level
        self._step = step
        self.stabilization = stabilization
        self.expr = expr
        self._levels = _Memo(lambda n: FinSet(tuple(self._level_fn(n))))
        self._transitions = _Memo(self._make_transition)
        self._projections = _Memo(self._make_projection)

    def __repr__(self):
        return f"Tower({self.expr!r})" if self.expr is not None else super().__repr__()

    def level(self, n: int) -> FinSet:
        if n < 0:
            raise TowerError("negative level")
        return self._levels(n)

    def transition(self, n: int) -> FinFun:
        if n < 1:
            raise TowerError("level 0 has no transition")
        return self._transitions(n)

    def _make_transition(self, n):
        lower = self.level(n - 1)
        return FinFun(self.level(n), lower, tuple(self._step(n, x) for x in self.level(n)))

    def project(self, n: int, k: int) -> FinFun:
        """Composite transition from level ``n`` down to level ``k``."""
        if k > n:
            raise TowerError(f"cannot project level {n} up to level {k}")
        return self._projections((n, k))

    def _make_projection(self, key):
        n, k = key
        if n == k:
            return FinFun.identity(self.level(n))
        return self.transition(n).then(self.project(n - 1, k))

    def is_stable_by(self, depth: int) -> bool:
        return self.stabilization is not None and self.stabilization <= depth

    def is_empty(self) -> bool:
        # transitions are surjective, so level 0 is empty iff the limit is
        return len(self.level(0)) == 0

    def same_as(self, other: "Tower") -> bool:
        return self is other or (self.expr is not None and self.expr == other.expr)


def materialize(t: Tower, depth: int) -> list:
    """Levels ``0..depth`` with their transitions, checking surjectivity."""
    if depth < 0:
        raise TowerError("depth must be non-negative")
    out = [(t.level(0), None)]
    for n in range(1, depth + 1):
        tr = t.transition(n)
        missed = [y for y in tr.dst if y not in tr.image()]
        if missed:
            raise NonSurjectiveTransition(n - 1, missed[0])
        out.append((t.level(n), tr))
    return out


# -- catalogue ---------------------------------------------------------------

_catalogue_lock = threading.Lock()
_catalogue: dict = {}


def _cached(key, build):
    with _catalogue_lock:
        if key not in _catalogue:
            _catalogue[key] = build()
        return _catalogue[key]


def constant_tower(s: FinSet, expr=None) -> Tower:
    return Tower(lambda n: s.elements, lambda n, x: x, stabilization=0,
                 expr=expr if expr is not None else ("set", s.elements))


def fin_tower(k: int) -> Tower:
    return _cached(("fin", k), lambda: constant_tower(fin(k), ("fin", k)))


def point_tower() -> Tower:
    return fin_tower(1)


def empty_tower() -> Tower:
    return fin_tower(0)


def _ninf_level(n):
    return list(range(n)) + [INF]


def _ninf_step(n, x):
    return x if x != INF and x < n - 1 else INF


def ninf() -> Tower:
    """One-point compactification of ℕ: level n is {0, ..., n-1, inf}."""
    return _cached(("ninf",), lambda: Tower(_ninf_level, _ninf_step, expr=("ninf",)))


def _cantor_level(n):
    out = [()]
    for _ in range(n):
        out = [w + (b,) for w in out for b in (0, 1)]
    return out


def cantor() -> Tower:
    """Binary words of length n at level n; transitions drop the last bit."""
    return _cached(("cantor",), lambda: Tower(_cantor_level, lambda n, w: w[:-1],
                                              expr=("cantor",)))


# -- maps --------------------------------------------------------------------

class TowerMap:
    """Continuous map; ``fn(n, s)`` sends ``s`` in ``src.level(shift(n))`` to ``dst.level(n)``."""

    def __init__(self, src: Tower, dst: Tower, fn: Callable, *,
                 shift: Callable[[int], int] | None = None, flags=(), name=None):
        self.src, self.dst = src, dst
        self._fn = fn
        self._shift = shift if shift is not None else (lambda n: n)
        self.flags = frozenset(flags)
        self.name = name
        self._components = _Memo(self._make_component)
        self._refined = _Memo(self._make_refined)

    def __repr__(self):
        return f"TowerMap({self.name or '?'}: {self.src!r} -> {self.dst!r})"

    def shift(self, n: int) -> int:
        return self._shift(n)

    def component(self, n: int) -> FinFun:
        return self._components(n)

    def _make_component(self, n):
        src = self.src.level(self.shift(n))
        return FinFun(src, self.dst.level(n), tuple(self._fn(n, s) for s in src))

    def refined(self, n: int, m: int) -> FinFun:
        """Level-``n`` component read off source level ``m >= shift(n)``."""
        return self._refined((n, m))

    def _make_refined(self, key):
        n, m = key
        return self.src.project(m, self.shift(n)).then(self.component(n))

    def validate(self, depth: int) -> "TowerMap":
        """Check monotone shift and every coherence square up to ``depth``."""
        for n in range(1, depth + 1):
            m, m1 = self.shift(n), self.shift(n - 1)
            if m < m1:
                raise IncoherentMap(n, None, ": shift is not monotone")
            down = self.component(n).then(self.dst.transition(n))
            across = self.src.project(m, m1).then(self.component(n - 1))
            for s, a, b in zip(down.src, down.images, across.images):
                if a != b:
                    raise IncoherentMap(n, s, f": {a!r} vs {b!r}")
        return self

    def then(self, other: "TowerMap") -> "TowerMap":
        """``other ∘ self``."""
        return compose(other, self)

    def has(self, flag: str) -> bool:
        return flag in self.flags


def compose(g: TowerMap, f: TowerMap) -> TowerMap:
    if not f.dst.same_as(g.src):
        raise TowerError("composition of non-matching tower maps")
    flags = f.flags & g.flags
    return TowerMap(f.src, g.dst,
                    lambda n, s: g.component(n)(f.component(g.shift(n))(s)),
                    shift=lambda n: f.shift(g.shift(n)), flags=flags)


def identity(t: Tower) -> TowerMap:
    return TowerMap(t, t, lambda n, x: x, flags={INJECTIVE, SURJECTIVE, EMBEDDING},
                    name="id")


def thread_map(src: Tower, dst: Tower, thread: Callable[[int], object], name=None) -> TowerMap:
    """Constant map onto the point of ``dst`` whose level-n label is ``thread(n)``."""
    return TowerMap(src, dst, lambda n, s: thread(n), shift=lambda n: 0, name=name)


def constant_map(src: Tower, dst: Tower, label) -> TowerMap:
    """Constant map into a stabilized tower with a label present at every level."""
    return thread_map(src, dst, lambda n: label, name=f"const {label!r}")


def level_map(src: Tower, dst: Tower, d: int, fun: FinFun, *, flags=()) -> TowerMap:
    """The map ``src → src.level(d) → dst`` for ``dst`` stabilized by level ``d``.

    ``fun`` goes from ``src.level(d)`` to ``dst.level(d)``; higher target
    levels are reached through the inverse of the bijective transitions.
    """
    if not dst.is_stable_by(d):
        raise TowerError("level maps need a target stabilized by the given level")
    if fun.src != src.level(d) or fun.dst != dst.level(d):
        raise TowerError("level map has the wrong source or target level")

    def lift(n, y):
        if n <= d:
            return dst.project(d, n)(y)
        inverse = {b: a for a, b in dst.project(n, d).table.items()}
        return inverse[y]

    return TowerMap(src, dst, lambda n, s: lift(n, fun(s)), shift=lambda n: d,
                    flags=flags)


def successor() -> TowerMap:
    """n ↦ n+1 and inf ↦ inf on ninf; reads level n-1 of the source."""
    t = ninf()

    def fn(n, x):
        return x + 1 if x != INF else INF

    return TowerMap(t, t, fn, shift=lambda n: max(n - 1, 0), name="succ")


def bit_flip(position: int = 0) -> TowerMap:
    t = cantor()

    def fn(n, w):
        if len(w) <= position:
            return w
        return w[:position] + (1 - w[position],) + w[position + 1:]

    return TowerMap(t, t, fn, flags={INJECTIVE, SURJECTIVE, EMBEDDING},
                    name=f"flip{position}")


def first_one() -> TowerMap:
    """Cantor → ninf, a word goes to the position of its first 1."""
    def fn(n, w):
        return w.index(1) if 1 in w else INF

    return TowerMap(cantor(), ninf(), fn, name="first_one")


def truncation(t: Tower, d: int) -> TowerMap:
    """The surjection from ``t`` onto the finite discrete space ``t.level(d)``."""
    target = constant_tower(t.level(d), expr=("level", t.expr, d))
    return TowerMap(t, target, lambda n, x: x, shift=lambda n: d, flags={SURJECTIVE},
                    name=f"truncate{d}")


# -- products and coproducts -------------------------------------------------

def tower_product_many(ts: Sequence[Tower]) -> Tower:
    ts = list(ts)

    def level(n):
        out = [()]
        for t in ts:
            out = [p + (x,) for p in out for x in t.level(n)]
        return out

    def step(n, p):
        return tuple(t.transition(n)(x) for t, x in zip(ts, p))

    stab = None
    if all(t.stabilization is not None for t in ts):
        stab = max((t.stabilization for t in ts), default=0)
    return Tower(level, step, stabilization=stab,
                 expr=("product",) + tuple(t.expr for t in ts)
                 if all(t.expr is not None for t in ts) else None)


def tower_product(a: Tower, b: Tower) -> Tower:
    return tower_product_many([a, b])


def projection(prod: Tower, factors: Sequence[Tower], i: int) -> TowerMap:
    others_nonempty = all(not t.is_empty() for j, t in enumerate(factors) if j != i)
    flags = {SURJECTIVE} if others_nonempty else set()
    return TowerMap(prod, factors[i], lambda n, p: p[i], flags=flags, name=f"pr{i}")


def tower_pair(maps: Sequence[TowerMap], prod: Tower) -> TowerMap:
    """The map into a product induced by maps out of a common source."""
    maps = list(maps)
    src = maps[0].src

    def shift(n):
        return max([n] + [f.shift(n) for f in maps]) if maps else n

    return TowerMap(src, prod, lambda n, s: tuple(f.refined(n, shift(n))(s) for f in maps),
                    shift=shift)


def tower_coproduct(ts: Sequence[Tower]) -> Tower:
    ts = list(ts)
    stab = None
    if all(t.stabilization is not None for t in ts):
        stab = max((t.stabilization for t in ts), default=0)
    return Tower(lambda n: [(i, x) for i, t in enumerate(ts) for x in t.level(n)],
                 lambda n, p: (p[0], ts[p[0]].transition(n)(p[1])),
                 stabilization=stab,
                 expr=("coproduct",) + tuple(t.expr for t in ts)
                 if all(t.expr is not None for t in ts) else None)


def injection(total: Tower, i: int, summand: Tower) -> TowerMap:
    return TowerMap(summand, total, lambda n, x: (i, x), flags={INJECTIVE, EMBEDDING},
                    name=f"in{i}")


def tower_copair(maps: Sequence[TowerMap], total: Tower, dst: Tower) -> TowerMap:
    maps = list(maps)

    def shift(n):
        return max([n] + [f.shift(n) for f in maps])

    return TowerMap(total, dst, lambda n, p: maps[p[0]].refined(n, shift(n))(p[1]),
                    shift=shift)


# -- closed subspaces --------------------------------------------------------

class ClosedSubtower:
    """Coherent subsets ``member(n)`` of the levels of ``base``.

    ``exactness`` is ``"exact"`` when every member maps onto the member below
    it (so the members are the true projections of the closed subset), or
    ``"pruned_to_depth"`` when forward images were intersected down to the
    budget ``depth``.  ``clopen_level`` records that the subset is the full
    preimage of a subset of that level, which makes it exact at every depth.
    """

    def __init__(self, base: Tower, member: Callable[[int], frozenset], *,
                 exactness: str = "exact", depth: int | None = None,
                 clopen_level: int | None = None, whole: bool = False):
        self.base = base
        self.whole = whole
        self._member = _Memo(lambda n: frozenset(member(n)))
        self.exactness = exactness
        self.depth = depth
        self.clopen_level = clopen_level
        self._tower = None
        self._lock = threading.Lock()

    def member(self, n: int) -> frozenset:
        return self._member(n)

    @property
    def exact(self) -> bool:
        return self.exactness == "exact"

    @property
    def certificate(self) -> Certificate:
        if self.exact:
            return exact()
        return Certificate("pruned_to_depth", depth=self.depth)

    def emptiness(self, depth: int) -> Certificate:
        """``empty`` as soon as a level is empty, since lower members contain the images."""
        for n in range(depth + 1):
            if not self.member(n):
                return exact("empty", witness=n)
        if self.exact or self.clopen_level is not None:
            return exact("no")
        return at_depth("nonempty", depth)

    def as_tower(self) -> Tower:
        with self._lock:
            if self._tower is None:
                base = self.base
                stab = None
                if self.clopen_level is not None and base.stabilization is not None:
                    stab = max(base.stabilization, self.clopen_level)
                self._tower = Tower(lambda n: base.level(n).ordered(self.member(n)),
                                    lambda n, x: base.transition(n)(x),
                                    stabilization=stab)
            return self._tower

    def inclusion(self) -> TowerMap:
        flags = {INJECTIVE, EMBEDDING} | ({SURJECTIVE} if self.whole else set())
        return TowerMap(self.as_tower(), self.base, lambda n, x: x, flags=flags, name="incl")

    def contains(self, other: "ClosedSubtower", depth: int) -> bool:
        return all(other.member(n) <= self.member(n) for n in range(depth + 1))


def clopen_subspace(base: Tower, level: int, subset) -> ClosedSubtower:
    """Preimage of a subset of one level: exact at every depth."""
    subset = frozenset(subset)
    for x in subset:
        base.level(level).index(x)

    def member(n):
        if n >= level:
            return base.project(n, level).preimage(subset)
        return frozenset(base.project(level, n)(x) for x in subset)

    return ClosedSubtower(base, member, clopen_level=level,
                          whole=subset == frozenset(base.level(level)))


def closed_subspace(base: Tower, member: Callable[[int], Iterable],
                    depth: int = DEFAULT_DEPTH) -> ClosedSubtower:
    """Closed subtower from coherent level subsets, pruned down to ``depth`` if needed."""
    raw = ClosedSubtower(base, member)
    onto = True
    for n in range(1, depth + 1):
        tr = base.transition(n)
        image = frozenset(tr(x) for x in raw.member(n))
        escaped = image - raw.member(n - 1)
        if escaped:
            x = next(x for x in raw.member(n) if tr(x) in escaped)
            raise IncoherentSubsets(n, x)
        onto = onto and image == raw.member(n - 1)
    if onto or not raw.member(depth):
        return raw

    deep = raw.member(depth)

    def pruned(n):
        if n <= depth:
            return frozenset(base.project(depth, n)(x) for x in deep)
        return raw.member(n)

    return ClosedSubtower(base, pruned, exactness="pruned_to_depth", depth=depth)


def image(f: TowerMap, depth: int = DEFAULT_DEPTH) -> ClosedSubtower:
    f.validate(depth)
    return ClosedSubtower(f.dst, lambda n: f.component(n).image())


def corestrict(f: TowerMap, sub: ClosedSubtower, flags=()) -> TowerMap:
    """``f`` viewed as a map into a closed subtower containing its image."""
    target = sub.as_tower()
    return TowerMap(f.src, target, lambda n, s: f.component(n)(s), shift=f.shift,
                    flags=flags)


def preimage(f: TowerMap, sub: ClosedSubtower, depth: int = DEFAULT_DEPTH) -> ClosedSubtower:
    """``f⁻¹(sub)``; exact when ``sub`` is clopen or the target is stabilized."""
    src = f.src

    def member(n):
        m = max(n, f.shift(n))
        hit = f.refined(n, m).preimage(sub.member(n))
        return frozenset(src.project(m, n)(x) for x in hit)

    level = sub.clopen_level
    if level is None and f.dst.is_stable_by(depth):
        level = f.dst.stabilization
    if level is not None:
        m = max(level, f.shift(level))
        return clopen_subspace(src, m, f.refined(level, m).preimage(sub.member(level)))
    return closed_subspace(src, member, depth)


def subtower_union(a: ClosedSubtower, b: ClosedSubtower) -> ClosedSubtower:
    if not a.base.same_as(b.base):
        raise TowerError("union of subtowers of different towers")
    clopen = None
    if a.clopen_level is not None and b.clopen_level is not None:
        clopen = max(a.clopen_level, b.clopen_level)
    exactness = "exact" if a.exact and b.exact else "pruned_to_depth"
    depth = min(d for d in (a.depth, b.depth, 10**9) if d is not None)
    return ClosedSubtower(a.base, lambda n: a.member(n) | b.member(n), exactness=exactness,
                          depth=None if exactness == "exact" else depth, clopen_level=clopen)


# -- equalizers, pullbacks, coequalizers -------------------------------------

def _check_parallel(f: TowerMap, g: TowerMap):
    if not (f.src.same_as(g.src) and f.dst.same_as(g.dst)):
        raise TowerError("tower maps are not parallel")


def tower_equalizer(f: TowerMap, g: TowerMap, depth: int = DEFAULT_DEPTH) -> ClosedSubtower:
    """Closed subtower of the source where the two maps agree."""
    _check_parallel(f, g)
    src = f.src

    def reach(n):
        return max(n, f.shift(n), g.shift(n))

    def agree(n):
        m = reach(n)
        a, b = f.refined(n, m), g.refined(n, m)
        return m, frozenset(x for x, y, z in zip(a.src, a.images, b.images) if y == z)

    if f.dst.is_stable_by(depth):
        m, subset = agree(f.dst.stabilization)
        return clopen_subspace(src, m, subset)

    def member(n):
        m, subset = agree(n)
        return frozenset(src.project(m, n)(x) for x in subset)

    return closed_subspace(src, member, depth)


class TowerPullback:
    def __init__(self, sub: ClosedSubtower, p1: TowerMap, p2: TowerMap):
        self.sub, self.p1, self.p2 = sub, p1, p2

    @property
    def tower(self) -> Tower:
        return self.sub.as_tower()


def _covers(sub: ClosedSubtower, factor: Tower, i: int) -> bool:
    """A clopen subset of a product projects onto factor ``i`` iff its defining level does."""
    n = sub.clopen_level
    return {p[i] for p in sub.member(n)} == set(factor.level(n))


def tower_pullback(f: TowerMap, g: TowerMap, depth: int = DEFAULT_DEPTH) -> TowerPullback:
    if not f.dst.same_as(g.dst):
        raise TowerError("pullback of maps with different targets")
    factors = [f.src, g.src]
    prod = tower_product_many(factors)
    pr0, pr1 = projection(prod, factors, 0), projection(prod, factors, 1)
    sub = tower_equalizer(compose(f, pr0), compose(g, pr1), depth)
    tower = sub.as_tower()
    flags0, flags1 = set(), set()
    if sub.clopen_level is not None:
        if _covers(sub, f.src, 0):
            flags0.add(SURJECTIVE)
        if _covers(sub, g.src, 1):
            flags1.add(SURJECTIVE)
    # monos are stable under base change in any category
    if g.has(INJECTIVE):
        flags0.add(INJECTIVE)
    if f.has(INJECTIVE):
        flags1.add(INJECTIVE)
    p1 = TowerMap(tower, f.src, lambda n, p: p[0], flags=flags0, name="pb1")
    p2 = TowerMap(tower, g.src, lambda n, p: p[1], flags=flags1, name="pb2")
    return TowerPullback(sub, p1, p2)


def _as_pair(p: frozenset) -> tuple:
    return (tuple(p) * 2)[:2]


class LevelRelation:
    """Unordered pairs on each level of ``base``, closed up level by level."""

    def __init__(self, base: Tower, pairs: Callable[[int], Iterable]):
        self.base = base
        self._pairs = _Memo(lambda n: frozenset(frozenset(p) for p in pairs(n)))
        self._partitions = _Memo(self._make_partition)

    @classmethod
    def generated_by(cls, f: TowerMap, g: TowerMap) -> "LevelRelation":
        _check_parallel(f, g)

        def pairs(n):
            m = max(f.shift(n), g.shift(n))
            a, b = f.refined(n, m), g.refined(n, m)
            return {(y, z) for y, z in zip(a.images, b.images) if y != z}

        return cls(f.dst, pairs)

    def pairs(self, n: int) -> frozenset:
        return self._pairs(n)

    def partition(self, n: int) -> FinPartition:
        return self._partitions(n)

    def _make_partition(self, n):
        return equivalence_closure(self.base.level(n), [_as_pair(p) for p in self.pairs(n)])

    def check_coherent(self, depth: int):
        for n in range(1, depth + 1):
            tr = self.base.transition(n)
            for p in self.pairs(n):
                x, y = _as_pair(p)
                down = frozenset({tr(x), tr(y)})
                if len(down) == 2 and down not in self.pairs(n - 1):
                    raise IncoherentSubsets(n, (x, y))


def tower_coequalizer(f: TowerMap, g: TowerMap) -> tuple[Tower, TowerMap]:
    """Level-wise quotient by the equivalence closure of the generated pairs."""
    rel = LevelRelation.generated_by(f, g)
    return quotient_tower(rel)


def quotient_tower(rel: LevelRelation) -> tuple[Tower, TowerMap]:
    base = rel.base

    def step(n, r):
        return rel.partition(n - 1).representative(base.transition(n)(r))

    q = Tower(lambda n: rel.partition(n).representatives(), step,
              stabilization=base.stabilization,
              expr=None)
    quot = TowerMap(base, q, lambda n, x: rel.partition(n).representative(x),
                    flags={SURJECTIVE}, name="quotient")
    return q, quot


# -- verdicts ----------------------------------------------------------------

def is_epi(f: TowerMap, depth: int = DEFAULT_DEPTH) -> Certificate:
    if f.has(SURJECTIVE):
        return exact("yes")
    for n in range(depth + 1):
        img = f.component(n).image()
        for y in f.dst.level(n):
            if y not in img:
                return exact("no", witness=(n, y))
    if f.dst.is_stable_by(depth):
        return exact("yes")
    return at_depth("unknown", depth)


def is_mono(f: TowerMap, depth: int = DEFAULT_DEPTH) -> Certificate:
    if f.has(INJECTIVE):
        return exact("yes")
    if f.src.is_stable_by(depth):
        # finitely many points: once separated at some level they stay separated
        s = f.src.stabilization
        for n in range(depth + 1):
            if f.refined(n, max(s, f.shift(n))).is_injective():
                return exact("yes")
        if f.dst.is_stable_by(depth):
            d = f.dst.stabilization
            comp = f.refined(d, max(s, f.shift(d)))
            seen = {}
            for x, y in zip(comp.src, comp.images):
                if y in seen:
                    return exact("no", witness=(seen[y], x))
                seen[y] = x
    return at_depth("unknown", depth)


def maps_equal(f: TowerMap, g: TowerMap, depth: int = DEFAULT_DEPTH) -> Certificate:
    _check_parallel(f, g)
    for n in range(depth + 1):
        m = max(f.shift(n), g.shift(n))
        a, b = f.refined(n, m), g.refined(n, m)
        for x, y, z in zip(a.src, a.images, b.images):
            if y != z:
                return exact("differ", witness=(n, x, y, z))
    if f.dst.is_stable_by(depth):
        return exact("equal")
    return at_depth("equal", depth)


def points_at_depth(t: Tower, depth: int) -> tuple[FinSet, Certificate]:
    pts = t.level(depth)
    if t.is_stable_by(depth):
        return pts, exact()
    return pts, at_depth("approx", depth)


def level_bijection(f: TowerMap, depth: int) -> bool:
    """Every component up to ``depth`` is a bijection (identity shift assumed)."""
    for n in range(depth + 1):
        c = f.refined(n, max(n, f.shift(n)))
        if f.shift(n) > n or not (c.is_injective() and c.is_surjective()):
            return False
    return True


def is_iso(f: TowerMap, depth: int = DEFAULT_DEPTH) -> Certificate:
    epi, mono = is_epi(f, depth), is_mono(f, depth)
    if epi.status == "no" or mono.status == "no":
        return exact("not_iso", witness=epi.witness or mono.witness)
    if epi.status == "yes" and mono.status == "yes":
        return exact("iso")
    if level_bijection(f, depth):
        return at_depth("iso", depth)
    return at_depth("unknown", depth)


def tower_hom_window(src: Tower, dst: Tower, depth: int, cap: int | None = None) -> list:
    """Maps from level ``depth`` of ``src`` to level ``depth`` of ``dst``."""
    kwargs = {} if cap is None else {"cap": cap}
    return enumerate_maps(src.level(depth), dst.level(depth), **kwargs)
