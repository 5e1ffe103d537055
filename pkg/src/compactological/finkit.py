"""Finite sets, maps, partitions and finite topological spaces.

Everything here is exhaustive and small.  The brute-force routines at the
bottom of the module (``min_equivalence_bruteforce``, ``enumerate_partitions``,
``enumerate_topologies``, ``wh_reflect_fixpoint``) are deliberately naive: they
serve as independent oracles for the cleverer code in the rest of the package.

Labels are arbitrary hashable values.  The canonical order of a ``FinSet`` is
its insertion order, and every enumeration follows it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

ENUMERATION_CAP = 10**6


class FinkitError(ValueError):
    pass


class EnumerationCapExceeded(FinkitError):
    pass


@dataclass(frozen=True)
class FinSet:
    elements: tuple
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        index = {}
        for i, x in enumerate(elements):
            if x in index:
                raise FinkitError(f"duplicate label {x!r}")
            index[x] = i
        object.__setattr__(self, "_index", index)

    @classmethod
    def of(cls, *labels) -> "FinSet":
        return cls(labels)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        try:
            return x in self._index
        except TypeError:
            return False

    def index(self, x) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise FinkitError(f"{x!r} is not a label of this set") from None

    def sort_key(self, x) -> int:
        return self._index[x]

    def ordered(self, labels: Iterable) -> tuple:
        """The given labels in canonical order."""
        return tuple(sorted(set(labels), key=self.index))

    def subset(self, labels: Iterable) -> "FinSet":
        return FinSet(self.ordered(labels))

    def __repr__(self):
        return f"FinSet({list(self.elements)!r})"


def fin(n: int) -> FinSet:
    return FinSet(tuple(range(n)))


@dataclass(frozen=True)
class FinFun:
    """A total map between finite sets, stored as the tuple of images."""

    src: FinSet
    dst: FinSet
    images: tuple

    def __post_init__(self):
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        if len(images) != len(self.src):
            raise FinkitError(
                f"map has {len(images)} images for a source of size {len(self.src)}")
        for x, y in zip(self.src, images):
            if y not in self.dst:
                raise FinkitError(f"image {y!r} of {x!r} is not a target label")

    @classmethod
    def from_dict(cls, src: FinSet, dst: FinSet, table) -> "FinFun":
        try:
            return cls(src, dst, tuple(table[x] for x in src))
        except KeyError as exc:
            raise FinkitError(f"no image given for {exc.args[0]!r}") from None

    @classmethod
    def from_callable(cls, src: FinSet, dst: FinSet, fn) -> "FinFun":
        return cls(src, dst, tuple(fn(x) for x in src))

    @classmethod
    def identity(cls, s: FinSet) -> "FinFun":
        return cls(s, s, s.elements)

    @classmethod
    def constant(cls, src: FinSet, dst: FinSet, value) -> "FinFun":
        return cls(src, dst, (value,) * len(src))

    @property
    def table(self) -> dict:
        return dict(zip(self.src.elements, self.images))

    def __call__(self, x):
        return self.images[self.src.index(x)]

    def then(self, other: "FinFun") -> "FinFun":
        """``other ∘ self``."""
        if other.src != self.dst:
            raise FinkitError("composition of non-matching maps")
        return FinFun(self.src, other.dst, tuple(other(y) for y in self.images))

    def image(self) -> frozenset:
        return frozenset(self.images)

    def is_injective(self) -> bool:
        return len(set(self.images)) == len(self.images)

    def is_surjective(self) -> bool:
        return len(set(self.images)) == len(self.dst)

    def preimage(self, subset) -> frozenset:
        subset = set(subset)
        return frozenset(x for x, y in zip(self.src, self.images) if y in subset)

    def restrict(self, src: FinSet) -> "FinFun":
        return FinFun(src, self.dst, tuple(self(x) for x in src))

    def corestrict(self, dst: FinSet) -> "FinFun":
        return FinFun(self.src, dst, self.images)


def compose(*fs: FinFun) -> FinFun:
    """``compose(h, g, f) = h ∘ g ∘ f``."""
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = out.then(f)
    return out


@dataclass(frozen=True)
class FinPartition:
    """Assignment of class ids ``0..k-1``, numbered by first appearance."""

    carrier: FinSet
    class_of: tuple

    def __post_init__(self):
        class_of = tuple(self.class_of)
        object.__setattr__(self, "class_of", class_of)
        if len(class_of) != len(self.carrier):
            raise FinkitError("partition does not assign every label")
        seen = -1
        for c in class_of:
            if c > seen + 1:
                raise FinkitError("class ids must be contiguous and in first-seen order")
            seen = max(seen, c)

    @classmethod
    def from_labels(cls, carrier: FinSet, key) -> "FinPartition":
        """Partition by an arbitrary key function, renumbered canonically."""
        ids, out = {}, []
        for x in carrier:
            k = key(x)
            if k not in ids:
                ids[k] = len(ids)
            out.append(ids[k])
        return cls(carrier, tuple(out))

    @classmethod
    def discrete(cls, carrier: FinSet) -> "FinPartition":
        return cls(carrier, tuple(range(len(carrier))))

    def __len__(self):
        return max(self.class_of, default=-1) + 1

    def cls(self, x) -> int:
        return self.class_of[self.carrier.index(x)]

    def classes(self) -> list:
        out = [[] for _ in range(len(self))]
        for x, c in zip(self.carrier, self.class_of):
            out[c].append(x)
        return [tuple(c) for c in out]

    def representatives(self) -> tuple:
        # classes are numbered by first appearance, so the first member is the least
        return tuple(c[0] for c in self.classes())

    def representative(self, x):
        return self.representatives()[self.cls(x)]

    def related(self, x, y) -> bool:
        return self.cls(x) == self.cls(y)

    def pairs(self) -> frozenset:
        return frozenset((x, y) for c in self.classes() for x in c for y in c)

    def quotient(self) -> tuple[FinSet, FinFun]:
        reps = self.representatives()
        q = FinSet(reps)
        return q, FinFun(self.carrier, q, tuple(reps[c] for c in self.class_of))

    def refines(self, other: "FinPartition") -> bool:
        return all(other.related(x, y) for x, y in self.pairs())


class UnionFind:
    """Union-find whose root is always the least label in canonical order.

    >>> uf = UnionFind(FinSet.of("a", "b", "c"))
    >>> uf.union("c", "b"); uf.find("c")
    'b'
    """

    def __init__(self, carrier: FinSet):
        self.carrier = carrier
        self._parent = {x: x for x in carrier}

    def find(self, x):
        root = x
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[x] != root:
            self._parent[x], x = root, self._parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        if self.carrier.index(ry) < self.carrier.index(rx):
            rx, ry = ry, rx
        self._parent[ry] = rx

    def partition(self) -> FinPartition:
        return FinPartition.from_labels(self.carrier, self.find)


def equivalence_closure(carrier: FinSet, pairs: Iterable) -> FinPartition:
    uf = UnionFind(carrier)
    for x, y in pairs:
        uf.union(x, y)
    return uf.partition()


def _check_parallel(f: FinFun, g: FinFun):
    if f.src != g.src or f.dst != g.dst:
        raise FinkitError("maps are not parallel")


def fin_product(a: FinSet, b: FinSet) -> tuple[FinSet, FinFun, FinFun]:
    prod = FinSet(tuple(itertools.product(a, b)))
    return (prod,
            FinFun(prod, a, tuple(p[0] for p in prod)),
            FinFun(prod, b, tuple(p[1] for p in prod)))


def fin_coproduct(sets: Sequence[FinSet]) -> tuple[FinSet, list]:
    total = FinSet(tuple((i, x) for i, s in enumerate(sets) for x in s))
    injections = [FinFun(s, total, tuple((i, x) for x in s)) for i, s in enumerate(sets)]
    return total, injections


def fin_coequalizer(f: FinFun, g: FinFun) -> tuple[FinPartition, FinFun]:
    _check_parallel(f, g)
    part = equivalence_closure(f.dst, zip(f.images, g.images))
    return part, part.quotient()[1]


def fin_equalizer(f: FinFun, g: FinFun) -> tuple[FinSet, FinFun]:
    _check_parallel(f, g)
    eq = f.src.subset(x for x, y, z in zip(f.src, f.images, g.images) if y == z)
    return eq, FinFun(eq, f.src, eq.elements)


def fin_pullback(f: FinFun, g: FinFun) -> tuple[FinSet, FinFun, FinFun]:
    if f.dst != g.dst:
        raise FinkitError("pullback of maps with different targets")
    pb = FinSet(tuple((x, y) for x in f.src for y in g.src if f(x) == g(y)))
    return (pb,
            FinFun(pb, f.src, tuple(p[0] for p in pb)),
            FinFun(pb, g.src, tuple(p[1] for p in pb)))


def enumerate_maps(a: FinSet, b: FinSet, cap: int = ENUMERATION_CAP) -> list:
    count = len(b) ** len(a)
    if count > cap:
        raise EnumerationCapExceeded(f"{count} maps exceed the enumeration cap {cap}")
    return [FinFun(a, b, images) for images in itertools.product(b.elements, repeat=len(a))]


def factor_through(q: FinFun, h: FinFun) -> FinFun | None:
    """The unique ``u`` with ``u ∘ q = h`` for surjective ``q``, or None."""
    table = {}
    for x in q.src:
        y = q(x)
        if table.setdefault(y, h(x)) != h(x):
            return None
    if len(table) != len(q.dst):
        return None
    return FinFun.from_dict(q.dst, h.dst, table)


# -- finite topological spaces ----------------------------------------------

@dataclass(frozen=True)
class FinTop:
    carrier: FinSet
    closed_sets: frozenset

    def __post_init__(self):
        closed = frozenset(frozenset(c) for c in self.closed_sets)
        object.__setattr__(self, "closed_sets", closed)
        full = frozenset(self.carrier)
        if frozenset() not in closed or full not in closed:
            raise FinkitError("the empty set and the carrier must be closed")
        for c in closed:
            if not c <= full:
                raise FinkitError(f"closed set {set(c)} leaves the carrier")
        for a, b in itertools.combinations(closed, 2):
            if a | b not in closed or a & b not in closed:
                raise FinkitError("closed sets are not a lattice of subsets")

    @classmethod
    def discrete(cls, carrier: FinSet) -> "FinTop":
        return cls(carrier, frozenset(powerset(carrier)))

    @classmethod
    def indiscrete(cls, carrier: FinSet) -> "FinTop":
        return cls(carrier, frozenset({frozenset(), frozenset(carrier)}))

    @property
    def open_sets(self) -> frozenset:
        full = frozenset(self.carrier)
        return frozenset(full - c for c in self.closed_sets)

    def closure(self, subset) -> frozenset:
        subset = frozenset(subset)
        out = frozenset(self.carrier)
        for c in self.closed_sets:
            if subset <= c:
                out &= c
        return out

    def is_closed(self, subset) -> bool:
        return frozenset(subset) in self.closed_sets

    def is_discrete(self) -> bool:
        return len(self.closed_sets) == 2 ** len(self.carrier)

    def is_t1(self) -> bool:
        return all(self.is_closed({x}) for x in self.carrier)

    def is_hausdorff(self) -> bool:
        opens = self.open_sets
        for x, y in itertools.combinations(self.carrier, 2):
            if not any(x in u and y in v and not (u & v) for u in opens for v in opens):
                return False
        return True

    def subspace(self, subset) -> "FinTop":
        subset = frozenset(subset)
        return FinTop(self.carrier.subset(subset),
                      frozenset(c & subset for c in self.closed_sets))


def powerset(s: Iterable) -> list:
    """All subsets in canonical order: by size, then lexicographically."""
    s = tuple(s)
    return [frozenset(c) for r in range(len(s) + 1) for c in itertools.combinations(s, r)]


def is_continuous(f: FinFun, src: FinTop, dst: FinTop) -> bool:
    return all(src.is_closed(f.preimage(c)) for c in dst.closed_sets)


def top_product(a: FinTop, b: FinTop) -> tuple[FinTop, FinFun, FinFun]:
    """Product space; closed sets generated by the closed rectangles' complements."""
    prod, p1, p2 = fin_product(a.carrier, b.carrier)
    full = frozenset(prod)
    subbasic = [frozenset(x for x in prod if x[0] in c) for c in a.closed_sets]
    subbasic += [frozenset(x for x in prod if x[1] in c) for c in b.closed_sets]
    # opens: unions of finite intersections of subbasic opens
    sub_open = {full - c for c in subbasic}
    basis = {full}
    for u in sub_open:
        basis |= {u & v for v in basis}
    opens = {frozenset()}
    for u in basis:
        opens |= {u | v for v in opens}
    return FinTop(prod, frozenset(full - u for u in opens)), p1, p2


def quotient_topology(t: FinTop, q: FinFun) -> FinTop:
    closed = frozenset(frozenset(c) for c in powerset(q.dst) if t.is_closed(q.preimage(c)))
    return FinTop(q.dst, closed)


def specialization_components(t: FinTop) -> FinPartition:
    """Connected components of the specialization order (x ~ y if x ∈ cl{y})."""
    uf = UnionFind(t.carrier)
    for y in t.carrier:
        for x in t.closure({y}):
            uf.union(x, y)
    return uf.partition()


def wh_reflect(t: FinTop) -> tuple[FinTop, FinFun]:
    """Quotient by the smallest closed equivalence relation.

    On a finite space that relation is "same component of the specialization
    graph": every closed relation containing the diagonal contains each
    ``cl{x} × cl{x}``, and the component relation is a finite union of clopen
    squares.  The result is discrete.
    """
    part = specialization_components(t)
    _, q = part.quotient()
    return quotient_topology(t, q), q


# -- brute-force oracles -----------------------------------------------------

def enumerate_partitions(carrier: FinSet) -> list:
    """Every partition of the carrier (restricted growth strings)."""
    n = len(carrier)
    out = []

    def grow(prefix, top):
        if len(prefix) == n:
            out.append(FinPartition(carrier, tuple(prefix)))
            return
        for c in range(top + 2):
            grow(prefix + [c], max(top, c))

    grow([], -1)
    return out


def min_equivalence_bruteforce(carrier: FinSet, pairs: Iterable) -> FinPartition:
    """Least equivalence relation containing ``pairs``, found by enumeration."""
    pairs = list(pairs)
    candidates = [p for p in enumerate_partitions(carrier)
                  if all(p.related(x, y) for x, y in pairs)]
    least = [p for p in candidates if all(p.refines(q) for q in candidates)]
    if len(least) != 1:
        raise FinkitError("no least equivalence relation")  # cannot happen
    return least[0]


def enumerate_topologies(carrier: FinSet) -> list:
    """Every topology on a small carrier, given by its closed sets."""
    subsets = powerset(carrier)
    empty, full = frozenset(), frozenset(carrier)
    middle = [s for s in subsets if s not in (empty, full)]
    out = []
    for r in range(len(middle) + 1):
        for extra in itertools.combinations(middle, r):
            fam = {empty, full, *extra}
            if all(a | b in fam and a & b in fam for a in fam for b in fam):
                out.append(FinTop(carrier, frozenset(fam)))
    return out


def wh_reflect_fixpoint(t: FinTop) -> FinPartition:
    """Smallest closed equivalence relation, by alternating two closures."""
    space, _, _ = top_product(t, t)
    rel = frozenset((x, x) for x in t.carrier)
    while True:
        closed = space.closure(rel)
        part = equivalence_closure(t.carrier, closed)
        nxt = part.pairs()
        if nxt == rel:
            return part
        rel = nxt
