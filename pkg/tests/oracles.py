"""Brute-force reference computations, written without the library's algorithms."""
import itertools


def set_partitions(items):
    """Every partition of ``items`` as a list of blocks (lists)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def partition_pairs(blocks):
    return frozenset((x, y) for b in blocks for x in b for y in b)


def least_equivalence(items, pairs):
    """The equivalence relation with fewest pairs among all containing ``pairs``."""
    pairs = set(pairs)
    best = None
    for blocks in set_partitions(items):
        rel = partition_pairs(blocks)
        if pairs <= rel and (best is None or len(rel) < len(best)):
            best = rel
    return best


def product_closed_sets(closed_a, closed_b, pts_a, pts_b):
    """Closed sets of the product topology, from rectangles of opens."""
    pts = [(x, y) for x in pts_a for y in pts_b]
    full_a, full_b = frozenset(pts_a), frozenset(pts_b)
    opens_a = [full_a - c for c in closed_a]
    opens_b = [full_b - c for c in closed_b]
    rects = {frozenset((x, y) for x in u for y in v) for u in opens_a for v in opens_b}
    # close under pairwise unions until nothing new appears
    opens = {frozenset()} | rects
    while True:
        new = {u | v for u in opens for v in opens} - opens
        if not new:
            break
        opens |= new
    full = frozenset(pts)
    return {full - u for u in opens}


def least_closed_equivalence(pts, closed):
    """Intersection-minimal equivalence relation closed in ``pts × pts``."""
    prod_closed = product_closed_sets(closed, closed, pts, pts)
    best = None
    for blocks in set_partitions(pts):
        rel = partition_pairs(blocks)
        if rel in prod_closed and (best is None or len(rel) < len(best)):
            best = rel
    return best


def all_maps(src, dst):
    src, dst = list(src), list(dst)
    for images in itertools.product(dst, repeat=len(src)):
        yield dict(zip(src, images))


def continuous(table, closed_src, closed_dst):
    for c in closed_dst:
        pre = frozenset(x for x, y in table.items() if y in c)
        if pre not in closed_src:
            return False
    return True
