"""Permutations as tuples and breadth-first group closure."""
from collections import deque


def compose(p, q):
    """(p o q)(x) = p[q[x]]."""
    return tuple(p[x] for x in q)


def identity(m):
    return tuple(range(m))


def inverse(p):
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def is_permutation(p) -> bool:
    return sorted(p) == list(range(len(p)))


def closure(generators, limit=None):
    """All products of the generators (a finite group), by breadth-first search.

    Returns a dict element -> shortest generator word (tuple of generator
    indices, applied right to left) that produces it.
    """
    gens = [tuple(g) for g in generators]
    if not gens:
        raise ValueError("need at least one generator")
    e = identity(len(gens[0]))
    words = {e: ()}
    queue = deque([e])
    while queue:
        x = queue.popleft()
        for gi, g in enumerate(gens):
            y = compose(g, x)
            if y not in words:
                words[y] = (gi,) + words[x]
                if limit is not None and len(words) > limit:
                    raise OverflowError(f"group exceeds {limit} elements")
                queue.append(y)
    return words


def order(p) -> int:
    e = identity(len(p))
    k, q = 1, tuple(p)
    while q != e:
        q = compose(p, q)
        k += 1
    return k
