"""Circular orders and permutation witnesses.

A circular order is stored as a tuple of labels; two tuples denote the same
order iff one is a rotation of the other.  Reversal gives a different order
unless the length is at most 2.
"""
from __future__ import annotations


def canonical_rotation(seq: tuple[str, ...] | list[str]) -> tuple[str, ...]:
    """Rotate a circular sequence so its smallest label comes first.

    >>> canonical_rotation(("c", "a", "b"))
    ('a', 'b', 'c')
    """
    seq = tuple(seq)
    if len(seq) <= 1:
        return seq
    k = seq.index(min(seq))
    return seq[k:] + seq[:k]


def reverse_order(seq: tuple[str, ...] | list[str]) -> tuple[str, ...]:
    """Reversal of a circular order, re-rotated canonically."""
    return canonical_rotation(tuple(reversed(tuple(seq))))


def same_circular(a, b) -> bool:
    """Whether two sequences denote the same circular order."""
    a, b = tuple(a), tuple(b)
    return len(a) == len(b) and canonical_rotation(a) == canonical_rotation(b)


def restrict(order, subset) -> tuple[str, ...]:
    """The circular order induced on `subset` (kept in scan order)."""
    want = set(subset)
    return tuple(x for x in order if x in want)


def is_suborder(order, sub) -> bool:
    """Whether circular order `sub` equals `order` restricted to sub's labels.

    >>> is_suborder(("a", "b", "c", "d"), ("b", "d", "a"))
    True
    >>> is_suborder(("a", "b", "c", "d"), ("b", "a", "d"))
    False
    """
    sub = tuple(sub)
    if len(set(sub)) != len(sub):
        return False
    induced = restrict(order, sub)
    if len(induced) != len(sub):
        return False
    return same_circular(induced, sub)


def apply_map(order, mapping: dict[str, str]) -> tuple[str, ...]:
    """Relabel an order through a mapping (labels absent stay untouched)."""
    return tuple(mapping.get(x, x) for x in order)


# ---------------------------------------------------------------------------
# permutations
# ---------------------------------------------------------------------------


def cycle_decomposition(perm: dict[str, str]) -> list[list[str]]:
    """Cycles of a permutation, each rotated to its smallest element,
    sorted by that element.

    >>> cycle_decomposition({"a": "b", "b": "a", "c": "c"})
    [['a', 'b'], ['c']]
    """
    if set(perm.keys()) != set(perm.values()):
        raise ValueError("not a permutation")
    seen: set[str] = set()
    cycles = []
    for start in sorted(perm):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        x = perm[start]
        while x != start:
            cyc.append(x)
            seen.add(x)
            x = perm[x]
        cycles.append(cyc)
    return sorted(cycles, key=lambda c: c[0])


def order_preserving_witness(perm: dict[str, str]) -> tuple[str, ...] | None:
    """A circular order O with perm(O) = O, or None if none exists.

    One exists iff all cycles have the same length.  The witness interleaves
    the cycles: with m cycles of length l, position j*m + i holds the j-th
    element of cycle i, so applying the permutation rotates the order by m.
    """
    if not perm:
        return ()
    cycles = cycle_decomposition(perm)
    length = len(cycles[0])
    if any(len(c) != length for c in cycles):
        return None
    m = len(cycles)
    out: list[str] = []
    for j in range(length):
        for i in range(m):
            out.append(cycles[i][j])
    return canonical_rotation(tuple(out))


def order_reversing_witness(perm: dict[str, str]) -> tuple[str, ...] | None:
    """A circular order O with perm(O) = reverse(O), or None.

    One exists iff every cycle has length <= 2 and there are at most two
    fixpoints; the witness realises the permutation as a reflection.
    """
    if not perm:
        return ()
    cycles = cycle_decomposition(perm)
    fixed = [c[0] for c in cycles if len(c) == 1]
    pairs = [c for c in cycles if len(c) == 2]
    if len(fixed) > 2 or len(fixed) + len(pairs) != len(cycles):
        return None
    left = [c[0] for c in pairs]
    right = [c[1] for c in reversed(pairs)]
    if len(fixed) == 0:
        out = left + right
    elif len(fixed) == 1:
        out = [fixed[0]] + left + right
    else:
        out = [fixed[0]] + left + [fixed[1]] + right
    return canonical_rotation(tuple(out))


def permutes_order(perm: dict[str, str], order, *, reverse: bool) -> bool:
    """Check perm(O) = O (or reverse(O)); used to verify witnesses."""
    image = tuple(perm[x] for x in order)
    target = tuple(reversed(order)) if reverse else tuple(order)
    return same_circular(image, target)
