"""Finite groups as dense multiplication tables.

A group of order n is stored as an n x n integer table over element indices
0..n-1, validated on construction (Latin square, two-sided identity, inverses,
associativity) together with its conjugacy classes. Groups built here are
immutable: the backing arrays are marked read-only.

Construction routes: a raw table, closure of explicit generators (permutations
or matrices over a prime field), a handful of named families, and direct
products. A line-oriented text format with a strict loader round-trips tables
to disk, and a SHA-256 digest of the table keys derived caches.
"""

from __future__ import annotations

import hashlib
import math
import os
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    ClosureCapExceeded,
    FileFormatError,
    NotAGroup,
    UnsupportedParameter,
)

__all__ = [
    "FiniteGroup",
    "from_table",
    "conjugacy_classes",
    "from_permutation_generators",
    "named",
    "product",
    "save_group",
    "load_group",
    "group_hash",
    "CLOSURE_CAP",
]

CLOSURE_CAP = 5000
# above this order, associativity is checked on sampled triples instead of all n^3
_ASSOC_EXHAUSTIVE_MAX = 512
_ASSOC_SAMPLES = 100_000

GROUP_MAGIC = "quasirep-group v1"


class FiniteGroup:
    """Immutable finite group over indices 0..order-1.

    Attributes:
        name: human-readable label ("alternating(5)", "table", ...).
        order: number of elements.
        table: (order, order) int array, table[x, y] = x * y.
        identity: index of the neutral element.
        inverses: int array, table[x, inverses[x]] = identity.
        classes: tuple of tuples, conjugacy classes as sorted index tuples,
            the class of the identity first.
        class_of: int array mapping each element to its class index.
    """

    def __init__(self, name: str, table: np.ndarray, identity: int,
                 inverses: np.ndarray, classes: tuple[tuple[int, ...], ...]):
        self.name = name
        self.table = table
        self.identity = int(identity)
        self.inverses = inverses
        self.classes = classes
        class_of = np.empty(len(table), dtype=np.int64)
        for ci, cls in enumerate(classes):
            class_of[list(cls)] = ci
        self.class_of = class_of
        for arr in (self.table, self.inverses, self.class_of):
            arr.setflags(write=False)

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def class_sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    def mul(self, x: int, y: int) -> int:
        return int(self.table[x, y])

    def inv(self, x: int) -> int:
        return int(self.inverses[x])

    def squares(self) -> np.ndarray:
        """Index array of x*x for every x."""
        return self.table.diagonal()

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name!r}, order={self.order})"


def _check_latin(table: np.ndarray) -> None:
    n = len(table)
    want = np.arange(n)
    for x in range(n):
        if not np.array_equal(np.sort(table[x]), want):
            raise NotAGroup(f"row {x} is not a permutation of 0..{n - 1}")
    for y in range(n):
        if not np.array_equal(np.sort(table[:, y]), want):
            raise NotAGroup(f"column {y} is not a permutation of 0..{n - 1}")


def _find_identity(table: np.ndarray) -> int:
    n = len(table)
    want = np.arange(n)
    for e in range(n):
        if np.array_equal(table[e], want) and np.array_equal(table[:, e], want):
            return e
    raise NotAGroup("no two-sided identity element")


def _check_associativity(table: np.ndarray) -> None:
    n = len(table)
    if n <= _ASSOC_EXHAUSTIVE_MAX:
        # (x*y)*z vs x*(y*z), chunked over x to bound memory
        chunk = max(1, (1 << 22) // (n * n))
        for x0 in range(0, n, chunk):
            hi = min(n, x0 + chunk)
            lhs = table[table[x0:hi], :]                     # (c, n, n)
            rhs = table[np.arange(x0, hi)[:, None, None], table[None, :, :]]
            if not np.array_equal(lhs, rhs):
                bad = np.argwhere(lhs != rhs)[0]
                x, y, z = int(bad[0]) + x0, int(bad[1]), int(bad[2])
                raise NotAGroup(f"associativity fails at (x, y, z) = ({x}, {y}, {z})")
        return
    rng = np.random.default_rng(0)
    xs = rng.integers(0, n, _ASSOC_SAMPLES)
    ys = rng.integers(0, n, _ASSOC_SAMPLES)
    zs = rng.integers(0, n, _ASSOC_SAMPLES)
    lhs = table[table[xs, ys], zs]
    rhs = table[xs, table[ys, zs]]
    mism = np.nonzero(lhs != rhs)[0]
    if len(mism):
        i = int(mism[0])
        raise NotAGroup(
            f"associativity fails at (x, y, z) = ({int(xs[i])}, {int(ys[i])}, {int(zs[i])})"
        )


def _conjugacy_partition(table: np.ndarray, inverses: np.ndarray,
                         identity: int) -> tuple[tuple[int, ...], ...]:
    n = len(table)
    seen = np.zeros(n, dtype=bool)
    classes: list[tuple[int, ...]] = []
    order = [identity] + [x for x in range(n) if x != identity]
    for x in order:
        if seen[x]:
            continue
        conj = table[table[:, x], inverses]      # g*x*g^-1 for every g
        members = np.unique(conj)
        seen[members] = True
        classes.append(tuple(int(m) for m in members))
    return tuple(classes)


def from_table(table, name: str = "table") -> FiniteGroup:
    """Validate a multiplication table and wrap it as a FiniteGroup.

    Raises NotAGroup with a witness (row, column, or triple) when any axiom
    fails. Associativity is exhaustive up to order 512 and sampled (1e5 seeded
    triples) beyond that.
    """
    arr = np.array(table, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise NotAGroup(f"table must be square, got shape {arr.shape}")
    n = len(arr)
    if n == 0:
        raise NotAGroup("empty table")
    if arr.min() < 0 or arr.max() >= n:
        bad = np.argwhere((arr < 0) | (arr >= n))[0]
        raise NotAGroup(f"entry at ({bad[0]}, {bad[1]}) is outside 0..{n - 1}")
    _check_latin(arr)
    identity = _find_identity(arr)
    inverses = np.empty(n, dtype=np.int64)
    for x in range(n):
        ys = np.nonzero(arr[x] == identity)[0]
        y = int(ys[0])
        if arr[y, x] != identity:
            raise NotAGroup(f"element {x} has no two-sided inverse")
        inverses[x] = y
    _check_associativity(arr)
    classes = _conjugacy_partition(arr, inverses, identity)
    return FiniteGroup(name, arr, identity, inverses, classes)


def conjugacy_classes(group: FiniteGroup) -> tuple[tuple[int, ...], ...]:
    """Conjugacy classes as sorted index tuples, identity class first."""
    return group.classes


def _bfs_closure(generators: Sequence, identity, mul: Callable, cap: int) -> list:
    """Deterministic closure: breadth-first discovery by right multiplication."""
    elements = [identity]
    index = {identity: 0}
    i = 0
    while i < len(elements):
        g = elements[i]
        for s in generators:
            p = mul(g, s)
            if p not in index:
                if len(elements) >= cap:
                    raise ClosureCapExceeded(f"closure exceeded cap of {cap} elements")
                index[p] = len(elements)
                elements.append(p)
        i += 1
    return elements


def _table_from_elements(elements: list, mul: Callable, name: str) -> FiniteGroup:
    index = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    table = np.empty((n, n), dtype=np.int64)
    for i, a in enumerate(elements):
        row = table[i]
        for j, b in enumerate(elements):
            row[j] = index[mul(a, b)]
    return from_table(table, name=name)


def _compose_perm(a: tuple, b: tuple) -> tuple:
    # apply b first, then a
    return tuple(a[x] for x in b)


def from_permutation_generators(degree: int, generators: Iterable[Sequence[int]],
                                cap: int = CLOSURE_CAP,
                                name: str = "permgroup") -> FiniteGroup:
    """Group generated by permutations of 0..degree-1 (image tuples)."""
    gens = []
    for g in generators:
        t = tuple(int(v) for v in g)
        if sorted(t) != list(range(degree)):
            raise UnsupportedParameter(f"{t} is not a permutation of 0..{degree - 1}")
        gens.append(t)
    identity = tuple(range(degree))
    elements = _bfs_closure(gens, identity, _compose_perm, cap)
    return _table_from_elements(elements, _compose_perm, name)


def _matmul_mod(p: int, size: int):
    def mul(a: tuple, b: tuple) -> tuple:
        am = np.array(a, dtype=np.int64).reshape(size, size)
        bm = np.array(b, dtype=np.int64).reshape(size, size)
        return tuple(((am @ bm) % p).ravel().tolist())
    return mul


def _psl_canonical(p: int):
    def canon(m: tuple) -> tuple:
        neg = tuple((p - v) % p for v in m)
        return min(m, neg)
    return canon


def _sl2(p: int, projective: bool) -> FiniteGroup:
    if p not in ((3, 5, 7) if not projective else (5, 7, 11)):
        kind = "psl2" if projective else "sl2"
        raise UnsupportedParameter(f"{kind} supports p in "
                                   f"{'5, 7, 11' if projective else '3, 5, 7'}, got {p}")
    raw_mul = _matmul_mod(p, 2)
    t = (1, 1, 0, 1)
    s = (0, p - 1, 1, 0)
    if projective:
        canon = _psl_canonical(p)

        def mul(a, b):
            return canon(raw_mul(a, b))

        gens = [canon(t), canon(s)]
        identity = canon((1, 0, 0, 1))
        name = f"psl2({p})"
        expected = p * (p - 1) * (p + 1) // 2
    else:
        mul = raw_mul
        gens = [t, s]
        identity = (1, 0, 0, 1)
        name = f"sl2({p})"
        expected = p * (p - 1) * (p + 1)
    elements = _bfs_closure(gens, identity, mul, CLOSURE_CAP)
    if len(elements) != expected:
        raise NotAGroup(f"{name} closure has {len(elements)} elements, expected {expected}")
    return _table_from_elements(elements, mul, name)


def _heisenberg(p: int) -> FiniteGroup:
    if p not in (3, 5):
        raise UnsupportedParameter(f"heisenberg supports p in 3, 5, got {p}")
    mul = _matmul_mod(p, 3)
    eye = (1, 0, 0, 0, 1, 0, 0, 0, 1)
    x = (1, 1, 0, 0, 1, 0, 0, 0, 1)
    y = (1, 0, 0, 0, 1, 1, 0, 0, 1)
    elements = _bfs_closure([x, y], eye, mul, CLOSURE_CAP)
    if len(elements) != p ** 3:
        raise NotAGroup(f"heisenberg({p}) closure has {len(elements)} elements")
    return _table_from_elements(elements, mul, f"heisenberg({p})")


def _quaternion8() -> FiniteGroup:
    def mul(a: tuple, b: tuple) -> tuple:
        a0, a1, a2, a3 = a
        b0, b1, b2, b3 = b
        return (
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        )
    one = (1, 0, 0, 0)
    i = (0, 1, 0, 0)
    j = (0, 0, 1, 0)
    elements = _bfs_closure([i, j], one, mul, 16)
    if len(elements) != 8:
        raise NotAGroup(f"quaternion closure has {len(elements)} elements")
    return _table_from_elements(elements, mul, "quaternion8")


def _cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise UnsupportedParameter(f"cyclic needs n >= 1, got {n}")
    if n > CLOSURE_CAP:
        raise UnsupportedParameter(f"cyclic({n}) exceeds the order cap {CLOSURE_CAP}")
    table = np.add.outer(np.arange(n), np.arange(n)) % n
    return from_table(table, name=f"cyclic({n})")


def _dihedral(n: int) -> FiniteGroup:
    if n < 1:
        raise UnsupportedParameter(f"dihedral needs n >= 1, got {n}")
    if 2 * n > CLOSURE_CAP:
        raise UnsupportedParameter(f"dihedral({n}) exceeds the order cap {CLOSURE_CAP}")
    if n == 1:
        g = _cyclic(2)
        return FiniteGroup(f"dihedral({n})", g.table.copy(), g.identity,
                           g.inverses.copy(), g.classes)
    if n == 2:
        g = product(_cyclic(2), _cyclic(2))
        return FiniteGroup(f"dihedral({n})", g.table.copy(), g.identity,
                           g.inverses.copy(), g.classes)
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((n - i) % n for i in range(n))
    group = from_permutation_generators(n, [rot, ref], name=f"dihedral({n})")
    if group.order != 2 * n:
        raise NotAGroup(f"dihedral({n}) closure has {group.order} elements")
    return group


def _symmetric(n: int) -> FiniteGroup:
    if not 1 <= n <= 6:
        raise UnsupportedParameter(f"symmetric supports 1 <= n <= 6, got {n}")
    if n == 1:
        return from_table([[0]], name="symmetric(1)")
    swap = (1, 0) + tuple(range(2, n))
    cycle = tuple(range(1, n)) + (0,)
    return from_permutation_generators(n, [swap, cycle], name=f"symmetric({n})")


def _alternating(n: int) -> FiniteGroup:
    if not 1 <= n <= 6:
        raise UnsupportedParameter(f"alternating supports 1 <= n <= 6, got {n}")
    if n <= 2:
        return from_table([[0]], name=f"alternating({n})")
    three = (1, 2, 0) + tuple(range(3, n))
    if n == 3:
        gens = [three]
    elif n % 2 == 1:
        gens = [three, tuple(range(1, n)) + (0,)]
    else:
        # even n: an n-cycle is odd, use the (n-1)-cycle fixing point 0
        gens = [three, (0,) + tuple(range(2, n)) + (1,)]
    group = from_permutation_generators(n, gens, name=f"alternating({n})")
    if group.order != math.factorial(n) // 2:
        raise NotAGroup(f"alternating({n}) closure has {group.order} elements")
    return group


def product(g1: FiniteGroup, g2: FiniteGroup) -> FiniteGroup:
    """Direct product with index (a1, a2) -> a1 * |G2| + a2."""
    n1, n2 = g1.order, g2.order
    if n1 * n2 > CLOSURE_CAP:
        raise UnsupportedParameter(
            f"product order {n1 * n2} exceeds the cap {CLOSURE_CAP}")
    t1, t2 = g1.table, g2.table
    table = (t1[:, None, :, None] * n2 + t2[None, :, None, :]).reshape(n1 * n2, n1 * n2)
    return from_table(table, name=f"product({g1.name},{g2.name})")


_FAMILIES: dict[str, Callable] = {
    "cyclic": _cyclic,
    "dihedral": _dihedral,
    "symmetric": _symmetric,
    "alternating": _alternating,
    "quaternion8": _quaternion8,
    "heisenberg": _heisenberg,
    "sl2": lambda p: _sl2(p, projective=False),
    "psl2": lambda p: _sl2(p, projective=True),
    "product": product,
}


def named(family: str, *params) -> FiniteGroup:
    """Build a named family member: named("alternating", 5), named("quaternion8"), ...

    Supported families: cyclic(n), dihedral(n), symmetric(n<=6), alternating(n<=6),
    quaternion8, heisenberg(p in {3,5}), sl2(p in {3,5,7}), psl2(p in {5,7,11}),
    product(g1, g2).
    """
    try:
        builder = _FAMILIES[family]
    except KeyError:
        raise UnsupportedParameter(
            f"unknown family {family!r}; know {sorted(_FAMILIES)}") from None
    return builder(*params)


def group_hash(group: FiniteGroup) -> str:
    """SHA-256 hex digest of the multiplication table in canonical text form."""
    h = hashlib.sha256()
    h.update(b"quasirep-group\n")
    h.update(str(group.order).encode())
    h.update(b"\n")
    for row in group.table:
        h.update(" ".join(str(int(v)) for v in row).encode())
        h.update(b"\n")
    return h.hexdigest()


def save_group(group: FiniteGroup, path: str) -> None:
    """Write the line-oriented group format (atomic: write then rename)."""
    lines = [GROUP_MAGIC, f"name={group.name}", f"order={group.order}"]
    lines.extend(" ".join(str(int(v)) for v in row) for row in group.table)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def load_group(path: str) -> FiniteGroup:
    """Strict loader for the group format; any deviation raises FileFormatError."""
    with open(path) as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != GROUP_MAGIC:
        raise FileFormatError(f"expected header {GROUP_MAGIC!r}", line=1)
    if len(lines) < 3:
        raise FileFormatError("missing name/order lines", line=len(lines))
    if not lines[1].startswith("name="):
        raise FileFormatError("expected name=<label>", line=2)
    name = lines[1][len("name="):]
    if not lines[2].startswith("order="):
        raise FileFormatError("expected order=<n>", line=3)
    try:
        order = int(lines[2][len("order="):])
    except ValueError:
        raise FileFormatError("order is not an integer", line=3) from None
    if order < 1:
        raise FileFormatError(f"order must be positive, got {order}", line=3)
    if len(lines) != 3 + order:
        raise FileFormatError(
            f"expected {order} table rows, file has {len(lines) - 3}", line=len(lines))
    table = np.empty((order, order), dtype=np.int64)
    for r in range(order):
        lineno = 4 + r
        parts = lines[3 + r].split()
        if len(parts) != order:
            raise FileFormatError(
                f"row has {len(parts)} entries, expected {order}", line=lineno)
        try:
            vals = [int(p) for p in parts]
        except ValueError:
            raise FileFormatError("non-integer table entry", line=lineno) from None
        for v in vals:
            if not 0 <= v < order:
                raise FileFormatError(f"entry {v} outside 0..{order - 1}", line=lineno)
        table[r] = vals
    try:
        return from_table(table, name=name)
    except NotAGroup as exc:
        raise FileFormatError(f"table is not a group: {exc}") from exc
