"""Maps between groups and how far they are from homomorphisms.

A map f: G -> H is stored by image index. Its pushforward distribution p_f
over H gives the nonuniformity parameter eps = |H| ||p_f - uniform||^2, which
satisfies the collision identity ||p_f||^2 = (1 + eps) / |H| exactly. Reports
compare the exact agreement probability Pr[f(xy) = f(x) f(y)] against two
ceilings: a best-single-irrep bound through d_min of the source, and a
spectral-mass bound (1 + eps)/|H| + R_H. Lifting f through an irrep sigma of
H produces the matrix function sigma(f(x)) on G, which ties map agreement to
the defect machinery.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import FileFormatError, MissingIrrepTable, NotAHomomorphism
from .groups import FiniteGroup, group_hash
from .irreps import IrrepTable, UnitaryRep
from .approx import MatrixFunction
from .sampling import rng_from

__all__ = [
    "GroupMap",
    "HomReport",
    "make_group_map",
    "agreement_probability",
    "evaluate",
    "r_h",
    "lift_through_irrep",
    "random_map",
    "balanced_random_map",
    "genuine_hom",
    "perturbed_hom",
    "save_map",
    "load_map",
]

MAP_MAGIC = "quasirep-map v1"


@dataclass(eq=False)
class GroupMap:
    """A function between groups with its pushforward statistics precomputed."""

    source: FiniteGroup
    target: FiniteGroup
    values: np.ndarray
    p_f: np.ndarray
    epsilon: float


@dataclass
class HomReport:
    """Agreement statistics of a map and the ceilings they must respect."""

    agreement_prob: float
    collision_prob: float
    epsilon: float
    thm2_bound: float
    thm2_sigma_index: int
    thm2_sigma_dim: int
    thm3_bound: float
    r_h: float


def make_group_map(source: FiniteGroup, target: FiniteGroup, values) -> GroupMap:
    """Wrap an image array as a GroupMap, computing p_f and epsilon."""
    vals = np.asarray(values, dtype=np.int64)
    if vals.shape != (source.order,):
        raise ValueError(f"values must have shape ({source.order},), got {vals.shape}")
    if len(vals) and (vals.min() < 0 or vals.max() >= target.order):
        raise ValueError("map values outside the target index range")
    counts = np.bincount(vals, minlength=target.order)
    p_f = counts / source.order
    uniform = 1.0 / target.order
    epsilon = float(target.order * np.sum((p_f - uniform) ** 2))
    return GroupMap(source, target, vals.copy(), p_f, epsilon)


def agreement_probability(f: GroupMap) -> float:
    """Exact Pr_{x,y}[f(x y) = f(x) f(y)] over all |G|^2 pairs."""
    fv = f.values
    lhs = fv[f.source.table]
    rhs = f.target.table[fv[:, None], fv[None, :]]
    return float(np.mean(lhs == rhs))


def r_h(target_table: IrrepTable, d_min: int) -> float:
    """Spectral mass term: sum over all sigma of (d^2/|H|) min(sqrt(d/d_min), 1)."""
    if d_min < 1:
        raise ValueError(f"d_min must be >= 1, got {d_min}")
    h = target_table.group.order
    return float(sum(
        (sigma.dim ** 2 / h) * min(np.sqrt(sigma.dim / d_min), 1.0)
        for sigma in target_table.irreps
    ))


def evaluate(f: GroupMap, source_table: IrrepTable | None,
             target_table: IrrepTable | None) -> HomReport:
    """Full report: exact agreement, collision probability, both ceilings."""
    if source_table is None or target_table is None:
        raise MissingIrrepTable("evaluate needs irrep tables for both groups")
    if source_table.group is not f.source or target_table.group is not f.target:
        raise ValueError("irrep tables do not match the map's groups")
    agreement = agreement_probability(f)
    collision = float(np.sum(f.p_f ** 2))
    d_min = source_table.d_min
    best = None
    for idx, sigma in enumerate(target_table.irreps):
        if sigma.is_trivial():
            continue
        term = 0.5 * (1.0 + np.sqrt(f.epsilon / sigma.dim)
                      + np.sqrt(sigma.dim / d_min))
        key = (term, sigma.dim, idx)
        if best is None or key < best:
            best = key
    if best is None:
        # target is the trivial group; every map is a homomorphism
        thm2, sigma_index, sigma_dim = 1.0, -1, 0
    else:
        thm2 = min(1.0, best[0])
        sigma_index, sigma_dim = best[2], best[1]
    mass = r_h(target_table, d_min)
    thm3 = min(1.0, (1.0 + f.epsilon) / f.target.order + mass)
    return HomReport(
        agreement_prob=agreement,
        collision_prob=collision,
        epsilon=f.epsilon,
        thm2_bound=float(thm2),
        thm2_sigma_index=sigma_index,
        thm2_sigma_dim=sigma_dim,
        thm3_bound=float(thm3),
        r_h=mass,
    )


def lift_through_irrep(f: GroupMap, sigma: UnitaryRep) -> MatrixFunction:
    """psi(x) = sigma(f(x)) as a MatrixFunction on the source group."""
    if sigma.group is not f.target:
        raise ValueError("sigma must be an irrep of the map's target group")
    return MatrixFunction(f.source, sigma.dim, sigma.matrices[f.values].copy())


def random_map(source: FiniteGroup, target: FiniteGroup, seed) -> GroupMap:
    """Uniform independent image for every source element."""
    rng = rng_from(seed)
    return make_group_map(source, target,
                          rng.integers(0, target.order, source.order))


def balanced_random_map(source: FiniteGroup, target: FiniteGroup, seed) -> GroupMap:
    """Random map with exactly equal fibers; needs |H| dividing |G|."""
    n, h = source.order, target.order
    if n % h:
        raise ValueError(f"balanced map needs |H| | |G|, got {h} and {n}")
    rng = rng_from(seed)
    values = np.repeat(np.arange(h), n // h)
    return make_group_map(source, target, values[rng.permutation(n)])


def genuine_hom(source: FiniteGroup, target: FiniteGroup,
                images: dict[int, int]) -> GroupMap:
    """Extend generator images to a homomorphism and validate it exhaustively.

    images maps source generator index -> target element index. Raises
    NotAHomomorphism when the generators do not generate the source group or
    when the extension fails the product law (witness pair in the message).
    """
    n = source.order
    values = np.full(n, -1, dtype=np.int64)
    values[source.identity] = target.identity
    frontier = [source.identity]
    while frontier:
        nxt = []
        for g in frontier:
            for s, fs in images.items():
                x = source.mul(g, int(s))
                if values[x] < 0:
                    values[x] = target.mul(int(values[g]), int(fs))
                    nxt.append(x)
        frontier = nxt
    if (values < 0).any():
        missing = int(np.nonzero(values < 0)[0][0])
        raise NotAHomomorphism(
            f"generators {sorted(images)} do not generate the source group "
            f"(element {missing} unreached)")
    lhs = values[source.table]
    rhs = target.table[values[:, None], values[None, :]]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        x, y = int(bad[0][0]), int(bad[0][1])
        raise NotAHomomorphism(
            f"images are inconsistent: f({x}*{y}) = {int(lhs[x, y])} but "
            f"f({x})f({y}) = {int(rhs[x, y])}")
    return make_group_map(source, target, values)


def perturbed_hom(source: FiniteGroup, target: FiniteGroup, images: dict[int, int],
                  flip_fraction: float, seed) -> GroupMap:
    """A genuine homomorphism with a seeded fraction of values rerolled.

    Each flipped element gets a uniformly random wrong value, so the flips are
    guaranteed to change the map.
    """
    if not 0.0 <= flip_fraction <= 1.0:
        raise ValueError(f"flip_fraction must be in [0, 1], got {flip_fraction}")
    base = genuine_hom(source, target, images)
    rng = rng_from(seed)
    values = base.values.copy()
    count = int(round(flip_fraction * source.order))
    for idx in rng.choice(source.order, size=count, replace=False):
        shift = rng.integers(1, target.order)
        values[idx] = (values[idx] + shift) % target.order
    return make_group_map(source, target, values)


def save_map(f: GroupMap, path: str) -> None:
    """Write the map format: header, both group hashes, one image per line."""
    lines = [MAP_MAGIC,
             f"source_hash={group_hash(f.source)}",
             f"target_hash={group_hash(f.target)}"]
    lines.extend(str(int(v)) for v in f.values)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def load_map(path: str, source: FiniteGroup, target: FiniteGroup) -> GroupMap:
    """Strict loader; the recorded hashes must match the supplied groups."""
    with open(path) as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != MAP_MAGIC:
        raise FileFormatError(f"expected header {MAP_MAGIC!r}", line=1)
    if len(lines) < 3:
        raise FileFormatError("missing hash lines", line=len(lines))
    if not lines[1].startswith("source_hash="):
        raise FileFormatError("expected source_hash=<hex>", line=2)
    if lines[1][len("source_hash="):] != group_hash(source):
        raise FileFormatError("source hash does not match the supplied group", line=2)
    if not lines[2].startswith("target_hash="):
        raise FileFormatError("expected target_hash=<hex>", line=3)
    if lines[2][len("target_hash="):] != group_hash(target):
        raise FileFormatError("target hash does not match the supplied group", line=3)
    if len(lines) != 3 + source.order:
        raise FileFormatError(
            f"expected {source.order} value lines, got {len(lines) - 3}",
            line=len(lines))
    values = np.empty(source.order, dtype=np.int64)
    for i in range(source.order):
        lineno = 4 + i
        try:
            v = int(lines[3 + i])
        except ValueError:
            raise FileFormatError("non-integer map value", line=lineno) from None
        if not 0 <= v < target.order:
            raise FileFormatError(
                f"value {v} outside 0..{target.order - 1}", line=lineno)
        values[i] = v
    return make_group_map(source, target, values)
