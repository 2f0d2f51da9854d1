"""Numerical unitary irreducible representations.

The decomposition works on the regular representation without materializing
it: conjugating a matrix M by the permutation matrix of left translation and
averaging over the group is an index gather, T[z, w] = E_x M[x^-1 z, x^-1 w].
Eigenspaces of the averaged matrix T are invariant subspaces; restricting the
regular representation to an eigenbasis gives a unitary subrepresentation
whose character decides irreducibility (E|chi|^2 = 1). Reducible pieces are
refined recursively with fresh probe matrices.

The resulting table is deduplicated by character, ordered canonically (trivial
first, then by dimension and character), and checked for completeness: the
squared dimensions must sum to |G| and the count must equal the number of
conjugacy classes.
"""

from __future__ import annotations

import os
from typing import Iterator

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    DecompositionFailed,
    FileFormatError,
    OrderCapExceeded,
    ToleranceViolation,
)
from .groups import FiniteGroup, group_hash
from .sampling import hermitian_gaussian

__all__ = [
    "UnitaryRep",
    "IrrepTable",
    "regular_representation",
    "decompose",
    "frobenius_schur",
    "tensor_square_stats",
    "save_irreps",
    "load_irreps",
    "ORDER_CAP",
]

ORDER_CAP = 700
IRREPS_MAGIC = "quasirep-irreps v1"

_RETRY_BUDGET = 8


class UnitaryRep:
    """A unitary representation given by one matrix per group element.

    Attributes:
        group: the underlying FiniteGroup.
        dim: matrix dimension.
        matrices: (|G|, dim, dim) complex array.
        character: per-conjugacy-class character values.
        is_irreducible: whether E|chi|^2 = 1 held at construction.
    """

    def __init__(self, group: FiniteGroup, matrices: np.ndarray,
                 character: np.ndarray | None = None,
                 is_irreducible: bool | None = None,
                 tolerances: Tolerances = DEFAULT_TOLERANCES):
        matrices = np.ascontiguousarray(matrices, dtype=np.complex128)
        if matrices.shape != (group.order, matrices.shape[1], matrices.shape[1]):
            raise ValueError(f"matrices must be (|G|, d, d), got {matrices.shape}")
        self.group = group
        self.dim = matrices.shape[1]
        self.matrices = matrices
        if character is None:
            traces = np.trace(matrices, axis1=1, axis2=2)
            character = _class_average(group, traces, tolerances)
        self.character = np.asarray(character, dtype=np.complex128)
        if is_irreducible is None:
            chi = self.character_on_elements()
            is_irreducible = abs(np.mean(np.abs(chi) ** 2) - 1.0) <= tolerances.irreducibility
        self.is_irreducible = bool(is_irreducible)
        self.matrices.setflags(write=False)
        self.character.setflags(write=False)

    def character_on_elements(self) -> np.ndarray:
        """Character as a length-|G| vector, constant on classes."""
        return self.character[self.group.class_of]

    def is_trivial(self) -> bool:
        return self.dim == 1 and np.max(np.abs(self.character - 1.0)) < 1e-6

    def validate(self, tolerances: Tolerances = DEFAULT_TOLERANCES,
                 seed: int = 0) -> None:
        """Check unitarity everywhere and the product law on pairs.

        The product law is exhaustive for |G| <= 128 and spot-checked on 10^3
        seeded random pairs beyond that. Raises ToleranceViolation.
        """
        g, m = self.group, self.matrices
        eye = np.eye(self.dim)
        uerr = np.linalg.norm(
            np.einsum("xba,xbc->xac", m.conj(), m) - eye, axis=(1, 2))
        if uerr.max() > tolerances.unitarity:
            raise ToleranceViolation(
                f"unitarity residual {uerr.max():.3e} above {tolerances.unitarity:.0e}")
        if np.linalg.norm(m[g.identity] - eye) > tolerances.entry:
            raise ToleranceViolation("identity element is not the identity matrix")
        n = g.order
        if n <= 128:
            xs, ys = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
            xs, ys = xs.ravel(), ys.ravel()
        else:
            rng = np.random.default_rng(seed)
            xs = rng.integers(0, n, 1000)
            ys = rng.integers(0, n, 1000)
        prod = np.einsum("pab,pbc->pac", m[xs], m[ys])
        err = np.linalg.norm(prod - m[g.table[xs, ys]], axis=(1, 2))
        if err.max() > tolerances.entry:
            i = int(err.argmax())
            raise ToleranceViolation(
                f"product law fails at pair ({int(xs[i])}, {int(ys[i])}): "
                f"residual {err.max():.3e}")

    def __repr__(self) -> str:
        flag = "irreducible" if self.is_irreducible else "reducible"
        return f"UnitaryRep(group={self.group.name!r}, dim={self.dim}, {flag})"


class IrrepTable:
    """Complete list of irreducibles for one group, canonically ordered."""

    def __init__(self, group: FiniteGroup, irreps: tuple[UnitaryRep, ...]):
        self.group = group
        self.irreps = tuple(irreps)
        nontrivial = [r.dim for r in self.irreps if not r.is_trivial()]
        # the one-irrep (trivial) group gets d_min = 1 by convention
        self.d_min = min(nontrivial) if nontrivial else 1
        self.character_table = np.array([r.character for r in self.irreps])
        self.character_table.setflags(write=False)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(r.dim for r in self.irreps)

    def __iter__(self) -> Iterator[UnitaryRep]:
        return iter(self.irreps)

    def __len__(self) -> int:
        return len(self.irreps)

    def __repr__(self) -> str:
        return f"IrrepTable(group={self.group.name!r}, dims={list(self.dims)})"


def _class_average(group: FiniteGroup, values: np.ndarray,
                   tolerances: Tolerances) -> np.ndarray:
    """Average a per-element class function over classes, checking the spread."""
    out = np.empty(len(group.classes), dtype=np.complex128)
    for ci, cls in enumerate(group.classes):
        vals = values[list(cls)]
        out[ci] = vals.mean()
        if np.max(np.abs(vals - out[ci])) > tolerances.character_match:
            raise ToleranceViolation(
                f"character varies within class {ci} by "
                f"{np.max(np.abs(vals - out[ci])):.3e}")
    return out


def regular_representation(group: FiniteGroup) -> UnitaryRep:
    """Dense left regular representation, R(x) e_y = e_{x y}.

    Memory is |G|^3 complex entries, so this is meant for small groups; the
    decomposition below never calls it.
    """
    n = group.order
    if n > ORDER_CAP:
        raise OrderCapExceeded(f"order {n} above dense cap {ORDER_CAP}")
    mats = np.zeros((n, n, n), dtype=np.complex128)
    xs = np.repeat(np.arange(n), n)
    ys = np.tile(np.arange(n), n)
    mats[xs, group.table[xs, ys], ys] = 1.0
    return UnitaryRep(group, mats, is_irreducible=(n == 1))


class _SplitFailed(Exception):
    """Internal: a subspace refused to refine within the depth budget."""


def _cluster_slices(eigenvalues: np.ndarray, width: float) -> list[slice]:
    """Chain consecutive eigenvalues closer than width into clusters."""
    breaks = np.nonzero(np.diff(eigenvalues) > width)[0]
    edges = [0] + [int(b) + 1 for b in breaks] + [len(eigenvalues)]
    return [slice(a, b) for a, b in zip(edges[:-1], edges[1:])]


def _subspace_character(basis: np.ndarray, left: np.ndarray) -> np.ndarray:
    """chi(x) = tr(B' R(x) B) via row gathers, for every x."""
    n = left.shape[0]
    chi = np.empty(n, dtype=np.complex128)
    bc = basis.conj()
    for x in range(n):
        chi[x] = np.sum(bc * basis[left[x]])
    return chi


def _refine(left: np.ndarray, basis: np.ndarray, rng: np.random.Generator,
            tolerances: Tolerances, depth: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split the invariant subspace spanned by basis into irreducible pieces.

    Returns (basis, per-element character) pairs. Raises _SplitFailed when the
    depth budget runs out before everything is irreducible.
    """
    chi = _subspace_character(basis, left)
    if abs(np.mean(np.abs(chi) ** 2) - 1.0) <= tolerances.irreducibility:
        return [(basis, chi)]
    if depth >= _RETRY_BUDGET:
        raise _SplitFailed(f"subspace of dim {basis.shape[1]} would not split")
    n = left.shape[0]
    d = basis.shape[1]
    sub = np.stack([basis.conj().T @ basis[left[x]] for x in range(n)])
    probe = hermitian_gaussian(rng, d)
    avg = np.einsum("xab,bc,xdc->ad", sub, probe, sub.conj()) / n
    avg = (avg + avg.conj().T) / 2.0
    w, v = np.linalg.eigh(avg)
    slices = _cluster_slices(w, tolerances.eigengap * max(np.abs(w).max(), 1e-300))
    pieces: list[tuple[np.ndarray, np.ndarray]] = []
    for sl in slices:
        pieces.extend(_refine(left, basis @ v[:, sl], rng, tolerances, depth + 1))
    return pieces


def _commutant_average(probe: np.ndarray, left: np.ndarray) -> np.ndarray:
    n = len(probe)
    total = np.zeros_like(probe)
    for x in range(n):
        s = left[x]
        total += probe[np.ix_(s, s)]
    total /= n
    return (total + total.conj().T) / 2.0


def _extract_matrices(basis: np.ndarray, left: np.ndarray) -> np.ndarray:
    n = left.shape[0]
    d = basis.shape[1]
    out = np.empty((n, d, d), dtype=np.complex128)
    bh = basis.conj().T
    for x in range(n):
        out[x] = bh @ basis[left[x]]
    return out


def _character_key(character: np.ndarray) -> tuple:
    return tuple((round(float(c.real), 6), round(float(c.imag), 6))
                 for c in character)


def decompose(group: FiniteGroup, seed: int = 0,
              tolerances: Tolerances = DEFAULT_TOLERANCES) -> IrrepTable:
    """Compute the full unitary irrep table of a group of order <= 700.

    Deterministic given (group, seed). The result is seed independent up to
    irrep isomorphism: dimensions and the character table do not depend on the
    seed, individual matrices may differ by a basis change.
    """
    n = group.order
    if n > ORDER_CAP:
        raise OrderCapExceeded(f"order {n} above decomposition cap {ORDER_CAP}")
    left = group.table[group.inverses]          # left[x][z] = x^-1 * z
    last: Exception | None = None
    for attempt in range(_RETRY_BUDGET):
        rng = np.random.default_rng([seed, attempt])
        try:
            return _decompose_once(group, left, rng, tolerances)
        except _SplitFailed as exc:
            last = exc
    raise DecompositionFailed(
        f"no complete decomposition of {group.name} after {_RETRY_BUDGET} "
        f"reseeded attempts: {last}")


def _decompose_once(group: FiniteGroup, left: np.ndarray,
                    rng: np.random.Generator,
                    tolerances: Tolerances) -> IrrepTable:
    n = group.order
    probe = hermitian_gaussian(rng, n)
    avg = _commutant_average(probe, left)
    w, v = np.linalg.eigh(avg)
    slices = _cluster_slices(w, tolerances.eigengap * max(np.abs(w).max(), 1e-300))
    pieces: list[tuple[np.ndarray, np.ndarray]] = []
    for sl in slices:
        pieces.extend(_refine(left, v[:, sl], rng, tolerances, depth=0))

    # dedup isomorphic copies by class character
    kept: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []  # (basis, chi_el, chi_cls)
    for basis, chi in pieces:
        chi_cls = _class_average(group, chi, tolerances)
        if any(np.max(np.abs(chi_cls - k[2])) <= tolerances.character_match
               for k in kept):
            continue
        kept.append((basis, chi, chi_cls))

    dims = [b.shape[1] for b, _, _ in kept]
    if sum(d * d for d in dims) != n:
        raise ToleranceViolation(
            f"irrep dimensions {sorted(dims)} do not satisfy sum d^2 = {n}")
    if len(kept) != len(group.classes):
        raise ToleranceViolation(
            f"found {len(kept)} irreps but {len(group.classes)} classes")

    reps = []
    for basis, _, chi_cls in kept:
        mats = _extract_matrices(basis, left)
        reps.append(UnitaryRep(group, mats, character=chi_cls,
                               is_irreducible=True, tolerances=tolerances))

    trivial = [r for r in reps if r.is_trivial()]
    if len(trivial) != 1:
        raise ToleranceViolation(f"expected exactly one trivial irrep, got {len(trivial)}")
    rest = sorted((r for r in reps if not r.is_trivial()),
                  key=lambda r: (r.dim, _character_key(r.character)))
    ordered = tuple(trivial + rest)
    for rep in ordered:
        rep.validate(tolerances=tolerances, seed=0)
    return IrrepTable(group, ordered)


def frobenius_schur(rho: UnitaryRep,
                    tolerances: Tolerances = DEFAULT_TOLERANCES) -> int:
    """E_x chi(x^2), snapped to {-1, 0, +1}.

    Raises ToleranceViolation when the average is not within 1e-6 of an
    admissible indicator value, and ValueError for reducible input.
    """
    if not rho.is_irreducible:
        raise ValueError("Frobenius-Schur indicator needs an irreducible rep")
    chi = rho.character_on_elements()
    raw = np.mean(chi[rho.group.squares()])
    snapped = int(round(raw.real))
    if snapped not in (-1, 0, 1) or abs(raw - snapped) > 1e-6:
        raise ToleranceViolation(f"indicator average {raw} is not near -1, 0, or +1")
    return snapped


def tensor_square_stats(rho: UnitaryRep) -> tuple[float, float]:
    """(E|chi(x)|^4, E|chi(x^2)|^2) for an irreducible rep.

    The second moment never exceeds the first; that inequality is asserted
    here with a 1e-9 slack.
    """
    if not rho.is_irreducible:
        raise ValueError("tensor square stats need an irreducible rep")
    chi = rho.character_on_elements()
    fourth = float(np.mean(np.abs(chi) ** 4))
    square = float(np.mean(np.abs(chi[rho.group.squares()]) ** 2))
    if square > fourth + 1e-9:
        raise ToleranceViolation(
            f"E|chi(x^2)|^2 = {square} exceeds E|chi|^4 = {fourth}")
    return fourth, square


def save_irreps(table: IrrepTable, path: str) -> None:
    """Write the irrep cache format; complex entries at 17 significant digits.

    The %.17g rendering is lossless for doubles, so load(save(t)) is
    bit-exact. Writes are atomic (temp file then rename).
    """
    lines = [IRREPS_MAGIC, group_hash(table.group), str(len(table.irreps))]
    for rep in table.irreps:
        lines.append(f"dim={rep.dim}")
        for x in range(table.group.order):
            for row in rep.matrices[x]:
                lines.append(" ".join(f"{v.real:.17g} {v.imag:.17g}" for v in row))
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def load_irreps(group: FiniteGroup, path: str,
                tolerances: Tolerances = DEFAULT_TOLERANCES) -> IrrepTable:
    """Strict loader for the irrep cache; validates the group hash and shape."""
    with open(path) as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != IRREPS_MAGIC:
        raise FileFormatError(f"expected header {IRREPS_MAGIC!r}", line=1)
    if len(lines) < 3:
        raise FileFormatError("truncated irreps file", line=len(lines))
    expect_hash = group_hash(group)
    if lines[1] != expect_hash:
        raise FileFormatError(
            f"group hash {lines[1][:12]}... does not match {expect_hash[:12]}...", line=2)
    try:
        count = int(lines[2])
    except ValueError:
        raise FileFormatError("irrep count is not an integer", line=3) from None
    n = group.order
    pos = 3
    reps = []
    for k in range(count):
        if pos >= len(lines) or not lines[pos].startswith("dim="):
            raise FileFormatError(f"expected dim=<d> for irrep {k}", line=pos + 1)
        try:
            dim = int(lines[pos][len("dim="):])
        except ValueError:
            raise FileFormatError("dim is not an integer", line=pos + 1) from None
        if dim < 1:
            raise FileFormatError(f"dim must be positive, got {dim}", line=pos + 1)
        pos += 1
        need = n * dim
        if pos + need > len(lines):
            raise FileFormatError(
                f"irrep {k} needs {need} matrix rows, file ends early", line=len(lines))
        mats = np.empty((n, dim, dim), dtype=np.complex128)
        for x in range(n):
            for r in range(dim):
                parts = lines[pos].split()
                if len(parts) != 2 * dim:
                    raise FileFormatError(
                        f"row has {len(parts)} numbers, expected {2 * dim}", line=pos + 1)
                try:
                    vals = [float(p) for p in parts]
                except ValueError:
                    raise FileFormatError("non-numeric matrix entry", line=pos + 1) from None
                mats[x, r] = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
                pos += 1
        reps.append(UnitaryRep(group, mats, tolerances=tolerances))
    if pos != len(lines):
        raise FileFormatError(f"{len(lines) - pos} trailing lines", line=pos + 1)
    if sum(r.dim ** 2 for r in reps) != n:
        raise FileFormatError("cached irreps do not span the group algebra")
    table = IrrepTable(group, tuple(reps))
    for rep in table.irreps:
        rep.validate(tolerances=tolerances, seed=0)
    return table
