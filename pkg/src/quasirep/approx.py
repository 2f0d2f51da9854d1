"""Matrix-valued functions on a group and how far they are from representations.

The central quantity is the defect E_{x,y} ||psi(xy) - psi(x) psi(y)||_F^2,
evaluated two independent ways: an exact double loop over pairs, and a
spectral route through the blockwise transform (the triple product average
E tr psi(xy)' psi(x) psi(y) equals sum_rho d_rho tr(W W' W)). Reports carry
the defect, the exact-agreement fraction, the operator norm of the mean, and
the reference lower bound on the defect / upper bound on agreement expressed
through that norm and the smallest nontrivial irrep dimension d_min.

Constructions: compressions of an irrep to a subspace (exact defect
2 d_psi (1 - sqrt(d_psi / d_rho))), their elementwise unitary polar parts,
balanced sign functions, independent Haar baselines, and Haar perturbations
of a genuine irrep.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    DimensionError,
    MissingIrrepTable,
    OddOrder,
    RankDeficient,
    ToleranceViolation,
)
from .fourier import transform_matrix
from .groups import FiniteGroup
from .irreps import IrrepTable, UnitaryRep
from .sampling import haar_basis, haar_unitary, rng_from

__all__ = [
    "MatrixFunction",
    "MinorFunction",
    "PolarFunction",
    "DefectReport",
    "defect_direct",
    "defect_via_fourier",
    "opnorm_fourier_block",
    "minor_construction",
    "polar_unitary",
    "polar_construction",
    "polar_residual",
    "random_sign_function",
    "haar_baseline",
    "perturbed_irrep",
    "random_admissible",
    "as_matrix_function",
    "thm4_defect",
    "thm5_normalized_bound",
    "thm5_bound",
    "beating_random_threshold",
]


@dataclass(eq=False)
class MatrixFunction:
    """A d x d complex matrix for every group element."""

    group: FiniteGroup
    dim: int
    matrices: np.ndarray
    support_projector: np.ndarray | None = None

    def __post_init__(self):
        self.matrices = np.ascontiguousarray(self.matrices, dtype=np.complex128)
        if self.matrices.shape != (self.group.order, self.dim, self.dim):
            raise ValueError(
                f"matrices must be ({self.group.order}, {self.dim}, {self.dim}), "
                f"got {self.matrices.shape}")

    def mean(self) -> np.ndarray:
        return self.matrices.mean(axis=0)

    def mean_gram(self) -> np.ndarray:
        """E_x psi(x)' psi(x)."""
        return np.einsum("xba,xbc->ac", self.matrices.conj(), self.matrices) / self.group.order

    def admissibility_residual(self) -> float:
        """Frobenius distance of E psi' psi from the identity."""
        return float(np.linalg.norm(self.mean_gram() - np.eye(self.dim)))

    def is_admissible(self, tolerances: Tolerances = DEFAULT_TOLERANCES) -> bool:
        return self.admissibility_residual() <= tolerances.admissibility


@dataclass(eq=False)
class MinorFunction(MatrixFunction):
    """Compression of an irrep: psi(x) = sqrt(d_rho/d_psi) B' rho(x) B."""

    parent: UnitaryRep | None = field(default=None)
    basis: np.ndarray | None = field(default=None)

    @property
    def parent_dim(self) -> int:
        return self.parent.dim


@dataclass(eq=False)
class PolarFunction(MatrixFunction):
    """Elementwise unitary polar part of a minor; keeps the minor for diagnostics."""

    parent_minor: MinorFunction | None = field(default=None)

    @property
    def parent_dim(self) -> int:
        return self.parent_minor.parent.dim


@dataclass
class DefectReport:
    """Measured defect statistics and the reference bounds they must respect."""

    defect: float
    normalized_defect: float
    triple_trace: complex
    agreement_prob: float
    mean_opnorm: float
    thm1_bound: float
    cor1_bound: float
    admissibility_residual: float


def _require_table(psi: MatrixFunction, table: IrrepTable | None) -> IrrepTable:
    if table is None:
        raise MissingIrrepTable("defect bounds need an irrep table for d_min")
    if table.group is not psi.group:
        raise ValueError("irrep table belongs to a different group")
    return table


def _pair_scan(psi: MatrixFunction, agree_tol: float) -> tuple[float, float, complex]:
    """One pass over all |G|^2 pairs.

    Returns (mean squared Frobenius defect, exact-agreement fraction,
    mean triple product trace E tr psi(xy)' psi(x) psi(y)).
    """
    mats = psi.matrices
    table = psi.group.table
    n, d = psi.group.order, psi.dim
    # chunk so the two (c, n, d, d) temporaries stay around 64 MB
    chunk = max(1, (1 << 21) // max(1, n * d * d))
    total = 0.0
    agree = 0
    triple = 0.0 + 0.0j
    tol2 = agree_tol * agree_tol
    for x0 in range(0, n, chunk):
        hi = min(n, x0 + chunk)
        prod = np.einsum("xab,ybc->xyac", mats[x0:hi], mats)
        at_xy = mats[table[x0:hi]]
        diff = at_xy - prod
        sq = np.einsum("xyab,xyab->xy", diff, diff.conj()).real
        total += float(sq.sum())
        agree += int((sq <= tol2).sum())
        triple += complex(np.einsum("xyab,xyab->", at_xy.conj(), prod))
    n2 = n * n
    return total / n2, agree / n2, triple / n2


def _bounds(psi: MatrixFunction, table: IrrepTable) -> tuple[float, float, float]:
    m = float(np.linalg.norm(psi.mean(), 2))
    root = float(np.sqrt(psi.dim / table.d_min))
    thm1 = max(0.0, 2.0 * psi.dim * (1.0 - m ** 3 - root))
    cor1 = min(1.0, 0.5 * (1.0 + m ** 3 + root))
    return m, thm1, cor1


def _warn_inadmissible(psi: MatrixFunction, residual: float,
                       tolerances: Tolerances) -> None:
    if residual > tolerances.admissibility:
        warnings.warn(
            f"psi is not admissible (||E psi' psi - 1||_F = {residual:.3e}); "
            "bounds assume admissibility", RuntimeWarning, stacklevel=3)


def defect_direct(psi: MatrixFunction, table: IrrepTable | None,
                  tolerances: Tolerances = DEFAULT_TOLERANCES) -> DefectReport:
    """Exact defect by the double loop over all pairs, plus bounds."""
    table = _require_table(psi, table)
    residual = psi.admissibility_residual()
    _warn_inadmissible(psi, residual, tolerances)
    defect, agreement, triple = _pair_scan(psi, tolerances.entry)
    m, thm1, cor1 = _bounds(psi, table)
    return DefectReport(
        defect=defect,
        normalized_defect=defect / (2.0 * psi.dim),
        triple_trace=triple,
        agreement_prob=agreement,
        mean_opnorm=m,
        thm1_bound=thm1,
        cor1_bound=cor1,
        admissibility_residual=residual,
    )


def defect_via_fourier(psi: MatrixFunction, table: IrrepTable | None,
                       tolerances: Tolerances = DEFAULT_TOLERANCES) -> DefectReport:
    """Defect through the blockwise transform.

    The triple product average is sum_rho d_rho tr(W W' W); the defect then
    follows from E||psi(z)||^2 and E||psi(x)psi(y)||^2, which are spectral-free
    moments. Agrees with defect_direct on every input, admissible or not.
    """
    table = _require_table(psi, table)
    residual = psi.admissibility_residual()
    _warn_inadmissible(psi, residual, tolerances)
    spectrum = transform_matrix(psi, table)
    triple = sum(
        rho.dim * complex(np.trace(w @ w.conj().T @ w))
        for rho, w in zip(table.irreps, spectrum.blocks)
    )
    gram = psi.mean_gram()
    cogram = np.einsum("xab,xcb->ac", psi.matrices, psi.matrices.conj()) / psi.group.order
    defect = float(np.trace(gram).real + np.trace(gram @ cogram).real
                   - 2.0 * triple.real)
    _, agreement, _ = _pair_scan(psi, tolerances.entry)
    m, thm1, cor1 = _bounds(psi, table)
    return DefectReport(
        defect=defect,
        normalized_defect=defect / (2.0 * psi.dim),
        triple_trace=triple,
        agreement_prob=agreement,
        mean_opnorm=m,
        thm1_bound=thm1,
        cor1_bound=cor1,
        admissibility_residual=residual,
    )


def opnorm_fourier_block(psi: MatrixFunction, rho: UnitaryRep) -> float:
    """Operator norm of E_x psi(x) (x) rho(x); at most sqrt(d_psi / d_rho)."""
    if rho.group is not psi.group:
        raise ValueError("irrep belongs to a different group")
    n = psi.group.order
    w = np.einsum("xab,xcd->acbd", psi.matrices, rho.matrices) / n
    w = w.reshape(psi.dim * rho.dim, psi.dim * rho.dim)
    return float(np.linalg.norm(w, 2))


def minor_construction(rho: UnitaryRep, d_psi: int, subspace: str = "leading",
                       seed=None,
                       tolerances: Tolerances = DEFAULT_TOLERANCES) -> MinorFunction:
    """Compress an irrep to a d_psi-dimensional subspace, rescaled to admissibility.

    subspace: "leading" takes the first d_psi coordinates; "haar" draws a
    seeded Haar-random subspace (seed required). The result has E psi' psi = 1
    and, for a nontrivial parent, mean zero, both up to numerical error in the
    input irrep.
    """
    if not rho.is_irreducible:
        raise ValueError("minor construction needs an irreducible parent")
    if not 1 <= d_psi <= rho.dim:
        raise DimensionError(f"need 1 <= d_psi <= {rho.dim}, got {d_psi}")
    if subspace == "leading":
        basis = np.eye(rho.dim, d_psi, dtype=np.complex128)
    elif subspace == "haar":
        if seed is None:
            raise ValueError("subspace='haar' needs a seed")
        basis = haar_basis(rng_from(seed), rho.dim, d_psi)
    else:
        raise ValueError(f"unknown subspace {subspace!r}; use 'leading' or 'haar'")
    scale = np.sqrt(rho.dim / d_psi)
    mats = scale * np.einsum("ai,xab,bj->xij", basis.conj(), rho.matrices, basis)
    out = MinorFunction(rho.group, d_psi, mats,
                        support_projector=np.eye(d_psi, dtype=np.complex128),
                        parent=rho, basis=basis)
    # the mean must agree with the compressed parent mean, which is zero
    # exactly when the parent is nontrivial
    expected = scale * basis.conj().T @ rho.matrices.mean(axis=0) @ basis
    mean_err = float(np.linalg.norm(out.mean() - expected))
    residual = out.admissibility_residual()
    if mean_err > tolerances.admissibility or residual > tolerances.admissibility:
        raise ToleranceViolation(
            f"minor violates its guarantees: mean error {mean_err:.3e}, "
            f"admissibility residual {residual:.3e}")
    return out


def polar_unitary(matrix: np.ndarray,
                  tolerances: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Nearest unitary (polar factor) via SVD; rejects numerically singular input."""
    u, s, vh = np.linalg.svd(matrix)
    if s.min() < tolerances.min_singular:
        raise RankDeficient(
            f"smallest singular value {s.min():.3e} below {tolerances.min_singular:.0e}")
    return u @ vh


def polar_construction(rho: UnitaryRep, d_psi: int, seed,
                       tolerances: Tolerances = DEFAULT_TOLERANCES) -> PolarFunction:
    """Elementwise polar part of a Haar-subspace minor of rho.

    Retries with derived seeds (up to 8) when some element of the minor is
    numerically rank deficient, then gives up with RankDeficient.
    """
    last = None
    for attempt in range(8):
        minor = minor_construction(rho, d_psi, subspace="haar",
                                   seed=[seed, attempt] if np.isscalar(seed) else list(seed) + [attempt],
                                   tolerances=tolerances)
        u, s, vh = np.linalg.svd(minor.matrices)
        if s.min() >= tolerances.min_singular:
            mats = np.einsum("xab,xbc->xac", u, vh)
            return PolarFunction(rho.group, d_psi, mats, parent_minor=minor)
        last = float(s.min())
    raise RankDeficient(
        f"minor stayed rank deficient over 8 seeds (last min singular value {last:.3e})")


def polar_residual(psi: PolarFunction) -> float:
    """E_x ||minor(x) - polar(x)||_F^2, the per-element unitarization cost."""
    diff = psi.parent_minor.matrices - psi.matrices
    return float(np.mean(np.einsum("xab,xab->x", diff, diff.conj()).real))


def random_sign_function(group: FiniteGroup, seed) -> MatrixFunction:
    """Balanced +-1 labels as 1 x 1 matrices; needs even group order."""
    n = group.order
    if n % 2:
        raise OddOrder(f"balanced sign function needs even order, got {n}")
    rng = rng_from(seed)
    values = np.ones(n)
    values[rng.permutation(n)[: n // 2]] = -1.0
    return MatrixFunction(group, 1, values.reshape(n, 1, 1).astype(np.complex128))


def haar_baseline(group: FiniteGroup, dim: int, seed) -> MatrixFunction:
    """Independent Haar unitary at every element; the no-structure baseline."""
    rng = rng_from(seed)
    mats = np.stack([haar_unitary(rng, dim) for _ in range(group.order)])
    return MatrixFunction(group, dim, mats)


def perturbed_irrep(rho: UnitaryRep, fraction: float, seed) -> MatrixFunction:
    """Copy of an irrep with a seeded fraction of elements replaced by Haar noise."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must be in [0, 1], got {fraction}")
    rng = rng_from(seed)
    mats = rho.matrices.copy()
    count = int(round(fraction * rho.group.order))
    for idx in rng.choice(rho.group.order, size=count, replace=False):
        mats[idx] = haar_unitary(rng, rho.dim)
    return MatrixFunction(rho.group, rho.dim, mats)


def random_admissible(group: FiniteGroup, dim: int, seed,
                      pointwise_unitary: bool = False) -> MatrixFunction:
    """Random psi with E psi' psi = 1 exactly (up to one matrix inversion).

    pointwise_unitary=True draws independent Haar unitaries; otherwise draws
    Gaussian matrices and right-normalizes by (E A' A)^{-1/2}, which produces
    admissible but nowhere-unitary functions.
    """
    if pointwise_unitary:
        return haar_baseline(group, dim, seed)
    rng = rng_from(seed)
    n = group.order
    a = (rng.standard_normal((n, dim, dim))
         + 1j * rng.standard_normal((n, dim, dim))) / np.sqrt(2.0 * dim)
    gram = np.einsum("xba,xbc->ac", a.conj(), a) / n
    w, v = np.linalg.eigh((gram + gram.conj().T) / 2.0)
    inv_root = v @ np.diag(1.0 / np.sqrt(w)) @ v.conj().T
    return MatrixFunction(group, dim, a @ inv_root)


def as_matrix_function(rho: UnitaryRep) -> MatrixFunction:
    """View a unitary representation as a MatrixFunction (shared storage)."""
    return MatrixFunction(rho.group, rho.dim, rho.matrices)


def thm4_defect(d_psi: int, d_rho: int) -> float:
    """Exact defect of a d_psi-dimensional minor of a d_rho-dimensional irrep."""
    return 2.0 * d_psi * (1.0 - np.sqrt(d_psi / d_rho))


def thm5_normalized_bound(ratio: float) -> float:
    """Asymptotic normalized-defect bound for polar minors at d_psi/d_rho = ratio."""
    return 4.0 * (1.0 - np.sqrt(ratio)) + 6.0 * (1.0 - ratio)


def thm5_bound(d_psi: int, ratio: float) -> float:
    """Same bound scaled back to the raw defect normalization."""
    return 2.0 * d_psi * thm5_normalized_bound(ratio)


def beating_random_threshold() -> float:
    """Dimension ratio above which the polar-minor bound dips below random.

    The unique root of 4(1 - sqrt(r)) + 6(1 - r) = 1 in (0, 1), in closed form
    (31 - 2 sqrt(58)) / 18.
    """
    return (31.0 - 2.0 * np.sqrt(58.0)) / 18.0
