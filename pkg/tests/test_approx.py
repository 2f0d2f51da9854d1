"""Defect measurement, minor and polar constructions, and the bounds."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasirep import approx, groups, irreps
from quasirep.errors import DimensionError, MissingIrrepTable, OddOrder, RankDeficient


def irrep_of_dim(table, dim):
    return next(r for r in table if r.dim == dim)


def test_genuine_irrep_has_zero_defect(a5_table):
    psi = approx.as_matrix_function(irrep_of_dim(a5_table, 3))
    report = approx.defect_direct(psi, a5_table)
    assert report.defect < 1e-12
    assert report.agreement_prob == 1.0
    assert report.mean_opnorm < 1e-10
    assert report.thm1_bound == 0.0


@pytest.mark.parametrize("subspace", ["leading", "haar"])
@pytest.mark.parametrize("parent_dim,d_psi",
                         [(3, 1), (3, 2), (3, 3), (4, 1), (4, 2), (4, 3), (4, 4)])
def test_minor_defect_matches_closed_form(a5_table, parent_dim, d_psi, subspace):
    rho = irrep_of_dim(a5_table, parent_dim)
    psi = approx.minor_construction(rho, d_psi, subspace=subspace, seed=5)
    report = approx.defect_direct(psi, a5_table)
    expected = approx.thm4_defect(d_psi, parent_dim)
    assert report.defect == pytest.approx(expected, abs=1e-10)
    assert report.normalized_defect == pytest.approx(expected / (2 * d_psi), abs=1e-10)


def test_minor_spot_value(a5_table):
    psi = approx.minor_construction(irrep_of_dim(a5_table, 5), 3)
    report = approx.defect_direct(psi, a5_table)
    assert report.defect == pytest.approx(1.3524199845510998, abs=1e-9)
    assert approx.thm4_defect(3, 5) == pytest.approx(6.0 * (1.0 - math.sqrt(0.6)))


def test_minor_mean_and_admissibility(a5_table):
    psi = approx.minor_construction(irrep_of_dim(a5_table, 4), 2)
    assert psi.is_admissible()
    assert psi.parent_dim == 4
    assert float(np.linalg.norm(psi.mean())) < 1e-10
    trivial = approx.minor_construction(a5_table.irreps[0], 1)
    assert np.allclose(trivial.matrices, 1.0)


def test_minor_rejects_bad_dimensions(a5_table, s3):
    rho = irrep_of_dim(a5_table, 3)
    with pytest.raises(DimensionError):
        approx.minor_construction(rho, 0)
    with pytest.raises(DimensionError):
        approx.minor_construction(rho, 4)
    with pytest.raises(ValueError):
        approx.minor_construction(rho, 2, subspace="haar")  # seed required
    with pytest.raises(ValueError):
        approx.minor_construction(rho, 2, subspace="diagonal")
    with pytest.raises(ValueError):
        approx.minor_construction(irreps.regular_representation(s3), 2)


def test_direct_matches_fourier(s3, s3_table, a5_table):
    inputs = [
        (approx.haar_baseline(s3, 3, seed=2), s3_table),
        (approx.random_sign_function(s3, seed=3), s3_table),
        (approx.minor_construction(irrep_of_dim(a5_table, 4), 2,
                                   subspace="haar", seed=4), a5_table),
        (approx.polar_construction(irrep_of_dim(a5_table, 4), 2, seed=5), a5_table),
    ]
    for psi, table in inputs:
        direct = approx.defect_direct(psi, table)
        spectral = approx.defect_via_fourier(psi, table)
        scale = max(1.0, direct.defect)
        assert abs(direct.defect - spectral.defect) <= 1e-7 * scale
        assert spectral.triple_trace == pytest.approx(direct.triple_trace, abs=1e-8)


def test_report_bounds_are_consistent(a5, a5_table):
    psi = approx.random_admissible(a5, 2, seed=9)
    report = approx.defect_direct(psi, a5_table)
    m = report.mean_opnorm
    root = math.sqrt(psi.dim / a5_table.d_min)
    assert report.thm1_bound == pytest.approx(
        max(0.0, 2 * psi.dim * (1 - m**3 - root)))
    assert report.cor1_bound == pytest.approx(min(1.0, 0.5 * (1 + m**3 + root)))
    assert report.normalized_defect == pytest.approx(report.defect / (2 * psi.dim))


def test_pointwise_unitary_defect_identity(s3, s3_table):
    # for pointwise-unitary psi both squared-norm moments equal d, so the
    # defect collapses to 2d - 2 Re E tr psi(xy)' psi(x) psi(y)
    psi = approx.haar_baseline(s3, 2, seed=12)
    report = approx.defect_direct(psi, s3_table)
    assert report.defect == pytest.approx(
        2 * psi.dim - 2 * report.triple_trace.real, abs=1e-10)


def test_polar_unitary_factor():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    u = approx.polar_unitary(a)
    assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-10)
    # the remaining factor u' a must be the positive-semidefinite part
    p = u.conj().T @ a
    assert np.allclose(p, p.conj().T, atol=1e-10)
    assert np.linalg.eigvalsh((p + p.conj().T) / 2).min() > -1e-12


def test_polar_unitary_rejects_singular():
    with pytest.raises(RankDeficient):
        approx.polar_unitary(np.diag([1.0, 1.0, 0.0]).astype(complex))


def test_polar_construction(a5_table):
    psi = approx.polar_construction(irrep_of_dim(a5_table, 4), 2, seed=6)
    gram = np.einsum("xba,xbc->xac", psi.matrices.conj(), psi.matrices)
    assert np.max(np.abs(gram - np.eye(2))) < 1e-10
    assert isinstance(psi.parent_minor, approx.MinorFunction)
    assert psi.parent_dim == 4
    diff = psi.parent_minor.matrices - psi.matrices
    manual = float(np.mean(np.einsum("xab,xab->x", diff, diff.conj()).real))
    assert approx.polar_residual(psi) == pytest.approx(manual)


def test_sign_function_balanced(a6):
    psi = approx.random_sign_function(a6, seed=1)
    assert psi.dim == 1
    values = psi.matrices[:, 0, 0].real
    assert set(np.unique(values)) == {-1.0, 1.0}
    assert values.sum() == 0.0
    with pytest.raises(OddOrder):
        approx.random_sign_function(groups.named("cyclic", 5), seed=1)


def test_haar_baseline_admissible(s3):
    psi = approx.haar_baseline(s3, 3, seed=8)
    assert psi.is_admissible()
    gram = np.einsum("xba,xbc->xac", psi.matrices.conj(), psi.matrices)
    assert np.max(np.abs(gram - np.eye(3))) < 1e-12


def test_perturbed_irrep(a5_table):
    rho = irrep_of_dim(a5_table, 3)
    unchanged = approx.perturbed_irrep(rho, 0.0, seed=4)
    assert np.array_equal(unchanged.matrices, rho.matrices)
    noisy = approx.perturbed_irrep(rho, 0.5, seed=4)
    assert not np.allclose(noisy.matrices, rho.matrices)
    assert noisy.is_admissible()  # replacements are still unitary
    with pytest.raises(ValueError):
        approx.perturbed_irrep(rho, 1.5, seed=4)


def test_inadmissible_input_warns(s3, s3_table):
    psi = approx.MatrixFunction(s3, 1, np.full((6, 1, 1), 2.0 + 0.0j))
    with pytest.warns(RuntimeWarning):
        approx.defect_direct(psi, s3_table)


def test_missing_or_mismatched_table(s3, s3_table, a5_table):
    psi = approx.random_sign_function(s3, seed=2)
    with pytest.raises(MissingIrrepTable):
        approx.defect_direct(psi, None)
    with pytest.raises(ValueError):
        approx.defect_direct(psi, a5_table)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**16), dim=st.integers(1, 3))
def test_random_admissible_is_admissible(s3, seed, dim):
    psi = approx.random_admissible(s3, dim, seed)
    assert psi.admissibility_residual() < 1e-9


def test_thresholds():
    assert approx.thm5_normalized_bound(0.9) == pytest.approx(
        4 * (1 - math.sqrt(0.9)) + 0.6)
    assert approx.thm5_bound(9, 0.9) == pytest.approx(
        18 * approx.thm5_normalized_bound(0.9))
    r = approx.beating_random_threshold()
    assert r == pytest.approx(0.8760252104595657, abs=1e-12)
    assert 4 * (1 - math.sqrt(r)) + 6 * (1 - r) == pytest.approx(1.0, abs=1e-12)
