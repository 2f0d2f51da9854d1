"""Fourth-moment twirl coefficients, tableau counts, and the audit contraction."""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb

import pytest

from quasirep import twirl
from quasirep.errors import DegenerateDimension


def brute_force_tableau_count(shape, dim):
    """Enumerate semistandard tableaux row by row: rows weakly increase
    left to right, columns strictly increase downward."""
    def rec(r, above):
        if r == len(shape):
            return 1
        total = 0
        for row in combinations_with_replacement(range(1, dim + 1), shape[r]):
            if above is not None and any(row[c] <= above[c] for c in range(shape[r])):
                continue
            total += rec(r + 1, row)
        return total
    return rec(0, None)


def test_all_permutations_and_classes():
    perms = twirl.all_permutations()
    assert len(perms) == 24
    assert len(set(perms)) == 24
    counts = {}
    for p in perms:
        counts[twirl.class_name(p)] = counts.get(twirl.class_name(p), 0) + 1
    assert counts == {"e": 1, "(12)": 6, "(123)": 8, "(12)(34)": 3, "(1234)": 6}


def test_cycle_and_transposition_counts():
    expect = {"e": (4, 0), "(12)": (3, 1), "(123)": (2, 2),
              "(12)(34)": (2, 2), "(1234)": (1, 3)}
    for name, rep in twirl.CLASS_REPRESENTATIVES.items():
        cycles, distance = expect[name]
        assert twirl.cycle_count(rep) == cycles
        assert twirl.transposition_distance(rep) == distance
        assert twirl.class_name(rep) == name


@pytest.mark.parametrize("shape", twirl.PARTITIONS)
def test_tableau_count_against_enumeration(shape):
    for dim in range(6):
        assert twirl.tableau_count(shape, dim) == brute_force_tableau_count(shape, dim)


def test_tableau_count_spot_values():
    assert twirl.tableau_count((2, 2), 2) == 1
    for d in range(8):
        assert twirl.tableau_count((4,), d) == comb(d + 3, 4)
        assert twirl.tableau_count((1, 1, 1, 1), d) == comb(d, 4)
    with pytest.raises(ValueError):
        twirl.tableau_count((1, 2), 3)
    with pytest.raises(ValueError):
        twirl.tableau_count((2, 1), -1)


def test_moment_trace():
    assert twirl.moment_trace((0, 1, 2, 3), 3) == 81
    assert twirl.moment_trace((1, 0, 2, 3), 3) == 27
    assert twirl.moment_trace((1, 2, 3, 0), 3) == 3
    with pytest.raises(ValueError):
        twirl.moment_trace((0, 1, 2, 3), -1)


def test_twirl_exact_frozen_rationals():
    expansion = twirl.twirl_exact(6, 3)
    expected = {
        "e": Fraction(131, 2520),
        "(12)": Fraction(13, 1260),
        "(123)": Fraction(1, 5040),
        "(12)(34)": Fraction(1, 504),
        "(1234)": Fraction(-1, 2520),
    }
    for name, frac in expected.items():
        assert expansion.coefficients[name] == float(frac)


@pytest.mark.parametrize("d_rho,d_psi", [(6, 3), (4, 1), (10, 7)])
def test_reconstruct_trace_identity(d_rho, d_psi):
    expansion = twirl.twirl_exact(d_rho, d_psi)
    for rep in twirl.CLASS_REPRESENTATIVES.values():
        assert expansion.reconstruct_trace(rep) == pytest.approx(
            twirl.moment_trace(rep, d_psi), rel=1e-10)


def test_full_rank_projector_is_trivial():
    expansion = twirl.twirl_exact(5, 5)
    assert expansion.coefficients["e"] == 1.0
    for name in twirl.CLASS_NAMES[1:]:
        assert expansion.coefficients[name] == 0.0


def test_monte_carlo_matches_exact():
    exact = twirl.twirl_exact(6, 3)
    mc = twirl.twirl_monte_carlo(6, 3, samples=50, seed=0)
    for name in twirl.CLASS_NAMES:
        # the sampled traces are deterministic, so agreement is to roundoff
        assert abs(mc.coefficients[name] - exact.coefficients[name]) < 1e-12
        assert mc.stderr[name] < 1e-12
        mean, _ = mc.raw_traces[name]
        assert mean == pytest.approx(
            twirl.moment_trace(twirl.CLASS_REPRESENTATIVES[name], 3), abs=1e-10)
    assert mc.samples == 50


def test_monte_carlo_representative_invariance():
    default = twirl.twirl_monte_carlo(6, 2, samples=20, seed=1)
    other = twirl.twirl_monte_carlo(6, 2, samples=20, seed=1,
                                    representatives={"(123)": (0, 2, 3, 1)})
    for name in twirl.CLASS_NAMES:
        assert other.coefficients[name] == pytest.approx(
            default.coefficients[name], abs=1e-12)
    with pytest.raises(ValueError):
        twirl.twirl_monte_carlo(6, 2, samples=20, seed=1,
                                representatives={"(12)": (1, 2, 0, 3)})


def test_dimension_validation():
    with pytest.raises(DegenerateDimension):
        twirl.twirl_exact(3, 1)
    with pytest.raises(ValueError):
        twirl.twirl_exact(15, 3)
    with pytest.raises(ValueError):
        twirl.twirl_exact(6, 0)
    with pytest.raises(ValueError):
        twirl.twirl_exact(6, 7)
    with pytest.raises(ValueError):
        twirl.twirl_monte_carlo(6, 3, samples=1, seed=0)


def test_error_term_audit(a5_table):
    rho = next(r for r in a5_table if r.dim == 5)
    audit = twirl.error_term_audit(rho, 3, samples=120, seed=0)
    tol = 5 * audit.monte_carlo_stderr + 1e-9
    assert abs(audit.monte_carlo - audit.expansion) <= tol
    ratio = 3 / 5
    assert audit.leading_prediction == pytest.approx(5 * ratio**3 * (2 - ratio))
    payload = audit.to_json_dict()
    assert payload["d_rho"] == 5 and payload["d_psi"] == 3
    assert set(payload["coefficients"]) == set(twirl.CLASS_NAMES)
    with pytest.raises(ValueError):
        twirl.error_term_audit(rho, 3, samples=1, seed=0)


def test_expansion_json_round_trip():
    expansion = twirl.twirl_exact(8, 4)
    assert json.loads(expansion.to_json()) == expansion.to_json_dict()
