"""Exact tables, orbit weights, variance identities, and sampling utilities."""

import json
from fractions import Fraction
from itertools import product
from math import comb

import numpy as np
import pytest

from conftest import brute_permanent
from polysample import (
    NumericalCheckError,
    ParityError,
    ProbabilityTable,
    RandomSource,
    ShapeMismatchError,
    SizeGuardError,
    binomial_value_pmf,
    collapse_assignment,
    exact_table_fold,
    exact_table_roots,
    exact_table_squashed,
    hamiltonian_cycle,
    lift_k_equivalent,
    mixed_radix_digits,
    mixed_radix_index,
    orbit_weight,
    permanent,
    sample_binomial_value,
    sample_from_table,
    squashed_value,
    tv_distance,
    variance,
)


def test_mixed_radix_helpers():
    assert mixed_radix_index((1, 0, 2), 3) == 11
    assert mixed_radix_digits(11, 3, 3) == (1, 0, 2)
    for i in range(16):
        assert mixed_radix_index(mixed_radix_digits(i, 2, 4), 2) == i


# ---------------------------------------------------------------------------
# root-of-unity tables


def test_roots_table_perm2_l2_against_direct_expansion():
    # Independent oracle: Q = z11*z22 + z12*z21 expanded by hand over all
    # sixteen sign vectors.
    table = exact_table_roots(permanent(2), 2)
    for flat in range(16):
        e = mixed_radix_digits(flat, 2, 4)
        z = [1 - 2 * b for b in e]
        q = z[0] * z[3] + z[1] * z[2]
        assert table[flat] == Fraction(q * q, 16 * 2)
    assert sorted(set(table.probs)) == [Fraction(0), Fraction(1, 8)]
    assert sum(1 for p in table.probs if p) == 8


def test_all_plus_outcome_has_mass_m_over_2n():
    for spec in [permanent(2), permanent(3), hamiltonian_cycle(3)]:
        table = exact_table_roots(spec, 2)
        assert table[0] == Fraction(spec.num_monomials, 2**spec.n_vars)


@pytest.mark.parametrize("ell", [3, 4, 8])
def test_roots_table_normalization_complex(ell):
    # The mean-square normalization is verified numerically for ell in
    # {2, 3, 4, 8} rather than assumed (2 is exact by construction).
    table = exact_table_roots(permanent(2), ell)
    assert abs(float(np.sum(table.as_floats())) - 1.0) < 1e-9


def test_roots_table_l3_entries_match_slow_reference():
    from polysample import Assignment, evaluate_by_enumeration

    spec = permanent(2)
    table = exact_table_roots(spec, 3)
    for flat in [0, 1, 17, 35, 80]:
        digits = mixed_radix_digits(flat, 3, 4)
        q = evaluate_by_enumeration(spec, Assignment.roots(3, digits))
        expected = abs(q) ** 2 / (81 * 2)
        assert abs(float(table[flat]) - expected) < 1e-12


def test_roots_table_rejects_degenerate_ell():
    with pytest.raises(ValueError):
        exact_table_roots(permanent(2), 1)


def test_roots_table_size_guard():
    with pytest.raises(SizeGuardError):
        exact_table_roots(permanent(4), 8)  # 8^16 outcomes


# ---------------------------------------------------------------------------
# orbit weights and squashed tables


def test_orbit_weight_examples():
    assert orbit_weight((0, 0), 2) == 4
    assert orbit_weight((2, -2), 2) == 1
    assert orbit_weight((1, -1, 3), 3) == comb(3, 2) * comb(3, 1) * comb(3, 3)


def test_orbit_weights_partition_the_hypercube():
    k, n = 3, 2
    total = sum(
        orbit_weight([2 * c1 - k, 2 * c2 - k], k)
        for c1 in range(k + 1)
        for c2 in range(k + 1)
    )
    assert total == 2 ** (k * n)


def test_orbit_weight_rejects_bad_points():
    with pytest.raises(ParityError):
        orbit_weight((1, 0), 2)
    with pytest.raises(ValueError):
        orbit_weight((4,), 2)


def test_squashed_value_map():
    assert [squashed_value(c, 2) for c in range(3)] == [-2, 0, 2]


def test_squashed_table_perm2_k2_against_direct_computation():
    spec = permanent(2)
    table = exact_table_squashed(spec, 2)
    assert table.radix == 3 and table.length == 4
    var = 2**2 * 2
    for flat in range(81):
        classes = mixed_radix_digits(flat, 3, 4)
        y = [2 * c - 2 for c in classes]
        q = brute_permanent(y, 2)
        orbit = 1
        for c in classes:
            orbit *= comb(2, c)
        assert table[flat] == Fraction(q * q * orbit, 2**8 * var)
    assert sum(table.probs) == 1


def test_squashed_zero_value_outcomes_have_zero_mass():
    table = exact_table_squashed(permanent(2), 2)
    # classes (2, 2, 2, 0) encode y = (2, 2, 2, -2): Q = 2*(-2) + 2*2 = 0
    flat = mixed_radix_index((2, 2, 2, 0), 3)
    assert table[flat] == 0


@pytest.mark.parametrize("k", [1, 2, 3])
def test_squashed_normalization_identity(k):
    # sum over the class grid of Q^2 * orbit equals 2^{kn} * k^d * m exactly
    spec = permanent(2)
    total = 0
    for classes in product(range(k + 1), repeat=4):
        y = [2 * c - k for c in classes]
        q = brute_permanent(y, 2)
        orbit = 1
        for c in classes:
            orbit *= comb(k, c)
        total += q * q * orbit
    assert total == 2 ** (k * 4) * k**spec.degree * spec.num_monomials
    exact_table_squashed(spec, k)  # construction re-checks the same identity


def test_squashed_equals_pushforward_of_lifted_signs():
    # The squashed table is the image of the lifted ell=2 table under the
    # blockwise collapse map, entry by entry in exact rationals.
    for k in (1, 2, 3):
        base = permanent(2)
        lifted = lift_k_equivalent(base, k)
        signs = exact_table_roots(lifted, 2)
        squashed = exact_table_squashed(base, k)
        pushed = [Fraction(0)] * squashed.size
        for flat in range(signs.size):
            bits = mixed_radix_digits(flat, 2, lifted.n_vars)
            x = [1 - 2 * b for b in bits]
            classes = tuple((v + k) // 2 for v in collapse_assignment(x, k).values)
            pushed[mixed_radix_index(classes, k + 1)] += signs[flat]
        assert pushed == list(squashed.probs)


# ---------------------------------------------------------------------------
# fold tables


def test_fold_constant_function_is_point_mass_at_zero():
    table = exact_table_fold([1] * 8)
    assert table[0] == 1
    assert all(p == 0 for p in list(table.probs)[1:])


def test_fold_character_is_point_mass_at_its_index():
    # f(x) = (-1)^{x_1} on two bits: spectrum concentrates at y = 10
    table = exact_table_fold([1, 1, -1, -1])
    assert table.probability_of((1, 0)) == 1


def test_fold_matches_slow_dft(rng_factory):
    rng = rng_factory(12)
    f = [1 - 2 * int(b) for b in rng.integers(0, 2, size=16)]
    table = exact_table_fold(f)
    for y in range(16):
        acc = sum(f[x] * (-1) ** bin(x & y).count("1") for x in range(16))
        assert table[y] == Fraction(acc * acc, 16 * 16)


def test_fold_parseval_random(rng_factory):
    rng = rng_factory(13)
    f = [1 - 2 * int(b) for b in rng.integers(0, 2, size=256)]
    table = exact_table_fold(f)
    assert sum(table.probs) == 1


def test_fold_rejects_bad_alphabet_and_size():
    with pytest.raises(ValueError):
        exact_table_fold([1, 2, 1, 1])
    with pytest.raises(ValueError):
        exact_table_fold([1, 1, 1])
    with pytest.raises(SizeGuardError):
        exact_table_fold([1] * (1 << 21))


# ---------------------------------------------------------------------------
# variance


def test_variance_closed_equals_sum_form_up_to_k30():
    for spec in (permanent(2), permanent(3), hamiltonian_cycle(4)):
        for k in range(1, 31):
            report = variance(spec, k)
            assert report.forms_agree
            assert report.closed_form == k**spec.degree * spec.num_monomials


def test_variance_binomial_sum_identity():
    for k in range(1, 31):
        assert sum(comb(k, i) * (k - 2 * i) ** 2 for i in range(k + 1)) == k * 2**k


def test_variance_perm2_k2_value():
    assert variance(permanent(2), 2).closed_form == 8


def test_variance_k1_equals_monomial_count():
    for spec in (permanent(3), hamiltonian_cycle(4)):
        assert variance(spec, 1).closed_form == spec.num_monomials


@pytest.mark.parametrize("k", [1, 2, 3])
def test_variance_matches_exhaustive_lifted_mean_square(k):
    # E[Q_lifted^2] over all sign vectors equals k^d * m with zero tolerance.
    from polysample import Assignment, evaluate_by_enumeration

    base = permanent(2)
    lifted = lift_k_equivalent(base, k)
    total = 0
    for flat in range(2**lifted.n_vars):
        bits = mixed_radix_digits(flat, 2, lifted.n_vars)
        q = evaluate_by_enumeration(lifted, Assignment.roots(2, bits))
        total += q * q
    assert Fraction(total, 2**lifted.n_vars) == variance(base, k).closed_form


def test_variance_empirical_close_to_closed_form(rng_factory):
    spec = permanent(2)
    report = variance(spec, 2, samples=4000, rng=rng_factory(21))
    tolerance = 5 * report.closed_form / 4000**0.5
    assert abs(report.empirical - report.closed_form) <= tolerance


# ---------------------------------------------------------------------------
# binomial sampling


def test_binomial_pmf_exact():
    assert binomial_value_pmf(2) == {-2: Fraction(1, 4), 0: Fraction(1, 2), 2: Fraction(1, 4)}
    assert sum(binomial_value_pmf(7).values()) == 1


def test_binomial_k1_is_uniform_signs(rng_factory):
    rng = rng_factory(31)
    draws = [sample_binomial_value(1, rng) for _ in range(2000)]
    assert set(draws) == {-1, 1}
    assert abs(sum(draws)) < 5 * 2000**0.5


def test_binomial_k2_frequencies(rng_factory):
    rng = rng_factory(32)
    n = 20000
    draws = [sample_binomial_value(2, rng) for _ in range(n)]
    for value, p in binomial_value_pmf(2).items():
        observed = sum(1 for d in draws if d == value) / n
        sigma = (float(p) * (1 - float(p)) / n) ** 0.5
        assert abs(observed - float(p)) < 5 * sigma


def test_binomial_mean_within_four_sigma(rng_factory):
    rng = rng_factory(33)
    n, k = 100_000, 6
    mean = sum(sample_binomial_value(k, rng) for _ in range(n)) / n
    assert abs(mean) < 4 * (k / n) ** 0.5


def test_binomial_values_have_matching_parity(rng_factory):
    rng = rng_factory(34)
    for k in (3, 4):
        for _ in range(200):
            v = sample_binomial_value(k, rng)
            assert abs(v) <= k and (v - k) % 2 == 0


# ---------------------------------------------------------------------------
# table sampling, distance, serialization


def test_tv_distance_basics():
    table = exact_table_roots(permanent(2), 2)
    assert tv_distance(table, table) == 0
    a = ProbabilityTable(2, 1, [Fraction(1), Fraction(0)], "rational")
    b = ProbabilityTable(2, 1, [Fraction(0), Fraction(1)], "rational")
    assert tv_distance(a, b) == 1
    with pytest.raises(ShapeMismatchError):
        tv_distance(a, exact_table_roots(permanent(2), 2))


def test_sample_from_table_frequencies(rng_factory):
    table = exact_table_roots(permanent(2), 2)
    rng = rng_factory(35)
    n = 100_000
    counts = np.zeros(table.size, dtype=int)
    for _ in range(n):
        counts[sample_from_table(table, rng)] += 1
    for flat in range(table.size):
        p = float(table[flat])
        sigma = max((p * (1 - p) / n) ** 0.5, 1e-12)
        assert abs(counts[flat] / n - p) < 5 * sigma + 1e-12


def test_table_normalization_check_fires():
    with pytest.raises(NumericalCheckError):
        ProbabilityTable(2, 1, [Fraction(1, 2), Fraction(1, 3)], "rational")
    with pytest.raises(NumericalCheckError):
        ProbabilityTable(2, 1, np.array([0.6, 0.5]), "double")


def test_table_json_round_trip():
    for table in (exact_table_roots(permanent(2), 2), exact_table_roots(permanent(2), 3)):
        doc = json.loads(json.dumps(table.to_json_dict()))
        back = ProbabilityTable.from_json_dict(doc)
        assert back.radix == table.radix and back.length == table.length
        assert tv_distance(back, table) < 1e-15


def test_table_csv_projection():
    import io

    table = exact_table_roots(permanent(2), 2)
    buf = io.StringIO()
    table.write_csv(buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "index,outcome,probability"
    assert len(lines) == 17
    assert lines[1].startswith("0,") and lines[1].endswith("1/8")
