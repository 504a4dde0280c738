"""Two independent evaluation routes for every family.

``evaluate_by_enumeration`` walks the monomials through the ranking map and
is the ground-truth oracle. ``evaluate_fast`` uses inclusion-exclusion for
the permanent and a fix-the-start-vertex subset DP for the Hamiltonian-cycle
polynomial; lifted families reduce to the base family through block sums.
Both routes use exact integer arithmetic whenever the input values are
integers (integer mode, or ell = 2 root mode).
"""

from __future__ import annotations

from typing import Sequence

from .errors import SizeGuardError
from .families import (
    HAMILTONIAN_CYCLE,
    LIFTED,
    PERMANENT,
    Assignment,
    PolynomialSpec,
    monomial_of_index,
)

ENUMERATION_GUARD = 1 << 24
FAST_EVAL_MAX_N = 20


def evaluate_by_enumeration(spec: PolynomialSpec, x: Assignment, guard: int = ENUMERATION_GUARD):
    return evaluate_values_by_enumeration(spec, _checked_values(spec, x), guard=guard)


def evaluate_fast(spec: PolynomialSpec, x: Assignment):
    return evaluate_values_fast(spec, _checked_values(spec, x))


def evaluate_values_by_enumeration(spec: PolynomialSpec, values: Sequence, guard: int = ENUMERATION_GUARD):
    """Sum over all monomials of the product of the selected values."""
    if spec.num_monomials > guard:
        raise SizeGuardError(
            f"enumeration over {spec.num_monomials} monomials exceeds guard {guard}"
        )
    total = 0
    for z in range(spec.num_monomials):
        mask = monomial_of_index(spec, z)
        term = 1
        for v, bit in zip(values, mask):
            if bit:
                term *= v
        total += term
    return total


def evaluate_values_fast(spec: PolynomialSpec, values: Sequence):
    if spec.family == LIFTED:
        k = spec.lift_k
        sums = [sum(values[i * k : (i + 1) * k]) for i in range(spec.base.n_vars)]
        return evaluate_values_fast(spec.base, sums)
    n = spec.matrix_n
    if n > FAST_EVAL_MAX_N:
        raise SizeGuardError(f"fast evaluation capped at n = {FAST_EVAL_MAX_N}, got {n}")
    rows = [list(values[i * n : (i + 1) * n]) for i in range(n)]
    if spec.family == PERMANENT:
        return _permanent_ryser(rows, n)
    if spec.family == HAMILTONIAN_CYCLE:
        return _hamiltonian_cycle_dp(rows, n)
    raise ValueError(f"no fast evaluator for family {spec.family!r}")


def _permanent_ryser(a: list, n: int):
    # Inclusion-exclusion over column subsets, Gray-code order so each step
    # updates the row sums by a single column.
    if n == 1:
        return a[0][0]
    row_sums = [0] * n
    total = 0
    prev_code = 0
    for s in range(1, 1 << n):
        code = s ^ (s >> 1)
        flipped = (code ^ prev_code).bit_length() - 1
        if code & (1 << flipped):
            for i in range(n):
                row_sums[i] += a[i][flipped]
        else:
            for i in range(n):
                row_sums[i] -= a[i][flipped]
        prev_code = code
        prod = 1
        for v in row_sums:
            prod *= v
        total += prod if (code.bit_count() ^ n) & 1 == 0 else -prod
    return total


def _hamiltonian_cycle_dp(a: list, n: int):
    # Sum over directed n-cycles of prod_i a[i][sigma(i)], anchoring the
    # walk at vertex 0. dp[S][v] sums path products 0 -> ... -> v+1 that
    # visit exactly the vertex set S (bit w <-> vertex w+1).
    if n == 1:
        return a[0][0]
    size = 1 << (n - 1)
    dp = [[0] * (n - 1) for _ in range(size)]
    for v in range(n - 1):
        dp[1 << v][v] = a[0][v + 1]
    for subset in range(size):
        row = dp[subset]
        for v in range(n - 1):
            val = row[v]
            if val == 0:
                continue
            av = a[v + 1]
            for w in range(n - 1):
                if not subset & (1 << w):
                    dp[subset | (1 << w)][w] += val * av[w + 1]
    full = dp[size - 1]
    return sum(full[v] * a[v + 1][0] for v in range(n - 1))


def _checked_values(spec: PolynomialSpec, x: Assignment) -> tuple:
    values = x.numeric_values()
    if len(values) != spec.n_vars:
        raise ValueError(f"assignment has {len(values)} values; spec needs {spec.n_vars}")
    return values
