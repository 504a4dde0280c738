"""Exact target distributions and the table machinery around them.

Every distribution here is materialized as a dense ``ProbabilityTable`` over
a mixed-radix outcome space (position 0 most significant). Tables are exact
rational whenever the underlying values are integers: root tables at ell = 2,
every squashed table, and every fold table. Root tables for ell >= 3 use
double precision and are checked to normalize within 1e-9.
"""

from __future__ import annotations

import csv
import warnings
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .errors import NumericalCheckError, ParityError, ShapeMismatchError, SizeGuardError
from .evaluate import ENUMERATION_GUARD, evaluate_values_fast
from .families import Assignment, PolynomialSpec, monomial_of_index
from .rng import RandomSource

RATIONAL = "rational"
DOUBLE = "double"

TABLE_SIZE_GUARD = 1 << 26
DOUBLE_NORMALIZATION_TOL = 1e-9
EXACT_BINOMIAL_GUARD = 1 << 20


def mixed_radix_index(digits: Sequence[int], radix: int) -> int:
    index = 0
    for d in digits:
        index = index * radix + d
    return index


def mixed_radix_digits(index: int, radix: int, length: int) -> tuple[int, ...]:
    digits = [0] * length
    for pos in range(length - 1, -1, -1):
        index, digits[pos] = divmod(index, radix)
    return tuple(digits)


@dataclass(eq=False)
class ProbabilityTable:
    """Dense distribution over radix**length outcomes.

    ``probs`` is a list of Fractions (rational arithmetic) or a float64
    array (double arithmetic). Outcome tuples map to flat indices with
    position 0 most significant.
    """

    radix: int
    length: int
    probs: object
    arithmetic: str
    _cdf: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.arithmetic not in (RATIONAL, DOUBLE):
            raise ValueError(f"unknown arithmetic {self.arithmetic!r}")
        if self.size != len(self.probs):
            raise ShapeMismatchError(
                f"table has {len(self.probs)} entries; radix**length is {self.size}"
            )
        self.validate_normalization()

    @property
    def size(self) -> int:
        return self.radix**self.length

    def __len__(self) -> int:
        return self.size

    def __getitem__(self, flat_index: int):
        return self.probs[flat_index]

    def probability_of(self, outcome: Sequence[int]):
        return self.probs[mixed_radix_index(outcome, self.radix)]

    def outcome_of(self, flat_index: int) -> tuple[int, ...]:
        return mixed_radix_digits(flat_index, self.radix, self.length)

    def as_floats(self) -> np.ndarray:
        if self.arithmetic == DOUBLE:
            return np.asarray(self.probs, dtype=np.float64)
        return np.array([float(p) for p in self.probs], dtype=np.float64)

    def validate_normalization(self) -> None:
        if self.arithmetic == RATIONAL:
            if any(p < 0 for p in self.probs):
                raise NumericalCheckError("negative probability in rational table")
            total = sum(self.probs)
            if total != 1:
                raise NumericalCheckError(f"rational table sums to {total}, not 1")
        else:
            arr = np.asarray(self.probs, dtype=np.float64)
            if float(arr.min(initial=0.0)) < -1e-15:
                raise NumericalCheckError("negative probability in double table")
            drift = abs(float(arr.sum()) - 1.0)
            if drift > DOUBLE_NORMALIZATION_TOL:
                raise NumericalCheckError(f"double table normalization off by {drift:.3e}")

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        if self.arithmetic == RATIONAL:
            entries = [f"{p.numerator}/{p.denominator}" for p in self.probs]
        else:
            entries = [float(p) for p in self.probs]
        return {
            "radix": self.radix,
            "length": self.length,
            "arithmetic": self.arithmetic,
            "probs": entries,
        }

    @staticmethod
    def from_json_dict(doc: dict) -> "ProbabilityTable":
        arithmetic = doc["arithmetic"]
        if arithmetic == RATIONAL:
            probs = [Fraction(e) for e in doc["probs"]]
        else:
            probs = np.asarray(doc["probs"], dtype=np.float64)
        return ProbabilityTable(int(doc["radix"]), int(doc["length"]), probs, arithmetic)

    def write_csv(self, stream) -> None:
        writer = csv.writer(stream)
        writer.writerow(["index", "outcome", "probability"])
        for i in range(self.size):
            outcome = ",".join(str(d) for d in self.outcome_of(i))
            p = self.probs[i]
            text = f"{p.numerator}/{p.denominator}" if self.arithmetic == RATIONAL else repr(float(p))
            writer.writerow([i, outcome, text])


# ---------------------------------------------------------------------------
# exact target tables


def exact_table_roots(spec: PolynomialSpec, ell: int, guard: int = TABLE_SIZE_GUARD) -> ProbabilityTable:
    """Distribution over [0, ell-1]^n with mass |Q(root-of-unity point)|^2 / (ell^n * m)."""
    if ell < 2:
        raise ValueError("ell must be >= 2 (ell = 1 is degenerate)")
    n, m = spec.n_vars, spec.num_monomials
    guard = min(guard, TABLE_SIZE_GUARD)
    size = ell**n
    if size > guard:
        raise SizeGuardError(f"table of {size} outcomes exceeds guard {guard}")
    if m > ENUMERATION_GUARD:
        raise SizeGuardError(f"{m} monomials exceed the enumeration guard {ENUMERATION_GUARD}")
    masks = [monomial_of_index(spec, z) for z in range(m)]
    if ell == 2:
        values = _signed_sums_over_hypercube(masks, n)
        denom = size * m
        probs = [Fraction(int(v) * int(v), denom) for v in values]
        return ProbabilityTable(2, n, probs, RATIONAL)
    amp = np.zeros(size, dtype=np.complex128)
    omega_pow = np.exp(2j * np.pi * np.arange(ell) / ell)
    idx = np.arange(size, dtype=np.int64)
    for mask in masks:
        exp_sum = np.zeros(size, dtype=np.int64)
        for i, bit in enumerate(mask):
            if bit:
                exp_sum += (idx // ell ** (n - 1 - i)) % ell
        amp += omega_pow[exp_sum % ell]
    probs = (amp.real**2 + amp.imag**2) / (size * m)
    return ProbabilityTable(ell, n, probs, DOUBLE)


def _signed_sums_over_hypercube(masks: Iterable[Sequence[int]], n: int) -> np.ndarray:
    # Value at flat index y of sum over masks of prod_{i in mask} (-1)^{y_i},
    # with variable i stored at bit (n-1-i).
    idx = np.arange(1 << n, dtype=np.uint64)
    out = np.zeros(1 << n, dtype=np.int64)
    for mask in masks:
        packed = np.uint64(sum(1 << (n - 1 - i) for i, bit in enumerate(mask) if bit))
        parity = np.bitwise_count(idx & packed).astype(np.int64) & 1
        out += 1 - 2 * parity
    return out


def orbit_weight(y, k: int) -> int:
    """Number of +-1 preimages of integer vector y under blockwise k-sums."""
    values = y.values if isinstance(y, Assignment) else tuple(int(v) for v in y)
    weight = 1
    for v in values:
        if abs(v) > k:
            raise ValueError(f"value {v} outside [-{k}, {k}]")
        if (v - k) % 2 != 0:
            raise ParityError(f"value {v} has wrong parity for k = {k}")
        weight *= comb(k, (k + v) // 2)
    return weight


def squashed_value(class_index: int, k: int) -> int:
    """Integer value represented by a class index (count of +1 entries)."""
    return 2 * class_index - k


def exact_table_squashed(spec: PolynomialSpec, k: int, guard: int = TABLE_SIZE_GUARD) -> ProbabilityTable:
    """Class-indexed distribution over [-k, k]^n with mass Q(y)^2 * orbit(y) / (2^{kn} * Var).

    Classes count +1 entries per block (0..k); class c encodes the value
    2c - k, so every representable point satisfies the parity constraint
    and no dead parity holes are stored.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n, m, d = spec.n_vars, spec.num_monomials, spec.degree
    guard = min(guard, TABLE_SIZE_GUARD)
    size = (k + 1) ** n
    if size > guard:
        raise SizeGuardError(f"table of {size} outcomes exceeds guard {guard}")
    denom = 2 ** (k * n) * k**d * m
    weights = [comb(k, c) for c in range(k + 1)]
    numerators = []
    total = 0
    for classes in product(range(k + 1), repeat=n):
        values = [2 * c - k for c in classes]
        q = evaluate_values_fast(spec, values)
        orbit = 1
        for c in classes:
            orbit *= weights[c]
        numer = q * q * orbit
        numerators.append(numer)
        total += numer
    if total != denom:
        raise NumericalCheckError(
            f"squashed normalization identity failed: sum {total} != 2^kn * Var = {denom}"
        )
    probs = [Fraction(numer, denom) for numer in numerators]
    return ProbabilityTable(k + 1, n, probs, RATIONAL)


def exact_table_fold(truth_table: Sequence[int], max_bits: int = 20) -> ProbabilityTable:
    """Squared, normalized Walsh spectrum of a +-1 truth table."""
    size = len(truth_table)
    n = size.bit_length() - 1
    if size != 1 << n or n < 1:
        raise ValueError(f"truth table length {size} is not a power of two")
    if n > max_bits:
        raise SizeGuardError(f"fold table capped at n = {max_bits} bits, got {n}")
    values = np.asarray(truth_table, dtype=np.int64)
    if not np.all(np.abs(values) == 1):
        raise ValueError("truth table entries must be +-1")
    spectrum = _walsh_transform(values)
    denom = size * size
    probs = [Fraction(int(w) * int(w), denom) for w in spectrum]
    return ProbabilityTable(2, n, probs, RATIONAL)


def _walsh_transform(values: np.ndarray) -> np.ndarray:
    out = values.copy()
    h = 1
    while h < len(out):
        for start in range(0, len(out), 2 * h):
            a = out[start : start + h].copy()
            b = out[start + h : start + 2 * h].copy()
            out[start : start + h] = a + b
            out[start + h : start + 2 * h] = a - b
        h *= 2
    return out


# ---------------------------------------------------------------------------
# variance identities


@dataclass(frozen=True)
class VarianceReport:
    """Variance of Q over blockwise-binomial inputs, computed two ways."""

    closed_form: int
    sum_form: Fraction
    empirical: float | None = None
    samples: int = 0

    @property
    def forms_agree(self) -> bool:
        return self.sum_form == self.closed_form


def variance(spec: PolynomialSpec, k: int, samples: int = 0, rng: RandomSource | None = None) -> VarianceReport:
    if k < 1:
        raise ValueError("k must be >= 1")
    m, d = spec.num_monomials, spec.degree
    closed = k**d * m
    coordinate_second_moment = sum(comb(k, i) * (k - 2 * i) ** 2 for i in range(k + 1))
    sum_form = Fraction(m * coordinate_second_moment**d, 2 ** (k * d))
    empirical = None
    if samples > 0:
        if rng is None:
            raise ValueError("empirical variance needs an rng")
        acc = 0.0
        for _ in range(samples):
            y = sample_binomial_assignment(spec, k, rng)
            q = evaluate_values_fast(spec, y.values)
            acc += float(q) * float(q)
        empirical = acc / samples
    return VarianceReport(closed, sum_form, empirical, samples)


# ---------------------------------------------------------------------------
# sampling utilities


def binomial_value_pmf(k: int) -> dict[int, Fraction]:
    """Exact pmf of a sum of k independent uniform +-1 values."""
    return {2 * c - k: Fraction(comb(k, c), 2**k) for c in range(k + 1)}


def binomial_sampling_method(k: int) -> str:
    return "exact-inverse-cdf" if k <= EXACT_BINOMIAL_GUARD else "rounded-normal"


def sample_binomial_value(k: int, rng: RandomSource) -> int:
    """One draw of a sum of k independent uniform +-1 values."""
    if k <= EXACT_BINOMIAL_GUARD:
        cumulative = _binomial_cdf_table(k)
        u = rng.randbits(k)
        return 2 * bisect_right(cumulative, u) - k
    # Beyond the exact guard the distribution is approximated by a rounded
    # normal of matching mean/variance, snapped to the correct parity.
    u = rng.normal(0.0, k**0.5)
    value = 2 * round((u + k) / 2) - k
    return max(-k, min(k, value))


def sample_binomial_assignment(spec: PolynomialSpec, k: int, rng: RandomSource) -> Assignment:
    if k > EXACT_BINOMIAL_GUARD:
        warnings.warn(
            f"k = {k} exceeds the exact-sampling guard; using rounded-normal approximation",
            RuntimeWarning,
            stacklevel=2,
        )
    return Assignment.integers(k, [sample_binomial_value(k, rng) for _ in range(spec.n_vars)])


_BINOMIAL_CDF_CACHE: dict[int, list[int]] = {}


def _binomial_cdf_table(k: int) -> list[int]:
    # cumulative[c] = sum_{i <= c} C(k, i); a k-bit uniform integer U maps to
    # the smallest c with U < cumulative[c].
    table = _BINOMIAL_CDF_CACHE.get(k)
    if table is None:
        running, table = 0, []
        for c in range(k + 1):
            running += comb(k, c)
            table.append(running)
        # Only memoize small tables; single draws at huge k stay correct.
        if k <= 4096:
            _BINOMIAL_CDF_CACHE[k] = table
    return table


def sample_from_table(table: ProbabilityTable, rng: RandomSource) -> int:
    """Draw a flat outcome index by inverse CDF (first index whose cdf exceeds u)."""
    if table._cdf is None:
        table._cdf = np.cumsum(table.as_floats())
    u = rng.random()
    return int(np.searchsorted(table._cdf, u, side="right"))


def tv_distance(a: ProbabilityTable, b: ProbabilityTable) -> float:
    if (a.radix, a.length) != (b.radix, b.length):
        raise ShapeMismatchError(
            f"shape ({a.radix}, {a.length}) vs ({b.radix}, {b.length})"
        )
    if a.arithmetic == RATIONAL and b.arithmetic == RATIONAL:
        return float(sum(abs(p - q) for p, q in zip(a.probs, b.probs)) / 2)
    return float(np.abs(a.as_floats() - b.as_floats()).sum() / 2.0)
