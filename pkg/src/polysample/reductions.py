"""Sampler-to-estimator reductions and the multiplicative lift.

Given (noisy, perturbed) sampler access to one of the target distributions,
these drivers reconstruct squared polynomial values at random inputs and
measure how often the additive error bound is violated. The schedule
``beta = eps*delta/16, gamma = eps*delta/8`` is the one under which the
failure rate is guaranteed to stay below delta.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParityError, ShapeMismatchError
from .evaluate import evaluate_values_fast
from .families import Assignment, PolynomialSpec
from .rng import RandomSource, as_random_source
from .samplers import SamplerHandle, make_perturbed_sampler
from .tables import exact_table_roots, exact_table_squashed, orbit_weight, sample_binomial_value

ROOTS = "roots"
SQUASHED = "squashed"


def guarantee_schedule(epsilon: float, delta: float) -> tuple[float, float]:
    """(beta, gamma) pair under which the additive guarantee holds."""
    return epsilon * delta / 16.0, epsilon * delta / 8.0


@dataclass(frozen=True)
class TrialRecord:
    outcome: tuple[int, ...]
    estimate: float
    truth: float
    error: float


@dataclass
class ReductionReport:
    kind: str
    spec: dict
    mode_param: int  # ell for roots, k for squashed
    epsilon: float
    delta: float
    beta: float
    gamma: float
    trials: int
    seed: int
    bound_scale: int  # variance of Q under the drawing distribution
    realized_tv: float
    failure_count: int = 0
    records: list[TrialRecord] = field(default_factory=list)

    @property
    def additive_bound(self) -> float:
        return self.epsilon * self.bound_scale

    @property
    def empirical_failure_rate(self) -> float:
        return self.failure_count / self.trials if self.trials else 0.0

    def to_json_dict(self, include_records: bool = True) -> dict:
        doc = {
            "kind": self.kind,
            "spec": self.spec,
            "mode_param": self.mode_param,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "beta": self.beta,
            "gamma": self.gamma,
            "trials": self.trials,
            "seed": self.seed,
            "bound_scale": self.bound_scale,
            "additive_bound": self.additive_bound,
            "realized_tv": self.realized_tv,
            "failure_count": self.failure_count,
            "empirical_failure_rate": self.empirical_failure_rate,
        }
        if include_records:
            doc["records"] = [
                [list(r.outcome), r.estimate, r.truth, r.error] for r in self.records
            ]
        return doc


def additive_estimator(
    sampler: SamplerHandle, spec: PolynomialSpec, ell: int, gamma: float, rng: RandomSource
):
    """One reduction trial: uniform outcome, scaled probability estimate.

    Returns (exponent tuple, estimate of |Q|^2 at the encoded point).
    """
    _check_shape(sampler, ell, spec.n_vars)
    digits = tuple(int(v) for v in rng.integers(0, ell, size=spec.n_vars))
    flat = _flat_index(digits, ell)
    scale = ell**spec.n_vars * spec.num_monomials
    estimate = sampler.estimate_probability(flat, gamma, rng) * scale
    return digits, estimate


def squashed_additive_estimator(
    sampler: SamplerHandle, spec: PolynomialSpec, k: int, gamma: float, rng: RandomSource
):
    """One squashed trial: blockwise-binomial outcome, orbit-normalized estimate.

    Returns (integer value tuple, estimate of Q^2 at that point).
    """
    _check_shape(sampler, k + 1, spec.n_vars)
    values = tuple(sample_binomial_value(k, rng) for _ in range(spec.n_vars))
    if any((v - k) % 2 for v in values):
        raise ParityError("drawn point violates the parity constraint")
    classes = tuple((v + k) // 2 for v in values)
    flat = _flat_index(classes, k + 1)
    scale = 2 ** (k * spec.n_vars) * k**spec.degree * spec.num_monomials
    estimate = sampler.estimate_probability(flat, gamma, rng) * scale / orbit_weight(values, k)
    return values, estimate


def run_roots_reduction(
    spec: PolynomialSpec,
    ell: int,
    epsilon: float,
    delta: float,
    trials: int,
    seed: int | RandomSource,
    beta: float | None = None,
    gamma: float | None = None,
) -> ReductionReport:
    if beta is None or gamma is None:
        sched_beta, sched_gamma = guarantee_schedule(epsilon, delta)
        beta = sched_beta if beta is None else beta
        gamma = sched_gamma if gamma is None else gamma
    rng = as_random_source(seed)
    target = exact_table_roots(spec, ell)
    sampler = make_perturbed_sampler(target, beta)
    report = ReductionReport(
        ROOTS, spec.describe(), ell, epsilon, delta, beta, gamma,
        trials, rng.seed, spec.num_monomials, sampler.realized_tv,
    )
    truths = {}
    for _ in range(trials):
        outcome, estimate = additive_estimator(sampler, spec, ell, gamma, rng)
        truth = truths.get(outcome)
        if truth is None:
            truth = _roots_truth(spec, ell, outcome)
            truths[outcome] = truth
        _record(report, outcome, estimate, truth)
    return report


def run_squashed_reduction(
    spec: PolynomialSpec,
    k: int,
    epsilon: float,
    delta: float,
    trials: int,
    seed: int | RandomSource,
    beta: float | None = None,
    gamma: float | None = None,
) -> ReductionReport:
    if beta is None or gamma is None:
        sched_beta, sched_gamma = guarantee_schedule(epsilon, delta)
        beta = sched_beta if beta is None else beta
        gamma = sched_gamma if gamma is None else gamma
    rng = as_random_source(seed)
    target = exact_table_squashed(spec, k)
    sampler = make_perturbed_sampler(target, beta)
    report = ReductionReport(
        SQUASHED, spec.describe(), k, epsilon, delta, beta, gamma,
        trials, rng.seed, k**spec.degree * spec.num_monomials, sampler.realized_tv,
    )
    truths = {}
    for _ in range(trials):
        values, estimate = squashed_additive_estimator(sampler, spec, k, gamma, rng)
        truth = truths.get(values)
        if truth is None:
            q = evaluate_values_fast(spec, values)
            truth = q * q
            truths[values] = truth
        _record(report, values, estimate, truth)
    return report


def _record(report: ReductionReport, outcome, estimate, truth) -> None:
    error = abs(estimate - truth)
    if error > report.additive_bound:
        report.failure_count += 1
    report.records.append(TrialRecord(outcome, float(estimate), float(truth), float(error)))


def _roots_truth(spec: PolynomialSpec, ell: int, digits: tuple[int, ...]):
    q = evaluate_values_fast(spec, Assignment.roots(ell, digits).numeric_values())
    return q * q if ell == 2 else abs(q) ** 2


def _check_shape(sampler: SamplerHandle, radix: int, length: int) -> None:
    if (sampler.table.radix, sampler.table.length) != (radix, length):
        raise ShapeMismatchError(
            f"sampler table shape ({sampler.table.radix}, {sampler.table.length}) "
            f"does not match ({radix}, {length})"
        )


def _flat_index(digits: tuple[int, ...], radix: int) -> int:
    flat = 0
    for d in digits:
        flat = flat * radix + d
    return flat


# ---------------------------------------------------------------------------
# multiplicative lift


@dataclass
class MultiplicativeLiftReport:
    """Additive trials reread through the multiplicative criterion.

    Trials with truth exactly 0 are excluded from the multiplicative count
    (the criterion is vacuous there) and reported separately. The
    anti-concentration rate Pr[truth < Var / p] is what the union bound
    consumes when turning additive into multiplicative guarantees.
    """

    epsilon_mult: float
    delta_mult: float
    p_value: float
    size_n: int
    nonzero_trials: int
    zero_truth_trials: int
    failure_count: int
    anticoncentration_count: int

    @property
    def failure_rate(self) -> float:
        return self.failure_count / self.nonzero_trials if self.nonzero_trials else 0.0

    @property
    def anticoncentration_rate(self) -> float:
        total = self.nonzero_trials + self.zero_truth_trials
        return self.anticoncentration_count / total if total else 0.0

    def to_json_dict(self) -> dict:
        return {
            "epsilon_mult": self.epsilon_mult,
            "delta_mult": self.delta_mult,
            "p_value": self.p_value,
            "size_n": self.size_n,
            "nonzero_trials": self.nonzero_trials,
            "zero_truth_trials": self.zero_truth_trials,
            "failure_count": self.failure_count,
            "failure_rate": self.failure_rate,
            "anticoncentration_count": self.anticoncentration_count,
            "anticoncentration_rate": self.anticoncentration_rate,
        }


def multiplicative_lift(report: ReductionReport, p_poly) -> MultiplicativeLiftReport:
    """Reclassify an additive report at eps' = eps * p(n, 1/delta), delta' = 2*delta."""
    if not report.records:
        raise ValueError("report carries no per-trial records to lift")
    size_n = _characteristic_size(report.spec)
    p_value = float(p_poly(size_n, 1.0 / report.delta))
    if p_value <= 0:
        raise ValueError("p(n, 1/delta) must be positive")
    eps_mult = report.epsilon * p_value
    cutoff = report.bound_scale / p_value
    lifted = MultiplicativeLiftReport(
        eps_mult, 2.0 * report.delta, p_value, size_n, 0, 0, 0, 0
    )
    for record in report.records:
        if record.truth < cutoff:
            lifted.anticoncentration_count += 1
        if record.truth == 0:
            lifted.zero_truth_trials += 1
            continue
        lifted.nonzero_trials += 1
        if record.error > eps_mult * record.truth:
            lifted.failure_count += 1
    return lifted


def _characteristic_size(spec_doc: dict) -> int:
    return int(spec_doc["n"])
