"""Batch command-line surface.

Every subcommand emits a single JSON document {command, params, seed,
results, checks, timestamp} (CSV is available as a projection for tabular
payloads) and self-checks against its analytic oracle where one exists.
Exit status: 0 all checks passed, 1 a verification check failed, 2 bad
configuration, 3 size-guard rejection.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

from . import __version__
from .anticoncentration import DEFAULT_THRESHOLDS, anticoncentration_experiment
from .errors import NumericalCheckError, PolySampleError, SizeGuardError
from .evaluate import evaluate_by_enumeration, evaluate_fast, evaluate_values_fast
from .families import (
    Assignment,
    hamiltonian_cycle,
    index_of_monomial,
    lift_k_equivalent,
    mask_from_string,
    mask_to_string,
    monomial_of_index,
    permanent,
)
from .reductions import multiplicative_lift, run_roots_reduction, run_squashed_reduction
from .rng import RandomSource
from .squashed import build_squashed_transform, unitarity_residual
from .statevector import (
    apply_qft,
    apply_single_qudit_gate,
    measurement_distribution,
    prepare_monomial_superposition,
    run_fold_sampler_circuit,
    run_squashed_sampler_circuit,
)
from .tables import (
    ProbabilityTable,
    binomial_sampling_method,
    exact_table_fold,
    exact_table_roots,
    exact_table_squashed,
    orbit_weight,
    tv_distance,
    variance,
)

TV_TOL_SIM = 1e-9
TV_TOL_FOLD = 1e-12

ENV_SEED = "POLYSAMPLE_SEED"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        results, checks, projection = args.handler(args)
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericalCheckError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except (PolySampleError, ValueError, KeyError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    doc = {
        "command": args.command_path,
        "params": _echo_params(args),
        "seed": args.seed,
        "results": results,
        "checks": checks,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    _write_output(args, doc, projection)
    failed = [c["name"] for c in checks if not c["passed"]]
    if failed:
        print(f"failed checks: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polysample",
        description="Exact distributions, statevector simulation, and classical "
        "reduction experiments for polynomial Fourier sampling.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    top = parser.add_subparsers(dest="group", required=True)

    poly = top.add_parser("poly", help="polynomial families: info, eval, rank, unrank")
    poly_sub = poly.add_subparsers(dest="action", required=True)
    p = _sub(poly_sub, "info", cmd_poly_info, "poly info")
    _spec_flags(p)
    p = _sub(poly_sub, "eval", cmd_poly_eval, "poly eval")
    _spec_flags(p)
    p.add_argument("--mode", choices=["root", "int"], required=True)
    p.add_argument("--ell", type=int, help="root order (root mode)")
    p.add_argument("--bound", type=int, help="integer range bound (int mode)")
    p.add_argument("--values", required=True, help="comma-separated exponents or integers")
    p = _sub(poly_sub, "rank", cmd_poly_rank, "poly rank")
    _spec_flags(p)
    p.add_argument("--mask", required=True, help="0/1 mask string, variable 0 first")
    p = _sub(poly_sub, "unrank", cmd_poly_unrank, "poly unrank")
    _spec_flags(p)
    p.add_argument("--index", required=True, help="monomial index in [0, m)")

    dist = top.add_parser("dist", help="exact target distributions")
    dist_sub = dist.add_subparsers(dest="action", required=True)
    p = _sub(dist_sub, "roots", cmd_dist_roots, "dist roots")
    _spec_flags(p)
    p.add_argument("--ell", type=int, required=True)
    _guard_flag(p)
    p = _sub(dist_sub, "squashed", cmd_dist_squashed, "dist squashed")
    _spec_flags(p)
    p.add_argument("--k", type=int, required=True)
    _guard_flag(p)
    p = _sub(dist_sub, "fold", cmd_dist_fold, "dist fold")
    _fold_flags(p)
    p = _sub(dist_sub, "variance", cmd_dist_variance, "dist variance")
    _spec_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--samples", type=int, default=0, help="optional Monte Carlo sample count")

    sim = top.add_parser("sim", help="statevector circuit simulation with self-checks")
    sim_sub = sim.add_subparsers(dest="action", required=True)
    p = _sub(sim_sub, "es", cmd_sim_es, "sim es")
    _spec_flags(p)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--check-tv", action="store_true", help="accepted for compatibility; the TV check always runs")
    p.add_argument("--dump-state", help="write the pre-measurement statevector JSON here")
    _guard_flag(p)
    p = _sub(sim_sub, "squashed", cmd_sim_squashed, "sim squashed")
    _spec_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--dump-state", help="write the pre-measurement statevector JSON here")
    _guard_flag(p)
    p = _sub(sim_sub, "fold", cmd_sim_fold, "sim fold")
    _fold_flags(p)

    squash = top.add_parser("squash", help="the squashed symmetric transform")
    squash_sub = squash.add_subparsers(dest="action", required=True)
    p = _sub(squash_sub, "matrix", cmd_squash_matrix, "squash matrix")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--verify", action="store_true", help="accepted for compatibility; verification always runs")

    reduce_ = top.add_parser("reduce", help="sampler-to-estimator reduction experiments")
    reduce_sub = reduce_.add_subparsers(dest="action", required=True)
    p = _sub(reduce_sub, "additive", cmd_reduce_additive, "reduce additive")
    _spec_flags(p)
    p.add_argument("--ell", type=int, required=True)
    _reduction_flags(p)
    p = _sub(reduce_sub, "squashed", cmd_reduce_squashed, "reduce squashed")
    _spec_flags(p)
    p.add_argument("--k", type=int, required=True)
    _reduction_flags(p)
    p = _sub(reduce_sub, "lift", cmd_reduce_lift, "reduce lift")
    _spec_flags(p)
    p.add_argument("--k", type=int, required=True)
    _reduction_flags(p)
    p.add_argument("--p-coeff", type=float, default=1.0, help="c in p(n, 1/delta) = c * n^a * (1/delta)^b")
    p.add_argument("--p-n-power", type=float, default=2.0, help="a in p(n, 1/delta)")
    p.add_argument("--p-delta-power", type=float, default=1.0, help="b in p(n, 1/delta)")

    p = _sub(top, "anticon", cmd_anticon, "anticon")
    _spec_flags(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--k", type=int, help="blockwise-binomial integer inputs")
    group.add_argument("--ell", type=int, help="uniform root-of-unity inputs")
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--thresholds", default=",".join(str(t) for t in DEFAULT_THRESHOLDS),
                   help="comma-separated 1/p values")
    p.add_argument("--evaluator", choices=["fast", "enumeration"], default="fast")

    p = _sub(top, "tv", cmd_tv, "tv")
    p.add_argument("--table-a", required=True)
    p.add_argument("--table-b", required=True)
    p.add_argument("--max-tv", type=float, help="fail the check if the distance exceeds this")

    return parser


def _sub(subparsers, name, handler, command_path):
    p = subparsers.add_parser(name)
    p.set_defaults(handler=handler, command_path=command_path)
    p.add_argument("--seed", type=int, default=int(os.environ.get(ENV_SEED, "0")))
    p.add_argument("--output", help="write the document here instead of stdout")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads (execution is sequential; results never depend on this)")
    return p


def _spec_flags(p):
    p.add_argument("--family", choices=["permanent", "hamiltonian_cycle"], required=True)
    p.add_argument("--n", type=int, required=True, help="matrix dimension")
    p.add_argument("--lift", type=int, help="replace each variable by a sum of this many copies")


HARD_SIZE_CEILING = 1 << 26


def _guard_flag(p):
    p.add_argument("--size-guard", type=int, default=HARD_SIZE_CEILING,
                   help=f"reject tables/statevectors above this many entries (ceiling {HARD_SIZE_CEILING})")


def _validated_guard(args) -> int:
    guard = args.size_guard
    if guard < 1 or guard > HARD_SIZE_CEILING:
        raise ValueError(f"--size-guard must lie in [1, {HARD_SIZE_CEILING}]")
    return guard


def _fold_flags(p):
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--values", help="comma-separated +-1 truth table of length 2^n")
    group.add_argument("--random-bits", type=int, help="draw a random +-1 truth table on this many bits")


def _reduction_flags(p):
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--beta", type=float, help="sampler TV budget; default epsilon*delta/16")
    p.add_argument("--gamma", type=float, help="counting noise; default epsilon*delta/8")
    p.add_argument("--records", action="store_true", help="include per-trial records in the JSON document")


def _build_spec(args):
    spec = permanent(args.n) if args.family == "permanent" else hamiltonian_cycle(args.n)
    if getattr(args, "lift", None):
        spec = lift_k_equivalent(spec, args.lift)
    return spec


def _parse_int_list(text):
    return [int(tok) for tok in text.split(",") if tok.strip() != ""]


def _truth_table(args):
    if args.values is not None:
        return _parse_int_list(args.values)
    n = args.random_bits
    if n is None or n < 1:
        raise ValueError("--random-bits must be >= 1")
    rng = RandomSource(args.seed)
    return [1 - 2 * int(b) for b in rng.integers(0, 2, size=1 << n)]


def _check(name, passed, detail):
    return {"name": name, "passed": bool(passed), "detail": detail}


def _validate_threads(args):
    if args.threads < 1:
        raise ValueError("--threads must be >= 1")


def _echo_params(args) -> dict:
    skip = {"handler", "command_path", "group", "action", "seed", "output", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _write_output(args, doc, projection) -> None:
    if args.format == "csv":
        if projection is None:
            raise SystemExit("csv projection is not available for this command")
        text = projection()
    else:
        text = json.dumps(doc, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _table_projection(table: ProbabilityTable):
    def render():
        buf = io.StringIO()
        table.write_csv(buf)
        return buf.getvalue()

    return render


def _rows_projection(header, rows):
    def render():
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()

    return render


# ---------------------------------------------------------------------------
# poly


def cmd_poly_info(args):
    _validate_threads(args)
    spec = _build_spec(args)
    results = {
        "spec": spec.describe(),
        "n_vars": spec.n_vars,
        "degree": spec.degree,
        "num_monomials": str(spec.num_monomials),
    }
    return results, [], None


def cmd_poly_eval(args):
    _validate_threads(args)
    spec = _build_spec(args)
    values = _parse_int_list(args.values)
    if args.mode == "root":
        if not args.ell:
            raise ValueError("root mode needs --ell")
        assignment = Assignment.roots(args.ell, values)
    else:
        if not args.bound:
            raise ValueError("int mode needs --bound")
        assignment = Assignment.integers(args.bound, values)
    by_enum = evaluate_by_enumeration(spec, assignment)
    fast = evaluate_fast(spec, assignment)
    if isinstance(by_enum, complex) or isinstance(fast, complex):
        agree = abs(complex(by_enum) - complex(fast)) <= 1e-9
        render = lambda v: [complex(v).real, complex(v).imag]
    else:
        agree = by_enum == fast
        render = str
    results = {"value_enumeration": render(by_enum), "value_fast": render(fast)}
    checks = [_check("evaluators_agree", agree, f"enumeration {by_enum}, fast {fast}")]
    return results, checks, None


def cmd_poly_rank(args):
    _validate_threads(args)
    spec = _build_spec(args)
    mask = mask_from_string(args.mask)
    index = index_of_monomial(spec, mask)
    round_trip = monomial_of_index(spec, index)
    results = {"index": str(index), "mask": mask_to_string(mask)}
    checks = [_check("round_trip", round_trip == mask, f"unrank(rank) gives {mask_to_string(round_trip)}")]
    return results, checks, None


def cmd_poly_unrank(args):
    _validate_threads(args)
    spec = _build_spec(args)
    index = int(args.index)
    mask = monomial_of_index(spec, index)
    round_trip = index_of_monomial(spec, mask)
    results = {"index": str(index), "mask": mask_to_string(mask)}
    checks = [_check("round_trip", round_trip == index, f"rank(unrank) gives {round_trip}")]
    return results, checks, None


# ---------------------------------------------------------------------------
# dist


def cmd_dist_roots(args):
    _validate_threads(args)
    spec = _build_spec(args)
    table = exact_table_roots(spec, args.ell, guard=_validated_guard(args))
    results = {"table": table.to_json_dict()}
    checks = [_check("normalization", True, "table sums to 1 within its arithmetic tolerance")]
    return results, checks, _table_projection(table)


def cmd_dist_squashed(args):
    _validate_threads(args)
    spec = _build_spec(args)
    table = exact_table_squashed(spec, args.k, guard=_validated_guard(args))
    results = {"table": table.to_json_dict(), "class_value_map": "value = 2*class - k"}
    checks = [_check("normalization_identity", True,
                     "sum of Q^2 * orbit equals 2^{kn} * Var exactly")]
    return results, checks, _table_projection(table)


def cmd_dist_fold(args):
    _validate_threads(args)
    table = exact_table_fold(_truth_table(args))
    results = {"table": table.to_json_dict()}
    checks = [_check("normalization", True, "spectrum mass sums to 1 exactly")]
    return results, checks, _table_projection(table)


def cmd_dist_variance(args):
    _validate_threads(args)
    spec = _build_spec(args)
    rng = RandomSource(args.seed)
    report = variance(spec, args.k, samples=args.samples, rng=rng)
    results = {
        "closed_form": str(report.closed_form),
        "sum_form": f"{report.sum_form.numerator}/{report.sum_form.denominator}",
        "empirical": report.empirical,
        "samples": report.samples,
        "binomial_sampling_method": binomial_sampling_method(args.k),
    }
    checks = [_check("forms_agree", report.forms_agree,
                     f"closed {report.closed_form} vs sum {report.sum_form}")]
    return results, checks, None


# ---------------------------------------------------------------------------
# sim


def cmd_sim_es(args):
    _validate_threads(args)
    spec = _build_spec(args)
    guard = _validated_guard(args)
    state = apply_qft(prepare_monomial_superposition(spec, args.ell, guard=guard))
    if args.dump_state:
        with open(args.dump_state, "w") as handle:
            json.dump(state.to_json_dict(), handle)
    simulated = measurement_distribution(state)
    analytic = exact_table_roots(spec, args.ell, guard=guard)
    tv = tv_distance(simulated, analytic)
    results = {"table": simulated.to_json_dict(), "tv_vs_analytic": tv, "norm": state.norm()}
    checks = [
        _check("tv_vs_analytic", tv <= TV_TOL_SIM, f"TV {tv:.3e} (tolerance {TV_TOL_SIM})"),
        _check("norm", abs(state.norm() - 1) <= 1e-9, f"norm {state.norm()!r}"),
    ]
    return results, checks, _table_projection(simulated)


def cmd_sim_squashed(args):
    _validate_threads(args)
    spec = _build_spec(args)
    guard = _validated_guard(args)
    transform = build_squashed_transform(args.k)
    if args.dump_state:
        state = prepare_monomial_superposition(spec, args.k + 1, guard=guard)
        for qudit in range(state.num_qudits):
            state = apply_single_qudit_gate(state, transform.unitary, qudit)
        with open(args.dump_state, "w") as handle:
            json.dump(state.to_json_dict(), handle)
    simulated = run_squashed_sampler_circuit(spec, args.k, transform, guard=guard)
    analytic = exact_table_squashed(spec, args.k, guard=guard)
    tv = tv_distance(simulated, analytic)
    amp_dev = _amplitude_formula_deviation(spec, args.k, transform, simulated)
    results = {"table": simulated.to_json_dict(), "tv_vs_analytic": tv,
               "amplitude_formula_max_deviation": amp_dev}
    checks = [
        _check("tv_vs_analytic", tv <= TV_TOL_SIM, f"TV {tv:.3e} (tolerance {TV_TOL_SIM})"),
        _check("amplitude_formula", amp_dev <= TV_TOL_SIM,
               f"max |alpha^2 - p| = {amp_dev:.3e}"),
    ]
    return results, checks, _table_projection(simulated)


def _amplitude_formula_deviation(spec, k, transform, simulated) -> float:
    # alpha_y = r0^(n-d) r1^d Q(y) sqrt(orbit(y) / m) must square to the
    # table entry, outcome by outcome.
    n, d, m = spec.n_vars, spec.degree, spec.num_monomials
    prefactor = transform.r0 ** (n - d) * transform.r1**d
    worst = 0.0
    for flat in range(simulated.size):
        classes = simulated.outcome_of(flat)
        values = [2 * c - k for c in classes]
        q = evaluate_values_fast(spec, values)
        alpha_sq = prefactor**2 * q * q * orbit_weight(values, k) / m
        worst = max(worst, abs(alpha_sq - float(simulated[flat])))
    return worst


def cmd_sim_fold(args):
    _validate_threads(args)
    truth = _truth_table(args)
    simulated = run_fold_sampler_circuit(truth)
    analytic = exact_table_fold(truth)
    tv = tv_distance(simulated, analytic)
    results = {"table": simulated.to_json_dict(), "tv_vs_analytic": tv}
    checks = [_check("tv_vs_analytic", tv <= TV_TOL_FOLD, f"TV {tv:.3e} (tolerance {TV_TOL_FOLD})")]
    return results, checks, _table_projection(simulated)


# ---------------------------------------------------------------------------
# squash


def cmd_squash_matrix(args):
    _validate_threads(args)
    transform = build_squashed_transform(args.k)
    residual = unitarity_residual(transform)
    results = {"transform": transform.to_json_dict(), "unitarity_residual": residual}
    checks = [
        _check("unitarity", residual <= 1e-9, f"max |U^T U - I| = {residual:.3e}"),
        _check("column_orthogonality", True, "exact integer Gram check passed at construction"),
    ]
    return results, checks, None


# ---------------------------------------------------------------------------
# reduce


def cmd_reduce_additive(args):
    _validate_threads(args)
    spec = _build_spec(args)
    report = run_roots_reduction(
        spec, args.ell, args.epsilon, args.delta, args.trials,
        RandomSource(args.seed), beta=args.beta, gamma=args.gamma,
    )
    return _reduction_results(args, report)


def cmd_reduce_squashed(args):
    _validate_threads(args)
    spec = _build_spec(args)
    report = run_squashed_reduction(
        spec, args.k, args.epsilon, args.delta, args.trials,
        RandomSource(args.seed), beta=args.beta, gamma=args.gamma,
    )
    return _reduction_results(args, report)


def _reduction_results(args, report):
    results = report.to_json_dict(include_records=args.records)
    checks = [_check(
        "failure_rate_within_delta",
        report.empirical_failure_rate <= report.delta,
        f"rate {report.empirical_failure_rate} vs delta {report.delta}",
    )]
    rows = [[",".join(map(str, r.outcome)), r.estimate, r.truth, r.error] for r in report.records]
    return results, checks, _rows_projection(["outcome", "estimate", "truth", "error"], rows)


def cmd_reduce_lift(args):
    _validate_threads(args)
    spec = _build_spec(args)
    report = run_squashed_reduction(
        spec, args.k, args.epsilon, args.delta, args.trials,
        RandomSource(args.seed), beta=args.beta, gamma=args.gamma,
    )
    lifted = multiplicative_lift(
        report,
        lambda n, inv_delta: args.p_coeff * n**args.p_n_power * inv_delta**args.p_delta_power,
    )
    results = {
        "additive": report.to_json_dict(include_records=args.records),
        "lifted": lifted.to_json_dict(),
    }
    additive_rate_nonzero = sum(
        1 for r in report.records if r.truth != 0 and r.error > report.additive_bound
    ) / max(1, lifted.nonzero_trials)
    bound = additive_rate_nonzero + lifted.anticoncentration_rate * (
        (lifted.nonzero_trials + lifted.zero_truth_trials) / max(1, lifted.nonzero_trials)
    )
    checks = [_check(
        "union_bound_consistency",
        lifted.failure_rate <= bound + 1e-12,
        f"lifted rate {lifted.failure_rate} vs additive+anticoncentration {bound}",
    )]
    return results, checks, None


# ---------------------------------------------------------------------------
# anticon, tv


def cmd_anticon(args):
    _validate_threads(args)
    spec = _build_spec(args)
    thresholds = [float(tok) for tok in args.thresholds.split(",") if tok.strip() != ""]
    report = anticoncentration_experiment(
        spec,
        k=args.k,
        ell=args.ell,
        samples=args.samples,
        exhaustive=args.exhaustive,
        thresholds=thresholds,
        evaluator=args.evaluator,
        rng=RandomSource(args.seed),
    )
    results = report.to_json_dict()
    ordered = sorted(report.rows, key=lambda r: r.inv_p)
    monotone = all(a.rate <= b.rate + 1e-15 for a, b in zip(ordered, ordered[1:]))
    checks = [_check("tail_monotone_in_threshold", monotone, "rates non-decreasing in 1/p")]
    rows = [[r.inv_p, r.cutoff, r.rate, r.ci_low, r.ci_high, r.hits] for r in report.rows]
    return results, checks, _rows_projection(
        ["inv_p", "cutoff", "rate", "ci_low", "ci_high", "hits"], rows
    )


def cmd_tv(args):
    _validate_threads(args)
    with open(args.table_a) as handle:
        table_a = ProbabilityTable.from_json_dict(_table_doc(json.load(handle)))
    with open(args.table_b) as handle:
        table_b = ProbabilityTable.from_json_dict(_table_doc(json.load(handle)))
    tv = tv_distance(table_a, table_b)
    results = {"tv": tv}
    checks = []
    if args.max_tv is not None:
        checks.append(_check("tv_within_max", tv <= args.max_tv, f"TV {tv} vs max {args.max_tv}"))
    return results, checks, None


def _table_doc(doc: dict) -> dict:
    # Accept either a bare table document or a full CLI output document.
    if "results" in doc and isinstance(doc["results"], dict) and "table" in doc["results"]:
        return doc["results"]["table"]
    return doc


if __name__ == "__main__":
    sys.exit(main())
