"""Command line front end.

Subcommands: generate, build, analyze, effects, compare, optimize,
surrogate, export. Every command is deterministic given its inputs, flags,
and --seed; stochastic commands require --seed explicitly. Reports are
canonical JSON (see report.py) written to --out or stdout.

Exit codes: 0 success, 2 input validation, 3 precondition not met,
4 internal error.

Budget defaults can be overridden by environment variables (flag beats
env beats default); whatever value applies is echoed into the report's
budgets section with its source.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys

import numpy as np

from . import __version__
from . import compare as compare_mod
from . import effects as effects_mod
from . import exports as exports_mod
from . import metrics as metrics_mod
from . import optima as optima_mod
from . import report as report_mod
from . import search as search_mod
from . import surrogate as surrogate_mod
from . import synthetic as synthetic_mod
from . import transport as transport_mod
from . import walks as walks_mod
from .errors import FitscapeError, PreconditionError, ValidationError
from .landscape import Landscape, load_csv, load_json
from .space import load_space

METRIC_ORDER = ("distribution", "prominent", "optima", "basins", "lon",
                "autocorrelation", "effects", "interactions")
NEEDS_COMPLETE = frozenset(
    {"optima", "basins", "lon", "autocorrelation", "effects", "interactions"}
)

# name -> (env var, default); flags override env, env overrides default
BUDGETS = {
    "walks": ("FITSCAPE_WALKS", walks_mod.DEFAULT_WALK_COUNT),
    "walkLength": ("FITSCAPE_WALK_LENGTH", walks_mod.DEFAULT_WALK_LENGTH),
    "maxLag": ("FITSCAPE_MAX_LAG", walks_mod.DEFAULT_MAX_LAG),
    "lonAttempts": ("FITSCAPE_LON_ATTEMPTS", optima_mod.DEFAULT_LON_ATTEMPTS),
    "perturbationStrength": ("FITSCAPE_PERTURBATION_STRENGTH",
                             optima_mod.DEFAULT_PERTURBATION_STRENGTH),
    "backgroundCap": ("FITSCAPE_BACKGROUND_CAP", effects_mod.DEFAULT_BACKGROUND_CAP),
    "pairCap": ("FITSCAPE_PAIR_CAP", metrics_mod.DEFAULT_PAIR_SAMPLE_CAP),
    "emdCap": ("FITSCAPE_EMD_CAP", transport_mod.DEFAULT_EMD_CAP),
}


def _resolve_budget(name: str, flag_value):
    env_name, default = BUDGETS[name]
    if flag_value is not None:
        return int(flag_value), "flag"
    raw = os.environ.get(env_name)
    if raw is not None:
        try:
            return int(raw), "env"
        except ValueError:
            raise ValidationError(f"{env_name} must be an integer, got {raw!r}") from None
    return int(default), "default"


def _load_landscape(space_path, data_path, fitness_column="fitness") -> Landscape:
    if str(data_path).endswith(".json"):
        return load_json(space_path, data_path, fitness_column)
    return load_csv(space_path, data_path, fitness_column)


def _say(args, message: str) -> None:
    if not getattr(args, "quiet", False):
        print(message, file=sys.stderr)


def _emit_report(args, builder: report_mod.ReportBuilder) -> None:
    document = builder.finish()
    if getattr(args, "out", None):
        report_mod.write_report(document, args.out)
        _say(args, f"report written to {args.out}")
    else:
        sys.stdout.write(report_mod.render(document))


def _stats_dict(stats: metrics_mod.DistributionStats) -> dict:
    return stats.to_dict()


# ---------------------------------------------------------------- sections


def _distribution_section(l: Landscape):
    stats = metrics_mod.fitness_distribution(l)
    return _stats_dict(stats), []


def _prominent_section(l: Landscape, q: float, pair_cap: int, seed: int):
    rep = metrics_mod.prominent_region(l, q=q, pair_sample_cap=pair_cap, seed=seed)
    section = {
        "q": rep.q,
        "memberCount": rep.member_count,
        "pairCount": rep.pair_count,
        "exactPairs": rep.exact_pairs,
        "componentCount": rep.component_count,
        "ksStatistic": rep.ks_statistic,
        "ksP": rep.ks_p,
        "seed": rep.seed,
        "memberDistance": _stats_dict(rep.distance_stats),
    }
    warnings = []
    if not rep.exact_pairs:
        warnings.append((
            "pair_sampling",
            "prominent-region distances use sampled pairs",
            {"pairCount": rep.pair_count},
        ))
    return section, warnings


def _optima_sections(l: Landscape, strategy: str, seed: int):
    rep = optima_mod.assign_basins(l, strategy=strategy, seed=seed)
    optima_section = {
        "count": rep.count,
        "proportion": rep.proportion,
        "neutralPlateauCount": rep.neutral_plateau_count,
        "strategy": strategy,
        "seed": seed,
    }
    sizes = np.array([b.size for b in rep.basins], dtype=np.float64)
    radii = np.array([b.radius for b in rep.basins], dtype=np.float64)
    global_id, _ = l.global_best()
    global_size = next((b.size for b in rep.basins if b.optimum_id == global_id), 0)
    dist_rep = metrics_mod.distance_to_global(l, rep.optima, seed=seed)
    basins_section = {
        "count": len(rep.basins),
        "plateauBucketSize": rep.plateau_bucket_size,
        "strategy": strategy,
        "seed": seed,
        "globalOptimumBasinSize": int(global_size),
        "sizes": _stats_dict(metrics_mod.describe(sizes)) if sizes.shape[0] >= 2 else {
            "count": int(sizes.shape[0]),
            "mean": float(sizes[0]) if sizes.shape[0] else None,
        },
        "radii": _stats_dict(metrics_mod.describe(radii)) if radii.shape[0] >= 2 else {
            "count": int(radii.shape[0]),
            "mean": float(radii[0]) if radii.shape[0] else None,
        },
        "distanceToGlobal": {
            "globalId": dist_rep.global_id,
            "sampled": dist_rep.sampled,
            "stats": _stats_dict(dist_rep.stats) if rep.optima.shape[0] >= 2 else {
                "count": int(rep.optima.shape[0]),
            },
        },
    }
    warnings = []
    if rep.plateau_bucket_size:
        warnings.append((
            "plateau_bucket",
            "some configs drain to neutral plateaus, not strict optima",
            {"plateauBucketSize": rep.plateau_bucket_size},
        ))
    if dist_rep.sampled:
        warnings.append((
            "distance_sampling",
            "distance-to-global used a seeded subsample of optima",
            {},
        ))
    return optima_section, basins_section, warnings


def _lon_section(l: Landscape, perturbation: int, attempts: int, strategy: str, seed: int):
    lon = optima_mod.build_lon(
        l, perturbation_strength=perturbation, attempts=attempts,
        strategy=strategy, seed=seed,
    )
    n_vertices = len(lon.vertices)
    section = {
        "vertexCount": n_vertices,
        "edgeCount": len(lon.edges),
        "perturbationStrength": lon.perturbation_strength,
        "attempts": lon.attempts,
        "strategy": lon.strategy,
        "seed": lon.seed,
        "meanOutDegree": len(lon.edges) / n_vertices if n_vertices else 0.0,
    }
    return section, lon, []


def _autocorrelation_section(l: Landscape, walk_count: int, walk_length: int,
                             max_lag: int, seed: int):
    rep = walks_mod.autocorrelation(
        l, walk_count=walk_count, walk_length=walk_length, max_lag=max_lag, seed=seed,
    )
    section = {
        "lags": list(rep.lags),
        "rho": list(rep.rho),
        "walkCount": rep.walk_count,
        "walkLength": rep.walk_length,
        "seed": rep.seed,
    }
    return section, []


def _effect_dict(eff: effects_mod.MutationEffect) -> dict:
    return {
        "option": eff.option,
        "fromLevel": eff.from_level,
        "toLevel": eff.to_level,
        "fromLabel": eff.from_label,
        "toLabel": eff.to_label,
        "backgroundCount": eff.background_count,
        "fracBeneficial": eff.frac_beneficial,
        "fracDetrimental": eff.frac_detrimental,
        "fracNeutral": eff.frac_neutral,
        "meanDelta": eff.mean_delta,
        "stdevDelta": eff.stdev_delta,
        "histogramCounts": list(eff.histogram_counts),
        "histogramRange": list(effects_mod.HIST_RANGE),
    }


def _effects_section(l: Landscape, options, background_cap: int, seed: int):
    imp = effects_mod.importance(l, background_cap=background_cap, seed=seed)
    if options:
        indices = [effects_mod._resolve_option(l.space, name) for name in options]
    else:
        indices = list(range(l.space.n_options))
    per_option = []
    for o in indices:
        effs = effects_mod.mutation_effects(
            l, o, background_cap=background_cap, seed=seed,
        )
        per_option.append({
            "name": l.space.options[o].name,
            "importance": imp.values[o],
            "pValue": imp.p_values[o],
            "significant": imp.significant[o],
            "transitions": [_effect_dict(e) for e in effs],
        })
    section = {
        "alpha": imp.alpha,
        "test": imp.test,
        "backgroundCap": background_cap,
        "seed": seed,
        "options": per_option,
    }
    return section, []


def _interactions_section(l: Landscape, background_cap: int, seed: int):
    mat = effects_mod.pairwise_interactions(l, background_cap=background_cap, seed=seed)
    entries = [{
        "i": e.i,
        "j": e.j,
        "mean": e.mean,
        "stdev": e.stdev,
        "fracPositive": e.frac_positive,
        "fracNegative": e.frac_negative,
        "fracZero": e.frac_zero,
        "sampleCount": e.sample_count,
        "pValue": e.p_value,
        "significant": e.significant,
    } for e in sorted(mat.entries, key=lambda e: (e.i, e.j))]
    section = {
        "alpha": mat.alpha,
        "test": mat.test,
        "backgroundCap": background_cap,
        "seed": seed,
        "optionNames": list(mat.option_names),
        "entries": entries,
    }
    return section, []


# ---------------------------------------------------------------- commands


def cmd_generate(args) -> int:
    if args.model == "nk":
        if args.k is None:
            raise ValidationError("nk model needs --k")
        spec = synthetic_mod.NKSpec(
            n=args.n, k=args.k, neighbor_model=args.neighbor_model, seed=args.seed,
        )
        landscape = synthetic_mod.generate_nk(spec)
    else:
        weights = None
        if args.weights:
            try:
                weights = tuple(float(w) for w in args.weights.split(","))
            except ValueError:
                raise ValidationError("--weights must be comma-separated numbers") from None
        landscape = synthetic_mod.generate_additive(args.n, weights=weights, seed=args.seed)
    landscape.space.save(args.out_space)
    landscape.write_csv(args.out_data)
    _say(args, f"wrote {args.out_space} and {args.out_data} "
               f"({landscape.n_known} configs)")
    return 0


def cmd_build(args) -> int:
    landscape = _load_landscape(args.space, args.data, args.fitness_column)
    landscape.write_csv(args.out)
    builder = report_mod.ReportBuilder("build", None)
    builder.add_input("space", args.space)
    builder.add_input("data", args.data)
    meta = landscape.source
    builder.add_section("build", {
        "rows": meta.row_count,
        "duplicates": meta.duplicate_count,
        "distinctConfigs": landscape.n_known,
        "cardinality": landscape.space.cardinality,
        "complete": landscape.complete,
        "canonicalOutput": str(args.out),
    })
    if meta.duplicate_count:
        builder.add_warning(
            "duplicate_rows",
            "duplicate config rows were averaged",
            {"duplicates": meta.duplicate_count},
        )
    document = builder.finish()
    if args.report:
        report_mod.write_report(document, args.report)
        _say(args, f"report written to {args.report}")
    else:
        sys.stdout.write(report_mod.render(document))
    return 0


def _parse_metrics(raw: str | None):
    if not raw:
        return list(METRIC_ORDER)
    wanted = [m.strip() for m in raw.split(",") if m.strip()]
    unknown = sorted(set(wanted) - set(METRIC_ORDER))
    if unknown:
        raise ValidationError(
            f"unknown metrics {unknown}; choose from {list(METRIC_ORDER)}"
        )
    return [m for m in METRIC_ORDER if m in wanted]


def cmd_analyze(args) -> int:
    landscape = _load_landscape(args.space, args.data, args.fitness_column)
    selected = _parse_metrics(args.metrics)
    if not landscape.complete:
        blocked = [m for m in selected if m in NEEDS_COMPLETE]
        if blocked:
            known = landscape.n_known
            card = landscape.space.cardinality
            raise PreconditionError("; ".join(
                f"{m} requires a complete landscape ({known}/{card} configs known)"
                for m in blocked
            ))
    builder = report_mod.ReportBuilder("analyze", args.seed)
    builder.add_input("space", args.space)
    builder.add_input("data", args.data)
    builder.add_budget("threads", args.threads, "flag" if args.threads != 1 else "default")

    pair_cap, src = _resolve_budget("pairCap", args.pair_cap)
    builder.add_budget("pairCap", pair_cap, src)
    walk_count, src = _resolve_budget("walks", args.walks)
    builder.add_budget("walks", walk_count, src)
    walk_length, src = _resolve_budget("walkLength", args.walk_length)
    builder.add_budget("walkLength", walk_length, src)
    max_lag, src = _resolve_budget("maxLag", args.max_lag)
    builder.add_budget("maxLag", max_lag, src)
    lon_attempts, src = _resolve_budget("lonAttempts", args.lon_attempts)
    builder.add_budget("lonAttempts", lon_attempts, src)
    perturbation, src = _resolve_budget("perturbationStrength", args.perturbation_strength)
    builder.add_budget("perturbationStrength", perturbation, src)
    background_cap, src = _resolve_budget("backgroundCap", args.background_cap)
    builder.add_budget("backgroundCap", background_cap, src)

    def attach(name, result):
        section, warnings = result
        builder.add_section(name, section)
        for code, message, context in warnings:
            builder.add_warning(code, message, context)

    for metric in selected:
        try:
            if metric == "distribution":
                attach(metric, _distribution_section(landscape))
            elif metric == "prominent":
                attach(metric, _prominent_section(landscape, args.q, pair_cap, args.seed))
            elif metric == "optima":
                opt_sec, basin_sec, warnings = _optima_sections(
                    landscape, args.strategy, args.seed,
                )
                builder.add_section("optima", opt_sec)
                if "basins" in selected:
                    builder.add_section("basins", basin_sec)
                    for code, message, context in warnings:
                        builder.add_warning(code, message, context)
            elif metric == "basins":
                if "optima" not in selected:
                    opt_sec, basin_sec, warnings = _optima_sections(
                        landscape, args.strategy, args.seed,
                    )
                    builder.add_section("basins", basin_sec)
                    for code, message, context in warnings:
                        builder.add_warning(code, message, context)
            elif metric == "lon":
                section, _, warnings = _lon_section(
                    landscape, perturbation, lon_attempts, args.strategy, args.seed,
                )
                attach(metric, (section, warnings))
            elif metric == "autocorrelation":
                attach(metric, _autocorrelation_section(
                    landscape, walk_count, walk_length, max_lag, args.seed,
                ))
            elif metric == "effects":
                attach(metric, _effects_section(landscape, None, background_cap, args.seed))
            elif metric == "interactions":
                attach(metric, _interactions_section(landscape, background_cap, args.seed))
        except PreconditionError as exc:
            raise PreconditionError(f"{metric}: {exc}") from None
    _emit_report(args, builder)
    return 0


def cmd_effects(args) -> int:
    landscape = _load_landscape(args.space, args.data, args.fitness_column)
    background_cap, src = _resolve_budget("backgroundCap", args.background_cap)
    builder = report_mod.ReportBuilder("effects", args.seed)
    builder.add_input("space", args.space)
    builder.add_input("data", args.data)
    builder.add_budget("backgroundCap", background_cap, src)
    section, warnings = _effects_section(
        landscape, args.option or None, background_cap, args.seed,
    )
    builder.add_section("effects", section)
    for code, message, context in warnings:
        builder.add_warning(code, message, context)
    _emit_report(args, builder)
    return 0


_SYMMETRIC_PAIR_FIELDS = (
    "pearson", "spearman", "jaccard_top_q", "jaccard_local_optima",
    "emd_local_optima", "global_opt_distance", "importance_spearman",
    "interaction_spearman",
)
_DIRECTED_PAIR_FIELDS = (
    ("shake_up_ab", "shake_up_ba", "shakeUp"),
    ("percentile_shift_ab", "percentile_shift_ba", "percentileShift"),
    ("global_opt_rank_shift_ab", "global_opt_rank_shift_ba", "globalOptRankShift"),
)


def _camel(name: str) -> str:
    head, *rest = name.split("_")
    return head + "".join(part.capitalize() for part in rest)


def cmd_compare(args) -> int:
    if len(args.data) < 2:
        raise ValidationError("compare needs at least 2 data files")
    landscapes = [_load_landscape(args.space, d, args.fitness_column) for d in args.data]
    emd_cap, emd_src = _resolve_budget("emdCap", args.sample_cap)
    background_cap, bg_src = _resolve_budget("backgroundCap", args.background_cap)
    builder = report_mod.ReportBuilder("compare", args.seed)
    builder.add_input("space", args.space)
    for idx, path in enumerate(args.data):
        builder.add_input(f"data{idx}", path)
    builder.add_budget("emdCap", emd_cap, emd_src)
    builder.add_budget("backgroundCap", background_cap, bg_src)
    n = len(landscapes)
    names = [str(d) for d in args.data]
    pairs = []
    matrices = {_camel(f): [[None] * n for _ in range(n)] for f in _SYMMETRIC_PAIR_FIELDS}
    for _, _, label in _DIRECTED_PAIR_FIELDS:
        matrices[label] = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rep = compare_mod.compare_landscapes(
                landscapes[i], landscapes[j], q=args.q,
                sample_cap=emd_cap, background_cap=background_cap, seed=args.seed,
            )
            entry = {"a": names[i], "b": names[j]}
            for field in dataclasses.fields(rep):
                entry[_camel(field.name)] = getattr(rep, field.name)
            pairs.append(entry)
            for field in _SYMMETRIC_PAIR_FIELDS:
                value = getattr(rep, field)
                matrices[_camel(field)][i][j] = value
                matrices[_camel(field)][j][i] = value
            for ab_field, ba_field, label in _DIRECTED_PAIR_FIELDS:
                matrices[label][i][j] = getattr(rep, ab_field)
                matrices[label][j][i] = getattr(rep, ba_field)
            if rep.emd_approximate:
                builder.add_warning(
                    "emd_subsampled",
                    "optima sets were subsampled for EMD",
                    {"a": names[i], "b": names[j], "cap": emd_cap},
                )
    builder.add_section("compare", {
        "landscapes": names,
        "q": args.q,
        "rankPolicy": compare_mod.RANK_POLICY,
        "pairs": pairs,
        "matrix": matrices,
    })
    _emit_report(args, builder)
    return 0


def _run_seeds(seed: int, runs: int) -> list[int]:
    state = np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF).generate_state(runs, dtype=np.uint64)
    return [int(s) for s in state]


def _write_trajectory_csv(path, trajectory: search_mod.Trajectory) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("iteration,configId,oracleFitness,trueFitness\n")
        true = trajectory.true_fitness
        for idx in range(len(trajectory)):
            tv = "" if true is None or math.isnan(true[idx]) else repr(float(true[idx]))
            fh.write(f"{int(trajectory.iterations[idx])},"
                     f"{int(trajectory.config_ids[idx])},"
                     f"{float(trajectory.oracle_fitness[idx])!r},{tv}\n")


def cmd_optimize(args) -> int:
    landscape = _load_landscape(args.space, args.data, args.fitness_column)
    space = landscape.space
    if args.oracle == "true":
        oracle_source = landscape
    elif args.oracle.startswith("surrogate:"):
        if args.algo == "hc":
            raise ValidationError("hill climbing runs on the true landscape only")
        oracle_source = surrogate_mod.load_predictions(args.oracle.split(":", 1)[1])
    else:
        raise ValidationError("--oracle must be 'true' or 'surrogate:FILE.csv'")
    warm_source = None
    if args.warm_start_from:
        warm_source = _load_landscape(args.space, args.warm_start_from, args.fitness_column)
    builder = report_mod.ReportBuilder("optimize", args.seed)
    builder.add_input("space", args.space)
    builder.add_input("data", args.data)
    if args.warm_start_from:
        builder.add_input("warmStartFrom", args.warm_start_from)
    if args.oracle.startswith("surrogate:"):
        builder.add_input("surrogate", args.oracle.split(":", 1)[1])
    run_seeds = _run_seeds(args.seed, args.runs)
    results = []
    trajectories = []
    for run, run_seed in enumerate(run_seeds):
        warm = None
        if warm_source is not None:
            warm = search_mod.warm_start_pick(warm_source, landscape, args.warm_q, run_seed)
        if args.algo == "hc":
            if warm is not None:
                start = warm.config_id
            elif args.initial is not None:
                start = args.initial
            else:
                rng = np.random.default_rng(np.random.SeedSequence(run_seed))
                start = int(rng.integers(0, space.cardinality))
            trajectory = search_mod.hill_climb(landscape, start, args.strategy, seed=run_seed)
        else:
            if warm is not None:
                initial, initial_config = search_mod.GIVEN, warm.config_id
            elif args.initial is not None:
                initial, initial_config = search_mod.GIVEN, args.initial
            else:
                initial, initial_config = search_mod.RANDOM, None
            params = search_mod.SAParams(
                t0=args.t0, alpha=args.alpha, iterations=args.iterations,
                seed=run_seed, initial=initial, initial_config=initial_config,
            )
            trajectory = search_mod.simulated_annealing(
                oracle_source, space, params,
                true_landscape=landscape,
                normalize_delta=not args.raw_delta,
                log_every=args.log_every,
            )
        best_id, best_fitness = trajectory.best_visited(space.maximize)
        row = {
            "run": run,
            "seed": run_seed,
            "steps": len(trajectory) - 1,
            "finalId": trajectory.final_id,
            "bestId": best_id,
            "bestFitness": best_fitness,
            "terminationReason": trajectory.termination_reason,
        }
        if warm is not None:
            row["warmStart"] = {
                "configId": warm.config_id,
                "targetPercentile": warm.target_percentile,
            }
        results.append(row)
        trajectories.append(trajectory)
        if args.trajectories_out:
            path = f"{args.trajectories_out}.run{run:03d}.csv"
            _write_trajectory_csv(path, trajectory)
    summary = search_mod.final_fitness_summary(trajectories, space.maximize)
    section = {
        "algo": args.algo,
        "strategy": args.strategy,
        "oracle": args.oracle,
        "runs": args.runs,
        "iterations": args.iterations if args.algo == "sa" else None,
        "t0": args.t0 if args.algo == "sa" else None,
        "alpha": args.alpha if args.algo == "sa" else None,
        "normalizeDelta": (not args.raw_delta) if args.algo == "sa" else None,
        "results": results,
        "finalFitness": summary,
    }
    builder.add_section("optimize", section)
    if args.log_every > 1:
        builder.add_warning(
            "decimated_trajectory",
            "trajectories were logged every log_every iterations",
            {"logEvery": args.log_every},
        )
    _emit_report(args, builder)
    return 0


def cmd_surrogate(args) -> int:
    landscape = _load_landscape(args.space, args.data, args.fitness_column)
    builder = report_mod.ReportBuilder("surrogate", args.seed)
    builder.add_input("space", args.space)
    builder.add_input("data", args.data)
    if args.model == "tree":
        model = surrogate_mod.train_tree(
            landscape, sample_fraction=args.sample_fraction,
            max_depth=args.max_depth, seed=args.seed,
        )
        holdout = np.setdiff1d(landscape.known_ids(), model.train_ids)
        section = {
            "model": "tree",
            "maxDepth": model.max_depth,
            "depth": model.depth,
            "leafCount": model.leaf_count(),
            "trainSize": model.train_size,
            "sampleFraction": args.sample_fraction,
            "seed": model.seed,
        }
        if holdout.shape[0] >= 2:
            section["holdoutR2"] = surrogate_mod.evaluate(model, landscape, holdout)
            section["holdoutSize"] = int(holdout.shape[0])
        if args.recall_k:
            section["topRecall"] = {
                "k": args.recall_k,
                "n": args.recall_n or args.recall_k,
                "recall": surrogate_mod.top_n_recall(
                    model, landscape, args.recall_k, args.recall_n or args.recall_k,
                ),
            }
    else:
        lam = None if args.lasso_lambda is None else float(args.lasso_lambda)
        model = surrogate_mod.lasso_poly(
            landscape, degree_cap=args.degree_cap, lam=lam,
            max_iter=args.max_iter, tol=args.tol,
            column_bound=args.column_bound, row_cap=args.row_cap, seed=args.seed,
        )
        section = {
            "model": "lasso",
            "degreeCap": model.degree_cap,
            "lambda": model.lam,
            "lambdaSource": model.lam_source,
            "nonZeroFractionPerDegree": {
                str(d): v for d, v in model.nonzero_fraction_per_degree.items()
            },
            "converged": model.converged,
            "iterations": model.iterations,
            "finalMaxChange": model.final_max_change,
            "seed": args.seed,
        }
        if not model.converged:
            builder.add_warning(
                "lasso_nonconverged",
                "coordinate descent hit the iteration cap before tolerance",
                {"finalMaxChange": model.final_max_change, "maxIter": args.max_iter},
            )
    if args.predictions_out:
        ids = landscape.known_ids()
        surrogate_mod.write_predictions(
            args.predictions_out, ids, model.predict(landscape.space, ids),
        )
        section["predictionsOut"] = str(args.predictions_out)
    builder.add_section("surrogate", section)
    _emit_report(args, builder)
    return 0


def cmd_export(args) -> int:
    landscape = _load_landscape(args.space, args.data, args.fitness_column)
    if args.what == "landscape":
        exports_mod.export_landscape(
            landscape, args.out, fmt=args.format, size_guard=args.size_guard,
        )
    else:
        if args.seed is None:
            raise ValidationError("LON export is stochastic: --seed is required")
        lon_attempts, _ = _resolve_budget("lonAttempts", args.lon_attempts)
        perturbation, _ = _resolve_budget("perturbationStrength", args.perturbation_strength)
        lon = optima_mod.build_lon(
            landscape, perturbation_strength=perturbation,
            attempts=lon_attempts, strategy=args.strategy, seed=args.seed,
        )
        exports_mod.export_lon(lon, args.out, fmt=args.format)
    _say(args, f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------- parser


def _add_common(parser, seed_required: bool, with_fitness_column: bool = True) -> None:
    parser.add_argument("--seed", type=int, required=seed_required,
                        help="RNG seed; required because the command is stochastic"
                        if seed_required else "RNG seed")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker bound for data-parallel stages; results never depend on it")
    parser.add_argument("--quiet", action="store_true", help="suppress progress messages")
    if with_fitness_column:
        parser.add_argument("--fitness-column", default="fitness",
                            help="name of the fitness column in data files")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fitscape",
        description="Fitness-landscape analysis of configuration spaces",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="synthesize a benchmark landscape")
    p.add_argument("--model", choices=("nk", "additive"), required=True)
    p.add_argument("--n", type=int, required=True, help="number of binary options")
    p.add_argument("--k", type=int, help="interaction degree (nk model)")
    p.add_argument("--neighbor-model", choices=(synthetic_mod.ADJACENT, synthetic_mod.RANDOM),
                   default=synthetic_mod.ADJACENT)
    p.add_argument("--weights", help="comma-separated additive weights")
    p.add_argument("--out-space", required=True)
    p.add_argument("--out-data", required=True)
    _add_common(p, seed_required=True, with_fitness_column=False)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("build", help="validate and canonicalize a measurement file")
    p.add_argument("--space", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="canonical CSV output")
    p.add_argument("--report", help="report path (stdout when omitted)")
    _add_common(p, seed_required=False)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("analyze", help="run the analysis pipeline")
    p.add_argument("--space", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--metrics", help="comma-separated subset of "
                   + ",".join(METRIC_ORDER))
    p.add_argument("--out", help="report path (stdout when omitted)")
    p.add_argument("--q", type=float, default=metrics_mod.DEFAULT_PROMINENT_Q,
                   help="prominent-region fraction")
    p.add_argument("--strategy", choices=(optima_mod.BEST, optima_mod.FIRST),
                   default=optima_mod.BEST)
    p.add_argument("--walks", type=int, help="random walks for autocorrelation")
    p.add_argument("--walk-length", type=int)
    p.add_argument("--max-lag", type=int)
    p.add_argument("--lon-attempts", type=int)
    p.add_argument("--perturbation-strength", type=int)
    p.add_argument("--background-cap", type=int)
    p.add_argument("--pair-cap", type=int)
    _add_common(p, seed_required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("effects", help="mutation effects and option importance")
    p.add_argument("--space", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--option", action="append",
                   help="option name to detail (repeatable; default all)")
    p.add_argument("--background-cap", type=int)
    p.add_argument("--out")
    _add_common(p, seed_required=True)
    p.set_defaults(func=cmd_effects)

    p = sub.add_parser("compare", help="pairwise landscape similarity")
    p.add_argument("--space", required=True)
    p.add_argument("--data", nargs="+", required=True)
    p.add_argument("--q", type=float, default=compare_mod.DEFAULT_TOP_Q)
    p.add_argument("--sample-cap", type=int, help="EMD point cap per side")
    p.add_argument("--background-cap", type=int)
    p.add_argument("--out")
    _add_common(p, seed_required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("optimize", help="hill climbing / simulated annealing")
    p.add_argument("--space", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--algo", choices=("hc", "sa"), required=True)
    p.add_argument("--strategy", choices=(optima_mod.BEST, optima_mod.FIRST),
                   default=optima_mod.BEST)
    p.add_argument("--oracle", default="true",
                   help="'true' or 'surrogate:predictions.csv'")
    p.add_argument("--warm-start-from", help="data file to warm start from")
    p.add_argument("--warm-q", type=float, default=0.01)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--iterations", type=int, default=search_mod.DEFAULT_ITERATIONS)
    p.add_argument("--t0", type=float, default=search_mod.DEFAULT_T0)
    p.add_argument("--alpha", type=float, default=search_mod.DEFAULT_ALPHA)
    p.add_argument("--initial", type=int, help="start ConfigId (default: seeded random)")
    p.add_argument("--raw-delta", action="store_true",
                   help="acceptance deltas on raw fitness instead of normalized")
    p.add_argument("--log-every", type=int, default=1)
    p.add_argument("--trajectories-out", help="CSV path prefix, one file per run")
    p.add_argument("--out")
    _add_common(p, seed_required=True)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("surrogate", help="fit a CART or LASSO surrogate")
    p.add_argument("--space", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--model", choices=("tree", "lasso"), required=True)
    p.add_argument("--sample-fraction", type=float,
                   default=surrogate_mod.DEFAULT_TRAIN_FRACTION)
    p.add_argument("--max-depth", type=int, default=6)
    p.add_argument("--recall-k", type=int)
    p.add_argument("--recall-n", type=int)
    p.add_argument("--degree-cap", type=int, default=surrogate_mod.DEFAULT_DEGREE_CAP)
    p.add_argument("--lambda", dest="lasso_lambda",
                   help="LASSO penalty (default: 5-fold CV)")
    p.add_argument("--max-iter", type=int, default=surrogate_mod.DEFAULT_MAX_ITER)
    p.add_argument("--tol", type=float, default=surrogate_mod.DEFAULT_TOL)
    p.add_argument("--column-bound", type=int, default=surrogate_mod.DEFAULT_COLUMN_BOUND)
    p.add_argument("--row-cap", type=int, default=surrogate_mod.DEFAULT_LASSO_ROW_CAP)
    p.add_argument("--predictions-out", help="write (ConfigId, prediction) CSV")
    p.add_argument("--out")
    _add_common(p, seed_required=True)
    p.set_defaults(func=cmd_surrogate)

    p = sub.add_parser("export", help="write GraphML/DOT graphs")
    p.add_argument("--space", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--what", choices=("landscape", "lon"), default="landscape")
    p.add_argument("--format", choices=exports_mod.FORMATS, default="graphml")
    p.add_argument("--out", required=True)
    p.add_argument("--size-guard", type=int, default=exports_mod.DEFAULT_SIZE_GUARD)
    p.add_argument("--strategy", choices=(optima_mod.BEST, optima_mod.FIRST),
                   default=optima_mod.BEST)
    p.add_argument("--lon-attempts", type=int)
    p.add_argument("--perturbation-strength", type=int)
    _add_common(p, seed_required=False)
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.func(args) or 0
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return 3
    except FitscapeError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4
    except Exception as exc:  # anything unplanned is an internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
