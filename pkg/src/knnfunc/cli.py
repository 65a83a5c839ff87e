"""Command-line front end.

Every subcommand takes an explicit --seed (default 0, echoed in the
output), writes machine-readable JSON or CSV, and is deterministic for a
fixed argv.  Usage errors exit 2 before any output file is touched; data
and runtime errors exit 1.
"""

import argparse
import json
import sys

import numpy as np

SCHEMA_VERSION = 1


def _boundary_config(args):
    from .boundary import BoundaryConfig

    def conv(v):
        return v if v == "auto" else float(v)

    return BoundaryConfig(
        delta=args.delta,
        lipschitz_L=conv(args.lipschitz),
        eps0=conv(args.eps0),
        pk_scale=args.pk_scale,
    )


def _add_common(p):
    p.add_argument("--seed", type=int, default=0, help="base seed (echoed in output)")
    p.add_argument("--output", "-o", default=None, help="output path (default stdout)")
    p.add_argument("--threads", type=int, default=1,
                   help="accepted for interface compatibility; computations "
                        "are vectorized and results are identical for any value")


def _add_estimator(p):
    p.add_argument("--input", required=True, help="CSV of samples")
    p.add_argument("--header", action="store_true", help="skip the first CSV row")
    p.add_argument("--alpha-frac", type=float, default=0.7,
                   help="reference fraction M/T of the split")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--k", type=int, default=None, help="fixed neighbor count")
    group.add_argument("--k-rule", choices=["rate"], default=None,
                       help="rate-matched k = M^(2/(2+d))")
    p.add_argument("--no-boundary-correction", action="store_true")
    p.add_argument("--delta", type=float, default=0.8)
    p.add_argument("--lipschitz", default="auto")
    p.add_argument("--eps0", default="auto")
    p.add_argument("--pk-scale", type=float, default=1.0)
    p.add_argument("--ci-level", type=float, default=0.95)


def _resolve_k(args, M, d):
    from .tuning import rate_matched_k

    if args.k is not None:
        return args.k
    return rate_matched_k(M, d)


def _emit(payload, args, header=None):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            if header:
                fh.write(header)
            fh.write(text + "\n")
    else:
        if header:
            sys.stdout.write(header)
        print(text)


def _load(args):
    from .data import load_csv

    return load_csv(args.input, header=args.header)


def _report_payload(report, args, extra=None):
    payload = {"schema_version": SCHEMA_VERSION, "seed": args.seed}
    payload.update(report.to_dict())
    if extra:
        payload.update(extra)
    return payload


def cmd_generate(args):
    from .inference import generate_dataset

    params = {}
    if args.dist == "beta-uniform":
        params = {"d": args.d, "a": args.a, "b": args.b, "eps": args.eps}
        name = "beta_uniform_mixture"
    elif args.dist == "uniform":
        params = {"d": args.d}
        name = "uniform"
    elif args.dist == "manifold":
        params = {"intrinsic_d": args.intrinsic_d, "ambient_D": args.ambient_D}
        name = "projected_manifold"
    data = generate_dataset(name, args.T, args.seed, params)
    rows = "\n".join(",".join(format(v, ".17g") for v in row) for row in data.points)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(rows + "\n")
    else:
        print(rows)
    return 0


def cmd_density(args):
    from .boundary import detect_boundary
    from .data import split
    from .density import corrected_density, knn_density
    from .knn import build_index

    data = _load(args)
    sp = split(data, args.alpha_frac, args.seed)
    k = _resolve_k(args, sp.n_ref, data.dim)
    ev = sp.eval_points(data)
    index = build_index(sp.ref_points(data))
    interior_flag = np.ones(sp.n_eval, dtype=bool)
    if args.no_boundary_correction:
        dens = knn_density(index, ev, k)
    else:
        labels = detect_boundary(ev, k, sp.n_ref, _boundary_config(args))
        dens = corrected_density(index, ev, k, labels)
        interior_flag[labels.boundary] = False
    header = f"# seed={args.seed} k={k} N={sp.n_eval} M={sp.n_ref} kind={dens.estimator_kind}\n"
    lines = [header.rstrip("\n")]
    for row, val, flag in zip(ev, dens.values, interior_flag):
        coords = ",".join(format(v, ".17g") for v in row)
        lines.append(f"{coords},{val:.17g},{'interior' if flag else 'boundary'}")
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _estimate_common(args, functional_maker, variant):
    from .data import split
    from .functionals import bpi_estimate, bpi_estimate_bc

    data = _load(args)
    sp = split(data, args.alpha_frac, args.seed)
    k = _resolve_k(args, sp.n_ref, data.dim)
    func = functional_maker()
    cfg = _boundary_config(args)
    if variant == "bc":
        report = bpi_estimate_bc(data, sp, func, k, config=cfg, ci_level=args.ci_level)
    else:
        report = bpi_estimate(
            data, sp, func, k,
            boundary_correct=not args.no_boundary_correction,
            config=cfg, ci_level=args.ci_level,
        )
    return report, args


def cmd_entropy(args):
    from .functionals import shannon_functional

    variant = "plain" if args.no_bias_correction else "bc"
    report, args = _estimate_common(args, shannon_functional, variant)
    _emit(_report_payload(report, args, {"functional": "shannon"}), args)
    return 0


def cmd_renyi(args):
    from .data import split
    from .functionals import renyi_entropy

    data = _load(args)
    sp = split(data, args.alpha_frac, args.seed)
    k = _resolve_k(args, sp.n_ref, data.dim)
    report = renyi_entropy(
        data, sp, args.alpha, k, config=_boundary_config(args), ci_level=args.ci_level
    )
    _emit(_report_payload(report, args, {"functional": "renyi_entropy",
                                         "alpha": args.alpha}), args)
    return 0


def cmd_mi(args):
    from .data import split
    from .functionals import mutual_information

    data = _load(args)
    sp = split(data, args.alpha_frac, args.seed)
    k = _resolve_k(args, sp.n_ref, data.dim)
    x_cols = [int(c) for c in args.x_cols.split(",")]
    y_cols = [int(c) for c in args.y_cols.split(",")]
    report = mutual_information(
        data, sp, x_cols, y_cols, k,
        config=_boundary_config(args), ci_level=args.ci_level,
    )
    _emit(_report_payload(report, args, {"functional": "mutual_information",
                                         "x_cols": x_cols, "y_cols": y_cols}), args)
    return 0


def cmd_tune(args):
    from .data import beta_uniform_mixture_density, uniform_density
    from .functionals import renyi_functional, shannon_functional
    from .tuning import constants_oracle, optimal_k, rate_matched_k

    if args.density == "beta-uniform":
        dens = beta_uniform_mixture_density(args.d, args.a, args.b, args.eps)
    else:
        dens = uniform_density(args.d)
    func = shannon_functional() if args.functional == "shannon" else renyi_functional(args.alpha)
    consts = constants_oracle(dens, func, args.n_mc, args.seed)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "seed": args.seed,
        "mode": consts.mode,
        "c1": consts.c1, "c2": consts.c2, "c3": consts.c3,
        "c4": consts.c4, "c5": consts.c5,
        "k_opt": optimal_k(consts.c1 + (consts.c3 or 0.0), consts.c2, args.d, args.M),
        "k_rate_matched": rate_matched_k(args.M, args.d),
        "M": args.M,
    }
    _emit(payload, args)
    return 0


def cmd_experiment(args):
    from .boundary import BoundaryConfig
    from .inference import TrialSpec, monte_carlo, normality_diagnostics

    with open(args.spec, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    bc = raw.pop("boundary_config", None)
    spec = TrialSpec(
        boundary_config=BoundaryConfig(**bc) if bc else BoundaryConfig(),
        **raw,
    )
    results = monte_carlo(spec, args.trials)
    summary = dict(results.summary)
    summary["schema_version"] = SCHEMA_VERSION
    if results.estimates.size >= 20 and np.std(results.estimates) > 0:
        ks, p, _ = normality_diagnostics(results.estimates)
        summary["ks_statistic"] = ks
        summary["ks_p"] = p
    if args.trials_csv:
        with open(args.trials_csv, "w", encoding="utf-8") as fh:
            fh.write("trial,k,estimate\n")
            for t, (k, e) in enumerate(zip(results.ks, results.estimates)):
                fh.write(f"{t},{k},{e:.17g}\n")
    _emit(summary, args)
    return 0


def cmd_dimension(args):
    from .dimension import estimate_dimension

    data = _load(args)
    est = estimate_dimension(
        data, args.k1, args.k2, gamma=args.gamma, variant=args.variant,
        alpha_frac=args.alpha_frac, seed=args.seed,
    )
    payload = {
        "schema_version": SCHEMA_VERSION, "seed": args.seed,
        "d_hat": est.d_hat, "d_rounded": est.d_rounded,
        "alpha_hat": est.alpha_hat, "k1": est.k1, "k2": est.k2,
        "gamma": est.gamma, "variant": est.variant,
        "variance_estimate": est.variance_estimate,
    }
    _emit(payload, args)
    return 0


def cmd_dimension_scan(args):
    from .dimension import anomaly_scan

    data = _load(args)
    results = anomaly_scan(
        data, args.window, args.stride, args.k1, args.k2,
        gamma=args.gamma, alpha_frac=args.alpha_frac, seed=args.seed,
    )
    lines = ["window_start,d_hat,d_rounded"]
    for start, est in results:
        if est is None:
            lines.append(f"{start},,")
        else:
            lines.append(f"{start},{est.d_hat:.17g},{est.d_rounded}")
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_structure(args):
    from .structure import Factorization, compare_models

    data = _load(args)
    with open(args.models, "r", encoding="utf-8") as fh:
        model_spec = json.load(fh)
    models = {
        name: Factorization(tuple(tuple(f) for f in factors), name)
        for name, factors in model_spec["models"].items()
    }
    pairs = model_spec.get("pairs")
    if pairs is None:
        names = sorted(models)
        pairs = [[a, b] for i, a in enumerate(names) for b in names[i + 1 :]]
    out = []
    for a, b in pairs:
        cmp_ = compare_models(
            data, models[a], models[b], args.k,
            budget=args.budget, alpha_frac=args.alpha_frac,
            config=_boundary_config(args), seed=args.seed,
        )
        out.append(cmp_.to_dict())
    _emit({"schema_version": SCHEMA_VERSION, "seed": args.seed,
           "comparisons": out}, args)
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="knnfunc",
        description="k-NN plug-in estimation of entropy, mutual information, "
                    "intrinsic dimension, and factor-graph cross-entropy tests",
    )
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic dataset as CSV")
    g.add_argument("--dist", choices=["beta-uniform", "uniform", "manifold"],
                   required=True)
    g.add_argument("--T", type=int, required=True)
    g.add_argument("--d", type=int, default=3)
    g.add_argument("--a", type=float, default=4.0)
    g.add_argument("--b", type=float, default=4.0)
    g.add_argument("--eps", type=float, default=0.2)
    g.add_argument("--intrinsic-d", type=int, default=2)
    g.add_argument("--ambient-D", type=int, default=3)
    _add_common(g)
    g.set_defaults(fn=cmd_generate)

    dns = sub.add_parser("density", help="density estimates at the eval points")
    _add_estimator(dns)
    _add_common(dns)
    dns.set_defaults(fn=cmd_density)

    ent = sub.add_parser("entropy", help="Shannon entropy estimate")
    _add_estimator(ent)
    ent.add_argument("--no-bias-correction", action="store_true")
    _add_common(ent)
    ent.set_defaults(fn=cmd_entropy)

    ren = sub.add_parser("renyi", help="Renyi entropy estimate")
    _add_estimator(ren)
    ren.add_argument("--alpha", type=float, required=True)
    _add_common(ren)
    ren.set_defaults(fn=cmd_renyi)

    mi = sub.add_parser("mi", help="Shannon mutual information estimate")
    _add_estimator(mi)
    mi.add_argument("--x-cols", required=True, help="comma-separated column indices")
    mi.add_argument("--y-cols", required=True)
    _add_common(mi)
    mi.set_defaults(fn=cmd_mi)

    tn = sub.add_parser("tune", help="oracle theory constants and recommended k")
    tn.add_argument("--density", choices=["beta-uniform", "uniform"], required=True)
    tn.add_argument("--d", type=int, default=3)
    tn.add_argument("--a", type=float, default=4.0)
    tn.add_argument("--b", type=float, default=4.0)
    tn.add_argument("--eps", type=float, default=0.2)
    tn.add_argument("--functional", choices=["shannon", "renyi"], default="shannon")
    tn.add_argument("--alpha", type=float, default=0.5)
    tn.add_argument("--n-mc", type=int, default=200_000)
    tn.add_argument("--M", type=int, required=True)
    _add_common(tn)
    tn.set_defaults(fn=cmd_tune)

    ex = sub.add_parser("experiment", help="Monte Carlo trials from a JSON spec")
    ex.add_argument("--spec", required=True, help="TrialSpec as JSON")
    ex.add_argument("--trials", type=int, required=True)
    ex.add_argument("--trials-csv", default=None, help="per-trial CSV output path")
    _add_common(ex)
    ex.set_defaults(fn=cmd_experiment)

    dm = sub.add_parser("dimension", help="intrinsic dimension estimate")
    dm.add_argument("--input", required=True)
    dm.add_argument("--header", action="store_true")
    dm.add_argument("--k1", type=int, default=25)
    dm.add_argument("--k2", type=int, default=None)
    dm.add_argument("--gamma", type=float, default=1.0)
    dm.add_argument("--variant", choices=["independent", "correlated"],
                    default="correlated")
    dm.add_argument("--alpha-frac", type=float, default=0.7)
    _add_common(dm)
    dm.set_defaults(fn=cmd_dimension)

    ds = sub.add_parser("dimension-scan", help="sliding-window dimension trace")
    ds.add_argument("--input", required=True)
    ds.add_argument("--header", action="store_true")
    ds.add_argument("--window", type=int, required=True)
    ds.add_argument("--stride", type=int, default=1)
    ds.add_argument("--k1", type=int, default=5)
    ds.add_argument("--k2", type=int, default=None)
    ds.add_argument("--gamma", type=float, default=1.0)
    ds.add_argument("--alpha-frac", type=float, default=0.7)
    _add_common(ds)
    ds.set_defaults(fn=cmd_dimension_scan)

    st = sub.add_parser("structure", help="factor-graph cross-entropy comparisons")
    st.add_argument("--input", required=True)
    st.add_argument("--header", action="store_true")
    st.add_argument("--models", required=True,
                    help='JSON: {"models": {name: [[cols], ...]}, "pairs": [[a,b], ...]}')
    st.add_argument("--k", type=int, default=20)
    st.add_argument("--budget", type=int, default=None)
    st.add_argument("--alpha-frac", type=float, default=0.5)
    st.add_argument("--delta", type=float, default=0.8)
    st.add_argument("--lipschitz", default="auto")
    st.add_argument("--eps0", default="auto")
    st.add_argument("--pk-scale", type=float, default=1.0)
    _add_common(st)
    st.set_defaults(fn=cmd_structure)

    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():  # console-script entry point
    raise SystemExit(run())


if __name__ == "__main__":
    main()
