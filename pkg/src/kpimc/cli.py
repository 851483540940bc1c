"""Command-line front end: ``kpimc generate | fit | coverage``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import RunConfig, apply_overrides, load_config
from .empirical_mc import build_empirical_cdf, default_bounds, write_cdf_csv
from .errors import KpimcError
from .experiment import (
    ScenarioConfig,
    generate_population,
    run_full_comparison,
    write_intervals_csv,
    write_report_csv,
    write_report_json,
)
from .kpi_data import read_dataset_csv, write_dataset_csv
from .mcmc import (
    McmcSettings,
    fit_gaussian_mcmc,
    write_chain_csv,
)
from .rng import derive_stream, substream


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help="master seed (overrides config)")
    parser.add_argument("--config", type=str, default=None,
                        help="JSON run-config file")
    parser.add_argument("--out", type=str, default=None,
                        help="output directory (overrides config)")
    parser.add_argument("--level", type=float, default=None,
                        help="confidence level in (0, 1), default 0.90")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kpimc",
        description="Compare cumulative Monte Carlo and MCMC uncertainty "
                    "estimates for manufacturing KPIs.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write scenario populations as CSV")
    _add_common_flags(gen)
    gen.add_argument("--scenario",
                     choices=("normal", "normal_with_noise", "skew_shift"),
                     default=None,
                     help="generate a single ad-hoc population instead of "
                          "the configured scenarios")
    gen.add_argument("--name", type=str, default=None,
                     help="output name for the ad-hoc population")
    gen.add_argument("--n", type=int, default=10_000)
    gen.add_argument("--mu", type=float, default=10.0)
    gen.add_argument("--sigma", type=float, default=3.0)
    gen.add_argument("--noise-lo", type=float, default=-0.2)
    gen.add_argument("--noise-hi", type=float, default=0.2)
    gen.add_argument("--location", type=float, default=0.85)
    gen.add_argument("--scale", type=float, default=0.12)
    gen.add_argument("--shape", type=float, default=-4.0)

    fit = sub.add_parser("fit", help="fit one method to a value CSV")
    _add_common_flags(fit)
    fit.add_argument("--method", choices=("mc", "mcmc"), required=True)
    fit.add_argument("--input", type=str, required=True,
                     help="single-column CSV with header 'value'")
    fit.add_argument("--lower", type=float, default=None,
                     help="lower CDF bound (mc; default: 5%% range padding)")
    fit.add_argument("--upper", type=float, default=None,
                     help="upper CDF bound (mc)")
    fit.add_argument("--iterations", type=int, default=None)
    fit.add_argument("--burn-in-fraction", type=float, default=None)

    cov = sub.add_parser("coverage", help="run the full comparison suite")
    _add_common_flags(cov)
    cov.add_argument("--emit-intervals", action="store_true",
                     help="also write the per-dataset interval log")

    return parser


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    return apply_overrides(cfg, seed=args.seed, out_dir=args.out,
                           level=args.level)


def _outdir(cfg: RunConfig) -> Path:
    path = Path(cfg.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _adhoc_scenario(args) -> ScenarioConfig:
    if args.scenario == "normal":
        params = {"mu": args.mu, "sigma": args.sigma,
                  "population_size": args.n}
    elif args.scenario == "normal_with_noise":
        params = {"mu": args.mu, "sigma": args.sigma,
                  "lo": args.noise_lo, "hi": args.noise_hi,
                  "population_size": args.n}
    else:
        params = {"location": args.location, "scale": args.scale,
                  "shape": args.shape, "population_size": args.n}
    return ScenarioConfig(name=args.name or args.scenario,
                          generator=args.scenario,
                          generator_params=params,
                          dataset_size=10, dataset_count=1)


def cmd_generate(args) -> int:
    cfg = _load(args)
    out = _outdir(cfg)
    if args.scenario is not None:
        scenarios = [_adhoc_scenario(args)]
    else:
        scenarios = cfg.scenarios
    for idx, sc in enumerate(scenarios):
        # Same stream the coverage run uses for this scenario's population.
        stream = substream(derive_stream(cfg.seed, idx), 0)
        population = generate_population(sc, stream)
        write_dataset_csv(population, out / f"{sc.name}.csv")
        print(f"wrote {out / f'{sc.name}.csv'} ({len(population)} values)")
    return 0


def cmd_fit(args) -> int:
    cfg = _load(args)
    out = _outdir(cfg)
    data = read_dataset_csv(args.input)
    stream = derive_stream(cfg.seed, 0)
    if args.method == "mc":
        if (args.lower is None) != (args.upper is None):
            raise KpimcError("--lower and --upper must be given together")
        if args.lower is None:
            lower, upper = default_bounds(data.values)
        else:
            lower, upper = args.lower, args.upper
        cdf = build_empirical_cdf(data, lower, upper)
        write_cdf_csv(cdf, out / "cdf.csv")
        print(f"wrote {out / 'cdf.csv'} ({cdf.n_observations} observations)")
        return 0
    settings = McmcSettings(
        iterations=args.iterations if args.iterations is not None
        else cfg.mcmc.iterations,
        burn_in_fraction=args.burn_in_fraction
        if args.burn_in_fraction is not None else cfg.mcmc.burn_in_fraction,
        mu_scale=cfg.mcmc.mu_scale,
        sigma_scale=cfg.mcmc.sigma_scale)
    summary, chain = fit_gaussian_mcmc(data, settings, stream)
    write_chain_csv(chain, out / "chain.csv")
    with open(out / "fit_summary.json", "w") as fh:
        json.dump({
            "mu_hat": summary.mu_hat,
            "sigma_hat": summary.sigma_hat,
            "acceptance_rate": summary.acceptance_rate,
            "iterations": settings.iterations,
            "burn_in_count": chain.burn_in_count,
            "n_observations": len(data),
        }, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {out / 'chain.csv'} and {out / 'fit_summary.json'} "
          f"(mu_hat={summary.mu_hat:.4f}, sigma_hat={summary.sigma_hat:.4f})")
    return 0


def cmd_coverage(args) -> int:
    cfg = _load(args)
    out = _outdir(cfg)
    report = run_full_comparison(
        cfg.scenarios, cfg.bootstrap, cfg.seed,
        mcmc_settings=cfg.mcmc, draw_count=cfg.draw_count,
        collect_intervals=args.emit_intervals)
    written: list[Path] = []
    try:
        path = out / "report.csv"
        write_report_csv(report, path)
        written.append(path)
        path = out / "report.json"
        write_report_json(report, path)
        written.append(path)
        if args.emit_intervals:
            path = out / "intervals.csv"
            write_intervals_csv(report, path)
            written.append(path)
    except Exception:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    for path in written:
        print(f"wrote {path}")
    print(f"intervals: {report.interval_total}, "
          f"mcmc/mc fit-time ratio: {report.mcmc_over_mc_ratio:.1f}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"generate": cmd_generate, "fit": cmd_fit,
                "coverage": cmd_coverage}
    try:
        return handlers[args.command](args)
    except KpimcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
