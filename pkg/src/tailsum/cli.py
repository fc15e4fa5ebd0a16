"""Command-line surface.

Subcommands: estimate, tables, covariance, mc, oracle.  Every report embeds
a run manifest (command, resolved parameters, seed, version, timestamp) so
results can be reproduced from the output file alone.

Exit codes: 0 success, 2 I/O failure, 3 unparseable input data,
4 invalid parameters, 5 runtime or numeric failure.
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

from . import __version__
from .distributions import Pareto, PowerEndpoint, StretchedTail
from .errors import DomainError, ParseError
from .estimators import (
    TailWindow,
    log_transform,
    spacings,
    sum_product_ladder,
)
from .limits import CovarianceModel, DomainKind, lil_envelope
from .montecarlo import (
    ExperimentConfig,
    QuadratureConfig,
    limit_covariance_quadrature,
    run_experiment,
)
from .combinatorics import NumberTable

EXIT_OK = 0
EXIT_IO = 2
EXIT_PARSE = 3
EXIT_PARAMS = 4
EXIT_RUNTIME = 5

_FAMILY_ALIASES = {
    "type1": "type_i",
    "type2": "type_ii",
    "type3": "type_iii",
    "beta": "type_i",
    "mu0": "type_ii",
    "mu1": "type_iii",
}


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility record embedded in every output."""

    command: str
    parameters: dict
    seed: int | None
    version: str
    timestamp: str

    @classmethod
    def create(cls, command, parameters, seed=None):
        return cls(
            command=command,
            parameters=parameters,
            seed=seed,
            version=__version__,
            timestamp=datetime.now(timezone.utc).isoformat(),
        )

    def to_dict(self):
        return {
            "command": self.command,
            "parameters": self.parameters,
            "seed": self.seed,
            "version": self.version,
            "timestamp": self.timestamp,
        }


class _Parser(argparse.ArgumentParser):
    # invalid flags/values are parameter errors, not the default exit 2
    def error(self, message):
        self.exit(EXIT_PARAMS, f"{self.prog}: error: {message}\n")


def _write_text(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _json_report(payload):
    return json.dumps(payload, indent=2) + "\n"


def read_observations(path):
    """One observation per line; an optional non-numeric first line is
    treated as a header; commas and whitespace both separate fields."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    values = []
    for lineno, line in enumerate(lines, start=1):
        text = line.replace(",", " ").strip()
        if not text:
            continue
        fields = text.split()
        row = []
        for tok in fields:
            try:
                row.append(float(tok))
            except ValueError:
                if lineno == 1 and not values:
                    row = None  # header line
                    break
                raise ParseError(f"{path}:{lineno}: cannot parse {tok!r} as a number")
        if row:
            values.extend(row)
    if len(values) < 2:
        raise ParseError(f"{path}: need at least two observations")
    return values


def _domain_from_args(args):
    kind = args.domain
    if kind == "weibull":
        if args.gamma is None:
            raise DomainError("--domain weibull requires --gamma")
        return DomainKind.weibull(args.gamma)
    if kind == "frechet":
        return DomainKind.frechet(args.gamma)
    return DomainKind.gumbel()


def _dist_from_args(args):
    if args.dist == "pareto":
        return Pareto(args.gamma if args.gamma is not None else 1.0)
    if args.dist == "power":
        return PowerEndpoint(args.gamma if args.gamma is not None else 1.0, args.x0)
    if args.dist == "stretched":
        return StretchedTail()
    raise DomainError(f"unknown distribution {args.dist!r}")


def cmd_estimate(args):
    try:
        raw = read_observations(args.input)
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        sample = log_transform(raw)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    window = TailWindow(sample.n, args.k, args.l)
    domain = _domain_from_args(args)
    ladder = sum_product_ladder(sample, window, args.pmax)
    gaps = spacings(sample, window)
    statistics = []
    for p in range(1, args.pmax + 1):
        t = ladder[p - 1]
        entry = {
            "p": p,
            "statistic": t,
            "index_estimate": (t ** (-1.0 / p)) if t > 0 else None,
            "lil_envelope": lil_envelope(p, domain, args.k, sample.n) if args.k >= 3 else None,
        }
        statistics.append(entry)
    manifest = RunManifest.create(
        "estimate",
        {
            "input": args.input,
            "k": args.k,
            "l": args.l,
            "pmax": args.pmax,
            "domain": args.domain,
            "gamma": args.gamma,
            "format": args.format,
        },
    )
    if args.format == "json":
        payload = {
            "manifest": manifest.to_dict(),
            "n": sample.n,
            "below_support": sample.below_support,
            "degenerate_window": gaps.is_degenerate,
            "results": statistics,
        }
        _write_text(args.output, _json_report(payload))
    else:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["p", "statistic", "index_estimate", "lil_envelope"])
        for entry in statistics:
            writer.writerow(
                [
                    entry["p"],
                    repr(entry["statistic"]),
                    "" if entry["index_estimate"] is None else repr(entry["index_estimate"]),
                    "" if entry["lil_envelope"] is None else repr(entry["lil_envelope"]),
                ]
            )
        buf.write(f"# manifest: {json.dumps(manifest.to_dict())}\n")
        _write_text(args.output, buf.getvalue())
    return EXIT_OK


def cmd_tables(args):
    family = _FAMILY_ALIASES.get(args.family, args.family)
    tau = args.tau
    if family in ("type_ii", "type_iii") and tau is None:
        raise DomainError(f"--family {args.family} requires --tau")
    table = NumberTable.build(family, args.vmax, args.dmax, tau=tau)
    manifest = RunManifest.create(
        "tables",
        {"family": family, "tau": tau, "vmax": args.vmax, "dmax": table.dmax},
    )
    buf = io.StringIO()
    writer = csv.writer(buf)
    col_label = "r" if family == "type_i" else "delta"
    writer.writerow([f"v\\{col_label}"] + list(range(1, table.dmax + 1)))
    for v in range(table.vmax + 1):
        writer.writerow([v] + table.row(v))
    buf.write(f"# manifest: {json.dumps(manifest.to_dict())}\n")
    _write_text(args.output, buf.getvalue())
    return EXIT_OK


def cmd_covariance(args):
    domain = _domain_from_args(args)
    if not (1 <= args.pmax <= 8):
        raise DomainError(f"--pmax must lie in [1, 8], got {args.pmax}")
    model = CovarianceModel.build(domain, args.pmax)
    matrix = model.reduced_matrix() if args.reduced else model.sigma
    manifest = RunManifest.create(
        "covariance",
        {
            "domain": args.domain,
            "gamma": args.gamma,
            "pmax": args.pmax,
            "reduced": bool(args.reduced),
            "format": args.format,
        },
    )
    if args.format == "json":
        payload = {
            "manifest": manifest.to_dict(),
            "matrix": [list(row) for row in matrix],
            "shift_factors": list(model.e),
        }
        _write_text(args.output, _json_report(payload))
    else:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["r\\rho"] + list(range(1, args.pmax + 1)))
        for r in range(1, args.pmax + 1):
            writer.writerow([r] + [repr(float(x)) for x in matrix[r - 1]])
        buf.write(f"# manifest: {json.dumps(manifest.to_dict())}\n")
        _write_text(args.output, buf.getvalue())
    return EXIT_OK


def cmd_mc(args):
    dist = _dist_from_args(args)
    config = ExperimentConfig(
        dist=dist,
        n=args.n,
        k=args.k,
        l=args.l,
        pmax=args.pmax,
        reps=args.reps,
        seed=args.seed,
        centering="fixed" if args.reduced else "random",
    )
    report = run_experiment(config, workers=args.workers)
    manifest = RunManifest.create(
        "mc",
        {
            "dist": args.dist,
            "gamma": args.gamma,
            "x0": args.x0,
            "n": args.n,
            "k": args.k,
            "l": args.l,
            "pmax": args.pmax,
            "reps": args.reps,
            "reduced": bool(args.reduced),
        },
        seed=args.seed,
    )
    payload = {"manifest": manifest.to_dict(), "report": report.to_dict()}
    _write_text(args.output, _json_report(payload))
    return EXIT_OK


def cmd_oracle(args):
    config = QuadratureConfig(grid=args.grid, truncation=args.truncation)
    value = limit_covariance_quadrature(args.r, args.rho, config)
    coarse_grid = args.grid // 2
    if coarse_grid % 2:
        coarse_grid += 1
    diagnostics = None
    if coarse_grid >= 64:
        coarse = limit_covariance_quadrature(
            args.r, args.rho, QuadratureConfig(grid=coarse_grid, truncation=args.truncation)
        )
        diagnostics = {
            "half_grid": coarse_grid,
            "half_grid_value": coarse,
            "refinement_difference": value - coarse,
        }
    manifest = RunManifest.create(
        "oracle",
        {"r": args.r, "rho": args.rho, "grid": args.grid, "truncation": args.truncation},
    )
    payload = {
        "manifest": manifest.to_dict(),
        "value": value,
        "convergence": diagnostics,
    }
    _write_text(args.output, _json_report(payload))
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="tailsum", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="sum-product statistics of a data file")
    p_est.add_argument("--input", required=True, help="one observation per line")
    p_est.add_argument("--k", type=int, required=True, help="window upper count")
    p_est.add_argument("--l", type=int, default=0, help="window lower trim (default 0)")
    p_est.add_argument("--pmax", type=int, default=4, help="largest order (default 4)")
    p_est.add_argument(
        "--domain",
        choices=["frechet", "weibull", "gumbel"],
        default="frechet",
        help="domain assumed for the fluctuation envelopes",
    )
    p_est.add_argument("--gamma", type=float, default=None, help="domain shape parameter")
    p_est.add_argument("--format", choices=["json", "csv"], default="json")
    p_est.add_argument("--output", default=None, help="output path (default stdout)")
    p_est.set_defaults(func=cmd_estimate)

    p_tab = sub.add_parser("tables", help="emit a number-family table as CSV")
    p_tab.add_argument(
        "--family",
        required=True,
        choices=sorted(set(_FAMILY_ALIASES) | {"type_i", "type_ii", "type_iii"}),
    )
    p_tab.add_argument("--tau", type=int, default=None)
    p_tab.add_argument("--vmax", type=int, default=10)
    p_tab.add_argument("--dmax", type=int, default=10)
    p_tab.add_argument("--output", default=None)
    p_tab.set_defaults(func=cmd_tables)

    p_cov = sub.add_parser("covariance", help="limit covariance matrix")
    p_cov.add_argument("--domain", choices=["frechet", "weibull", "gumbel"], required=True)
    p_cov.add_argument("--gamma", type=float, default=None)
    p_cov.add_argument("--pmax", type=int, default=4)
    p_cov.add_argument("--reduced", action="store_true", help="deterministic-centering model")
    p_cov.add_argument("--format", choices=["json", "csv"], default="json")
    p_cov.add_argument("--output", default=None)
    p_cov.set_defaults(func=cmd_covariance)

    p_mc = sub.add_parser("mc", help="Monte Carlo verification run")
    p_mc.add_argument("--dist", choices=["pareto", "power", "stretched"], required=True)
    p_mc.add_argument("--gamma", type=float, default=None)
    p_mc.add_argument("--x0", type=float, default=2.0)
    p_mc.add_argument("--n", type=int, required=True)
    p_mc.add_argument("--k", type=int, required=True)
    p_mc.add_argument("--l", type=int, default=0)
    p_mc.add_argument("--pmax", type=int, default=4)
    p_mc.add_argument("--reps", type=int, required=True)
    p_mc.add_argument("--seed", type=int, required=True)
    p_mc.add_argument(
        "--reduced",
        action="store_true",
        help="deterministic-threshold centering (reduced model targets)",
    )
    p_mc.add_argument("--workers", type=int, default=1)
    p_mc.add_argument("--output", default=None)
    p_mc.set_defaults(func=cmd_mc)

    p_or = sub.add_parser("oracle", help="quadrature oracle for the unit covariance")
    p_or.add_argument("r", type=int)
    p_or.add_argument("rho", type=int)
    p_or.add_argument("--grid", type=int, default=1024)
    p_or.add_argument("--truncation", type=float, default=60.0)
    p_or.add_argument("--output", default=None)
    p_or.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_PARAMS
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except Exception as exc:  # numeric/runtime failures
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
