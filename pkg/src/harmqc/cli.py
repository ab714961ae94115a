"""Command-line interface: ``harmqc {analyze,trace,decompose,sweep}``.

Exit status: 0 when every check passes, 2 when a mathematical check fails
(a witness is written), 1 on configuration or numerical errors.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .decomposition import annulus_decomposition, covering_sweep, decomposition_certificate
from .domains import Annulus
from .errors import ConfigError, DilatationBoundError, HarmqcError, InvalidModulus
from .geometry import grid_injectivity, quasicircle_report, trace_boundary
from .harmonic import dilatation_sup, local_univalence_scan
from .hyperbolic import density_array
from .norm import NormBudget, schwarzian_norm

log = logging.getLogger("harmqc")

EXIT_OK, EXIT_ERROR, EXIT_FAILED = 0, 1, 2
CSV_VERSION = 1


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def fmt_z(z) -> str:
    z = complex(z)
    return f"{z.real:.10g}{z.imag:+.10g}i"


def write_csv(path: Path, kind: str, header: list, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# harmqc {kind} csv v{CSV_VERSION}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([r if isinstance(r, str) else fmt(r) for r in row])


class Report:
    def __init__(self, title):
        self.lines = [f"harmqc {__version__} -- {title}", ""]

    def add(self, key, value=None):
        self.lines.append(key if value is None else f"{key:<28} {value}")

    def write(self, path: Path):
        path.write_text("\n".join(self.lines) + "\n")
        return path


def _budget(cfg: RunConfig) -> NormBudget:
    return NormBudget(cfg.grid, cfg.grid, cfg.refinements, cfg.rel_tol)


def _describe_map(cfg, rep):
    rep.add("domain", repr(cfg.domain))
    rep.add("h (k, a_k)", " ".join(f"({k},{complex(a, b):g})" for k, a, b in cfg.h) or "0")
    rep.add("g (k, a_k)", " ".join(f"({k},{complex(a, b):g})" for k, a, b in cfg.g) or "0")


# commands --------------------------------------------------------------

def cmd_analyze(cfg: RunConfig, out: Path) -> int:
    f = cfg.harmonic_map()
    rep = Report("analyze")
    _describe_map(cfg, rep)
    est = schwarzian_norm(f, _budget(cfg))
    dil = dilatation_sup(f, cfg.grid)
    uni = local_univalence_scan(f, cfg.grid)
    inj = grid_injectivity(f, cfg.injectivity_grid)

    rep.add("")
    rep.add("schwarzian_norm", fmt(est.value))
    if est.bounds is not None:
        rep.add("schwarzian_norm_bounds", f"[{fmt(est.bounds[0])}, {fmt(est.bounds[1])}]")
    rep.add("norm_argmax", fmt_z(est.argmax))
    rep.add("norm_samples", est.samples)
    rep.add("refinement_depth", est.refinement_depth)
    rep.add("boundary_trend", est.boundary_trend)
    rep.add("dilatation_sup", fmt(dil.value))
    rep.add("dilatation_argmax", fmt_z(dil.argmax))
    rep.add("local_univalence", "pass" if uni.passed else f"FAIL at {fmt_z(uni.witness)}")
    rep.add("min_jacobian", f"{fmt(uni.min_jacobian)} at {fmt_z(uni.argmin)}")
    if inj.passed:
        rep.add("grid_injectivity", f"pass ({inj.samples} points, tol {inj.tol:.3g})")
    else:
        z1, z2 = inj.witness
        rep.add("grid_injectivity", f"FAIL witness {fmt_z(z1)} , {fmt_z(z2)} gap {inj.gap:.3g}")

    z = est.sample_z
    order = np.lexsort((z.imag, z.real))
    lam = density_array(f.domain, z[order])[0]
    vals = est.sample_values[order]
    write_csv(out / "samples.csv", "samples", ["re_z", "im_z", "lambda", "norm_density"],
              zip(z[order].real, z[order].imag, lam, vals))
    rep.write(out / "report.txt")
    return EXIT_OK if (uni.passed and inj.passed) else EXIT_FAILED


def cmd_trace(cfg: RunConfig, out: Path, circle_id: int, n: int) -> int:
    f = cfg.harmonic_map()
    circles = f.domain.boundary_circles()
    if not 0 <= circle_id < len(circles):
        raise ConfigError(f"circle id {circle_id} out of range (domain has {len(circles)})")
    circle = circles[circle_id]
    poly = trace_boundary(f, circle, n)
    cert = quasicircle_report(f, circle, n)
    write_csv(out / f"boundary_{circle_id}.csv", "boundary", ["theta", "re_f", "im_f"],
              zip(poly.params, poly.points.real, poly.points.imag))
    rep = Report("trace")
    _describe_map(cfg, rep)
    rep.add("circle", f"center {fmt_z(circle.center)} radius {circle.radius:g}")
    _certificate_lines(rep, cert)
    rep.write(out / "report.txt")
    return EXIT_OK if cert.certified else EXIT_FAILED


def _certificate_lines(rep, cert, prefix=""):
    rep.add(prefix + "jordan", fmt(cert.jordan))
    if not cert.jordan:
        rep.add(prefix + "jordan_witness", f"segments {cert.witness}")
        return
    k1, k2 = cert.turning_constants
    rep.add(prefix + "turning_constant", fmt(cert.turning_constant))
    rep.add(prefix + "turning_by_resolution",
            f"n={cert.sample_counts[0]}: {k1:.6g}, n={cert.sample_counts[1]}: {k2:.6g}")
    rep.add(prefix + "stable", fmt(cert.stable))


def cmd_decompose(cfg: RunConfig, out: Path) -> int:
    if not isinstance(cfg.domain, Annulus):
        raise InvalidModulus("decompose needs an annulus domain (R > 1)")
    f = cfg.harmonic_map()
    d = annulus_decomposition(cfg.domain.R)
    cov = covering_sweep(d, cfg.trials, cfg.seed)
    cert = decomposition_certificate(f, d, cfg.piece_n, max(2, cfg.injectivity_grid // 2))
    rep = Report("decompose")
    _describe_map(cfg, rep)
    rep.add("")
    if cov.passed:
        rep.add("covering_sweep", f"pass ({cov.trials} pairs, seed {cfg.seed})")
    else:
        rep.add("covering_sweep", f"FAIL witness {fmt_z(cov.witness[0])} , {fmt_z(cov.witness[1])}")
    for pr in cert.pieces:
        p = pr.piece
        rep.add("")
        rep.add(f"piece {pr.index}", f"theta in [{p.theta_start:.6g}, {p.theta_end:.6g}]")
        _certificate_lines(rep, pr.curve, "  ")
        inj = pr.injectivity
        rep.add("  injectivity", "pass" if inj.passed else
                f"FAIL witness {fmt_z(inj.witness[0])} , {fmt_z(inj.witness[1])}")
        b = p.boundary(cfg.piece_n)
        w = f(b.points, boundary=True)
        write_csv(out / f"piece_{pr.index}.csv", "piece", ["re_z", "im_z", "re_f", "im_f"],
                  zip(b.points.real, b.points.imag, w.real, w.imag))
    rep.write(out / "report.txt")
    return EXIT_OK if (cov.passed and cert.certified) else EXIT_FAILED


SWEEP_HEADER = ["t", "status", "norm", "boundary_trend", "dilatation_sup",
                "local_univalence", "injective", "pieces_certified"]


def sweep_rows(cfg: RunConfig):
    """One row per family parameter; failures are recorded, never raised."""
    if cfg.sweep is None:
        raise ConfigError("sweep needs t_min, t_max and steps in the config")
    rows = []
    for t in cfg.sweep.values():
        row = dict(t=t, status="ok", norm=None, boundary_trend="", dilatation_sup=None,
                   local_univalence=None, injective=None, pieces_certified=None)
        try:
            f = cfg.harmonic_map(t)
            est = schwarzian_norm(f, _budget(cfg))
            row.update(norm=est.value, boundary_trend=est.boundary_trend,
                       dilatation_sup=dilatation_sup(f, cfg.grid).value,
                       local_univalence=local_univalence_scan(f, cfg.grid).passed,
                       injective=grid_injectivity(f, cfg.injectivity_grid).passed)
            if isinstance(cfg.domain, Annulus):
                d = annulus_decomposition(cfg.domain.R)
                row["pieces_certified"] = decomposition_certificate(
                    f, d, cfg.piece_n, max(2, cfg.injectivity_grid // 2)).certified
            checks = [row["local_univalence"], row["injective"]]
            if row["pieces_certified"] is not None:
                checks.append(row["pieces_certified"])
            if not all(checks):
                row["status"] = "check_failed"
        except DilatationBoundError:
            row["status"] = "dilatation_ge_1"
        except HarmqcError as exc:
            row["status"] = f"numeric_error:{type(exc).__name__}"
        rows.append(row)
    return rows


def cmd_sweep(cfg: RunConfig, out: Path) -> int:
    rows = sweep_rows(cfg)
    write_csv(out / "sweep.csv", "sweep", SWEEP_HEADER,
              ([r[k] for k in SWEEP_HEADER] for r in rows))
    rep = Report("sweep")
    _describe_map(cfg, rep)
    rep.add("h_t (k, a_k)", " ".join(f"({k},{complex(a, b):g})" for k, a, b in cfg.h_t) or "0")
    rep.add("g_t (k, a_k)", " ".join(f"({k},{complex(a, b):g})" for k, a, b in cfg.g_t) or "0")
    rep.add("t range", f"[{cfg.sweep.t_min:g}, {cfg.sweep.t_max:g}] in {cfg.sweep.steps} steps")
    passing = [r for r in rows if r["status"] == "ok"]
    if passing:
        best = max(passing, key=lambda r: r["t"])
        rep.add("largest passing t", fmt(best["t"]))
        rep.add("norm at that t", fmt(best["norm"]))
        rep.add("note", "empirical exploration only; not a univalence constant")
    else:
        rep.add("largest passing t", "none")
    rep.write(out / "report.txt")
    return EXIT_OK


# entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, type=Path, help="run configuration file")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    common.add_argument("--seed", type=int, default=None, help="overrides config seed")
    common.add_argument("--grid", type=int, default=None, help="overrides config grid size")

    p = argparse.ArgumentParser(prog="harmqc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="norm, dilatation, univalence, injectivity")
    tr = sub.add_parser("trace", parents=[common], help="trace and certify a boundary image")
    tr.add_argument("--circle", type=int, default=None, help="boundary circle index")
    tr.add_argument("--n", type=int, default=None, help="samples on the circle")
    sub.add_parser("decompose", parents=[common], help="three-sector annulus decomposition")
    sub.add_parser("sweep", parents=[common], help="parameter sweep over a map family")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.grid is not None:
            if args.grid < 2:
                raise ConfigError("--grid must be at least 2")
            cfg.grid = args.grid
        args.out.mkdir(parents=True, exist_ok=True)
        if args.command == "analyze":
            return cmd_analyze(cfg, args.out)
        if args.command == "trace":
            circle = cfg.circle_id if args.circle is None else args.circle
            n = cfg.trace_n if args.n is None else args.n
            return cmd_trace(cfg, args.out, circle, n)
        if args.command == "decompose":
            return cmd_decompose(cfg, args.out)
        return cmd_sweep(cfg, args.out)
    except HarmqcError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_ERROR
    except (ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
