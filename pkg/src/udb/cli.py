"""Command-line entry point: ``udb <command> ...``.

Exit codes: 0 success, 1 a check came out false, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import certificate as certmod
from .certfile import dump_certificate, load_certificate, bundled_certificate, bundled_certificate_path
from .config_search import minimize_config
from .constructions import (
    avoidance_audit,
    hex_disk_density,
    monte_carlo_tortoise_area,
    nonblock_lattice_density,
    optimize_tortoise,
    tortoise_area,
)
from .errors import AuditError, CapacityError, DomainError, UDBError, VerificationError
from .geometry import (
    equilateral_triangle,
    format_point_config,
    independence_number,
    read_point_configs,
    spindle_graph,
    unit_distance_graph,
)
from .lp_search import (
    RadialProfile,
    build_lp,
    extract_certificate,
    fixed_point_delta,
)

log = logging.getLogger("udb")

EXIT_OK, EXIT_FALSE, EXIT_INPUT = 0, 1, 2
BUNDLED_SPINDLES = ((0.4, 5.4), (0.6, 5.4), (0.8, 5.4))


class InputError(UDBError):
    pass


class StageFailure(UDBError):
    def __init__(self, stage, message):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass
class RunReport:
    command: str
    inputs_digest: str = ""
    outputs: list = field(default_factory=list)
    wall_time: float = 0.0

    def record(self, name, **values):
        self.outputs.append({"record": name, **values})

    def to_dict(self) -> dict:
        return {"command": self.command, "inputs_digest": self.inputs_digest,
                "outputs": self.outputs, "wall_time": self.wall_time}


def _digest(args, paths) -> str:
    h = hashlib.sha256()
    for key, value in sorted(vars(args).items()):
        if key not in ("func", "report"):
            h.update(f"{key}={value!r};".encode())
    for p in paths:
        if p is not None:
            h.update(Path(p).read_bytes())
    return h.hexdigest()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    return obj


def _write_report(report: RunReport, path) -> None:
    """Append the run as one JSON line; earlier runs in the file are kept."""
    if path is None:
        return
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(_jsonable(report.to_dict())) + "\n")


def _read_spindles(path) -> list:
    graphs = []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            t, theta = (float(v) for v in parts)
        except ValueError:
            raise InputError(f"{path}:{lineno}: expected 't theta', got {raw!r}") from None
        graphs.append(spindle_graph(t, theta))
    return graphs


def _read_configs(path) -> list:
    try:
        return read_point_configs(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_kappa(path) -> RadialProfile:
    try:
        return RadialProfile.load(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_verify(args, report: RunReport) -> int:
    path = args.file
    cert = load_certificate(path)
    report.inputs_digest = _digest(args, [path])
    try:
        result = certmod.verify(cert, L=args.L, epsilon=args.epsilon)
    except VerificationError as exc:
        report.record("verify", passed=False, stage=exc.stage, t=exc.t, message=str(exc))
        print(f"verification failed: {exc}")
        return EXIT_FALSE
    report.record("verify", passed=True, **result.summary())
    print(f"delta <= {result.delta:.6f}")
    print(f"v0 slack {result.v0_slack:.6g}, grid minimum {result.grid_min:.6g}, "
          f"tail margin {result.tail_margin:.6g}")
    return EXIT_OK


def cmd_search_lp(args, report: RunReport) -> int:
    graphs = _read_spindles(args.spindles) if args.spindles else []
    configs = _read_configs(args.configs) if args.configs else []
    report.inputs_digest = _digest(args, [args.spindles, args.configs])
    delta, sol = fixed_point_delta(graphs, configs, args.L, args.epsilon, args.chung_m)
    report.record("fixed_point", delta=delta, status=sol.status,
                  primal_residual=sol.primal_residual, duality_gap=sol.duality_gap,
                  support=sol.primal.t, mass=sol.primal.mass)
    print(f"delta = {delta:.6f}")
    print(f"status {sol.status}, {len(sol.primal.t)} support points, "
          f"{len(graphs)} graphs, {len(configs)} sets")
    if args.kappa_out:
        sol.primal.save(args.kappa_out)
    if args.emit_cert:
        lp = build_lp(delta if configs else 0.5, graphs, configs, args.L, args.epsilon,
                      args.chung_m)
        cert = extract_certificate(lp, sol)
        dump_certificate(cert, args.emit_cert)
        report.record("certificate", path=str(args.emit_cert),
                      solve_delta=certmod.solve_delta(cert))
        print(f"certificate written to {args.emit_cert}")
    return EXIT_OK


def cmd_find_config(args, report: RunReport) -> int:
    kappa = _load_kappa(args.kappa)
    report.inputs_digest = _digest(args, [args.kappa])
    res = minimize_config(kappa, args.n, args.restarts, args.seed, delta=args.delta,
                          chung_m=args.chung_m)
    report.record("find_config", objective=res.objective, violated=res.violated,
                  points=res.config.points, grad_norm=res.grad_norm)
    sys.stdout.write(format_point_config(res.config))
    print(f"# objective {res.objective:.10f}")
    if args.delta is not None:
        print(f"# violated at delta={args.delta}: {'yes' if res.violated else 'no'}")
    return EXIT_OK


def _lower_bounds(samples, seed, report):
    hex_d = hex_disk_density()
    x, tort_d = optimize_tortoise()
    nb_d = nonblock_lattice_density()
    est, se = monte_carlo_tortoise_area(x, samples, seed)
    exact = tortoise_area(x)
    audits = [("hex", None), ("tortoise", x), ("nonblock", None)]
    lines = [f"hex disk packing   {hex_d:.6f}",
             f"tortoise           {tort_d:.6f}  (x = {x:.6f})",
             f"non-block lattice  {nb_d:.6f}",
             f"tortoise area {exact:.6f}, Monte Carlo {est:.6f} +- {se:.1e} "
             f"({abs(est - exact) / se:.2f} sigma)"]
    report.record("densities", hex=hex_d, tortoise=tort_d, tortoise_x=x, nonblock=nb_d,
                  tortoise_area=exact, mc_area=est, mc_stderr=se)
    for name, xx in audits:
        a = avoidance_audit(name, xx, seed=seed)
        extra = f", adjacent max {a.adjacent_max:.6f}" if name == "nonblock" else ""
        lines.append(f"audit {name:9s} within max {a.within_max:.6f}, "
                     f"cross min {a.cross_min:.6f}{extra}")
        report.record("audit", construction=name, within_max=a.within_max,
                      cross_min=a.cross_min, adjacent_max=a.adjacent_max)
    return lines, (hex_d, x, tort_d, nb_d)


def cmd_lower_bounds(args, report: RunReport) -> int:
    report.inputs_digest = _digest(args, [])
    try:
        lines, _ = _lower_bounds(int(args.mc_samples), args.seed, report)
    except AuditError as exc:
        print(f"audit failed: {exc}")
        return EXIT_FALSE
    print("\n".join(lines))
    return EXIT_OK


def _stage(report, name, ok, message, **values):
    report.record(name, passed=bool(ok), **values)
    print(f"[{name}] {'ok' if ok else 'FAILED'}  {message}")
    if not ok:
        raise StageFailure(name, message)


def cmd_reproduce(args, report: RunReport) -> int:
    report.inputs_digest = _digest(args, [])
    try:
        try:
            res = certmod.verify(bundled_certificate())
        except VerificationError as exc:
            _stage(report, "verify", False, str(exc))
        _stage(report, "verify", res.delta <= 0.258795,
               f"bundled certificate: delta <= {res.delta:.6f}", delta=res.delta)

        try:
            _, (hex_d, x, tort_d, nb_d) = _lower_bounds(args.mc_samples, args.seed, report)
        except AuditError as exc:
            _stage(report, "lower_bounds", False, str(exc))
        _stage(report, "lower_bounds", tort_d > hex_d > nb_d > 0,
               f"hex {hex_d:.6f}, tortoise {tort_d:.6f} at x={x:.5f}, non-block {nb_d:.6f}")

        two_row, _ = fixed_point_delta([], [])
        _stage(report, "two_row_lp", abs(two_row - 0.287) <= 0.002,
               f"delta = {two_row:.6f}", delta=two_row)

        spindle = spindle_graph(0.0, 0.0)
        alpha = independence_number(spindle)
        tri = independence_number(unit_distance_graph(equilateral_triangle()))
        _stage(report, "spindle_alpha", alpha == 2 and len(spindle.edges) == 11 and tri == 1,
               f"alpha = {alpha} of {spindle.order} (bound {alpha}/{spindle.order}), "
               f"triangle {tri}/3", alpha=alpha)

        if args.budget == "full":
            graphs = [spindle_graph(t, th) for t, th in BUNDLED_SPINDLES]
            d_sp, sol = fixed_point_delta(graphs, [])
            _stage(report, "three_spindle_lp", abs(d_sp - 0.26305) <= 0.001,
                   f"delta = {d_sp:.6f}", delta=d_sp)
            cut = minimize_config(sol.primal, 6, args.restarts, args.seed, delta=d_sp)
            _stage(report, "cut_search", cut.violated,
                   f"6-point set with objective {cut.objective:.6f}",
                   objective=cut.objective, points=cut.config.points)
            d_cut, _ = fixed_point_delta(graphs, [cut.config])
            seq = [two_row, d_sp, d_cut]
            _stage(report, "cut_round", seq[0] >= seq[1] >= seq[2] and d_cut < 0.263,
                   "delta sequence " + " -> ".join(f"{v:.6f}" for v in seq), sequence=seq)
    except StageFailure:
        return EXIT_FALSE
    print("all stages passed")
    return EXIT_OK


def cmd_report(args, report: RunReport) -> int:
    path = args.file or bundled_certificate_path()
    cert = load_certificate(path)
    report.inputs_digest = _digest(args, [path])
    if not (args.step > 0 and args.t_max > 0):
        raise InputError("--step and --t-max must be positive")
    t = np.arange(0.0, args.t_max + 0.5 * args.step, args.step)
    phi = certmod.witness_value(cert, t)
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["t", "phi"])
        for ti, pi in zip(t, phi):
            writer.writerow([f"{ti:.10g}", repr(float(pi))])
    finally:
        if args.out:
            out.close()
    k = int(np.argmin(phi))
    report.record("samples", count=len(t), min=float(phi[k]), argmin=float(t[k]))
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="udb", description="Density bounds for planar sets "
                                "avoiding unit distance.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--report", type=Path, help="append a JSON run record to this file")
        return sp

    sp = add("verify", cmd_verify, "verify a certificate file")
    sp.add_argument("file", type=Path)
    sp.add_argument("--L", type=float, default=780.0)
    sp.add_argument("--epsilon", type=float, default=1e-4)

    sp = add("search-lp", cmd_search_lp, "solve the discretised LP for its fixed point")
    sp.add_argument("--L", type=float, default=200.0)
    sp.add_argument("--epsilon", type=float, default=0.01)
    sp.add_argument("--spindles", type=Path, help="file of 't theta' lines")
    sp.add_argument("--configs", type=Path, help="point sets, blank-line separated")
    sp.add_argument("--chung-m", type=int, default=1)
    sp.add_argument("--emit-cert", type=Path)
    sp.add_argument("--kappa-out", type=Path, help="write the primal profile ('t value' lines)")

    sp = add("find-config", cmd_find_config, "search for a violated N-point set")
    sp.add_argument("--kappa", type=Path, required=True)
    sp.add_argument("--n", type=int, default=6)
    sp.add_argument("--restarts", type=int, default=200)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--chung-m", type=int, default=1)

    sp = add("lower-bounds", cmd_lower_bounds, "densities of the lower-bound constructions")
    sp.add_argument("--mc-samples", type=float, default=1e7)
    sp.add_argument("--seed", type=int, default=7)

    sp = add("reproduce", cmd_reproduce, "end-to-end reproduction pipeline")
    sp.add_argument("--budget", choices=("quick", "full"), default="quick")
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--restarts", type=int, default=200)
    sp.add_argument("--mc-samples", type=int, default=1_000_000)

    sp = add("report", cmd_report, "CSV table of witness samples")
    sp.add_argument("file", type=Path, nargs="?", help="certificate (default: bundled)")
    sp.add_argument("--t-max", type=float, default=50.0)
    sp.add_argument("--step", type=float, default=0.01)
    sp.add_argument("--out", type=Path)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    report = RunReport(args.command)
    start = time.perf_counter()
    try:
        code = args.func(args, report)
    except (UDBError, ValueError) as exc:
        bad_input = isinstance(exc, (InputError, DomainError, CapacityError, ValueError))
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_INPUT if bad_input else EXIT_FALSE
        report.record("error", message=str(exc))
    report.wall_time = time.perf_counter() - start
    _write_report(report, getattr(args, "report", None))
    return code


if __name__ == "__main__":
    sys.exit(main())
