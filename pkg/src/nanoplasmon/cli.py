"""Command-line front end: ``nanoplasmon <command> [options]``.

Every command builds one or more :class:`~nanoplasmon.datasets.Dataset`
objects, writes them under ``--out`` and exits 0 only if no row failed.
Rows are computed in parallel when ``NANOPLASMON_THREADS`` is set. Output
order never depends on the thread count.
"""

import argparse
import json
import math
import os
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from . import config as cfgmod
from .datasets import Dataset, write
from .emitter_coupling import (
    NONRAD_PREFACTOR,
    DipoleEmitter,
    optimal_distance,
    wire_rates,
)
from .outcoupler import (
    EfficiencyConfig,
    FiberGeometry,
    MultimodeWarning,
    single_photon_efficiency,
    solve_fiber_he11,
)
from .tip_model import calibrate_tip_coupling, dispersion_memo, tip_error_probability, tip_error_vs_v
from .wire_modes import WireGeometry, find_bound_modes, propagation_figure, solve_fundamental

THREADS_ENV = "NANOPLASMON_THREADS"
EFFICIENCY_TARGET_OF_RECORD = 0.95
NAN = float("nan")


class RowErrors:
    """Collects per-row failures so a sweep can finish and still report them."""

    def __init__(self):
        self.items = []

    def add(self, dataset, index, x, exc):
        self.items.append({"dataset": dataset, "row": index, "x": x, "error": "%s: %s" % (type(exc).__name__, exc)})

    def __bool__(self):
        return bool(self.items)


def _threads():
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise cfgmod.ConfigError("%s must be an integer, got %r" % (THREADS_ENV, raw)) from None
    return max(1, n)


def _map_rows(func, xs):
    """``[func(x) for x in xs]`` with exceptions captured; order preserved."""

    def safe(x):
        try:
            return func(x), None
        except (ArithmeticError, ValueError) as exc:
            return None, exc

    n = _threads()
    if n == 1:
        return [safe(x) for x in xs]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(safe, xs))


def _base_metadata(cfg, eps1, eps2, with_calibration=True):
    meta = {
        "config_hash": cfg.config_hash(),
        "config": cfg.numeric_mapping(),
        "tool_version": __version__,
        "units": "lengths in units of 1/k0; rates in units of the bulk-host rate",
    }
    if with_calibration:
        meta["tip_calibration"] = calibrate_tip_coupling(eps1, eps2).calibration_source
    return meta


# ---- commands ----------------------------------------------------------------------


def cmd_dispersion(cfg, errors):
    """Fundamental-mode dispersion (and the m = 1 hybrid mode where bound)."""
    eps1, eps2, _ = cfg.permittivities()
    k1 = math.sqrt(eps1.real)

    def row(R):
        g = WireGeometry(float(R), eps1, eps2)
        mode = solve_fundamental(g)
        hy = find_bound_modes(1, g)
        h_re, h_im = (hy[0].k_par.real / k1, hy[0].k_par.imag / k1) if hy else (NAN, NAN)
        return [R, mode.k_par.real / k1, mode.k_par.imag / k1, propagation_figure(mode), h_re, h_im]

    cols = ["k0R", "re_k_over_k1", "im_k_over_k1", "ratio", "m1_re_k_over_k1", "m1_im_k_over_k1"]
    ds = Dataset("dispersion", cols, metadata=_base_metadata(cfg, eps1, eps2, with_calibration=False))
    for i, (R, (r, exc)) in enumerate(zip(cfg.k0R.values(), _map_rows(row, cfg.k0R.values()))):
        if exc is not None:
            errors.add(ds.name, i, float(R), exc)
            r = [R] + [NAN] * (len(cols) - 1)
        ds.append(r)
    return [ds]


def cmd_rates(cfg, errors, k0R, k0d, nonrad_prefactor=NONRAD_PREFACTOR):
    """One-row diagnostic of every wire channel at ``(k0R, k0d)``."""
    eps1, eps2, _ = cfg.permittivities()
    g = WireGeometry(float(k0R), eps1, eps2)
    r = wire_rates(DipoleEmitter.radial(float(k0d)), g, nonrad_prefactor=nonrad_prefactor)
    cols = ["k0R", "k0d", "rad", "nonrad", "pl", "total", "branching", "purcell"]
    meta = _base_metadata(cfg, eps1, eps2, with_calibration=False)
    meta["nonrad_prefactor"] = nonrad_prefactor
    return [Dataset("rates", cols, [[k0R, k0d, r.rad, r.nonrad, r.pl, r.total, r.branching, r.purcell]], meta)]


def cmd_error_curves(cfg, errors):
    """Wire error vs R, tip pre-propagation error vs v, tip error with propagation vs R."""
    eps1, eps2, _ = cfg.permittivities()
    meta = _base_metadata(cfg, eps1, eps2)
    cpl = calibrate_tip_coupling(eps1, eps2)
    disp = dispersion_memo(eps1, eps2)
    radii = cfg.k0R.values()

    def wire_row(R):
        d, rates = optimal_distance(WireGeometry(float(R), eps1, eps2), rtol=cfg.distance_rtol)
        return [R, rates.error, d, rates.purcell]

    def tip_row(R):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            o = tip_error_probability(float(R), eps1, eps2, cpl=cpl, dispersion=disp, seeds=cfg.tip_seeds)
        return [R, o.P_E, o.k0d, o.k0v, o.attenuation, float(o.converged)]

    def pre_row(v):
        (vv, err, d), = tip_error_vs_v([float(v)], eps1, eps2, cpl=cpl)
        return [vv, err, d]

    specs = [
        ("wire_error", ["k0R", "error", "k0d", "purcell"], wire_row, radii),
        ("tip_prepropagation", ["k0v", "error", "k0d"], pre_row, cfg.k0v.values()),
        ("tip_error", ["k0R", "P_E", "k0d", "k0v", "attenuation", "converged"], tip_row, radii),
    ]
    out = []
    for name, cols, fn, xs in specs:
        ds = Dataset(name, cols, metadata=dict(meta))
        for i, (x, (r, exc)) in enumerate(zip(xs, _map_rows(fn, xs))):
            if exc is not None:
                errors.add(name, i, float(x), exc)
                r = [x] + [NAN] * (len(cols) - 1)
            ds.append(r)
        out.append(ds)
    return out


def cmd_efficiency(cfg, errors):
    """Single-photon efficiency ``P(R)`` for the wire and tip front ends."""
    eps1, eps2, core = cfg.permittivities()
    econf = EfficiencyConfig(eps1, eps2, core, cfg.single_sided, cfg.min_gap)
    cols = ["k0R", "P", "branching", "transfer", "matchable", "single_mode",
            "k0d", "k0v", "k0a", "k0_gap", "k0L_ex", "kappa", "delta_beta"]
    radii = cfg.k0R.values()
    out = []
    for fe in ("wire", "tip"):
        def row(R, fe=fe):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", MultimodeWarning)
                r = single_photon_efficiency(fe, float(R), econf)
            d = r.design
            if d is None:
                return [R, r.P, r.branching, r.transfer, 0.0, NAN, r.k0d, r.k0v] + [NAN] * 5
            return [R, r.P, r.branching, r.transfer, 1.0, float(d.fiber.single_mode), r.k0d, r.k0v,
                    d.fiber.k0a, d.k0_gap, d.k0L_ex, d.kappa, d.delta_beta]

        meta = _base_metadata(cfg, eps1, eps2)
        ds = Dataset("efficiency_" + fe, cols, metadata=meta)
        for i, (x, (r, exc)) in enumerate(zip(radii, _map_rows(row, radii))):
            if exc is not None:
                errors.add(ds.name, i, float(x), exc)
                r = [x] + [NAN] * (len(cols) - 1)
            ds.append(r)
        P = [p for p in ds.column("P") if not math.isnan(p)]
        peak = max(P) if P else NAN
        meta["peak_P"] = peak
        meta["target_of_record"] = EFFICIENCY_TARGET_OF_RECORD
        meta["single_sided"] = cfg.single_sided
        if not peak >= EFFICIENCY_TARGET_OF_RECORD:
            meta["shortfall"] = {
                "amount": EFFICIENCY_TARGET_OF_RECORD - peak if P else NAN,
                "attributed_to": [
                    "two-mode codirectional coupled-mode model with loss on the plasmon branch only",
                    "overlap restricted to the fiber core and optimised over core radius, gap and length",
                    "minimum surface-to-surface gap bound of the coupler search",
                    "non-plasmon error of the emitter front end",
                ],
            }
        meta["unmatchable_rows"] = int(sum(1 for m in ds.column("matchable") if m == 0.0))
        meta["multimode_rows"] = int(sum(1 for m in ds.column("single_mode") if m == 0.0))
        out.append(ds)
    return out


def cmd_fiber(cfg, errors):
    """HE11 dispersion of the step-index fiber over the core-radius grid."""
    eps1, _, core = cfg.permittivities()
    cols = ["k0a", "V", "k_par", "u", "w", "single_mode"]

    def row(a):
        m = solve_fiber_he11(FiberGeometry(float(a), core, eps1.real))
        return [a, m.fiber.V, m.k_par, m.u, m.w, float(m.fiber.single_mode)]

    ds = Dataset("fiber", cols, metadata=_base_metadata(cfg, eps1, 0j, with_calibration=False))
    for i, (x, (r, exc)) in enumerate(zip(cfg.k0a.values(), _map_rows(row, cfg.k0a.values()))):
        if exc is not None:
            errors.add(ds.name, i, float(x), exc)
            r = [x] + [NAN] * (len(cols) - 1)
        ds.append(r)
    return [ds]


REPRODUCE = {"fig2a": cmd_dispersion, "fig2b": cmd_error_curves, "fig3b": cmd_efficiency}


# ---- argument handling ----------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI run configuration")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides the config)")
    common.add_argument("--json", action="store_true", help="also write one JSON document")
    common.add_argument("--single-sided", action="store_true", help="collect only one plasmon direction")
    common.add_argument("--seed-grid", type=int, metavar="N", help="number of restarts for the tip optimiser")

    p = argparse.ArgumentParser(prog="nanoplasmon", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version="%(prog)s " + __version__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("dispersion", parents=[common], help="plasmon dispersion vs wire radius")
    r = sub.add_parser("rates", parents=[common], help="decay channels at one point")
    r.add_argument("--k0R", type=float, required=True)
    r.add_argument("--k0d", type=float, required=True)
    r.add_argument("--nonrad-prefactor", type=float, default=NONRAD_PREFACTOR)
    sub.add_parser("error-curves", parents=[common], help="non-plasmon error curves")
    sub.add_parser("efficiency", parents=[common], help="single-photon efficiency vs radius")
    sub.add_parser("fiber", parents=[common], help="fiber HE11 dispersion")
    rp = sub.add_parser("reproduce", parents=[common], help="regenerate a figure dataset")
    rp.add_argument("figure", choices=sorted(REPRODUCE))
    return p


def resolve_config(args):
    cfg = cfgmod.load(args.config) if args.config else cfgmod.RunConfig()
    m = cfg.to_mapping()
    if args.out:
        m["run"]["output_dir"] = args.out
    if args.json:
        m["run"]["emit_json"] = "true"
    if args.single_sided:
        m["run"]["single_sided"] = "true"
    if args.seed_grid is not None:
        m["optimizer"]["tip_seeds"] = str(args.seed_grid)
    return cfgmod.from_mapping(m)


def run(argv=None):
    """Run the CLI and return ``(exit_code, datasets, errors)``."""
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        _threads()
    except (cfgmod.ConfigError, OSError, ValueError) as exc:
        print(json.dumps({"status": "config-error", "error": str(exc)}), file=sys.stderr)
        return 2, [], None
    errors = RowErrors()
    t0 = time.time()
    try:
        if args.command == "rates":
            datasets = cmd_rates(cfg, errors, args.k0R, args.k0d, args.nonrad_prefactor)
        elif args.command == "reproduce":
            datasets = REPRODUCE[args.figure](cfg, errors)
        else:
            fn = {"dispersion": cmd_dispersion, "error-curves": cmd_error_curves,
                  "efficiency": cmd_efficiency, "fiber": cmd_fiber}[args.command]
            datasets = fn(cfg, errors)
    except (ArithmeticError, ValueError) as exc:
        print(json.dumps({"status": "error", "error": "%s: %s" % (type(exc).__name__, exc)}), file=sys.stderr)
        return 1, [], errors
    run_info = {
        "command": args.command,
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "elapsed_s": time.time() - t0,
        "row_errors": errors.items,
    }
    paths = write(datasets, cfg.output_dir, emit_csv=cfg.emit_csv, emit_json=cfg.emit_json, run_info=run_info)
    for p in paths:
        print(p)
    if errors:
        print(json.dumps({"status": "row-errors", "errors": errors.items}), file=sys.stderr)
        return 1, datasets, errors
    return 0, datasets, errors


def main(argv=None):
    code, _, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
