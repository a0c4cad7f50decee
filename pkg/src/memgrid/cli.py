"""Command-line front end: ``memgrid simulate|decompose|classify|sweep``."""

from __future__ import annotations

import argparse
import copy
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import element_table as et
from . import impedance, simulator
from .device_model import DeviceParams, Window
from .errors import CandidateError, ConfigError, IntegrityError, MemgridError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTEGRITY = 3
EXIT_SWEEP = 4


def _dataclass_defaults(cls):
    return {name: f.default for name, f in cls.__dataclass_fields__.items()}


DEFAULTS = {
    "device": _dataclass_defaults(DeviceParams),
    "drive": {"waveform": "sine", "amplitude": 1.0, "frequency": 1.0, "phase": 0.0},
    "sim": {
        "dt": 1e-3,
        "cycles": 3,
        "coupling": "flux_driven",
        "mobility": 2e4,
        "kappa": 20.0,
        "phi0": 0.15,
        "n_b0": 0.1,
        "phi_init": 0.0,
        "window": _dataclass_defaults(Window),
    },
    "decompose": {"phi_min": -2.0, "phi_max": 2.0, "points": 401, "n_b": "closure", "kappa": 20.0, "phi0": 0.15},
    "sweep": {
        "grid": {"p": [-100.0, -10.0, -1.0], "alpha": [0.009, 0.09, 0.9], "f0": [1.0, 10.0, 100.0]},
        "phi_points": 100,
        "n_b_points": 31,
    },
    "classify": {"candidate": None},
}

_SECTION_KEYS = {
    "device": set(DeviceParams.__dataclass_fields__),
    "drive": {"waveform", "amplitude", "frequency", "phase"},
    "sim": {"dt", "cycles", "coupling", "mobility", "kappa", "phi0", "n_b0", "phi_init", "window"},
    "decompose": {"phi_min", "phi_max", "points", "n_b", "kappa", "phi0"},
    "sweep": {"grid", "phi_points", "n_b_points"},
    "classify": {"candidate"},
}
_WINDOW_KEYS = set(Window.__dataclass_fields__)

TRACE_COLUMNS = simulator.TRACE_COLUMNS
DECOMPOSE_COLUMNS = ("phi", "n_b", "z1_re", "z1_im", "z2_re", "z2_im", "sum_re", "sum_im", "anomaly")
SWEEP_COLUMNS = ("index", "status", "max_cancellation", "min_sum_re", "anomalies", "negative_points", "detail")


@dataclass
class RunConfig:
    raw: dict
    device: DeviceParams
    drive: simulator.DriveSignal
    sim: simulator.SimConfig


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _merge(base, override, where=""):
    for key, value in override.items():
        if key not in base:
            raise ConfigError(f"unknown config key {where}{key!r}")
        if isinstance(base[key], dict) and key != "grid":
            if not isinstance(value, dict):
                raise ConfigError(f"{where}{key} must be an object")
            _merge(base[key], value, f"{where}{key}.")
        else:
            base[key] = value


def _check_keys(raw):
    for section, keys in _SECTION_KEYS.items():
        unknown = set(raw[section]) - keys
        if unknown:
            raise ConfigError(f"unknown keys in {section}: {sorted(unknown)}")
    unknown = set(raw["sim"]["window"]) - _WINDOW_KEYS
    if unknown:
        raise ConfigError(f"unknown keys in sim.window: {sorted(unknown)}")


def _parse_override(text):
    if "=" not in text:
        raise ConfigError(f"--set expects key=value, got {text!r}")
    path, value = text.split("=", 1)
    try:
        parsed = json.loads(value)
    except json.JSONDecodeError:
        parsed = value
    node = parsed
    for part in reversed(path.split(".")):
        node = {part: node}
    return node


def load_config(path=None, overrides=()):
    """Merge defaults, an optional JSON file and ``--set`` overrides, then validate."""
    raw = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
        _merge(raw, data)
    for text in overrides:
        _merge(raw, _parse_override(text))
    _check_keys(raw)
    try:
        device = DeviceParams(**raw["device"])
        drive = simulator.DriveSignal(**raw["drive"])
        sim_fields = dict(raw["sim"])
        sim_fields["window"] = Window(**sim_fields["window"])
        sim = simulator.SimConfig(**sim_fields)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(raw, device, drive, sim)


def _csv_text(columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _json_text(obj):
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _write_all(out_dir: Path, files: dict):
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        with open(out_dir / name, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def audits(trace: simulator.Trace):
    pinch = simulator.detect_pinch(trace)
    ndr = simulator.detect_ndr(trace)
    energy = simulator.energy_audit(trace)
    try:
        areas = simulator.loop_area(trace)
    except MemgridError:
        areas = None
    return {
        "pinched": pinch.pinched,
        "max_current_at_zero_voltage": pinch.max_current_at_zero_voltage,
        "zero_crossings": pinch.crossings,
        "loop_area": areas,
        "ndr": [list(iv) for iv in ndr.intervals],
        "negative_component_steps": int(ndr.negative_component_steps.size),
        "energy": {
            "E1": energy.E1,
            "E2": energy.E2,
            "E_total": energy.E_total,
            "per_cycle": [list(c) for c in energy.per_cycle],
        },
        "active": energy.active_component,
        "branch_anomalies": trace.anomalies,
    }


def _svg_plots(trace: simulator.Trace):
    """Render the diagnostic plots to SVG strings. Returns ``{}`` if matplotlib is missing."""
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return {}
    matplotlib.rcParams["svg.hashsalt"] = "memgrid"
    plots = {
        "iv_loop.svg": (trace.v, trace.i, "v (V)", "i (A)"),
        "boundary_velocity.svg": (trace.t, trace.boundary_velocity(), "t (s)", "dn_b/dt (1/s)"),
        "resistance_vs_flux.svg": (trace.phi, trace.R, "phi (V s)", "R (ohm)"),
    }
    out = {}
    for name, (x, y, xlabel, ylabel) in plots.items():
        fig, ax = plt.subplots(figsize=(5, 4))
        ax.plot(x, y, lw=1.0)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
        out[name] = buf.getvalue()
    return out


def cmd_simulate(args):
    cfg = load_config(args.config, args.set)
    trace = simulator.run(cfg.drive, cfg.device, cfg.sim)
    cols = trace.columns()
    files = {}
    if args.format == "json":
        files["trace.json"] = _json_text({k: [float(x) for x in cols[k]] for k in TRACE_COLUMNS})
    else:
        files["trace.csv"] = _csv_text(TRACE_COLUMNS, zip(*(cols[k] for k in TRACE_COLUMNS)))
    report = audits(trace)
    files["audits.json"] = _json_text(report)
    if args.svg:
        try:
            files.update(_svg_plots(trace))
        except Exception as exc:  # plotting never decides the exit code
            print(f"warning: SVG output skipped ({exc})", file=sys.stderr)
    _write_all(Path(args.out), files)
    print(f"pinched={report['pinched']} loop_area={report['loop_area']} active={report['active']}")
    return EXIT_OK


def decompose_table(device: DeviceParams, section: dict, include_limit=False):
    """Rows of the flux sweep and its summary."""
    try:
        phi = np.linspace(float(section["phi_min"]), float(section["phi_max"]), int(section["points"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad decompose range: {exc}") from None
    if phi.size < 1:
        raise ConfigError("decompose.points must be >= 1")
    if not include_limit:
        phi = phi[phi != 0.0]
    n_b_spec = section["n_b"]
    if n_b_spec == "closure":
        n_b = impedance.flux_to_boundary(phi, section["kappa"], section["phi0"])
    elif isinstance(n_b_spec, (int, float)) and 0 <= n_b_spec <= 1:
        n_b = np.full(phi.shape, float(n_b_spec))
    else:
        raise ConfigError("decompose.n_b must be 'closure' or a number in [0, 1]")
    eps = impedance.FLUX_LIMIT_EPS if include_limit else 0.0
    z1, z2, status = impedance.decompose_arrays(phi, n_b, device, limit_eps=eps)
    if np.any(status & impedance.kernels.SINGULAR):
        raise IntegrityError("singular logarithm argument in the decomposition sweep")
    total = z1 + z2
    anomaly = (status & impedance.kernels.ANOMALY) != 0
    rows = zip(phi, n_b, z1.real, z1.imag, z2.real, z2.imag, total.real, total.imag, anomaly.astype(int))
    summary = {
        "points": int(phi.size),
        "max_abs_sum_im": float(np.max(np.abs(total.imag))) if phi.size else 0.0,
        "min_sum_re": float(np.min(total.real)) if phi.size else math.nan,
        "anomalies": int(np.count_nonzero(anomaly)),
        "negative_component_rows": int(np.count_nonzero(np.minimum(z1.real, z2.real) < 0)),
    }
    return list(rows), summary


def cmd_decompose(args):
    cfg = load_config(args.config, args.set)
    rows, summary = decompose_table(cfg.device, cfg.raw["decompose"], args.include_flux_limit)
    files = {"decompose_summary.json": _json_text(summary)}
    if args.format == "json":
        files["decompose.json"] = _json_text([dict(zip(DECOMPOSE_COLUMNS, map(_jsonable, r))) for r in rows])
    else:
        files["decompose.csv"] = _csv_text(DECOMPOSE_COLUMNS, rows)
    _write_all(Path(args.out), files)
    print(
        f"summary: points={summary['points']} max|sum_im|={summary['max_abs_sum_im']:.3e} "
        f"min sum_re={summary['min_sum_re']:.17g} anomalies={summary['anomalies']}"
    )
    return EXIT_OK


def _jsonable(x):
    if isinstance(x, (np.integer, np.bool_)):
        return int(x)
    return float(x)


def sweep_point(device: DeviceParams, phi_points, n_b_points):
    """Evaluate the decomposition invariants on a phi x n_b mesh for one device."""
    half = np.linspace(0.0, 2.0, phi_points // 2 + 1)[1:]
    phi = np.concatenate([-half[::-1], half])
    n_b = np.linspace(0.05, 0.95, n_b_points)
    pp, nn = np.meshgrid(phi, n_b, indexing="ij")
    z1, z2, status = impedance.decompose_arrays(pp, nn, device)
    if np.any(status & impedance.kernels.SINGULAR):
        return {"status": "fail", "detail": "singular logarithm argument"}
    ok = (status & impedance.kernels.ANOMALY) == 0
    canc = np.abs(z1.imag + z2.imag) / np.maximum(1.0, np.abs(z1.imag))
    total = (z1 + z2).real
    r1, r2 = z1.real, z2.real
    dominated = (r1 * r2 < 0) & (np.maximum(r1, r2) <= np.abs(np.minimum(r1, r2)))
    failures = []
    max_canc = float(np.max(canc[ok])) if ok.any() else 0.0
    min_re = float(np.min(total[ok])) if ok.any() else math.nan
    if max_canc >= impedance.CANCELLATION_RTOL:
        failures.append("cancellation")
    if ok.any() and not min_re > 0:
        failures.append("positivity")
    if np.any(dominated & ok):
        failures.append("dominance")
    return {
        "status": "fail" if failures else "pass",
        "max_cancellation": max_canc,
        "min_sum_re": min_re,
        "anomalies": int(np.count_nonzero(~ok)),
        "negative_points": int(np.count_nonzero((np.minimum(r1, r2) < 0) & ok)),
        "detail": "+".join(failures),
    }


def _threads():
    value = os.environ.get("MEMGRID_THREADS", "")
    try:
        n = int(value)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def cmd_sweep(args):
    cfg = load_config(args.config, args.set)
    section = cfg.raw["sweep"]
    grid = section["grid"]
    if not isinstance(grid, dict) or not grid:
        raise ConfigError("sweep.grid must be a nonempty object of parameter lists")
    names = list(grid)
    for name in names:
        if name not in _SECTION_KEYS["device"]:
            raise ConfigError(f"unknown sweep parameter {name!r}")
        if not isinstance(grid[name], list) or not grid[name]:
            raise ConfigError(f"sweep.grid.{name} must be a nonempty list")
    phi_points, n_b_points = int(section["phi_points"]), int(section["n_b_points"])
    if phi_points < 2 or n_b_points < 1:
        raise ConfigError("sweep needs phi_points >= 2 and n_b_points >= 1")
    points = list(itertools.product(*(grid[n] for n in names)))

    def work(values):
        try:
            device = cfg.device.replace(**dict(zip(names, values)))
        except MemgridError as exc:
            return {"status": "skipped", "detail": f"precondition: {exc}"}
        return sweep_point(device, phi_points, n_b_points)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(work, points))

    columns = tuple(names) + SWEEP_COLUMNS
    rows = []
    for k, (values, res) in enumerate(zip(points, results)):
        rows.append(
            list(values)
            + [k, res["status"]]
            + [res.get(c, math.nan) for c in ("max_cancellation", "min_sum_re")]
            + [res.get("anomalies", 0), res.get("negative_points", 0), res.get("detail", "")]
        )
    failed = [k for k, r in enumerate(results) if r["status"] == "fail"]
    summary = {
        "points": len(points),
        "failed": failed,
        "skipped": [k for k, r in enumerate(results) if r["status"] == "skipped"],
    }
    _write_all(Path(args.out), {"sweep.csv": _csv_text(columns, rows), "sweep_summary.json": _json_text(summary)})
    print(f"sweep: {len(points)} points, {len(failed)} failed, {len(summary['skipped'])} skipped")
    return EXIT_SWEEP if failed else EXIT_OK


def ideal_memristor_table(v=Fraction(1), phi0=Fraction(0), times=(1, 10, 100, 10**3, 10**6)):
    rows = []
    for t in times:
        i_t = simulator.ideal_memristor_current(Fraction(t), v, phi0)
        i_2t = simulator.ideal_memristor_current(Fraction(2 * t), v, phi0)
        rows.append((t, i_t, i_2t / i_t if i_t else None))
    return rows


def cmd_classify(args):
    lines = []
    payload = {}
    name = args.candidate
    if name == "ideal-memristor-demo":
        lines.append("Ideal memristor under constant voltage: i(t) = 3 v (phi0 + v t)^2 (v = 1, phi0 = 0)")
        lines.append("t\ti(t)\ti(2t)/i(t)")
        demo = []
        for t, i_t, ratio in ideal_memristor_table():
            lines.append(f"{t}\t{i_t}\t{ratio}")
            demo.append({"t": t, "i": str(i_t), "growth": str(ratio)})
        lines.append(
            "note: current grows without bound for any nonzero voltage; an i ~ t^2 device would sit at "
            "(D, Y), which needs multiplication of currents and so an active element."
        )
        payload["ideal_memristor_demo"] = demo
        name = "current-multiplier"
    if name is not None or args.candidate_file:
        if args.candidate_file:
            try:
                with open(args.candidate_file, encoding="utf-8") as fh:
                    data = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read candidate: {exc}") from None
            if not isinstance(data, dict):
                raise CandidateError("candidate must be a JSON object")
            candidate = et.ConstitutiveRelation.from_dict(data)
        elif name in et.BUILTIN_CANDIDATES:
            candidate = et.BUILTIN_CANDIDATES[name]
        else:
            raise ConfigError(f"unknown built-in candidate {name!r}; choose from {sorted(et.BUILTIN_CANDIDATES)}")
        verdict = et.evaluate(candidate)
        lines.append(f"{candidate.name or 'candidate'}: " + verdict.to_text())
        payload["verdict"] = verdict.to_dict()
    if args.table:
        table = et.canonical_table()
        lines.append(table.to_text())
        payload["table"] = table.to_dict()
    if args.memristor_report:
        report = et.memristor_rejection_report()
        lines.append(report.to_text().rstrip("\n"))
        payload["memristor_report"] = report.to_dict()
    if not payload:
        raise ConfigError("nothing to classify: give a candidate, --table or --memristor-report")
    if args.format == "json":
        sys.stdout.write(_json_text(payload))
    else:
        sys.stdout.write("\n".join(lines) + "\n")
    if args.out:
        _write_all(Path(args.out), {"classify.json": _json_text(payload)})
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="memgrid", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt_default="csv"):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", default="memgrid_out", help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default=fmt_default)
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config entry, e.g. --set device.p=-5")

    p = sub.add_parser("simulate", help="run a time-domain simulation and audit it")
    common(p)
    p.add_argument("--svg", action="store_true", help="also write SVG plots")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("decompose", help="tabulate Z1/Z2 over a flux sweep")
    common(p)
    p.add_argument("--include-flux-limit", action="store_true",
                   help="keep phi = 0 and use the analytic small-flux limit near it")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("sweep", help="check decomposition invariants over a parameter grid")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("classify", help="place or reject a constitutive relation")
    p.add_argument("candidate", nargs="?", help="built-in candidate name")
    p.add_argument("--candidate-file", help="JSON file with candidate fields")
    p.add_argument("--table", action="store_true", help="dump the canonical grid")
    p.add_argument("--memristor-report", action="store_true", help="print the memristor rejection chain")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", help="also write classify.json here")
    p.set_defaults(func=cmd_classify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CandidateError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrityError as exc:
        print(f"integrity violation: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except MemgridError as exc:
        # remaining domain/precondition failures come from invalid configuration
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
