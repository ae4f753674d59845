"""Command-line front end.

Every subcommand resolves its configuration as built-in defaults, then an
optional ``key=value`` config file, then flags, and writes a table to
stdout (or ``--output``) as CSV or JSON. CSV output starts with a ``#``
header block echoing the resolved configuration.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 infeasible design.
"""

import argparse
import io
import json
import math
import sys
import warnings

import numpy as np

from . import __version__
from .closedform import worst_ergodic_alpha4
from .coverage import (
    COVERAGE_EPSABS,
    ERGODIC_TRUNCATION,
    capacity_coverage,
    coverage_probability,
    ergodic_capacity,
)
from .design import (
    DesignSpec,
    Scenario,
    density_sweep,
    radial_profile,
    snr_sweep,
    solve_required_aps,
)
from .errors import DomainError, InfeasibleDesignError, QuadratureError
from .geometry import DiskGeometry, EvalPoint
from .mma import n_aps_from_density
from .montecarlo import SimConfig, estimate_coverage, estimate_ergodic, simulate_sinr
from .perturb import delta_profile, fit_delta_poly

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_INFEASIBLE = 0, 2, 3, 4

SCENARIO_DEFAULTS = {
    "radius_km": 1.0,
    "n_aps": None,
    "density": None,
    "alpha": 3.87,
    "shadow_db": 0.0,
    "tx_power_dbm": 20.0,
    "noise_power_dbm": None,
    "pathloss_ref_km": 1.0,
}

COMMAND_DEFAULTS = {
    "coverage": {"d_km": 0.0, "threshold_db": [float(t) for t in range(-10, 21)]},
    "capacity": {"d_km": 0.0, "c0": [5.0]},
    "ergodic": {"d_km": 0.0},
    "worstcap4": {},
    "profile": {"d_grid": "0:1:0.05", "threshold_db": [0.0]},
    "sweep-density": {"densities": [1.0, 2.0, 5.0, 10.0, 30.0], "threshold_db": [0.0], "d_km": 0.0},
    "sweep-snr": {"snr_db": "90:120:2", "threshold_db": [0.0], "d_km": 0.0},
    "design": {"target": "capacity_coverage", "c0": [5.0], "min_prob": 0.6, "n_max": 10_000},
    "simulate": {"d_km": 0.0, "threshold_db": [0.0], "trials": 100_000, "seed": 0,
                 "antithetic": False},
    "perturb-fit": {"d_grid": "0:0.5:0.05", "degree": 3},
}

_FLOAT_KEYS = {"radius_km", "density", "alpha", "shadow_db", "tx_power_dbm", "noise_power_dbm",
               "pathloss_ref_km", "d_km", "min_prob"}
_INT_KEYS = {"n_aps", "n_max", "trials", "seed", "degree"}
_LIST_KEYS = {"threshold_db", "c0", "densities"}
_BOOL_KEYS = {"antithetic"}
_STR_KEYS = {"d_grid", "snr_db", "target"}


# commands whose AP count is an output, not an input
_SEARCHES_N = {"design", "sweep-density"}


class CliError(Exception):
    def __init__(self, message, code=EXIT_INVALID):
        super().__init__(message)
        self.code = code


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.9g}"
    if isinstance(x, (list, tuple)):
        return ";".join(_fmt(v) for v in x)
    return str(x)


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(f"{x:.9g}") if math.isfinite(x) else str(x)
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


def _coerce(key, value):
    """Convert a config-file string to the type of ``key``."""
    try:
        if key in _FLOAT_KEYS:
            return None if value.lower() in ("", "none") else float(value)
        if key in _INT_KEYS:
            return None if value.lower() in ("", "none") else int(value)
        if key in _LIST_KEYS:
            return [float(v) for v in value.replace(";", ",").split(",") if v.strip()]
        if key in _BOOL_KEYS:
            if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(value)
            return value.lower() in ("true", "1", "yes")
        if key in _STR_KEYS:
            return value
    except ValueError:
        raise CliError(f"config: invalid value {value!r} for {key}") from None
    raise CliError(f"config: unknown key {key!r}")


def read_config_file(path, command):
    """Parse ``key=value`` lines (``#`` comments, dashes or underscores in keys)."""
    allowed = set(SCENARIO_DEFAULTS) | set(COMMAND_DEFAULTS[command])
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise CliError(f"config: cannot read {path}: {exc.strerror}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"config line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in allowed:
            raise CliError(f"config line {lineno}: unknown key {key!r} for {command}")
        out[key] = _coerce(key, value)
    return out


def _merge(layers):
    """Later layers win; ``n_aps``/``density`` are replaced as a pair."""
    out = {}
    for layer in layers:
        given = {k: v for k, v in layer.items() if v is not None}
        if "n_aps" in given and "density" in given:
            raise CliError("give exactly one of n_aps and density")
        if "n_aps" in given or "density" in given:
            out["n_aps"] = out["density"] = None
        out.update(given)
    return out


def _grid(spec, name):
    """``start:stop:step`` (inclusive stop) or a comma-separated list."""
    try:
        if ":" in spec:
            start, stop, step = (float(s) for s in spec.split(":"))
            if step <= 0:
                raise ValueError
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 12) for i in range(max(n, 0))]
        return [float(s) for s in spec.replace(";", ",").split(",") if s.strip()]
    except ValueError:
        raise CliError(f"{name}: expected start:stop:step or a comma list, got {spec!r}") from None


def _scenario(cfg):
    return Scenario(cfg["radius_km"], cfg["alpha"], shadow_std_db=cfg["shadow_db"],
                    tx_power_dbm=cfg["tx_power_dbm"], noise_power_dbm=cfg.get("noise_power_dbm"),
                    pathloss_ref_km=cfg["pathloss_ref_km"])


def _n_aps(cfg):
    if cfg.get("n_aps") is not None:
        return cfg["n_aps"]
    return n_aps_from_density(cfg["density"], cfg["radius_km"])


def _model(cfg):
    return _scenario(cfg).model(_n_aps(cfg))


def _lin(db):
    return 10.0 ** (db / 10.0)


def _cmd_coverage(cfg):
    model = _model(cfg)
    point = EvalPoint(cfg["d_km"])
    T = np.array([_lin(t) for t in cfg["threshold_db"]])
    cp = np.atleast_1d(coverage_probability(T, point, model))
    cols = ["d_km", "threshold_db", "coverage"]
    return cols, [(cfg["d_km"], t, float(p)) for t, p in zip(cfg["threshold_db"], cp)], {}


def _cmd_capacity(cfg):
    model = _model(cfg)
    cp = np.atleast_1d(capacity_coverage(np.array(cfg["c0"]), EvalPoint(cfg["d_km"]), model))
    cols = ["d_km", "c0_bps_hz", "capacity_coverage"]
    return cols, [(cfg["d_km"], c, float(p)) for c, p in zip(cfg["c0"], cp)], {}


def _cmd_ergodic(cfg):
    model = _model(cfg)
    res = ergodic_capacity(EvalPoint(cfg["d_km"]), model, full_output=True)
    cols = ["d_km", "n_aps", "ergodic_bps_hz", "upper_limit_bps_hz", "abserr"]
    return cols, [(cfg["d_km"], model.n_aps, res.value, res.upper_limit, res.abserr)], {}


def _cmd_worstcap4(cfg):
    n = _n_aps(cfg)
    value = worst_ergodic_alpha4(n, cfg["shadow_db"])
    return ["n_aps", "shadow_db", "ergodic_bps_hz"], [(n, cfg["shadow_db"], value)], {}


def _cmd_profile(cfg):
    model = _model(cfg)
    grid = _grid(cfg["d_grid"], "d_grid")
    rows = []
    for t in cfg["threshold_db"]:
        for d, cp in radial_profile(model, _lin(t), grid):
            rows.append((d, t, cp))
    return ["d_km", "threshold_db", "coverage"], rows, {}


def _cmd_sweep_density(cfg):
    sc = _scenario(cfg)
    rows = []
    for t in cfg["threshold_db"]:
        for lam, n, cp in density_sweep(sc, cfg["densities"], _lin(t), d_km=cfg["d_km"]):
            rows.append((lam, n, t, cp))
    return ["density_per_km2", "n_aps", "threshold_db", "coverage"], rows, {}


def _cmd_sweep_snr(cfg):
    sc = _scenario(cfg)
    n = _n_aps(cfg)
    rows = []
    for t in cfg["threshold_db"]:
        for snr, cp in snr_sweep(sc, _grid(cfg["snr_db"], "snr_db"), _lin(t), n, d_km=cfg["d_km"]):
            rows.append((snr, n, t, cp))
    return ["snr_t_db", "n_aps", "threshold_db", "coverage"], rows, {}


def _cmd_design(cfg):
    if len(cfg["c0"]) != 1:
        raise CliError("design takes a single c0")
    target = {"coverage": "capacity_coverage", "ergodic": "ergodic_capacity"}.get(
        cfg["target"], cfg["target"])
    spec = DesignSpec(target, cfg["c0"][0], _scenario(cfg), min_probability=cfg["min_prob"],
                      n_max=cfg["n_max"])
    res = solve_required_aps(spec)
    area = DiskGeometry(cfg["radius_km"]).area_km2
    rows = [("n_aps", res.n_aps), ("density_per_km2", res.n_aps / area), ("value", res.value),
            ("previous_value", res.previous_value), ("linear_scan", res.linear_scan)]
    return ["key", "value"], rows, {}


def _cmd_simulate(cfg):
    model = _model(cfg)
    sim = SimConfig(cfg["trials"], cfg["seed"], cfg["antithetic"])
    point = EvalPoint(cfg["d_km"])
    sinr = simulate_sinr(point, model, sim)
    rows = []
    for t in cfg["threshold_db"]:
        est = estimate_coverage(_lin(t), point, model, sim, sinr=sinr)
        rows.append((cfg["d_km"], t, est.value, est.std_error, est.trials))
    erg = estimate_ergodic(point, model, sim, sinr=sinr)
    meta = {"seed": sim.seed, "ergodic_bps_hz": erg.value, "ergodic_std_error": erg.std_error}
    return ["d_km", "threshold_db", "coverage", "std_error", "trials"], rows, meta


def _cmd_perturb_fit(cfg):
    model = _model(cfg)
    samples = delta_profile(model, _grid(cfg["d_grid"], "d_grid"))
    fit = fit_delta_poly(samples, cfg["degree"])
    rows = [(f"a{i}", c) for i, c in enumerate(fit.coefficients)]
    rows.append(("residual_rms_db", fit.residual_rms))
    rows.append(("max_abs_delta_db", max(abs(v) for _, v in samples)))
    meta = {"samples": [[d, v] for d, v in samples]}
    return ["key", "value"], rows, meta


COMMANDS = {
    "coverage": (_cmd_coverage, "SIR/SINR coverage at one point"),
    "capacity": (_cmd_capacity, "user-capacity coverage at one point"),
    "ergodic": (_cmd_ergodic, "ergodic user capacity at one point"),
    "worstcap4": (_cmd_worstcap4, "closed-form worst-case ergodic capacity (alpha = 4)"),
    "profile": (_cmd_profile, "coverage along a radial line"),
    "sweep-density": (_cmd_sweep_density, "coverage versus AP density"),
    "sweep-snr": (_cmd_sweep_snr, "coverage versus transmit SNR"),
    "design": (_cmd_design, "minimum AP count for a target"),
    "simulate": (_cmd_simulate, "Monte-Carlo coverage and ergodic capacity"),
    "perturb-fit": (_cmd_perturb_fit, "polynomial fit of the averaged-SIR change near the centre"),
}


def _add_scenario_flags(p):
    g = p.add_argument_group("scenario")
    g.add_argument("--radius-km", type=float)
    n = g.add_mutually_exclusive_group()
    n.add_argument("--n-aps", type=int)
    n.add_argument("--density", type=float, help="APs per km^2; N = round(pi R^2 density)")
    g.add_argument("--alpha", type=float)
    g.add_argument("--shadow-db", type=float)
    g.add_argument("--tx-power-dbm", type=float)
    g.add_argument("--noise-power-dbm", type=float, help="omit for interference-limited")
    g.add_argument("--pathloss-ref-km", type=float)
    o = p.add_argument_group("output")
    o.add_argument("--config", help="key=value file supplying defaults")
    o.add_argument("--format", choices=("csv", "json"), default="csv")
    o.add_argument("--output", help="write here instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(prog="finitenet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        _add_scenario_flags(p)
        keys = COMMAND_DEFAULTS[name]
        if "d_km" in keys:
            p.add_argument("--d-km", type=float)
        if "threshold_db" in keys:
            p.add_argument("--threshold-db", type=float, nargs="+")
        if "c0" in keys:
            p.add_argument("--c0", type=float, nargs="+", help="b/s/Hz")
        if "d_grid" in keys:
            p.add_argument("--d-grid", help="start:stop:step or comma list (km)")
        if "densities" in keys:
            p.add_argument("--densities", type=float, nargs="+")
        if "snr_db" in keys:
            p.add_argument("--snr-db", help="start:stop:step or comma list (dB)")
        if "target" in keys:
            p.add_argument("--target", choices=("coverage", "ergodic", "capacity_coverage",
                                                "ergodic_capacity"))
            p.add_argument("--min-prob", type=float)
            p.add_argument("--n-max", type=int)
        if "trials" in keys:
            p.add_argument("--trials", type=int)
            p.add_argument("--seed", type=int)
            p.add_argument("--antithetic", action="store_true", default=None)
        if "degree" in keys:
            p.add_argument("--degree", type=int)
    return parser


def resolve_config(args):
    """Defaults < config file < flags, as one flat dict."""
    command = args.command
    defaults = dict(SCENARIO_DEFAULTS, **COMMAND_DEFAULTS[command])
    file_cfg = read_config_file(args.config, command) if args.config else {}
    flags = {k: getattr(args, k) for k in defaults if getattr(args, k, None) is not None}
    cfg = _merge([defaults, file_cfg, flags])
    if cfg.get("n_aps") is None and cfg.get("density") is None:
        cfg["density"] = 1.0
    return cfg


def _tolerances():
    return {"coverage_epsabs": COVERAGE_EPSABS, "ergodic_truncation": ERGODIC_TRUNCATION}


def render(command, cfg, cols, rows, meta, fmt):
    """Serialize one result table. Output depends only on its inputs."""
    echo = {"command": command, **{k: cfg.get(k) for k in SCENARIO_DEFAULTS}, **cfg}
    if command in _SEARCHES_N:
        del echo["n_aps"], echo["density"]
    elif cfg.get("density") is not None:
        echo["n_aps_resolved"] = n_aps_from_density(cfg["density"], cfg["radius_km"])
    full_meta = {"version": __version__, "tolerances": _tolerances(), **meta}
    if fmt == "json":
        doc = {"config": {k: _json_value(v) for k, v in echo.items()},
               "rows": [{c: _json_value(v) for c, v in zip(cols, row)} for row in rows],
               "meta": {k: _json_value(v) for k, v in full_meta.items()}}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# finitenet {__version__}\n")
    for k, v in echo.items():
        buf.write(f"# {k}={_fmt(v)}\n")
    for k, v in full_meta.items():
        if k == "version":
            continue
        if isinstance(v, dict):
            for kk, vv in v.items():
                buf.write(f"# {kk}={_fmt(vv)}\n")
        elif k != "samples" and k not in echo:
            buf.write(f"# {k}={_fmt(v)}\n")
    buf.write(",".join(cols) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def run(argv=None):
    """Parse and execute; returns ``(exit_code, output_text, output_path)``."""
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = resolve_config(args)
    handler = COMMANDS[args.command][0]
    cols, rows, meta = handler(cfg)
    return EXIT_OK, render(args.command, cfg, cols, rows, meta, args.format), args.output


def main(argv=None):
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            code, text, path = run(argv)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except QuadratureError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except InfeasibleDesignError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
