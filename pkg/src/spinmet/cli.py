"""Command-line front end: bound reports, eta sweeps, Monte Carlo validation.

Subcommands
-----------
bound        information matrices and precisions at a single jitter value
sweep        CSV/JSON table of precisions over an eta grid
mc-validate  sampled maximum-likelihood check of the classical bound

Configuration merges in a fixed order: built-in defaults, then a --preset,
then a key=value config file, then explicit flags. Every run with the same
inputs produces byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from .coarsen import CoarseningModel, coarsened_family, gamma as gamma_of
from .errors import ConfigError, SpinmetError, ValidationError
from .fisher import (
    FisherMatrix,
    ParamChart,
    coarsened_qfi_closed_form,
    crbound_general,
    independent_precision,
    qfi_spectral,
    simultaneous_precision,
)
from .measurement import (
    PRNG_ID,
    cfi_matrix,
    mle_fit,
    qubit_probability_family,
    sample_outcomes,
)

CSV_HEADER = "eta,gamma,sim_precision,ind_precision,f11,f12,f22"

# closed form vs spectral oracle must agree this tightly or the run aborts
ORACLE_TOLERANCE = 1e-7

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_VALIDATION = 4

PRESETS = {
    "fig1": {
        "mode": "phenomenological",
        "alpha": 1.0,
        "tanh2": 1.0 / 3.0,
        "theta": math.pi / 3.0,
        "axis": "z",
        "curves": "qfi",
        "eta_start": 0.0,
        "eta_stop": 2.5,
        "eta_count": 101,
    },
    "fig2": {
        "mode": "phenomenological",
        "alpha": 1.0,
        "p1": 1.0 / 3.0,
        "theta": math.pi / 3.0,
        "axis": "z",
        "curves": "cfi",
        "eta_start": 0.0,
        "eta_stop": 2.5,
        "eta_count": 101,
    },
    "fig3": {
        "mode": "phenomenological",
        "alpha": 1.0,
        "tanh2": 1.0 / 3.0,
        "theta": math.pi / 3.0,
        "axis": "y",
        "curves": "qfi",
        "eta_start": 0.0,
        "eta_stop": 2.5,
        "eta_count": 101,
    },
}


@dataclass(frozen=True)
class RunConfig:
    """Fully merged run configuration; exactly one mode's parameters are set."""

    command: str
    mode: str
    spin: float = 0.5
    theta: float | None = None
    omega: float | None = None
    temperature: float | None = None
    alpha: float | None = None
    tanh2: float | None = None
    p1: float | None = None
    axis: str = "z"
    curves: str = "qfi"
    eta: float | None = None
    eta_start: float = 0.0
    eta_stop: float = 2.5
    eta_count: int = 101
    seed: int = 0
    shots: int = 100_000
    reps: int = 200
    mc_tol: float = 0.10
    out: str | None = None
    fmt: str | None = None
    preset: str | None = None


@dataclass(frozen=True)
class WorkingPoint:
    """Physical-equivalent evaluation point shared by every computation path.

    Phenomenological inputs (alpha, tanh2 or p1) map onto a physical pair
    (omega, temperature) through alpha = sech^2(delta/2)/(4 T), which is exact
    in both directions for a qubit.
    """

    theta: float
    tanh_half: float
    alpha: float
    delta: float
    temperature: float
    omega: float


def parse_config_file(path: str) -> dict:
    """Flat key=value file; '#' starts a comment; keys use flag names."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = value.strip()
    return values


_FLOAT_KEYS = {
    "spin", "theta", "omega", "temperature", "alpha", "tanh2", "p1",
    "eta", "eta_start", "eta_stop", "mc_tol",
}
_INT_KEYS = {"eta_count", "seed", "shots", "reps"}
_STR_KEYS = {"mode", "axis", "curves", "out", "fmt", "preset"}


def _coerce_file_values(raw: dict) -> dict:
    out = {}
    for key, value in raw.items():
        if key == "format":
            key = "fmt"
        if key in _FLOAT_KEYS:
            try:
                out[key] = float(value)
            except ValueError as exc:
                raise ConfigError(f"config field {key}: not a number: {value!r}") from exc
        elif key in _INT_KEYS:
            try:
                out[key] = int(value)
            except ValueError as exc:
                raise ConfigError(f"config field {key}: not an integer: {value!r}") from exc
        elif key in _STR_KEYS:
            out[key] = value
        else:
            raise ConfigError(f"config field {key}: unknown key")
    return out


def merge_config(command: str, args: argparse.Namespace) -> RunConfig:
    """defaults < preset < config file < explicit flags, flags winning."""
    merged: dict = {}
    file_values: dict = {}
    if getattr(args, "config", None):
        file_values = _coerce_file_values(parse_config_file(args.config))
    preset_name = getattr(args, "preset", None) or file_values.get("preset")
    if preset_name is not None:
        if preset_name not in PRESETS:
            raise ConfigError(f"config field preset: unknown preset {preset_name!r}")
        merged.update(PRESETS[preset_name])
        merged["preset"] = preset_name
    merged.update({k: v for k, v in file_values.items() if k != "preset"})
    valid = {f.name for f in fields(RunConfig)}
    for key in valid:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            merged[key] = flag_value
    merged["command"] = command
    mode = merged.get("mode")
    if mode is None:
        has_pheno = any(merged.get(k) is not None for k in ("alpha", "tanh2", "p1"))
        has_phys = any(merged.get(k) is not None for k in ("omega", "temperature"))
        if has_pheno and not has_phys:
            mode = "phenomenological"
        elif has_phys and not has_pheno:
            mode = "physical"
        else:
            raise ConfigError(
                "config field mode: cannot infer; give --mode or exactly one parameter set"
            )
    merged["mode"] = mode
    config = RunConfig(**{k: v for k, v in merged.items() if k in valid or k == "command"})
    validate_config(config)
    return config


def validate_config(config: RunConfig) -> None:
    if config.mode not in ("physical", "phenomenological"):
        raise ConfigError(f"config field mode: must be physical or phenomenological, got {config.mode!r}")
    if config.axis not in ("x", "y", "z"):
        raise ConfigError(f"config field axis: must be x, y or z, got {config.axis!r}")
    if config.curves not in ("qfi", "cfi"):
        raise ConfigError(f"config field curves: must be qfi or cfi, got {config.curves!r}")
    if config.theta is None:
        raise ConfigError("config field theta: required")
    if not (0.0 < config.theta < math.pi):
        raise ConfigError("config field theta: must lie in (0, pi)")
    if config.mode == "physical":
        if config.omega is None or config.temperature is None:
            raise ConfigError("config field omega/temperature: required in physical mode")
        if any(v is not None for v in (config.alpha, config.tanh2, config.p1)):
            raise ConfigError(
                "config field alpha/tanh2/p1: not allowed in physical mode"
            )
        if config.temperature <= 0:
            raise ConfigError("config field temperature: must be positive")
        if config.omega <= 0:
            raise ConfigError("config field omega: must be positive")
    else:
        if config.omega is not None or config.temperature is not None:
            raise ConfigError(
                "config field omega/temperature: not allowed in phenomenological mode"
            )
        if config.alpha is None:
            raise ConfigError("config field alpha: required in phenomenological mode")
        if config.alpha <= 0:
            raise ConfigError("config field alpha: must be positive")
        have_tanh2 = config.tanh2 is not None
        have_p1 = config.p1 is not None
        if have_tanh2 == have_p1:
            raise ConfigError("config field tanh2/p1: give exactly one of them")
        if have_tanh2 and not (0.0 < config.tanh2 < 1.0):
            raise ConfigError("config field tanh2: must lie in (0, 1)")
        if have_p1 and not (0.0 < config.p1 < 0.5):
            raise ConfigError("config field p1: must lie in (0, 1/2)")
    two_s = 2 * config.spin
    if abs(two_s - round(two_s)) > 1e-12 or config.spin <= 0:
        raise ConfigError(f"config field spin: must be a positive half-integer, got {config.spin}")
    if config.mode == "phenomenological" and config.spin != 0.5:
        raise ConfigError("config field spin: phenomenological mode is qubit-only (spin 1/2)")
    if config.eta_count < 2:
        raise ConfigError("config field eta_count: need at least 2 grid points")
    if config.eta_stop < config.eta_start:
        raise ConfigError("config field eta_start/eta_stop: grid must be non-decreasing")
    if config.eta is not None and config.eta < 0:
        raise ConfigError("config field eta: must be non-negative")
    if config.curves == "cfi" and config.spin != 0.5:
        raise ConfigError("config field curves: cfi curves need spin 1/2 (two-level measurement)")
    if config.command == "mc-validate":
        if config.spin != 0.5:
            raise ConfigError("config field spin: mc-validate needs spin 1/2")
        if config.shots < 1000:
            raise ConfigError("config field shots: need at least 1000")
        if config.reps < 10:
            raise ConfigError("config field reps: need at least 10")
        if not (0 < config.mc_tol < 1):
            raise ConfigError("config field mc_tol: must lie in (0, 1)")
    if config.fmt is not None and config.fmt not in ("csv", "json"):
        raise ConfigError(f"config field format: must be csv or json, got {config.fmt!r}")
    if config.command in ("bound", "mc-validate") and config.fmt == "csv":
        raise ConfigError("config field format: csv output exists only for sweep")


def working_point(config: RunConfig) -> WorkingPoint:
    """Resolve either mode to the shared physical-equivalent evaluation point."""
    if config.mode == "physical":
        delta = config.omega / config.temperature
        t = math.tanh(delta / 2.0)
        alpha = (1.0 - t * t) / (4.0 * config.temperature)
        return WorkingPoint(
            theta=config.theta, tanh_half=t, alpha=alpha, delta=delta,
            temperature=config.temperature, omega=config.omega,
        )
    t = math.sqrt(config.tanh2) if config.tanh2 is not None else 1.0 - 2.0 * config.p1
    delta = 2.0 * math.atanh(t)
    temperature = (1.0 - t * t) / (4.0 * config.alpha)
    return WorkingPoint(
        theta=config.theta, tanh_half=t, alpha=config.alpha, delta=delta,
        temperature=temperature, omega=delta * temperature,
    )


def _round12(x: float) -> float:
    return float(f"{x:.12g}")


def _json_ready(obj):
    """Round floats to 12 significant digits and stringify infinities."""
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return _round12(x + 0.0 if x != 0 else 0.0)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _json_ready(obj.tolist())
    return obj


def _fmt_csv_value(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        x = 0.0
    return f"{x:.12g}"


def _provenance(config: RunConfig) -> dict:
    return {"version": __version__, "seed": config.seed, "prng": PRNG_ID}


def _config_echo(config: RunConfig) -> dict:
    echo = {}
    for f in fields(RunConfig):
        value = getattr(config, f.name)
        if value is not None:
            echo[f.name] = value
    return echo


def _qfi_matrix_at(config: RunConfig, point: WorkingPoint, eta: float) -> tuple[FisherMatrix, list[str]]:
    """Closed-form matrix for a qubit, spectral for larger spins, with the
    cross-check between routes enforced at the oracle tolerance."""
    notes: list[str] = []
    model = CoarseningModel(axis=config.axis, eta=eta)
    if config.spin == 0.5:
        analytic = coarsened_qfi_closed_form(
            config.axis, point.theta, point.tanh_half, point.alpha, model.gamma
        )
        fam = coarsened_family(0.5, point.theta, point.omega, point.temperature, model)
        spectral = qfi_spectral(fam, fam.point0)
        gap = float(np.abs(analytic.entries - spectral.entries).max())
        if gap > ORACLE_TOLERANCE:
            raise ValidationError(
                f"closed-form and spectral information matrices disagree: "
                f"max gap {gap:.3e} exceeds {ORACLE_TOLERANCE:.1e}"
            )
        if config.axis in ("x", "z"):
            notes.append(
                "off-axis matrix entries use the positive denominator "
                "1 - tanh^2(delta/2)*q so the matrix stays positive semidefinite"
            )
        return analytic, notes
    fam = coarsened_family(config.spin, point.theta, point.omega, point.temperature, model)
    spectral = qfi_spectral(fam, fam.point0)
    if eta == 0.0:
        closed = crbound_general(
            config.spin, point.delta, point.theta, ParamChart.theta_omega(point.temperature)
        )
        via_spectral = simultaneous_precision(spectral)
        if math.isfinite(closed) and abs(closed - via_spectral) > ORACLE_TOLERANCE * max(1.0, abs(closed)):
            raise ValidationError(
                f"moment closed form and spectral trace-inverse disagree: "
                f"{closed!r} vs {via_spectral!r}"
            )
    else:
        notes.append("no closed form above spin 1/2 with jitter; spectral route only")
    return spectral, notes


def _cfi_matrix_at(config: RunConfig, point: WorkingPoint, eta: float) -> FisherMatrix:
    model = CoarseningModel(axis=config.axis, eta=eta)
    fam = qubit_probability_family(point.temperature, model)
    return cfi_matrix(fam, (point.theta, point.omega))


def _matrix_report(f: FisherMatrix) -> dict:
    sim = simultaneous_precision(f)
    ind = independent_precision(f)
    ratio = sim / ind if math.isfinite(sim) and math.isfinite(ind) and ind > 0 else float("inf")
    return {
        "entries": f.entries.tolist(),
        "sim_precision": sim,
        "ind_precision": ind,
        "sim_to_ind_ratio": ratio,
        "eigenvalue_ratio": f.eigenvalue_ratio(),
    }


def cmd_bound(config: RunConfig) -> dict:
    point = working_point(config)
    eta = config.eta if config.eta is not None else config.eta_start
    notes = [
        "alpha means |d(p1 - p2)/d omega| / 2 = sech^2(delta/2) / (4 T)",
    ]
    qfi, qfi_notes = _qfi_matrix_at(config, point, eta)
    notes.extend(qfi_notes)
    row: dict = {
        "eta": eta,
        "gamma": gamma_of(eta),
        "theta": point.theta,
        "delta": point.delta,
        "alpha": point.alpha,
        "axis": config.axis,
        "qfi": _matrix_report(qfi),
    }
    if config.spin == 0.5:
        row["cfi"] = _matrix_report(_cfi_matrix_at(config, point, eta))
    else:
        row["cfi"] = None
        notes.append("classical information uses a two-level measurement; skipped for spin > 1/2")
    return {
        "config": _config_echo(config),
        "rows": [row],
        "errata_notes": notes,
        "provenance": _provenance(config),
    }


def sweep_rows(config: RunConfig) -> list[dict]:
    point = working_point(config)
    etas = np.linspace(config.eta_start, config.eta_stop, config.eta_count)
    rows = []
    for eta in etas:
        eta = float(eta)
        if config.curves == "qfi":
            matrix, _ = _qfi_matrix_at(config, point, eta)
        else:
            matrix = _cfi_matrix_at(config, point, eta)
        entries = matrix.entries
        rows.append(
            {
                "eta": eta,
                "gamma": gamma_of(eta),
                "sim_precision": simultaneous_precision(matrix),
                "ind_precision": independent_precision(matrix),
                "f11": float(entries[0, 0]),
                "f12": float(entries[0, 1]),
                "f22": float(entries[1, 1]),
            }
        )
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    lines = [CSV_HEADER]
    keys = CSV_HEADER.split(",")
    for row in rows:
        lines.append(",".join(_fmt_csv_value(row[key]) for key in keys))
    return "\n".join(lines) + "\n"


def cmd_sweep(config: RunConfig) -> tuple[str, str]:
    """Returns (text, format); format csv unless json was requested."""
    rows = sweep_rows(config)
    fmt = config.fmt or "csv"
    if fmt == "csv":
        return rows_to_csv(rows), "csv"
    report = {
        "config": _config_echo(config),
        "rows": rows,
        "errata_notes": [],
        "provenance": _provenance(config),
    }
    return json.dumps(_json_ready(report), indent=2) + "\n", "json"


def cmd_mc_validate(config: RunConfig) -> tuple[dict, bool]:
    point = working_point(config)
    eta = config.eta if config.eta is not None else config.eta_start
    model = CoarseningModel(axis=config.axis, eta=eta)
    fam = qubit_probability_family(point.temperature, model)
    truth = (point.theta, point.omega)
    f_c = _cfi_matrix_at(config, point, eta)
    base = {
        "config": _config_echo(config),
        "errata_notes": [],
        "provenance": _provenance(config),
    }
    if f_c.eigenvalue_ratio() < 1e-10:
        eigvals, eigvecs = np.linalg.eigh(f_c.entries)
        null_vec = eigvecs[:, 0]
        which = "theta" if abs(null_vec[0]) >= abs(null_vec[1]) else "omega"
        base["rows"] = [
            {
                "passed": False,
                "reason": f"non-identifiable model at the configured point: {which}",
                "non_identifiable": [which],
                "cfi_entries": f_c.entries.tolist(),
            }
        ]
        return base, False
    theoretical = simultaneous_precision(f_c) / config.shots
    estimates = np.empty((config.reps, 2))
    n_converged = 0
    flag_counts: dict[str, int] = {}
    dist = fam(truth)
    for rep in range(config.reps):
        hist = sample_outcomes(dist, config.shots, seed=config.seed, stream=rep)
        result = mle_fit(hist, fam, init=truth)
        estimates[rep] = (result.theta_hat, result.omega_hat)
        n_converged += int(result.converged)
        for flag in result.flags:
            flag_counts[flag] = flag_counts.get(flag, 0) + 1
    empirical = float(np.trace(np.cov(estimates.T)))
    ratio = empirical / theoretical
    mostly_flagged = any(count > config.reps // 2 for count in flag_counts.values())
    passed = abs(ratio - 1.0) <= config.mc_tol and not mostly_flagged
    row = {
        "passed": passed,
        "n_shots": config.shots,
        "n_reps": config.reps,
        "eta": eta,
        "truth_theta": truth[0],
        "truth_omega": truth[1],
        "theoretical_trace": theoretical,
        "empirical_trace": empirical,
        "ratio": ratio,
        "tolerance": config.mc_tol,
        "mean_theta_hat": float(estimates[:, 0].mean()),
        "mean_omega_hat": float(estimates[:, 1].mean()),
        "n_converged": n_converged,
        "fit_flags": {k: flag_counts[k] for k in sorted(flag_counts)},
    }
    if mostly_flagged:
        flagged = sorted(k for k, v in flag_counts.items() if v > config.reps // 2)
        row["reason"] = "most fits flagged: " + ", ".join(flagged)
        row["non_identifiable"] = sorted(
            {"theta" if "theta" in f else "omega" for f in flagged}
        )
    base["rows"] = [row]
    return base, passed


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="key=value config file; flags override it")
    shared.add_argument("--preset", choices=sorted(PRESETS), help="named parameter preset")
    shared.add_argument("--mode", choices=["physical", "phenomenological"])
    shared.add_argument("--spin", type=float)
    shared.add_argument("--theta", type=float, help="polar angle in radians")
    shared.add_argument("--omega", type=float, help="energy gap (physical mode)")
    shared.add_argument("--temperature", type=float, help="temperature (physical mode)")
    shared.add_argument("--alpha", type=float, help="omega sensitivity scale (phenomenological)")
    shared.add_argument("--tanh2", type=float, help="tanh^2(delta/2) (phenomenological)")
    shared.add_argument("--p1", type=float, help="upper-level population (phenomenological)")
    shared.add_argument("--axis", choices=["x", "y", "z"])
    shared.add_argument("--curves", choices=["qfi", "cfi"], help="which information the sweep tabulates")
    shared.add_argument("--eta", type=float, help="single jitter value (bound, mc-validate)")
    shared.add_argument("--eta-start", dest="eta_start", type=float)
    shared.add_argument("--eta-stop", dest="eta_stop", type=float)
    shared.add_argument("--eta-count", dest="eta_count", type=int)
    shared.add_argument("--seed", type=int)
    shared.add_argument("--out", help="output path (default: stdout)")
    shared.add_argument("--format", dest="fmt", choices=["csv", "json"])

    parser = argparse.ArgumentParser(
        prog="spinmet",
        description="Precision bounds for two-parameter thermal-spin magnetometry",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("bound", parents=[shared], help="information matrices at one eta")
    sub.add_parser("sweep", parents=[shared], help="precision table over an eta grid")
    mc = sub.add_parser("mc-validate", parents=[shared], help="Monte Carlo bound attainment check")
    mc.add_argument("--shots", type=int, help="samples per replication (>= 1000)")
    mc.add_argument("--reps", type=int, help="number of replications (>= 10)")
    mc.add_argument("--mc-tol", dest="mc_tol", type=float, help="relative tolerance on the trace ratio")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = merge_config(args.command, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        if args.command == "bound":
            report = cmd_bound(config)
            text = json.dumps(_json_ready(report), indent=2) + "\n"
        elif args.command == "sweep":
            text, _ = cmd_sweep(config)
        else:
            report, passed = cmd_mc_validate(config)
            text = json.dumps(_json_ready(report), indent=2) + "\n"
            _emit(text, config.out)
            return EXIT_OK if passed else EXIT_VALIDATION
        _emit(text, config.out)
        return EXIT_OK
    except ValidationError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SpinmetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
