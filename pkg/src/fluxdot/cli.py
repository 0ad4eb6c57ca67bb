"""Command-line harness: configure a run, execute an experiment, emit a table.

Subcommands map one-to-one onto the physics entry points: ``time-trace``
(occupation dynamics from the empty device), ``flux-sweep`` (steady-state
coherence locus), ``transmission`` (energy- and flux-resolved transmission),
``current`` (flux dependence of the stationary current) and ``verify``
(self-check suite comparing the pipeline against its closed forms and the
discretized-lead reference).

Output is CSV by default (JSON mirrors it): '#'-prefixed metadata lines carry
the tool version, the command, a one-line statement of the sign conventions
and the full resolved configuration, followed by a units line and the header
row.  Identical configurations produce byte-identical files.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional, Sequence, TextIO

import numpy as np

from .analytics import large_bias_rho21, steady_current, steady_rho21_closed, transmission
from .core import (BathParams, DeviceParams, PhaseUndefined, QuadratureNotConverged,
                   UnitarityViolation, validate)
from .oracle import build_model, evolve, reduced_rho
from .propagator import QuadratureSpec, occupation_v, steady_v
from .state import (assemble_rho, bloch_vector, coherence_phase,
                    fidelity_to_target)

__version__ = "0.1.0"

_CONVENTION = ("v[m][n]=<adag_m a_n>; generator M=-i*diag(e1,e2)"
               "+(gl*WL(phi)+gr*WR(phi))/2 with WL upper off-diagonal "
               "exp(+i*phi/2); energies in units of gl+gr, times in its "
               "inverse; phase=atan2(im,re), nan when |rho21|<=1e-9")


class UsageError(Exception):
    """Bad flags, bad config file, or physically invalid parameters."""


class VerificationFailure(Exception):
    """One or more verify checks exceeded tolerance."""


@dataclass(frozen=True)
class TimeGrid:
    t_max: float = 6.0
    n_points: int = 121

    @property
    def points(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_points)


@dataclass(frozen=True)
class FluxGrid:
    phi_min: float = -2.0 * math.pi
    phi_max: float = 2.0 * math.pi
    n_points: int = 33

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.phi_min, self.phi_max, self.n_points)


@dataclass(frozen=True)
class OmegaGrid:
    w_min: float = -6.0
    w_max: float = 6.0
    n_points: int = 241

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.w_min, self.w_max, self.n_points)


@dataclass(frozen=True)
class OracleOpts:
    n_modes: int = 400
    lead_bandwidth: float = 20.0


@dataclass(frozen=True)
class RunConfig:
    device: DeviceParams
    bath: BathParams
    quad: QuadratureSpec
    time_grid: TimeGrid
    flux_grid: FluxGrid
    omega_grid: OmegaGrid
    oracle_opts: OracleOpts
    output_path: Optional[str]
    format: str
    seed: int
    tamper_full_linewidth: bool = False


@dataclass
class ResultTable:
    columns: tuple
    units: tuple
    rows: list
    metadata: dict

    def _metadata_lines(self) -> list:
        lines = [f"# fluxdot {__version__}"]
        ordered = dict(self.metadata)
        for key in ("command", "convention"):
            if key in ordered:
                lines.append(f"# {key}: {ordered.pop(key)}")
        for key in sorted(ordered):
            lines.append(f"# {key} = {ordered[key]}")
        lines.append("# units: " + ",".join(self.units))
        return lines

    def write_csv(self, fh: TextIO) -> None:
        for line in self._metadata_lines():
            fh.write(line + "\n")
        fh.write(",".join(self.columns) + "\n")
        for row in self.rows:
            fh.write(",".join(_cell(x) for x in row) + "\n")

    def write_json(self, fh: TextIO) -> None:
        rows = [[None if _is_nan(x) else x for x in row] for row in self.rows]
        doc = {"metadata": {k: str(v) for k, v in self.metadata.items()},
               "version": __version__,
               "columns": list(self.columns),
               "units": list(self.units),
               "rows": rows}
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")

    def write(self, path: Optional[str], fmt: str) -> None:
        writer = self.write_json if fmt == "json" else self.write_csv
        if path is None or path == "-":
            writer(sys.stdout)
        else:
            with open(path, "w", newline="\n") as fh:
                writer(fh)


def _is_nan(x) -> bool:
    return isinstance(x, float) and math.isnan(x)


def _cell(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


# ---------------------------------------------------------------------------
# configuration plumbing

_FLOAT_KEYS = ("e1", "e2", "gamma_l", "gamma_r", "phi", "bias", "temperature",
               "cutoff", "t_max", "phi_min", "phi_max", "w_min", "w_max",
               "oracle_bandwidth")
_INT_KEYS = ("n_t", "n_phi", "n_w", "oracle_modes", "seed")
_STR_KEYS = ("out", "format")

_DEFAULTS = {
    "e1": 0.0, "e2": 0.0, "gamma_l": 0.95, "gamma_r": 0.05,
    "phi": -math.pi / 2, "bias": 6.0, "temperature": 0.05, "cutoff": 50.0,
    "t_max": 6.0, "n_t": 121,
    "phi_min": -2.0 * math.pi, "phi_max": 2.0 * math.pi, "n_phi": 33,
    "w_min": -6.0, "w_max": 6.0, "n_w": 241,
    "oracle_modes": 400, "oracle_bandwidth": 20.0,
    "out": "-", "format": "csv", "seed": 0,
}


def _parse_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key in _FLOAT_KEYS:
            try:
                values[key] = float(val)
            except ValueError:
                raise UsageError(f"{path}:{lineno}: {key} needs a number")
        elif key in _INT_KEYS:
            try:
                values[key] = int(val)
            except ValueError:
                raise UsageError(f"{path}:{lineno}: {key} needs an integer")
        elif key in _STR_KEYS:
            values[key] = val
        else:
            raise UsageError(f"{path}:{lineno}: unknown key '{key}'")
    return values


def _resolve(args: argparse.Namespace) -> RunConfig:
    values = dict(_DEFAULTS)
    if getattr(args, "config", None):
        values.update(_parse_config_file(args.config))
    for key in (*_FLOAT_KEYS, *_INT_KEYS, *_STR_KEYS):
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag

    if values["format"] not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got '{values['format']}'")
    if values["t_max"] <= 0:
        raise UsageError("t-max must be positive")
    for key in ("n_t", "n_phi", "n_w"):
        if values[key] < 1:
            raise UsageError(f"{key.replace('_', '-')} must be at least 1")

    device = DeviceParams(e1=values["e1"], e2=values["e2"],
                          gamma_l=values["gamma_l"], gamma_r=values["gamma_r"],
                          phi=values["phi"])
    bath = BathParams.symmetric_bias(values["bias"],
                                     temperature=values["temperature"],
                                     cutoff=values["cutoff"])
    report = validate(device, bath)
    if not report.ok:
        raise UsageError("invalid parameters: " + "; ".join(report.violations))

    return RunConfig(
        device=device, bath=bath, quad=QuadratureSpec(),
        time_grid=TimeGrid(values["t_max"], values["n_t"]),
        flux_grid=FluxGrid(values["phi_min"], values["phi_max"], values["n_phi"]),
        omega_grid=OmegaGrid(values["w_min"], values["w_max"], values["n_w"]),
        oracle_opts=OracleOpts(values["oracle_modes"], values["oracle_bandwidth"]),
        output_path=None if values["out"] == "-" else values["out"],
        format=values["format"], seed=values["seed"],
        tamper_full_linewidth=bool(getattr(args, "debug_full_linewidth", False)))


def _metadata(config: RunConfig, command: str) -> dict:
    dev, bath = config.device, config.bath
    md = {
        "command": command,
        "convention": _CONVENTION,
        "config.e1": _cell(dev.e1), "config.e2": _cell(dev.e2),
        "config.gamma_l": _cell(dev.gamma_l), "config.gamma_r": _cell(dev.gamma_r),
        "config.phi": _cell(dev.phi), "config.bias": _cell(bath.bias),
        "config.temperature": _cell(bath.temperature),
        "config.cutoff": _cell(bath.cutoff),
        "config.t_max": _cell(config.time_grid.t_max),
        "config.n_t": _cell(config.time_grid.n_points),
        "config.phi_min": _cell(config.flux_grid.phi_min),
        "config.phi_max": _cell(config.flux_grid.phi_max),
        "config.n_phi": _cell(config.flux_grid.n_points),
        "config.w_min": _cell(config.omega_grid.w_min),
        "config.w_max": _cell(config.omega_grid.w_max),
        "config.n_w": _cell(config.omega_grid.n_points),
        "config.oracle_modes": _cell(config.oracle_opts.n_modes),
        "config.oracle_bandwidth": _cell(config.oracle_opts.lead_bandwidth),
        "config.format": config.format,
        "config.seed": _cell(config.seed),
    }
    return md


def _phase_or_nan(rho) -> float:
    try:
        return coherence_phase(rho)
    except PhaseUndefined:
        return float("nan")


# ---------------------------------------------------------------------------
# commands

def cmd_time_trace(config: RunConfig) -> ResultTable:
    columns = ("t", "rho00", "rho11", "rho22", "rho33", "re_rho21", "im_rho21",
               "rx", "ry", "rz", "leakage", "phase", "fidelity")
    units = ("1/Gamma", "1", "1", "1", "1", "1", "1", "1", "1", "1", "1",
             "rad", "1")
    rows = []
    for t in config.time_grid.points:
        try:
            v = occupation_v(config.device, config.bath, float(t), config.quad)
        except QuadratureNotConverged as exc:
            raise QuadratureNotConverged(
                f"time trace failed at t={t:.6g}: {exc}",
                error_estimate=exc.error_estimate)
        rho = assemble_rho(v)
        bl = bloch_vector(rho)
        rows.append((float(t), rho.rho00, rho.rho11, rho.rho22, rho.rho33,
                     rho.rho21.real, rho.rho21.imag,
                     bl.r[0], bl.r[1], bl.r[2], bl.leakage,
                     _phase_or_nan(rho),
                     fidelity_to_target(rho, config.device.phi)))
    return ResultTable(columns, units, rows, _metadata(config, "time-trace"))


def cmd_flux_sweep(config: RunConfig) -> ResultTable:
    columns = ("phi", "re_rho21", "im_rho21", "abs_rho21", "phase",
               "fidelity_to_psi_phi", "closed_form_re", "closed_form_im")
    units = ("rad", "1", "1", "1", "rad", "1", "1", "1")
    symmetric = abs(config.bath.mu_l + config.bath.mu_r) <= 1e-12
    rows = []
    for phi in config.flux_grid.points:
        dev = replace(config.device, phi=float(phi))
        try:
            v = steady_v(dev, config.bath, config.quad)
        except QuadratureNotConverged as exc:
            raise QuadratureNotConverged(
                f"flux sweep failed at phi={phi:.6g}: {exc}",
                error_estimate=exc.error_estimate)
        rho = assemble_rho(v)
        p21 = rho.rho21
        if symmetric:
            cf = steady_rho21_closed(dev, config.bath.bias)
            cf_re, cf_im = cf.real, cf.imag
        else:
            cf_re = cf_im = float("nan")
        rows.append((float(phi), p21.real, p21.imag, abs(p21),
                     _phase_or_nan(rho), fidelity_to_target(rho, dev.phi),
                     cf_re, cf_im))
    return ResultTable(columns, units, rows, _metadata(config, "flux-sweep"))


def cmd_transmission_scan(config: RunConfig) -> ResultTable:
    columns = ("omega", "phi", "transmission")
    units = ("Gamma", "rad", "1")
    rows = []
    try:
        for w in config.omega_grid.points:
            for phi in config.flux_grid.points:
                dev = replace(config.device, phi=float(phi))
                rows.append((float(w), float(phi), transmission(dev, float(w))))
    except UnitarityViolation as exc:
        raise UnitarityViolation(
            f"transmission out of bounds at omega={w:.6g}, phi={phi:.6g}: {exc}")
    return ResultTable(columns, units, rows, _metadata(config, "transmission"))


def cmd_current_vs_flux(config: RunConfig) -> ResultTable:
    columns = ("phi", "current")
    units = ("rad", "e*Gamma/hbar")
    rows = []
    residual = 0.0
    for phi in config.flux_grid.points:
        dev = replace(config.device, phi=float(phi))
        cur = steady_current(dev, config.bath, config.quad)
        shifted = steady_current(replace(dev, phi=float(phi) + 2.0 * math.pi),
                                 config.bath, config.quad)
        residual = max(residual, abs(cur - shifted))
        rows.append((float(phi), cur))
    md = _metadata(config, "current")
    md["period_residual_2pi"] = _cell(residual)
    return ResultTable(columns, units, rows, md)


# ---------------------------------------------------------------------------
# verify suite

_ACCEPT_QUAD = QuadratureSpec(tail_correction=True)


def _check_closed_form_grid() -> float:
    worst = 0.0
    for k in range(-8, 9):
        phi = k * math.pi / 4
        for dgam in (0.0, 0.5, 0.9):
            for de in (0.0, 0.5):
                for bias in (2.0, 6.0):
                    dev = DeviceParams(e1=de / 2, e2=-de / 2,
                                       gamma_l=(1 + dgam) / 2,
                                       gamma_r=(1 - dgam) / 2, phi=phi)
                    bath = BathParams.symmetric_bias(bias, temperature=0.0)
                    v21 = steady_v(dev, bath, _ACCEPT_QUAD).v[1, 0]
                    worst = max(worst, abs(v21 - steady_rho21_closed(dev, bias)))
    return worst


def _check_large_bias() -> float:
    bath = BathParams.symmetric_bias(200.0, temperature=0.0, cutoff=250.0)
    worst = 0.0
    for dgam in (0.5, 0.9):
        for k in (-4, -3, -2, -1, 1, 2, 3, 4):
            dev = DeviceParams(gamma_l=(1 + dgam) / 2, gamma_r=(1 - dgam) / 2,
                               phi=k * math.pi / 2)
            v21 = steady_v(dev, bath, _ACCEPT_QUAD).v[1, 0]
            worst = max(worst, abs(v21 - large_bias_rho21(dev)))
    # spot values of the limiting form itself
    spot_pi = large_bias_rho21(DeviceParams(gamma_l=0.95, gamma_r=0.05,
                                            phi=math.pi))
    spot_2pi = large_bias_rho21(DeviceParams(gamma_l=0.95, gamma_r=0.05,
                                             phi=2 * math.pi))
    worst = max(worst, abs(spot_pi - (-0.5j)), abs(spot_2pi - (-0.45)))
    return worst


def _check_flux_periodicity() -> float:
    bath = BathParams.symmetric_bias(6.0, temperature=0.0)
    worst = 0.0
    for phi in (0.3, 1.1, 2.2):
        base = DeviceParams(gamma_l=0.95, gamma_r=0.05, phi=phi)
        wrapped = replace(base, phi=phi + 4.0 * math.pi)
        worst = max(worst, float(np.abs(steady_v(base, bath, _ACCEPT_QUAD).v
                                        - steady_v(wrapped, bath, _ACCEPT_QUAD).v).max()))
    return worst


def _check_current_periodicity() -> float:
    bath = BathParams.symmetric_bias(6.0, temperature=0.0)
    dev = DeviceParams(gamma_l=0.7, gamma_r=0.3, phi=1.1)
    return abs(steady_current(dev, bath)
               - steady_current(replace(dev, phi=1.1 + 2.0 * math.pi), bath))


def _check_destructive_interference() -> float:
    worst = 0.0
    for dgam in (0.0, 0.9):
        for bias in (2.0, 6.0):
            dev = DeviceParams(gamma_l=(1 + dgam) / 2, gamma_r=(1 - dgam) / 2,
                               phi=math.pi)
            bath = BathParams.symmetric_bias(bias, temperature=0.0)
            worst = max(worst, abs(steady_current(dev, bath)))
    return worst


def _check_oracle(n_modes: int, lead_bandwidth: float) -> float:
    dev = DeviceParams(gamma_l=0.95, gamma_r=0.05, phi=-math.pi / 2)
    bath = BathParams.symmetric_bias(6.0, temperature=0.05)
    model = build_model(dev, bath, n_modes=n_modes, lead_bandwidth=lead_bandwidth)
    worst = 0.0
    for t in (0.5, 1.0, 2.0, 3.0):
        ro = reduced_rho(model, evolve(model, t))
        rp = assemble_rho(occupation_v(dev, bath, t, _ACCEPT_QUAD))
        worst = max(worst, abs(ro.rho00 - rp.rho00), abs(ro.rho11 - rp.rho11),
                    abs(ro.rho22 - rp.rho22), abs(ro.rho33 - rp.rho33),
                    abs(ro.rho21 - rp.rho21))
    return worst


def _check_convention_lock(tampered: bool) -> float:
    expected = -1j * math.atan(6.0) / math.pi
    if tampered:
        # debug probe: same steady integral but with the decay generator's
        # diagonal at the full linewidth instead of half of it.  At balanced
        # couplings and phi=pi the generator is scalar, so the pipeline
        # collapses to one arctan whose argument the tampering halves.
        lam = 1.0
        j_up = (math.pi / 2 + math.atan(3.0 / lam)) / (2 * math.pi * lam)
        j_dn = (math.pi / 2 - math.atan(3.0 / lam)) / (2 * math.pi * lam)
        value = 0.5 * (-1j) * j_up + 0.5 * 1j * j_dn
    else:
        dev = DeviceParams(gamma_l=0.5, gamma_r=0.5, phi=math.pi)
        bath = BathParams.symmetric_bias(6.0, temperature=0.0)
        value = steady_v(dev, bath, _ACCEPT_QUAD).v[1, 0]
    return abs(value - expected)


def cmd_verify(config: RunConfig) -> tuple:
    n = config.oracle_opts.n_modes
    checks: Sequence[tuple] = (
        ("closed-form-grid", _check_closed_form_grid, 1e-6),
        ("large-bias-limit", _check_large_bias, 1e-2),
        ("flux-periodicity-4pi", _check_flux_periodicity, 1e-9),
        ("current-periodicity-2pi", _check_current_periodicity, 1e-10),
        ("destructive-interference", _check_destructive_interference, 1e-9),
        ("oracle-equivalence",
         lambda: _check_oracle(n, config.oracle_opts.lead_bandwidth), 0.02),
        ("convention-lock",
         lambda: _check_convention_lock(config.tamper_full_linewidth), 1e-9),
    )
    rows = []
    failed = []
    for name, fn, tol in checks:
        residual = fn()
        ok = residual <= tol
        rows.append((name, residual, tol, "pass" if ok else "fail"))
        if not ok:
            label = f"{name} (N={n})" if name == "oracle-equivalence" else name
            if name == "convention-lock" and config.tamper_full_linewidth:
                label = f"{name} (tampered: diagonal decay at full linewidth)"
            failed.append(label)
    table = ResultTable(("check", "residual", "tolerance", "status"),
                        ("-", "1", "1", "-"), rows,
                        _metadata(config, "verify"))
    return table, failed


# ---------------------------------------------------------------------------
# argument parsing and dispatch

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    add = parser.add_argument
    add("--e1", type=float, help="first dot level")
    add("--e2", type=float, help="second dot level")
    add("--gamma-l", dest="gamma_l", type=float, help="left lead linewidth")
    add("--gamma-r", dest="gamma_r", type=float, help="right lead linewidth")
    add("--phi", type=float, help="loop phase in rad")
    add("--bias", type=float, help="symmetric bias voltage (mu = +/- bias/2)")
    add("--temperature", type=float, help="lead temperature")
    add("--cutoff", type=float, help="lead band half-width")
    add("--t-max", dest="t_max", type=float, help="trace end time")
    add("--n-t", dest="n_t", type=int, help="number of trace points")
    add("--phi-min", dest="phi_min", type=float, help="sweep start phase")
    add("--phi-max", dest="phi_max", type=float, help="sweep end phase")
    add("--n-phi", dest="n_phi", type=int, help="number of sweep points")
    add("--w-min", dest="w_min", type=float, help="scan start frequency")
    add("--w-max", dest="w_max", type=float, help="scan end frequency")
    add("--n-w", dest="n_w", type=int, help="number of scan frequencies")
    add("--oracle-modes", dest="oracle_modes", type=int,
        help="discretized-lead mode count per lead")
    add("--oracle-bandwidth", dest="oracle_bandwidth", type=float,
        help="discretized-lead half-bandwidth")
    add("--out", type=str, help="output path ('-' for stdout)")
    add("--format", type=str, help="csv or json")
    add("--config", type=str, help="flat key = value config file")
    add("--seed", type=int, help="seed echoed into metadata")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fluxdot",
                     description="two-dot interferometer calculations")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, summary in (
            ("time-trace", "occupation dynamics from the empty device"),
            ("flux-sweep", "steady-state coherence across a flux grid"),
            ("transmission", "transmission over the frequency-flux grid"),
            ("current", "stationary current across a flux grid"),
            ("verify", "run the self-check suite")):
        p = sub.add_parser(name, help=summary, description=summary)
        _add_common_flags(p)
        if name == "verify":
            p.add_argument("--debug-full-linewidth", action="store_true",
                           help=argparse.SUPPRESS)
    return parser


_COMMANDS: dict = {
    "time-trace": cmd_time_trace,
    "flux-sweep": cmd_flux_sweep,
    "transmission": cmd_transmission_scan,
    "current": cmd_current_vs_flux,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _resolve(args)
    except UsageError as exc:
        sys.stderr.write(f"fluxdot: error: {exc}\n")
        return 1

    try:
        if args.command == "verify":
            table, failed = cmd_verify(config)
            table.write(config.output_path, config.format)
            if failed:
                sys.stderr.write("fluxdot: verification failed: "
                                 + ", ".join(failed) + "\n")
                return 3
            return 0
        table = _COMMANDS[args.command](config)
    except (QuadratureNotConverged, UnitarityViolation, ArithmeticError) as exc:
        sys.stderr.write(f"fluxdot: numerical failure: {exc}\n")
        return 2
    table.write(config.output_path, config.format)
    return 0


if __name__ == "__main__":
    sys.exit(main())
