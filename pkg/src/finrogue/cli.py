"""Command-line entry point.

Exit codes: 0 success, 1 configuration/validation error, 2 numerical failure
(blow-up, failed fit, or a residual above ``--tolerance``).
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import bs_baseline, dynamics, export, rogons, verify
from .config import ANALYTIC, PRESETS, ConfigError, ScenarioConfig, parse_config, serialize_config

logger = logging.getLogger("finrogue")

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2

DEFAULT_PRESET = {
    "eval": "fig1a",
    "render": "fig1a",
    "residual": "fig1a",
    "simulate": "sim-fig1",
    "mi": "mi-peak",
    "bs": "bs-atm",
}


class ToleranceError(ArithmeticError):
    pass


def load_config(command: str, args: argparse.Namespace) -> ScenarioConfig:
    if args.config is not None:
        text = Path(args.config).read_text(encoding="utf-8")
    else:
        name = args.preset or DEFAULT_PRESET[command]
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
        text = PRESETS[name]
    return parse_config(text, args.set or ())


def _require(config: ScenarioConfig, allowed: tuple[str, ...], command: str) -> None:
    if config.solution not in allowed:
        raise ConfigError(
            f"command {command!r} needs solution in {{{', '.join(allowed)}}}, got {config.solution!r}",
            key="solution",
        )


def _analytic_field(config: ScenarioConfig):
    return rogons.eval_field(config.solution, config.params, config.grid, workers=config["run.workers"])


def _simulated(config: ScenarioConfig):
    p, g = config.params, config.grid
    sampler = rogons.SOLUTIONS[config["sim.initial"]]
    state = dynamics.initial_state(sampler, p, g.length, g.n_s, g.t_min)
    reference = sampler if config["sim.reference"] else None
    report = dynamics.simulate(
        state, g.t_max, config["sim.dt"], reference=reference,
        snapshot_times=g.t_values().tolist(), label=f"simulate:{config['sim.initial']}",
    )
    return report


def _write_field_outputs(field, config: ScenarioConfig, out: Path, image: bool = True, csv: bool = True) -> None:
    if csv:
        export.write_csv(field, out / config["output.csv"])
    if image:
        (out / config["output.image"]).write_bytes(export.render_heatmap(field, config.normalization))


def cmd_eval(config: ScenarioConfig, args, out: Path) -> int:
    _require(config, ANALYTIC, "eval")
    field = _analytic_field(config)
    _write_field_outputs(field, config, out)
    peak = rogons.peak_statistics(field)
    print(f"solution {config.solution}: {field.grid.n_t} x {field.grid.n_s} samples")
    print(f"peak intensity {peak.max_intensity:.12g} at S={peak.s_at:g}, t={peak.t_at:g}")
    print(f"wrote {config['output.csv']}, {config['output.image']}")
    return EXIT_OK


def cmd_render(config: ScenarioConfig, args, out: Path) -> int:
    _require(config, ANALYTIC + ("simulate",), "render")
    if config.solution == "simulate":
        field = _simulated(config).snapshot_field()
    else:
        field = _analytic_field(config)
    _write_field_outputs(field, config, out, csv=False)
    print(f"wrote {config['output.image']} ({field.grid.n_s} x {field.grid.n_t})")
    return EXIT_OK


def cmd_residual(config: ScenarioConfig, args, out: Path) -> int:
    _require(config, ANALYTIC, "residual")
    g = config.verify_grid
    p = config.params
    snapped = verify.snap_k(p, g.length)
    if snapped.k != p.k:
        print(f"k snapped from {p.k!r} to {snapped.k!r} (periodic on L={g.length:g})")
    report = verify.residual_at(
        rogons.SOLUTIONS[config.solution], snapped, g, config["verify.dt_probe"],
        boundary_correction=config["verify.boundary_correction"],
    )
    export.write_rows(
        "linf,l2,n_s,n_t,dt_probe,value_mismatch,slope_mismatch",
        [[report.linf, report.l2, report.n_s, report.n_t, report.dt_probe,
          report.value_mismatch, report.slope_mismatch]],
        out / config["output.report"],
    )
    status = "ok" if report.linf <= args.tolerance else "FAIL"
    print(f"residual {config.solution}: linf={report.linf:.3e} l2={report.l2:.3e} "
          f"(tolerance {args.tolerance:g}) {status}")
    print(f"boundary mismatch: value {report.value_mismatch:.3e}, slope {report.slope_mismatch:.3e}")
    if report.linf > args.tolerance:
        raise ToleranceError(f"residual {report.linf:.3e} exceeds tolerance {args.tolerance:g}")
    return EXIT_OK


def cmd_simulate(config: ScenarioConfig, args, out: Path) -> int:
    _require(config, ("simulate",), "simulate")
    report = _simulated(config)
    rows = []
    for i, t in enumerate(report.times):
        err = report.error_linf_vs_analytic[i] if report.error_linf_vs_analytic else math.nan
        rows.append([t, err, report.mass_trace[i], report.hamiltonian_trace[i]])
    header = "t,error_linf,mass,hamiltonian"
    if not report.error_linf_vs_analytic:
        header = "t,mass,hamiltonian"
        rows = [[r[0], r[2], r[3]] for r in rows]
    export.write_rows(header, rows, out / config["output.report"])
    _write_field_outputs(report.snapshot_field(), config, out)
    print(f"simulated {len(report.times) - 1} steps to t={report.times[-1]:g}")
    if report.error_linf_vs_analytic:
        print(f"final linf error vs analytic {report.error_linf_vs_analytic[-1]:.3e}")
    print(f"relative mass drift {report.mass_drift():.3e}, hamiltonian drift {report.hamiltonian_drift():.3e}")
    return EXIT_OK


def cmd_mi(config: ScenarioConfig, args, out: Path) -> int:
    _require(config, ("mi",), "mi")
    res = dynamics.mi_scenario(
        config.params, config["mi.l"], config["mi.n_s"], config["mi.eps"], config["mi.m_pert"],
        config["mi.t_end"], config["mi.dt"], rng_seed=config["mi.seed"], noise=config["mi.noise"],
    )
    export.write_rows(
        "t,mode_amplitude,mass",
        [[t, a, m] for t, a, m in zip(res.report.times, res.mode_amplitudes.tolist(), res.report.mass_trace)],
        out / config["output.report"],
    )
    print(f"kappa={res.kappa:.6g} fitted growth {res.growth_rate:.6g}, linear-stability rate {res.oracle_rate:.6g}")
    if res.fit_window is not None:
        print(f"fit window t in [{res.fit_window[0]:g}, {res.fit_window[1]:g}]")
    return EXIT_OK


def cmd_bs(config: ScenarioConfig, args, out: Path) -> int:
    _require(config, ("bs",), "bs")
    bp = config.bs_params
    s_grid = np.linspace(config["bs.s_min"], config["bs.s_max"], config["bs.n_s"]).tolist()
    rows = [
        [s, bs_baseline.bs_call_price(s, bp), bs_baseline.bs_put_price(s, bp), bs_baseline.put_call_parity_gap(s, bp)]
        for s in s_grid
    ]
    export.write_rows("S,call,put,parity_gap", rows, out / config["output.report"])
    print(f"call range {rows[0][1]:.10g} .. {rows[-1][1]:.10g} over S in [{s_grid[0]:g}, {s_grid[-1]:g}]")
    print(f"max parity gap {max(r[3] for r in rows):.3e}")
    if bp.maturity > 0.0:
        res = bs_baseline.bs_pde_residual(bs_baseline.bs_call_price, s_grid, bp, config["bs.bump"])
        print(f"PDE residual of closed form {res:.3e}")
    return EXIT_OK


COMMANDS = {
    "eval": (cmd_eval, "evaluate a closed-form solution; write CSV and heatmap"),
    "render": (cmd_render, "write only the heatmap image of a scenario"),
    "residual": (cmd_residual, "certify a closed-form solution against the PDE"),
    "simulate": (cmd_simulate, "split-step propagation with conservation traces"),
    "mi": (cmd_mi, "modulation-instability growth-rate scenario"),
    "bs": (cmd_bs, "Black-Scholes baseline prices and checks"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="finrogue", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        cmd = sub.add_parser(name, help=help_text)
        src = cmd.add_mutually_exclusive_group()
        src.add_argument("--config", type=Path, help="scenario file (key = value lines)")
        src.add_argument("--preset", choices=sorted(PRESETS), help=f"built-in scenario (default {DEFAULT_PRESET[name]})")
        cmd.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a key (repeatable)")
        cmd.add_argument("--output", type=Path, default=Path("."), help="directory for artifacts")
        cmd.add_argument("--dump-config", action="store_true", help="also write the resolved config")
        if name == "residual":
            cmd.add_argument("--tolerance", type=float, default=1e-6)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handler = COMMANDS[args.command][0]
    try:
        config = load_config(args.command, args)
        args.output.mkdir(parents=True, exist_ok=True)
        if args.dump_config:
            (args.output / "scenario.cfg").write_text(serialize_config(config), encoding="ascii")
        return handler(config, args, args.output)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (dynamics.BlowUpError, dynamics.FitWindowError, rogons.DegenerateDenominatorError, ToleranceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
