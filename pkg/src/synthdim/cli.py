"""Command-line front end: ``synthdim {run,sweep,validate,list}``.

Exit status: 0 success, 1 usage or configuration error, 2 numerical abort.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .dynamics import IntegrationError, IntegratorConfig, Trajectory
from .model import AtomLevel, LatticeSite
from .observables import chirality, fit_decay
from .scenarios import (BUILDER_KEYS, OVERRIDE_KEYS, SCENARIOS, RunSpec, execute, list_scenarios,
                        resolve, run_acceptance, run_specs, _observables)

SCHEMA = "synthdim.run/1"
CONFIG_KEYS = {"schema", "scenario", "overrides", "model", "out", "formats", "provenance"}
MODEL_KEYS = {"builder", "params", "initial", "integrator"}
INTEGRATOR_KEYS = set(IntegratorConfig().as_dict())
FORMATS = ("csv", "records", "svg")


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# configuration


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_assignments(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = _parse_value(value.strip())
    return out


def load_config(path: str | None) -> dict:
    if path is None:
        return {"schema": SCHEMA}
    try:
        cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def validate_config(cfg: dict) -> dict:
    unknown = set(cfg) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config key(s) {sorted(unknown)}; allowed: {sorted(CONFIG_KEYS)}")
    if cfg.get("schema") != SCHEMA:
        raise ConfigError(f"config schema must be {SCHEMA!r}, got {cfg.get('schema')!r}")
    if ("scenario" in cfg) == ("model" in cfg):
        raise ConfigError("set exactly one of 'scenario' or 'model'")
    formats = cfg.get("formats", ["csv"])
    if not isinstance(formats, list) or not set(formats) <= set(FORMATS):
        raise ConfigError(f"formats must be a list drawn from {FORMATS}")
    if "scenario" in cfg:
        if cfg["scenario"] not in SCENARIOS:
            raise ConfigError(f"unknown scenario {cfg['scenario']!r}; valid ids: {', '.join(SCENARIOS)}")
        overrides = cfg.get("overrides", {})
        if not isinstance(overrides, dict):
            raise ConfigError("overrides must be an object")
        bad = set(overrides) - OVERRIDE_KEYS
        if bad:
            raise ConfigError(f"unknown override(s) {sorted(bad)}; allowed: {sorted(OVERRIDE_KEYS)}")
    else:
        if "overrides" in cfg:
            raise ConfigError("'overrides' only applies to scenario configs")
        model = cfg["model"]
        if not isinstance(model, dict):
            raise ConfigError("model must be an object")
        bad = set(model) - MODEL_KEYS
        if bad:
            raise ConfigError(f"unknown model key(s) {sorted(bad)}; allowed: {sorted(MODEL_KEYS)}")
        for key in ("builder", "params", "initial"):
            if key not in model:
                raise ConfigError(f"model needs {key!r}")
        if model["builder"] not in BUILDER_KEYS:
            raise ConfigError(f"unknown builder {model['builder']!r}; choose from {sorted(BUILDER_KEYS)}")
        bad = set(model["params"]) - BUILDER_KEYS[model["builder"]]
        if bad:
            raise ConfigError(f"unknown parameter(s) {sorted(bad)} for builder {model['builder']!r}")
        bad = set(model.get("integrator", {})) - INTEGRATOR_KEYS
        if bad:
            raise ConfigError(f"unknown integrator key(s) {sorted(bad)}")
    return cfg


def apply_sets(cfg: dict, sets: dict) -> dict:
    """Merge ``--set`` pairs: scenario overrides, or model params / integrator / initial."""
    cfg = json.loads(json.dumps(cfg))
    if "scenario" in cfg:
        cfg.setdefault("overrides", {}).update(sets)
        return cfg
    model = cfg["model"]
    for key, value in sets.items():
        if key == "initial":
            model["initial"] = value
        elif key in INTEGRATOR_KEYS:
            model.setdefault("integrator", {})[key] = value
        else:
            model["params"][key] = value
    return cfg


def _integrator(model: dict) -> IntegratorConfig:
    return IntegratorConfig(**model.get("integrator", {}))


def runs_for(cfg: dict) -> list[tuple[RunSpec, IntegratorConfig]]:
    if "scenario" in cfg:
        return [(s, IntegratorConfig(s.t_end)) for s in run_specs(cfg["scenario"], cfg.get("overrides"))]
    model = cfg["model"]
    icfg = _integrator(model)
    return [(RunSpec("model", model["builder"], model["params"], model["initial"], icfg.t_end), icfg)]


# ---------------------------------------------------------------------------
# writers


def _num(x: float) -> str:
    return repr(float(x))


def write_csv(tr: Trajectory, path: Path) -> None:
    lines = [",".join(["t"] + [lab.name for lab in tr.basis])]
    for t, row in zip(tr.times, tr.probs):
        lines.append(",".join([_num(t)] + [_num(p) for p in row]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_records(tr: Trajectory, path: Path) -> None:
    names = [lab.name for lab in tr.basis]
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for t, row in zip(tr.times, tr.probs):
            fh.write(json.dumps({"t": float(t), "p": dict(zip(names, map(float, row)))}) + "\n")


def write_svg(tr: Trajectory, path: Path, title: str = "") -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "synthdim"
    cols = [i for i, lab in enumerate(tr.basis) if isinstance(lab, LatticeSite)]
    others = [i for i in range(len(tr.basis)) if i not in cols]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    if cols:
        sites = [tr.basis[i].m for i in cols]
        im = ax1.imshow(tr.probs[:, cols], aspect="auto", origin="lower", cmap="viridis",
                        extent=(sites[0] - 0.5, sites[-1] + 0.5, tr.times[0], tr.times[-1]))
        fig.colorbar(im, ax=ax1, label="probability")
        ax1.set_xlabel("site m")
        ax1.set_ylabel("Jt")
    for i in others:
        ax2.plot(tr.times, tr.probs[:, i], label=tr.basis[i].name)
    ax2.set_xlabel("Jt")
    ax2.set_ylabel("probability")
    if others:
        ax2.legend(fontsize=8)
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def metadata(cfg: dict, spec: RunSpec, icfg: IntegratorConfig, tr: Trajectory) -> dict:
    """Config-shaped record; feeding it back to ``run`` regenerates the same trajectory."""
    integ = tr.meta.get("integrator", {})
    return {
        "schema": SCHEMA,
        "model": {"builder": spec.builder, "params": spec.params, "initial": spec.initial,
                  "integrator": icfg.as_dict()},
        "formats": cfg.get("formats", ["csv"]),
        "provenance": {
            "version": __version__, "scenario": cfg.get("scenario"),
            "overrides": cfg.get("overrides", {}), "run": spec.name,
            "dt_resolved": integ.get("dt_resolved"), "n_steps": integ.get("n_steps"),
            "stride": integ.get("stride"),
        },
    }


def emit(cfg: dict, out: Path, spec: RunSpec, icfg: IntegratorConfig, tr: Trajectory) -> None:
    out.mkdir(parents=True, exist_ok=True)
    formats = cfg.get("formats", ["csv"])
    if "csv" in formats:
        write_csv(tr, out / f"{spec.name}.csv")
    if "records" in formats:
        write_records(tr, out / f"{spec.name}.records.jsonl")
    if "svg" in formats:
        write_svg(tr, out / f"{spec.name}.svg", f"{cfg.get('scenario') or spec.builder}: {spec.name}")
    meta = metadata(cfg, spec, icfg, tr)
    (out / f"{spec.name}.meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                                               encoding="utf-8")


def execute_config(cfg: dict, out: Path) -> dict:
    runs = runs_for(cfg)
    trs = {}
    for spec, icfg in runs:
        tr = execute(spec, icfg)
        emit(cfg, out, spec, icfg, tr)
        trs[spec.name] = tr
    if "scenario" in cfg:
        obs = _observables(resolve(cfg["scenario"], cfg.get("overrides")), trs)
        (out / "observables.json").write_text(json.dumps(obs, indent=2, sort_keys=True) + "\n",
                                              encoding="utf-8")
    return trs


def _excited_label(tr: Trajectory):
    for lab in tr.basis:
        if isinstance(lab, AtomLevel) and lab.level == "e":
            return lab
    return None


def summarize(tr: Trajectory, params: dict) -> tuple[float, float, float]:
    e = _excited_label(tr)
    final = float(tr.prob(e)[-1]) if e else math.nan
    rate = math.nan
    if e is not None:
        try:
            rate = fit_decay(tr.times, tr.prob(e)).rate
        except ValueError:
            pass
    asym = math.nan
    if "N" in params:
        asym = chirality(tr, int(params["N"]), float(tr.times[-1])).asymmetry
    return final, rate, asym


# ---------------------------------------------------------------------------
# commands


def _threads() -> int:
    raw = os.environ.get("SYNTHDIM_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"SYNTHDIM_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"SYNTHDIM_THREADS must be a positive integer, got {raw!r}")
    return n


def _build_config(args) -> dict:
    cfg = load_config(args.config)
    if args.scenario:
        if "model" in cfg or cfg.get("scenario", args.scenario) != args.scenario:
            raise ConfigError("scenario given both on the command line and in the config")
        cfg["scenario"] = args.scenario
    if args.format:
        cfg["formats"] = list(dict.fromkeys(args.format))
    validate_config(cfg)
    cfg = apply_sets(cfg, parse_assignments(args.set))
    return validate_config(cfg)


def _out_dir(args, cfg) -> Path:
    return Path(args.out or cfg.get("out") or "synthdim_out")


def cmd_run(args) -> int:
    cfg = _build_config(args)
    out = _out_dir(args, cfg)
    trs = execute_config(cfg, out)
    print(f"wrote {len(trs)} trajectory file set(s) to {out}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _build_config(args)
    values = [_parse_value(v.strip()) for v in (args.values or "").split(",") if v.strip()]
    if not values:
        raise ConfigError("sweep needs a non-empty --values list")
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"sweep values must be numeric, got {v!r}")
    path = args.param
    if "scenario" in cfg:
        if path not in OVERRIDE_KEYS or path == "init":
            raise ConfigError(f"cannot sweep {path!r}; numeric scenario keys: "
                              f"{sorted(OVERRIDE_KEYS - {'init'})}")
        current = resolve(cfg["scenario"], dict(cfg.get("overrides", {}), **{path: values[0]})).get(path)
    else:
        model = cfg["model"]
        current = model["params"].get(path, model.get("integrator", {}).get(path))
        if path not in BUILDER_KEYS[model["builder"]] | INTEGRATOR_KEYS - {"method"}:
            raise ConfigError(f"cannot sweep {path!r} for builder {model['builder']!r}")
    if current is not None and not isinstance(current, (int, float)):
        raise ConfigError(f"{path!r} is not a numeric field")
    out = _out_dir(args, cfg)

    def one(value):
        sub = apply_sets(cfg, {path: value})
        validate_config(sub)
        trs = execute_config(sub, out / f"{path}={value}")
        spec, _ = runs_for(sub)[0]
        return summarize(trs[spec.name], spec.params)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        rows = list(pool.map(one, values))
    lines = ["value,final_P_e,fitted_rate,asymmetry"]
    lines += [",".join([_num(v)] + [_num(x) for x in row]) for v, row in zip(values, rows)]
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep_summary.csv").write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    print("\n".join(lines))
    return 0


def cmd_validate(args) -> int:
    report = run_acceptance()
    out = Path(args.out or "synthdim_out")
    out.mkdir(parents=True, exist_ok=True)
    (out / "acceptance_report.txt").write_text(report.to_text(), encoding="utf-8")
    (out / "acceptance_report.json").write_text(report.to_json() + "\n", encoding="utf-8")
    sys.stdout.write(report.to_text())
    return 0 if report.passed else 1


def cmd_list(args) -> int:
    for sid, desc, fig in list_scenarios():
        print(f"{sid}\t{fig}\t{desc}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="synthdim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"synthdim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("scenario", nargs="?", help="scenario id (see `synthdim list`)")
        p.add_argument("--config", help="JSON run config")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a parameter")
        p.add_argument("--out", help="output directory")
        p.add_argument("--format", action="append", choices=FORMATS, help="output format (repeatable)")

    run = sub.add_parser("run", help="run a scenario or explicit model")
    common(run)
    run.set_defaults(func=cmd_run)
    sweep = sub.add_parser("sweep", help="repeat a run over values of one parameter")
    common(sweep)
    sweep.add_argument("--param", required=True, help="parameter to vary (e.g. delta, N)")
    sweep.add_argument("--values", required=True, help="comma-separated values")
    sweep.set_defaults(func=cmd_sweep)
    val = sub.add_parser("validate", help="run the acceptance checks")
    val.add_argument("--out", help="directory for the report")
    val.set_defaults(func=cmd_validate)
    lst = sub.add_parser("list", help="list scenarios")
    lst.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except IntegrationError as exc:
        print(f"synthdim: numerical abort: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, KeyError, ValueError, TypeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"synthdim: error: {msg}", file=sys.stderr)
        return 1


__all__ = ["SCHEMA", "ConfigError", "main", "make_parser", "load_config", "validate_config",
           "apply_sets", "runs_for", "write_csv", "write_records", "write_svg", "metadata",
           "execute_config", "summarize"]

if __name__ == "__main__":
    raise SystemExit(main())
