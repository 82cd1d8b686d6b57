"""Command-line front end: run, check-model, gap, presets, resume.

Configs are JSON files mirroring SimConfig (nested "model" object for the
averaging model).  The parser rejects unknown keys by name and, at this
boundary, requires every physical parameter (alpha, beta, gamma, nu, sigma,
eps) to be strictly positive; decoupled alpha=0 / gamma=0 studies remain
available programmatically.  Failures exit 1 with a one-line JSON error on
stderr; argparse handles unknown flags with exit 2.  FPNS_THREADS (integer
>= 1) sets the solver's thread count when the jit backend is present.
"""

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np

from .averaging import (
    ModelSpec,
    make_model,
    thickness_family,
)
from .coupling import PRESETS, SimConfig, build_grids, initial_data, make_state, run
from .fields import moments
from .fluid import leray_project, spectral_velocity
from .runio import read_snapshot


class ConfigError(ValueError):
    """Config file violates the documented schema."""


# ---- configuration parsing ----------------------------------------------------

_CONFIG_FIELDS = {fld.name: fld for fld in dataclasses.fields(SimConfig)}
_MODEL_FIELDS = {fld.name for fld in dataclasses.fields(ModelSpec)}
_STRICT_POSITIVE = ("alpha", "beta", "gamma", "nu", "sigma", "eps")


def parse_config(path):
    """Load and validate a JSON config; unknown or invalid keys are named."""
    try:
        with open(path) as h:
            doc = json.load(h)
    except json.JSONDecodeError as err:
        raise ConfigError(f"config {path}: invalid JSON ({err})") from err
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path}: top level must be a JSON object")

    kwargs = {}
    for key, value in doc.items():
        if key == "model":
            if not isinstance(value, dict):
                raise ConfigError("config key 'model': must be an object")
            bad = set(value) - _MODEL_FIELDS
            if bad:
                raise ConfigError(f"config key 'model.{sorted(bad)[0]}': unknown key")
            try:
                kwargs["model"] = ModelSpec(**value)
            except (TypeError, ValueError) as err:
                raise ConfigError(f"config key 'model': {err}") from err
        elif key in _CONFIG_FIELDS:
            kwargs[key] = tuple(value) if isinstance(value, list) else value
        else:
            raise ConfigError(f"config key {key!r}: unknown key")

    for name in _STRICT_POSITIVE:
        if name in kwargs and not (
            isinstance(kwargs[name], (int, float)) and kwargs[name] > 0.0
        ):
            raise ConfigError(f"config key {name!r}: must be a positive number")
    try:
        return SimConfig(**kwargs)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"config {path}: {err}") from err


def serialize_config(config):
    return dataclasses.asdict(config)


def config_from_dict(doc):
    doc = dict(doc)
    model = doc.pop("model", {})
    doc = {k: tuple(v) if isinstance(v, list) else v for k, v in doc.items()}
    return SimConfig(model=ModelSpec(**model), **doc)


# ---- subcommands ----------------------------------------------------------------


def _cmd_run(args):
    config = parse_config(args.config)
    result = run(config, out_dir=args.out)
    print(
        json.dumps(
            {
                "status": result.status,
                "out": str(args.out),
                "records": len(result.records),
                "t_final": result.records[-1]["t"],
                "wbar": list(result.wbar),
            }
        )
    )
    return 0


def _preset_density(config):
    grids = build_grids(config)
    f0, u0 = initial_data(config.preset, config.seed, grids, config)
    return grids, moments(f0, grids).rho


def _cmd_check_model(args):
    config = parse_config(args.config)
    grids, rho = _preset_density(config)
    model = make_model(config.model, grids.x)
    ok2, worst2 = model.check_contractive(rho, 2)
    okinf, worstinf = model.check_contractive(rho, np.inf)
    report = {
        "variant": config.model.variant,
        "kernel_profile": config.model.kernel_profile,
        "r0": config.model.r0,
        "global_thickness": model.global_thickness(rho),
        "stochasticity_residual": model.check_stochasticity(rho),
        "conservativity_residual": model.check_conservative(rho),
        "contractive_l2": ok2,
        "contractivity_worst_l2": worst2,
        "contractive_linf": okinf,
        "contractivity_worst_linf": worstinf,
        "ball_positive": model.check_ball_positive(rho),
        "ball_positivity_margin": model.ball_positivity_margin(rho),
        "spectral_gap": model.spectral_gap(rho),
    }
    print(json.dumps(report, indent=1, sort_keys=True))
    return 0


def _cmd_gap(args):
    config = parse_config(args.config)
    grids, rho = _preset_density(config)
    model = make_model(config.model, grids.x)
    if args.thickness_sweep:
        rows = []
        for dens in thickness_family(grids.x):
            rows.append(
                {
                    "global_thickness": model.global_thickness(dens),
                    "delta": model.spectral_gap(dens),
                }
            )
        print(json.dumps({"sweep": rows}, indent=1))
    else:
        print(
            json.dumps(
                {
                    "global_thickness": model.global_thickness(rho),
                    "delta": model.spectral_gap(rho),
                }
            )
        )
    return 0


def _cmd_presets(args):
    for name in PRESETS:
        if name == "alignment-demo":
            continue  # alias, shown inline with its target below
        if name == "two-bump":
            print(f"{name} (alias: alignment-demo)")
        else:
            print(name)
    return 0


def _cmd_resume(args):
    snap = read_snapshot(args.snapshot)
    manifest_path = Path(args.snapshot).parent / "manifest.json"
    if not manifest_path.exists():
        raise FileNotFoundError(f"no manifest next to snapshot: {manifest_path}")
    with open(manifest_path) as h:
        manifest = json.load(h)
    config = config_from_dict(manifest["config"])
    if args.t_final is not None:
        config = dataclasses.replace(config, T_final=args.t_final)
    grids = build_grids(config)
    if (snap["Nx"], snap["Nv"]) != (grids.x.Nx, grids.v.Nv) or not np.allclose(
        [snap["L"], snap["V"], snap["sigma"]],
        [grids.x.L, grids.v.V, config.sigma],
    ):
        raise ValueError("snapshot grid does not match the manifest config")
    model = make_model(config.model, grids.x)
    uh = leray_project(spectral_velocity(snap["u"], grids.x), grids.x)
    state = make_state(snap["t"], snap["f"], uh, config, grids, model)
    result = run(config, out_dir=args.out, state0=state)
    print(
        json.dumps(
            {
                "status": result.status,
                "resumed_from": snap["t"],
                "t_final": result.records[-1]["t"],
                "records": len(result.records),
            }
        )
    )
    return 0


# ---- entry point ------------------------------------------------------------------


def _apply_threads():
    raw = os.environ.get("FPNS_THREADS")
    if raw is None:
        return
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"FPNS_THREADS must be an integer >= 1, got {raw!r}")
    if n < 1:
        raise ValueError(f"FPNS_THREADS must be an integer >= 1, got {raw!r}")
    try:
        import numba

        numba.set_num_threads(n)
    except ImportError:
        pass


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fpns",
        description="Kinetic-fluid alignment laboratory on the periodic torus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate a config and write outputs")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("check-model", help="averaging-model property report")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_check_model)

    p = sub.add_parser("gap", help="spectral gap of the averaging operator")
    p.add_argument("--config", required=True)
    p.add_argument("--thickness-sweep", action="store_true")
    p.set_defaults(func=_cmd_gap)

    p = sub.add_parser("presets", help="list initial-data presets")
    p.set_defaults(func=_cmd_presets)

    p = sub.add_parser("resume", help="continue a run from a snapshot")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--t-final", type=float, default=None)
    p.set_defaults(func=_cmd_resume)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_threads()
        return args.func(args)
    except Exception as err:  # argparse exits 2 on flag errors before this
        print(
            json.dumps({"error": {"type": type(err).__name__, "message": str(err)}}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
