"""Batch experiment runner.

    bulkedge run <config>        execute an experiment, write report files
    bulkedge validate <config>   schema-check a config
    bulkedge oracle <name> [--param k=v ...]   run a momentum-space oracle

Configs are INI-style .cfg files (documented in the README) or the equivalent
JSON document.  Exit codes: 0 all verdicts pass, 1 internal error or failed
verdict, 2 schema error, 3 gap closed, 4 inconclusive index.

Reports are deterministic: identical (config, seed) pairs produce byte-identical
JSON and CSV.  Figures are rendered next to the delimited output.
"""

import argparse
import configparser
import csv
import hashlib
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from .disorder import DisorderSpace
from .errors import (BulkEdgeError, ConfigError, GapClosedError,
                     InconclusiveIndexError)
from .models import ModelParams
from .oracles import berry_chern, cylinder_bands, edge_chirality, kramers_edge_parity
from .pipeline import build_model, bulk_edge_report, clean_copy

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_SCHEMA = 2
EXIT_GAP = 3
EXIT_INCONCLUSIVE = 4

_PI_FORM = re.compile(r"^\s*(-?)(\d+(?:\.\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d+)?))?\s*$")


def parse_number(text):
    """Floats plus the convenience forms pi, -pi/2, 3*pi/4."""
    s = str(text).strip()
    m = _PI_FORM.match(s)
    if m:
        sign = -1.0 if m.group(1) == "-" else 1.0
        num = float(m.group(2)) if m.group(2) else 1.0
        den = float(m.group(3)) if m.group(3) else 1.0
        return sign * num * math.pi / den
    return float(s)


_SCHEMA = {
    "experiment": {"invariant": ("choice", ("chern", "z2")),
                   "mode": ("choice", ("real", "complex")),
                   "seed": ("int", None)},
    "model": {"kind": ("choice", ("haldane", "kane_mele", "atomic")),
              "t": ("number", None), "t2": ("number", None), "phi": ("number", None),
              "M": ("number", None), "rashba": ("number", None), "mu": ("number", None)},
    "disorder": {"kind": ("choice", ("point", "iid", "quasiperiodic")),
                 "count": ("int", None), "W": ("number", None),
                 "lam": ("number", None)},
    "geometry": {"bulk": ("intlist", None), "ribbon": ("intlist", None),
                 "depth": ("int", None)},
    "edge": {"window": ("numlist", None), "margin": ("int", None),
             "collar": ("int", None)},
    "output": {"dir": ("str", None), "figures": ("bool", None)},
}

_DEFAULTS = {
    "experiment": {"invariant": "chern", "mode": "complex", "seed": 0},
    "model": {"kind": "haldane", "t": 1.0, "t2": 0.0, "phi": 0.0, "M": 0.0,
              "rashba": 0.0, "mu": 0.0},
    "disorder": {"kind": "point", "count": 1, "W": 0.0, "lam": 0.0},
    "geometry": {"bulk": [24, 24], "ribbon": [64, 24], "depth": 11},
    "edge": {"window": [-0.2, 0.2], "margin": 8, "collar": None},
    "output": {"dir": "out", "figures": True},
}


def _coerce(section, key, raw):
    kind, extra = _SCHEMA[section][key]
    where = f"[{section}] {key}"
    try:
        if kind == "choice":
            val = str(raw).strip()
            if val not in extra:
                raise ConfigError(f"{where}: {val!r} not one of {extra}")
            return val
        if kind == "int":
            return int(str(raw))
        if kind == "number":
            return parse_number(raw)
        if kind == "bool":
            if isinstance(raw, bool):
                return raw
            val = str(raw).strip().lower()
            if val in ("true", "yes", "1"):
                return True
            if val in ("false", "no", "0"):
                return False
            raise ConfigError(f"{where}: expected a boolean, got {raw!r}")
        if kind == "intlist":
            if isinstance(raw, (list, tuple)):
                return [int(v) for v in raw]
            return [int(v) for v in str(raw).split()]
        if kind == "numlist":
            if isinstance(raw, (list, tuple)):
                return [parse_number(v) for v in raw]
            return [parse_number(v) for v in str(raw).split()]
        return str(raw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r} ({exc})") from None


def load_config(path) -> dict:
    """Parse and validate a .cfg or .json experiment description."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    if path.suffix == ".json":
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("top level of a JSON config must be an object")
        sections = {str(k): dict(v) for k, v in raw.items()}
    else:
        parser = configparser.ConfigParser()
        parser.optionxform = str  # keys are case-sensitive (M vs mu)
        try:
            parser.read_string(path.read_text())
        except configparser.Error as exc:
            raise ConfigError(f"invalid config syntax: {exc}") from None
        sections = {s: dict(parser.items(s)) for s in parser.sections()}
    cfg = {}
    for section, defaults in _DEFAULTS.items():
        cfg[section] = dict(defaults)
        present = sections.pop(section, {})
        for key, raw in present.items():
            if key not in _SCHEMA[section]:
                raise ConfigError(f"[{section}] unknown key {key!r}")
            if raw is None:
                continue  # JSON null keeps the default
            cfg[section][key] = _coerce(section, key, raw)
    if sections:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(sections))}")
    if cfg["experiment"]["invariant"] == "z2" and cfg["model"]["kind"] != "kane_mele":
        raise ConfigError("[experiment] invariant z2 requires [model] kind = kane_mele")
    lo, hi = cfg["edge"]["window"]
    if not lo < cfg["model"]["mu"] < hi:
        raise ConfigError("[edge] window must contain [model] mu")
    return cfg


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


def build_space(cfg: dict) -> DisorderSpace:
    dis = cfg["disorder"]
    return DisorderSpace(kind=dis["kind"], d=2, channels=2, count=dis["count"],
                         seed=cfg["experiment"]["seed"], W=dis["W"], lam=dis["lam"])


def model_params(cfg: dict) -> ModelParams:
    m = cfg["model"]
    return ModelParams(t=m["t"], t2=m["t2"], phi=m["phi"], M=m["M"],
                       rashba=m["rashba"], W=cfg["disorder"]["W"], mu=m["mu"])


def _tag(value, provenance):
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    return {"value": value, "provenance": provenance}


def _report_payload(cfg, report):
    rows = []
    for r in report.rows:
        rows.append({
            "sample": r.sample,
            "status": r.status,
            "bulk_gap": _tag(r.bulk_gap, "plumbing"),
            "bulk_value": _tag(r.bulk_value, "formula"),
            "edge_value": _tag(r.edge_value, "formula"),
            "note": r.note,
        })
    oracle = {}
    for name, res in report.oracle.items():
        if hasattr(res, "value"):
            oracle[name] = {"value": _tag(res.value, "oracle"),
                            "convergence": {k: _tag(v, "oracle")
                                            for k, v in res.convergence.items()}}
        else:
            oracle[name] = str(res)
    return {
        "config_hash": config_hash(cfg),
        "config": cfg,
        "invariant": report.invariant,
        "bulk_value": _tag(report.bulk_value, "formula"),
        "edge_value": _tag(report.edge_value, "formula"),
        "sign": _tag(report.sign, "formula"),
        "sign_convention": "edge orientation absorbs (-1)^(d-1); see README",
        "verdict": "pass" if report.verdict else "fail",
        "samples": rows,
        "oracle": oracle,
    }


def write_report(cfg, report, outdir: Path):
    outdir.mkdir(parents=True, exist_ok=True)
    payload = _report_payload(cfg, report)
    (outdir / "report.json").write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    with open(outdir / "report.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample", "status", "bulk_gap", "bulk_value", "edge_value", "note"])
        for r in report.rows:
            writer.writerow([r.sample, r.status, repr(r.bulk_gap),
                             repr(r.bulk_value), repr(r.edge_value), r.note])
    return payload


def render_figures(cfg, report, outdir: Path):
    from . import plotting
    from .rep import grid_geometry, represent

    space = build_space(cfg)
    params = model_params(cfg)
    model, _sym = build_model(cfg["model"]["kind"], params, space)
    geom = grid_geometry(cfg["geometry"]["bulk"], "open", nu=model.nu)
    w = np.linalg.eigvalsh(represent(model, space.samples()[0], geom).matrix)
    paths = [plotting.spectrum_figure(w, outdir / "spectrum.png",
                                      window=cfg["edge"]["window"], mu=cfg["model"]["mu"],
                                      title=f"{cfg['model']['kind']} open-window spectrum")]
    if cfg["disorder"]["W"] == 0.0 and cfg["disorder"]["kind"] == "point":
        clean = clean_copy(cfg["model"]["kind"], params)
        ks, energies, bottom = cylinder_bands(clean, 160, 24)
        paths.append(plotting.edge_bands_figure(ks, energies, bottom,
                                                outdir / "edge_bands.png",
                                                mu=cfg["model"]["mu"]))
    paths.append(plotting.sample_values_figure(report.rows, outdir / "samples.png"))
    return paths


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    space = build_space(cfg)
    params = model_params(cfg)
    report = bulk_edge_report(
        model_kind=cfg["model"]["kind"], params=params, space=space,
        invariant=cfg["experiment"]["invariant"],
        bulk_sizes=cfg["geometry"]["bulk"], ribbon_sizes=cfg["geometry"]["ribbon"],
        depth=cfg["geometry"]["depth"], window=tuple(cfg["edge"]["window"]),
        margin=cfg["edge"]["margin"], collar=cfg["edge"]["collar"])
    outdir = Path(cfg["output"]["dir"])
    payload = write_report(cfg, report, outdir)
    if cfg["output"]["figures"]:
        render_figures(cfg, report, outdir)
    print(json.dumps({"verdict": payload["verdict"],
                      "bulk": payload["bulk_value"]["value"],
                      "edge": payload["edge_value"]["value"],
                      "report": str(outdir / "report.json")}, sort_keys=True))
    if any(r.status == "gap-closed" for r in report.rows):
        return EXIT_GAP
    if any(r.status == "inconclusive" for r in report.rows):
        return EXIT_INCONCLUSIVE
    return EXIT_OK if report.verdict else EXIT_INTERNAL


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    print(json.dumps({"ok": True, "config_hash": config_hash(cfg)}, sort_keys=True))
    return EXIT_OK


_ORACLES = {"berry-chern", "edge-bands", "kramers-count"}


def cmd_oracle(args) -> int:
    params = {}
    for item in args.param or []:
        if "=" not in item:
            raise ConfigError(f"--param expects k=v, got {item!r}")
        key, val = item.split("=", 1)
        params[key.strip()] = val.strip()
    kind = params.pop("model", "haldane")
    mu = parse_number(params.pop("mu", "0"))
    nk = int(params.pop("nk", "48" if args.name == "berry-chern" else "240"))
    depth = int(params.pop("depth", "24"))
    known = {"t", "t2", "phi", "M", "rashba"}
    unknown = set(params) - known
    if unknown:
        raise ConfigError(f"unknown oracle parameter(s): {', '.join(sorted(unknown))}")
    mp = ModelParams(**{k: parse_number(v) for k, v in params.items()})
    model = clean_copy(kind, mp)
    if args.name == "berry-chern":
        res = berry_chern(model, mu, nk=nk)
    elif args.name == "edge-bands":
        res = edge_chirality(model, mu, nk=nk, depth=depth)
    elif args.name == "kramers-count":
        res = kramers_edge_parity(model, mu if mu else 0.05, nk=nk, depth=depth)
    else:
        raise ConfigError(f"unknown oracle {args.name!r} (choose from {sorted(_ORACLES)})")
    print(json.dumps({"oracle": args.name, "value": res.value,
                      "convergence": {k: (v.item() if hasattr(v, "item") else v)
                                      for k, v in res.convergence.items()}},
                     sort_keys=True))
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="bulkedge", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config")
    p_run.set_defaults(func=cmd_run)
    p_val = sub.add_parser("validate", help="schema-check a config")
    p_val.add_argument("config")
    p_val.set_defaults(func=cmd_validate)
    p_or = sub.add_parser("oracle", help="run a momentum-space oracle")
    p_or.add_argument("name", choices=sorted(_ORACLES))
    p_or.add_argument("--param", action="append", metavar="k=v")
    p_or.set_defaults(func=cmd_oracle)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except GapClosedError as exc:
        print(f"gap closed: {exc}", file=sys.stderr)
        return EXIT_GAP
    except InconclusiveIndexError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except BulkEdgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
