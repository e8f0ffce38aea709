"""Command line surface: factorize, classify, solve, regularize, scan, simulate.

Models come from a JSON file or a builtin name; numeric tables go to CSV and
run metadata to JSON, all written atomically.  Exit codes: 0 success, 2
factorization failure, 3 circle-singular symbol, 4 no solution, 5 unit-circle
zero.
"""
import argparse
import json
import os
import sys
import tempfile

import numpy as np

from .laurent import CircleSingularError, LaurentMatrix
from .likelihood import (FAMILY_PARAMS, SimConfig, family_transfer,
                         finite_sample_likelihood, scan, simulate_paths)
from .models import (BUILTIN_NAMES, ModelSpec, RationalDriver, UnsolvableError,
                     WhiteNoise, builtin_model, classify, impulse_responses,
                     solve)
from .regularize import (BandMask, Composite, Coordinates, ExpectationShift,
                         Identity, SecondDifference, regularized_solve)
from .whf import FactorizationError, whf

EXIT_OK = 0
EXIT_FACTORIZATION = 2
EXIT_CIRCLE = 3
EXIT_NO_SOLUTION = 4
EXIT_CIRCLE_ZERO = 5

_MODEL_KEYS = {"m", "n", "driver", "coefficients", "forcing", "parameters",
               "regularizer", "builtin"}


# -- model file handling ------------------------------------------------------

def _decode_matrix(data):
    arr = np.array([[_decode_entry(e) for e in row] for row in data],
                   dtype=complex)
    return arr


def _decode_entry(e):
    if isinstance(e, (list, tuple)):
        if len(e) != 2:
            raise ValueError("complex entries must be [re, im] pairs")
        return complex(e[0], e[1])
    return complex(e)


def _encode_matrix(arr):
    out = []
    for row in np.asarray(arr, dtype=complex):
        out.append([x.real if x.imag == 0 else [x.real, x.imag] for x in row])
    return out


def load_model(doc):
    """Build a ModelSpec from the JSON document schema."""
    unknown = set(doc) - _MODEL_KEYS
    if unknown:
        raise ValueError(f"unknown model file keys: {sorted(unknown)}")
    if "builtin" in doc:
        return builtin_model(doc["builtin"])
    m, n = int(doc["m"]), int(doc["n"])
    terms = []
    for item in doc["coefficients"]:
        base = _decode_matrix(item["base"])
        linear = {k: _decode_matrix(v) for k, v in item.get("linear", {}).items()}
        for mat in [base, *linear.values()]:
            if mat.shape != (m, n):
                raise ValueError(f"coefficient shape {mat.shape} != ({m}, {n})")
        terms.append((int(item["power"]), base, linear))
    params = {k: float(v) for k, v in doc.get("parameters", {}).items()}
    driver = None
    d = doc.get("driver")
    if d is not None:
        if d["type"] == "white":
            driver = WhiteNoise(int(d.get("r", n)))
        elif d["type"] == "rational":
            driver = RationalDriver(_decode_laurent(d["gamma"]),
                                    _decode_laurent(d["upsilon"]))
        else:
            raise ValueError(f"unknown driver type: {d['type']}")
    forcing = None
    if doc.get("forcing") is not None:
        forcing = _decode_laurent(doc["forcing"])
    return ModelSpec("file", m, n, terms, params, driver, forcing)


def _decode_laurent(items):
    lo = min(int(it["power"]) for it in items)
    hi = max(int(it["power"]) for it in items)
    mats = [_decode_matrix(it["matrix"]) for it in items]
    c = np.zeros((hi - lo + 1,) + mats[0].shape, dtype=complex)
    for it, mat in zip(items, mats):
        c[int(it["power"]) - lo] = mat
    return LaurentMatrix(lo, c, trim=False)


def serialize_model(model):
    return {
        "m": model.m,
        "n": model.n,
        "driver": {"type": "white", "r": model.driver.r}
        if isinstance(model.driver, WhiteNoise) else {
            "type": "rational",
            "gamma": _encode_laurent(model.driver.gamma),
            "upsilon": _encode_laurent(model.driver.upsilon)},
        "coefficients": [
            {"power": s, "base": _encode_matrix(base),
             "linear": {k: _encode_matrix(v) for k, v in linear.items()}}
            for s, base, linear in model.terms],
        "forcing": _encode_laurent(model.forcing),
        "parameters": dict(model.params),
    }


def _encode_laurent(lm):
    return [{"power": lm.lo + k, "matrix": _encode_matrix(lm.coeffs[k])}
            for k in range(lm.coeffs.shape[0])]


def decode_regularizer(doc):
    kind = doc["type"]
    if kind == "identity":
        return Identity()
    if kind == "coordinates":
        return Coordinates(tuple(doc["indices"]))
    if kind == "expectation-shift":
        return ExpectationShift(int(doc["coordinate"]))
    if kind == "second-difference":
        return SecondDifference(tuple(tuple(p) for p in doc["pairs"]),
                                float(doc.get("weight", 1.0)))
    if kind == "band-mask":
        return BandMask(tuple(tuple(a) for a in doc["arcs"]))
    if kind == "composite":
        return Composite(tuple(decode_regularizer(p) for p in doc["parts"]))
    raise ValueError(f"unknown regularizer type: {kind}")


# -- output helpers -----------------------------------------------------------

def atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(rows, header):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, complex):
        return f"{v.real:.17g}+{v.imag:.17g}j" if v.imag else f"{v.real:.17g}"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _emit(args, doc, text=None):
    if args.json:
        print(json.dumps(doc, indent=2, default=_json_default))
    elif text is not None:
        print(text, end="")


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"not JSON serializable: {type(o)}")


# -- argument plumbing --------------------------------------------------------

def _parse_params(pairs):
    out = {}
    for p in pairs or []:
        if "=" not in p:
            raise ValueError(f"--param expects name=value, got {p!r}")
        k, v = p.split("=", 1)
        out[k.strip()] = float(v)
    return out


def _load(args):
    if args.builtin:
        return builtin_model(args.builtin)
    if args.model:
        with open(args.model, encoding="utf-8") as fh:
            return load_model(json.load(fh))
    raise ValueError("provide --model FILE or --builtin NAME")


def _outpath(args, name):
    d = args.out or "."
    os.makedirs(d, exist_ok=True)
    return os.path.join(d, name)


# -- commands -----------------------------------------------------------------

def cmd_factorize(args):
    model = _load(args)
    theta = _parse_params(args.param)
    fact = whf(model.symbol(theta))
    doc = {"kappa": list(fact.kappa), "residual": fact.residual,
           "generic": fact.spread <= 1, "total_index": fact.total_index,
           "n_terms": fact.n_terms}
    _emit(args, doc,
          f"kappa={list(fact.kappa)} residual={fact.residual:.3e} "
          f"generic={fact.spread <= 1}\n")
    return EXIT_OK


def _classification_exit(cls):
    if cls.tag == "NoSolutionGeneric":
        return EXIT_NO_SOLUTION
    if cls.tag == "UnitCircleZero":
        return EXIT_CIRCLE_ZERO
    return EXIT_OK


def cmd_classify(args):
    model = _load(args)
    theta = _parse_params(args.param)
    cls = classify(model, theta)
    doc = {"classification": cls.tag, "kappa": list(cls.kappa) if cls.kappa else None,
           "winding": cls.winding, "dim": cls.dim,
           "coprime": cls.coprime,
           "circle_points": [[w.real, w.imag] for w in cls.circle_points]}
    _emit(args, doc, f"{cls}\n")
    code = _classification_exit(cls)
    if code != EXIT_OK:
        print(f"reason: {cls.tag}", file=sys.stderr)
    return code


def _responses_csv(xi, horizon):
    resp = impulse_responses(xi, horizon)
    m, r = resp[0].shape
    header = ["s"] + [f"xi_{i + 1}{j + 1}" for i in range(m) for j in range(r)]
    rows = [[s] + [x for x in resp[s].reshape(-1)] for s in range(horizon + 1)]
    return _csv(rows, header)


def cmd_solve(args):
    model = _load(args)
    theta = _parse_params(args.param)
    sol = solve(model, theta)
    text = _responses_csv(sol.particular, args.horizon)
    path = _outpath(args, "impulse_responses.csv")
    atomic_write(path, text)
    doc = {"classification": str(sol.classification),
           "kernel_dim": sol.dim, "csv": path}
    _emit(args, doc, f"{sol.classification} kernel_dim={sol.dim} -> {path}\n")
    return EXIT_OK


def cmd_regularize(args):
    model = _load(args)
    theta = _parse_params(args.param)
    L = Identity()
    if args.regularizer:
        with open(args.regularizer, encoding="utf-8") as fh:
            L = decode_regularizer(json.load(fh))
    sol = regularized_solve(model, theta, L)
    text = _responses_csv(sol.transfer, args.horizon)
    path = _outpath(args, "regularized_responses.csv")
    atomic_write(path, text)
    doc = {"method": sol.method, "residual": sol.residual,
           "unique": bool(sol.unique), "csv": path}
    _emit(args, doc,
          f"method={sol.method} residual={sol.residual:.3e} "
          f"unique={sol.unique} -> {path}\n")
    return EXIT_OK


def _parse_grid(specs):
    grids = {}
    for spec in specs:
        name, rng = spec.split("=", 1)
        lo, hi, steps = rng.split(":")
        grids[name.strip()] = np.linspace(float(lo), float(hi), int(steps))
    return grids


def cmd_scan(args):
    family = args.family
    if family not in FAMILY_PARAMS:
        raise ValueError(f"unknown family: {family}; "
                         f"choose from {sorted(FAMILY_PARAMS)}")
    names = FAMILY_PARAMS[family]
    truth_map = _parse_params(args.truth)
    truth = tuple(truth_map[nm] for nm in names)
    if len(truth) == 1:
        truth = truth[0]
    grids = _parse_grid(args.grid)
    surface = scan(family, grids, truth, polish=not args.no_polish)
    header = list(surface.param_names) + ["value", "flag"]
    rows = [list(p) + [v, f] for p, v, f in
            zip(surface.points, surface.values, surface.flags)]
    csv_path = _outpath(args, "surface.csv")
    atomic_write(csv_path, _csv(rows, header))
    meta = {"family": family, "truth": truth_map, "seed": args.seed,
            "n_grid": surface.meta.get("n_grid"),
            "minima": [{"point": m["point"].tolist(), "value": m["value"]}
                       for m in surface.minima]}
    json_path = _outpath(args, "surface.json")
    atomic_write(json_path, json.dumps(meta, indent=2, default=_json_default) + "\n")
    _emit(args, meta, f"{len(rows)} points -> {csv_path}\n"
          + "".join(f"minimum {m['point']} value={m['value']:.6f}\n"
                    for m in surface.minima))
    return EXIT_OK


def cmd_simulate(args):
    model = _load(args)
    theta = _parse_params(args.param)
    sol = solve(model, theta)
    cfg = SimConfig(T=args.T, seed=args.seed, replications=args.reps,
                    burn_in=0)
    paths = simulate_paths(sol.particular.series, cfg)
    header = ["rep", "t"] + [f"x{i + 1}" for i in range(paths.shape[2])]
    rows = []
    for rep in range(paths.shape[0]):
        for t in range(paths.shape[1]):
            rows.append([rep, t + 1] + list(paths[rep, t]))
    path = _outpath(args, "paths.csv")
    atomic_write(path, _csv(rows, header))
    _emit(args, {"csv": path, "shape": list(paths.shape)},
          f"{paths.shape[0]} x {paths.shape[1]} samples -> {path}\n")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(
        prog="speclrem",
        description="Frequency-domain solver and likelihood toolkit for "
                    "linear rational expectations models")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true",
                        help="JSON output to stdout")
    common.add_argument("--out", help="output directory for files")
    common.add_argument("--seed", type=int, default=0)
    sub = ap.add_subparsers(dest="command", required=True,
                            parser_class=lambda **kw: argparse.ArgumentParser(
                                parents=[common], **kw))

    def model_args(p):
        p.add_argument("--model", help="model JSON file")
        p.add_argument("--builtin", choices=BUILTIN_NAMES)
        p.add_argument("--param", action="append", metavar="NAME=VALUE")

    p = sub.add_parser("factorize", help="Wiener-Hopf factorization report")
    model_args(p)
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("classify", help="existence/uniqueness classification")
    model_args(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("solve", help="particular solution impulse responses")
    model_args(p)
    p.add_argument("--horizon", type=int, default=20)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("regularize", help="regularized solution responses")
    model_args(p)
    p.add_argument("--horizon", type=int, default=20)
    p.add_argument("--regularizer", help="regularizer JSON file")
    p.set_defaults(func=cmd_regularize)

    p = sub.add_parser("scan", help="likelihood surface over a parameter grid")
    p.add_argument("family", choices=sorted(FAMILY_PARAMS))
    p.add_argument("--truth", action="append", required=True,
                   metavar="NAME=VALUE")
    p.add_argument("--grid", action="append", required=True,
                   metavar="NAME=LO:HI:STEPS")
    p.add_argument("--no-polish", action="store_true")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("simulate", help="Monte Carlo sample paths")
    model_args(p)
    p.add_argument("--T", type=int, default=100)
    p.add_argument("--reps", type=int, default=1)
    p.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except CircleSingularError as e:
        print(f"error: circle-singular symbol: {e}", file=sys.stderr)
        return EXIT_CIRCLE
    except UnsolvableError as e:
        print(f"error: {e}", file=sys.stderr)
        return _classification_exit(e.classification)
    except FactorizationError as e:
        print(f"error: factorization failed: {e}", file=sys.stderr)
        return EXIT_FACTORIZATION


if __name__ == "__main__":
    sys.exit(main())
