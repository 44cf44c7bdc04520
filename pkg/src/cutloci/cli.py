# cutloci/cli.py
"""Command-line entry point.

    cutloci sample  --manifold sphere:3 --submanifold equator:1 \
                    --feet 32 --dirs 64 --seed 7 --output cloud.json
    cutloci dist    --manifold matspace:2 --submanifold orthogonal:2 \
                    --input A.json
    cutloci flow    --flow-kind orthogonal --input A.json --times 0,1,10 \
                    --output traj.json
    cutloci verify  --suite groupgeo
    cutloci explore --params n=2,d=3 --samples 8 --output report.json

Exit codes: 0 ok, 1 failing verify check, 2 parse error, 3 unsupported
manifold/submanifold pair, 4 I/O failure.  Errors also go to stderr as one
JSON object.  JSON files carry every float with 17 significant digits, so
identical configurations produce byte-identical output.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import cutengine, equivariant, groupgeo, serialize, verify
from . import manifolds as mf
from . import submanifolds as sm
from .errors import (
    CutLociError,
    NoCutInRange,
    UnsupportedAmbient,
    UnsupportedDistance,
    UnsupportedGeodesic,
    UnsupportedRegime,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_UNSUPPORTED = 3
EXIT_IO = 4


@dataclass
class RunConfig:
    command: str
    manifold: str = ""
    submanifold: str = ""
    action: str | None = None
    seed: int = 42
    feet: int = 16
    dirs: int = 16
    samples: int = 2000
    t_max: float | None = None
    output: str | None = None
    fmt: str = "json"
    suite: str | None = None
    params: dict = field(default_factory=dict)
    input: str | None = None
    times: list[float] = field(default_factory=list)
    flow_kind: str = "morse-bott"


def _parse_params(text: str | None) -> dict:
    out = {}
    if not text:
        return out
    for part in text.split(","):
        key, _, val = part.partition("=")
        try:
            out[key.strip()] = int(val)
        except ValueError:
            out[key.strip()] = float(val)
    return out


def _points_loader(path: str):
    with open(path) as fh:
        blob = json.load(fh)
    return [np.asarray(row, dtype=float) for row in blob["points"]]


def _load_input_coords(path: str, ambient: mf.ManifoldId) -> np.ndarray:
    with open(path) as fh:
        blob = json.load(fh)
    if isinstance(blob, dict) and "data" in blob:
        m = serialize.matrix_from_json(blob)
        return m if ambient.is_matrix else m.ravel()
    arr = np.asarray(blob, dtype=float)
    return arr


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(serialize.dumps({"error": kind, "message": message}) + "\n")


def _write_or_print(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        serialize.write_atomic(cfg.output, text)
    else:
        sys.stdout.write(text + "\n")


def cmd_sample(cfg: RunConfig) -> int:
    ambient = mf.parse_manifold(cfg.manifold)
    descriptor = sm.parse_submanifold(cfg.submanifold, ambient, points_loader=_points_loader)
    samples, errors = cutengine.sample_cut_locus(
        descriptor, cfg.feet, cfg.dirs, seed=cfg.seed, t_max=cfg.t_max
    )
    if cfg.fmt == "csv":
        text = serialize.samples_to_csv(samples)
    else:
        text = serialize.dumps(
            serialize.samples_to_json(descriptor.label, str(ambient), cfg.seed, samples)
        )
    if cfg.output:
        serialize.write_atomic(cfg.output, text)
    else:
        sys.stdout.write(text + "\n")
    if samples:
        rhos = [s.rho for s in samples]
        sep = sum(1 for s in samples if s.classification == "separating") / len(samples)
        sys.stdout.write(
            f"samples={len(samples)} skipped={len(errors)} "
            f"rho_min={min(rhos):.9g} rho_max={max(rhos):.9g} "
            f"separating_fraction={sep:.4f}\n"
        )
    else:
        sys.stdout.write(f"samples=0 skipped={len(errors)}\n")
    return EXIT_OK


def cmd_dist(cfg: RunConfig) -> int:
    ambient = mf.parse_manifold(cfg.manifold)
    descriptor = sm.parse_submanifold(cfg.submanifold, ambient, points_loader=_points_loader)
    coords = _load_input_coords(cfg.input, ambient)
    ms = descriptor.dist_to(mf.point(ambient, coords))
    payload = {
        "distance": ms.distance,
        "multiplicity": ms.multiplicity,
        "saturated": ms.saturated,
        "family_tag": ms.family_tag,
        "minimizers": [serialize.array_to_flat(m.coords) for m in ms.minimizers],
    }
    _write_or_print(cfg, serialize.dumps(payload))
    return EXIT_OK


def cmd_flow(cfg: RunConfig) -> int:
    times = cfg.times or [0.0, 0.5, 1.0, 2.0]
    if cfg.flow_kind in ("orthogonal", "geodesic-so"):
        a = _load_input_coords(cfg.input, mf.ManifoldId(kind="matspace", n=2))
        fn = groupgeo.flow_to_orthogonal if cfg.flow_kind == "orthogonal" else groupgeo.geodesic_to_so
        rows = [
            {"t": t, "position": serialize.array_to_flat(fn(a, t))}
            for t in times
        ]
        _write_or_print(cfg, serialize.dumps({"kind": cfg.flow_kind, "states": rows}))
        return EXIT_OK
    ambient = mf.parse_manifold(cfg.manifold)
    descriptor = sm.parse_submanifold(cfg.submanifold, ambient, points_loader=_points_loader)
    q = mf.point(ambient, _load_input_coords(cfg.input, ambient))
    rows = []
    for t in times:
        st = cutengine.morse_bott_flow(descriptor, q, t)
        rows.append(
            {
                "t": st.time,
                "position": serialize.array_to_flat(st.position.coords),
                "distance_to_n": st.distance_to_n,
            }
        )
    _write_or_print(cfg, serialize.dumps({"kind": "morse-bott", "states": rows}))
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    checks = verify.run_suite(cfg.suite, cfg.params)
    report = {"suite": cfg.suite, "checks": [c.as_dict() for c in checks]}
    _write_or_print(cfg, serialize.dumps(report))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_CHECK_FAILED


def cmd_explore(cfg: RunConfig) -> int:
    n = int(cfg.params.get("n", 2))
    d = int(cfg.params.get("d", 3))
    rep = equivariant.fermat_verify(d, n, grid=max(4, cfg.samples), seed=cfg.seed)
    payload = {
        "mode": rep.mode,
        "degree": rep.degree,
        "n": rep.n,
        "separating_fraction": rep.separating_fraction,
        "details": {k: v for k, v in rep.details.items()},
    }
    if rep.mode == "verification":
        payload["max_tie_residual"] = rep.max_tie_residual
        payload["min_offset_gap"] = (
            rep.min_offset_gap if math.isfinite(rep.min_offset_gap) else "inf"
        )
    else:
        payload["note"] = "exploratory output; no pass/fail claim"
    _write_or_print(cfg, serialize.dumps(payload))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cutloci")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_manifold=True):
        if need_manifold:
            p.add_argument("--manifold", required=True)
            p.add_argument("--submanifold", required=True)
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--output")

    p = sub.add_parser("sample", help="sample the cut locus of a submanifold")
    common(p)
    p.add_argument("--feet", type=int, default=16)
    p.add_argument("--dirs", type=int, default=16)
    p.add_argument("--t-max", type=float, default=None, dest="t_max")
    p.add_argument("--format", choices=("json", "csv"), default="json", dest="fmt")

    p = sub.add_parser("dist", help="distance and minimizers from a point")
    common(p)
    p.add_argument("--input", required=True)

    p = sub.add_parser("flow", help="gradient flow / geodesic trajectories")
    p.add_argument("--flow-kind", choices=("morse-bott", "orthogonal", "geodesic-so"),
                   default="morse-bott", dest="flow_kind")
    p.add_argument("--manifold")
    p.add_argument("--submanifold")
    p.add_argument("--input", required=True)
    p.add_argument("--times")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--output")

    p = sub.add_parser("verify", help="run a named acceptance suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--params")
    p.add_argument("--output")
    p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("explore", help="exploratory Fermat cut-locus evidence")
    p.add_argument("--params")
    p.add_argument("--samples", type=int, default=8)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--output")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else EXIT_OK
    cfg = RunConfig(
        command=args.command,
        manifold=getattr(args, "manifold", "") or "",
        submanifold=getattr(args, "submanifold", "") or "",
        seed=getattr(args, "seed", 42),
        feet=getattr(args, "feet", 16),
        dirs=getattr(args, "dirs", 16),
        samples=getattr(args, "samples", 2000),
        t_max=getattr(args, "t_max", None),
        output=getattr(args, "output", None),
        fmt=getattr(args, "fmt", "json"),
        suite=getattr(args, "suite", None),
        params=_parse_params(getattr(args, "params", None)),
        input=getattr(args, "input", None),
        times=[float(x) for x in getattr(args, "times", None).split(",")]
        if getattr(args, "times", None)
        else [],
        flow_kind=getattr(args, "flow_kind", "morse-bott"),
    )
    handler = {
        "sample": cmd_sample,
        "dist": cmd_dist,
        "flow": cmd_flow,
        "verify": cmd_verify,
        "explore": cmd_explore,
    }[cfg.command]
    try:
        return handler(cfg)
    except (UnsupportedAmbient, UnsupportedGeodesic, UnsupportedDistance,
            UnsupportedRegime, NoCutInRange) as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_UNSUPPORTED
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_PARSE
    except OSError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_IO
    except CutLociError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_UNSUPPORTED


if __name__ == "__main__":
    sys.exit(main())
