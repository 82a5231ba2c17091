"""Command-line front end.

Subcommands: analyze, reorder, cluster, simulate, emit-lut, relayout, bench.
Structured output (JSON or CSV) goes to stdout, diagnostics to stderr.
Exit codes: 0 success, 1 validation/usage error, 2 I/O error, 3 infeasible
configuration. Everything is deterministic given --seed; HDOPT_THREADS caps
bench parallelism.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .artifacts import emit_lut, input_permutation_lut, relayout_pair, save_lut
from .core import (
    ArrayConfig,
    ChannelOrder,
    ClusterPlan,
    EnergyParams,
    InfeasibleError,
    LayerShape,
    Segment,
    ValidationError,
    WeightMatrix,
    _read_json,
    _require,
    load_plan,
    load_weight_bundle,
    plan_to_obj,
    save_plan,
    save_weight_bundle,
)
from .metrics import hd_matrix, hd_plan, nhd
from .partition import cluster_then_reorder, segment_then_reorder
from .reorder import exact_reorder, reorder_with_fallback
from .sim import estimate_energy, load_activation_set, simulate_stream


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; remap to this tool's validation code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _print_json(obj) -> None:
    print(json.dumps(obj, sort_keys=True, separators=(",", ":")))


def _print_csv(rows: list[dict]) -> None:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    if not rows:
        return
    keys = list(rows[0].keys())
    writer.writerow(keys)
    for row in rows:
        writer.writerow([_csv_cell(row[k]) for k in keys])


def _csv_cell(value):
    if isinstance(value, (list, tuple)):
        return ";".join(str(v) for v in value)
    return value


def _emit(obj: dict, fmt: str, drop_for_csv: tuple[str, ...] = ()) -> None:
    if fmt == "csv":
        _print_csv([{k: v for k, v in obj.items() if k not in drop_for_csv}])
    else:
        _print_json(obj)


def _load_config(path) -> tuple[ArrayConfig, EnergyParams]:
    obj = _read_json(path)
    cfg_fields = {f.name for f in dataclasses.fields(ArrayConfig)}
    params_fields = {f.name for f in dataclasses.fields(EnergyParams)}
    unknown = set(obj) - cfg_fields - {"energy"}
    if unknown:
        raise ValidationError(f"{path}: unknown config keys {sorted(unknown)}")
    cfg = ArrayConfig(**{k: int(obj[k]) for k in cfg_fields if k in obj})
    energy = obj.get("energy", {})
    bad = set(energy) - params_fields
    if bad:
        raise ValidationError(f"{path}: unknown energy keys {sorted(bad)}")
    params = EnergyParams(**{k: float(v) for k, v in energy.items()})
    return cfg, params


def _single_segment_plan(w: WeightMatrix, order: ChannelOrder) -> ClusterPlan:
    return ClusterPlan((Segment(tuple(range(w.cols)), order),), width=w.cols)


# --------------------------------------------------------------------------
# Subcommands.
# --------------------------------------------------------------------------

def _cmd_analyze(args) -> int:
    w = load_weight_bundle(args.input)
    obj: dict = {"name": w.name, "rows": w.rows, "cols": w.cols, "bits": w.bits}
    if args.plan:
        report = hd_plan(w, load_plan(args.plan))
        obj.update(report.to_dict())
    else:
        obj["hd"] = hd_matrix(w)
        obj["nhd"] = nhd(w) if w.rows > 1 else 0.0
    _emit(obj, args.format)
    return 0


def _cmd_reorder(args) -> int:
    w = load_weight_bundle(args.input)
    if args.exact:
        order = exact_reorder(w)
        meta = {"method": "exact"}
    else:
        order = reorder_with_fallback(w, restarts=args.restarts)
        meta = {"method": "greedy_fallback", "restarts": args.restarts}
    plan = _single_segment_plan(w, order)
    _print_json(plan_to_obj(plan, meta))
    if args.out:
        save_plan(plan, args.out, meta)
    return 0


def _cmd_cluster(args) -> int:
    w = load_weight_bundle(args.input)
    mode = "exact" if args.exact else "greedy"
    plan, trace = cluster_then_reorder(
        w,
        t=args.clusters,
        width=args.width,
        iters=args.iters,
        seed=args.seed,
        restarts=args.restarts,
        reorder_mode=mode,
    )
    meta = {
        "clusters": args.clusters,
        "width": args.width,
        "iters": args.iters,
        "restarts": args.restarts,
        "seed": args.seed,
        "mode": mode,
        "best_restart": trace.best_restart,
    }
    _print_json(plan_to_obj(plan, meta))
    if args.out:
        save_plan(plan, args.out, meta)
        trace_obj = {
            "objectives": list(trace.objectives),
            "iterations_run": trace.iterations_run,
            "best_restart": trace.best_restart,
        }
        sidecar = Path(args.out).with_suffix(".trace.json")
        with open(sidecar, "w", encoding="utf-8") as fh:
            json.dump(trace_obj, fh, sort_keys=True, separators=(",", ":"))
            fh.write("\n")
    return 0


def _cmd_simulate(args) -> int:
    w = load_weight_bundle(args.input)
    plan = load_plan(args.plan)
    acts = load_activation_set(args.acts)
    cfg, params = _load_config(args.config) if args.config else (ArrayConfig(), EnergyParams())
    report = simulate_stream(w, plan, acts, cfg, params)
    _emit(report.to_dict(), args.format, drop_for_csv=("outputs",))
    return 0


def _cmd_emit_lut(args) -> int:
    plan = load_plan(args.plan)
    if args.role == "input":
        lut = input_permutation_lut(plan, args.depth)
    else:
        lut = emit_lut(plan, args.depth)
    obj = {
        "depth": lut.depth,
        "tables": [list(t) for t in lut.tables],
        "entry_bits": lut.entry_bits,
        "table_size_bits": lut.table_size_bits,
    }
    _print_json(obj)
    if args.out:
        save_lut(lut, args.out)
    return 0


def _cmd_relayout(args) -> int:
    w1 = load_weight_bundle(args.first)
    w2 = load_weight_bundle(args.second)
    plan = load_plan(args.plan)
    w1p, w2p = relayout_pair(w1, plan, w2)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    p1, p2 = out_dir / "w1.json", out_dir / "w2.json"
    save_weight_bundle(w1p, p1)
    save_weight_bundle(w2p, p2)
    _print_json(
        {
            "w1": str(p1),
            "w2": str(p2),
            "hd_first_before": hd_matrix(w1),
            "hd_first_after": hd_matrix(w1p),
        }
    )
    return 0


def _load_shapes(path) -> list[LayerShape]:
    obj = _read_json(path)
    layers = _require(obj, "layers", path)
    if not isinstance(layers, list) or not layers:
        raise ValidationError(f"{path}: 'layers' must be a non-empty list")
    shapes = []
    for i, entry in enumerate(layers):
        if "c_in" not in entry or "k_out" not in entry:
            raise ValidationError(f"{path}: layer {i} needs 'c_in' and 'k_out'")
        shapes.append(
            LayerShape(
                c_in=int(entry["c_in"]),
                k_out=int(entry["k_out"]),
                fx=int(entry.get("fx", 1)),
                fy=int(entry.get("fy", 1)),
            )
        )
    return shapes


def _bench_threads(n_layers: int) -> int:
    env = os.environ.get("HDOPT_THREADS", "").strip()
    threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(threads, n_layers))


def _cmd_bench(args) -> int:
    shapes = _load_shapes(args.shapes)

    def run_layer(i: int) -> dict:
        shape = shapes[i]
        c = shape.flat_cols
        rng = np.random.default_rng([args.seed, i])
        data = rng.integers(0, 1 << args.bits, size=(shape.k_out, c))
        w = WeightMatrix(name=f"layer{i}", bits=args.bits, data=data)
        baseline = hd_matrix(w)
        width = min(args.width, c)
        if args.method == "cluster":
            plan, _ = cluster_then_reorder(
                w,
                t=math.ceil(c / width),
                width=width,
                iters=args.iters,
                seed=args.seed * 1000003 + i,
                restarts=args.restarts,
            )
        else:
            plan = segment_then_reorder(w, width)
        plan_hd = hd_plan(w, plan).total_hd
        reduction = (baseline - plan_hd) / baseline if baseline else 0.0
        energy, _ = estimate_energy(
            ops=shape.k_out * c, flips=plan_hd, mode="empirical"
        )
        return {
            "layer": i,
            "c_in": c,
            "k_out": shape.k_out,
            "baseline_hd": baseline,
            "plan_hd": plan_hd,
            "reduction": reduction,
            "energy": energy,
        }

    with ThreadPoolExecutor(max_workers=_bench_threads(len(shapes))) as pool:
        rows = list(pool.map(run_layer, range(len(shapes))))
    if args.format == "json":
        _print_json(rows)
    else:
        _print_csv(rows)
    return 0


# --------------------------------------------------------------------------
# Parser wiring.
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="hdopt",
        description="Reduce bit flips when streaming quantized weight matrices.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("analyze", help="report HD/NHD of a weight matrix, optionally under a plan")
    p.add_argument("-i", "--input", required=True, help="weight bundle JSON")
    p.add_argument("-p", "--plan", help="plan JSON; HD is then per-segment under its orders")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("reorder", help="compute a single-segment streaming order")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--out", help="write the plan JSON here")
    p.add_argument("--restarts", type=int, default=1, help="greedy start channels to try")
    p.add_argument("--exact", action="store_true", help="exact minimum (rows <= 12)")
    p.set_defaults(func=_cmd_reorder)

    p = sub.add_parser("cluster", help="cluster columns into segments and order each")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--out", help="plan JSON path; also writes <out>.trace.json")
    p.add_argument("--clusters", type=int, required=True, help="number of segments t")
    p.add_argument("--width", type=int, required=True, help="max columns per segment")
    p.add_argument("--iters", type=int, default=20)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true", help="exact per-segment orders")
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("simulate", help="stream a plan through the array model")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-p", "--plan", required=True)
    p.add_argument("-a", "--acts", required=True, help="activation set JSON")
    p.add_argument("-c", "--config", help="array/energy config JSON")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("emit-lut", help="emit accumulator address tables for a plan")
    p.add_argument("-p", "--plan", required=True)
    p.add_argument("-D", "--depth", type=int, default=1024, help="accumulation buffer depth")
    p.add_argument(
        "--role",
        choices=("output", "input"),
        default="output",
        help="output: per-segment write-side tables; input: drain order for this plan's consumer",
    )
    p.add_argument("-o", "--out", help="write the LUT JSON here")
    p.set_defaults(func=_cmd_emit_lut)

    p = sub.add_parser("relayout", help="bake a single-segment order into a layer pair")
    p.add_argument("-1", "--first", required=True, help="layer weight bundle to reorder")
    p.add_argument("-2", "--second", required=True, help="following layer consuming its outputs")
    p.add_argument("-p", "--plan", required=True)
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_relayout)

    p = sub.add_parser("bench", help="random-weight HD benchmark over layer shapes")
    p.add_argument("--shapes", required=True, help="layer shapes JSON")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bits", type=int, default=4)
    p.add_argument("--width", type=int, default=8)
    p.add_argument("--method", choices=("segment", "cluster"), default="segment")
    p.add_argument("--iters", type=int, default=20)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"hdopt: infeasible: {exc}", file=sys.stderr)
        return 3
    except ValidationError as exc:
        print(f"hdopt: invalid input: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"hdopt: malformed JSON: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"hdopt: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"hdopt: invalid input: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
