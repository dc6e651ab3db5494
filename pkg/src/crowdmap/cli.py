"""Command-line front end.

Subcommands: window, generate, probmap, reconstruct, eval, filter,
roundtrip, bench.  Exit codes: 0 success, 2 usage error, 3 data/parse
error, 4 internal error.  On failure a single JSON line describing the
error goes to stderr and any partially written outputs are removed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import DEFAULT as DEFAULT_BACKEND
from ._backend import available_backends
from .dataset import PRESET_IDS, FilterRule, parse_time_of_day, preset_rule
from .density import (
    BORDER_RENORMALIZE,
    BORDER_TRUNCATE,
    DEFAULT_K,
    DEFAULT_SIGMA,
    GaussianWindow,
    generate_density_map,
    make_window,
    window_values,
)
from .errors import FormatError, InvalidArgumentError
from .gpr import MODE_INCREMENTAL, MODE_NAIVE, _init_state, probability_map, reconstruct
from .io import (
    load_dmap,
    load_heads_csv,
    load_pgm,
    load_scenes_jsonl,
    save_dmap,
    save_heads_csv,
    save_trace_jsonl,
)
from .metrics import NORM_GT_MAX_255, NORM_NONE, QualityParams, counting_errors, psnr, ssim
from .simulate import random_head_list

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4

THREADS_ENV = "CROWDMAP_THREADS"
ALL_METRICS = ("mae", "mse", "psnr", "ssim")


class UsageError(Exception):
    """Bad flag combination or value, detected after argparse."""


class OutputSet:
    """Stages output files and renames them into place only when the whole
    command succeeded, so failures leave no partial artifacts behind."""

    def __init__(self):
        self._staged: list[tuple[str, str]] = []

    def stage(self, path) -> str:
        tmp = str(path) + ".part"
        self._staged.append((tmp, str(path)))
        return tmp

    def commit(self):
        done = []
        try:
            for tmp, final in self._staged:
                os.replace(tmp, final)
                done.append(final)
        except OSError:
            for final in done:  # roll back: no partial artifact set
                try:
                    os.unlink(final)
                except OSError:
                    pass
            raise
        self._staged.clear()

    def cleanup(self):
        for tmp, _final in self._staged:
            try:
                os.unlink(tmp)
            except OSError:
                pass
        self._staged.clear()


def _add_window_flags(p: argparse.ArgumentParser):
    p.add_argument("--k", type=int, default=None,
                   help=f"window side in pixels, odd (default {DEFAULT_K})")
    p.add_argument("--sigma", type=float, default=None,
                   help=f"window standard deviation (default {DEFAULT_SIGMA})")
    p.add_argument("--unnormalized", action="store_true",
                   help="peak-1 window instead of unit-mass")
    p.add_argument("--window", metavar="DMAP", default=None,
                   help="load the window grid from a DMAP file "
                        "(overrides --k/--sigma/--unnormalized)")


def _resolve_window(args) -> GaussianWindow | np.ndarray:
    if args.window is not None:
        if args.k is not None or args.sigma is not None or args.unnormalized:
            raise UsageError("--window cannot be combined with --k/--sigma/--unnormalized")
        return window_values(load_dmap(args.window).astype(np.float64))
    k = DEFAULT_K if args.k is None else args.k
    sigma = DEFAULT_SIGMA if args.sigma is None else args.sigma
    try:
        return make_window(k, sigma, normalized=not args.unnormalized)
    except InvalidArgumentError as exc:
        raise UsageError(str(exc)) from exc


def _add_backend_flag(p: argparse.ArgumentParser):
    p.add_argument("--backend", choices=available_backends(), default=None,
                   help=f"kernel backend (default {DEFAULT_BACKEND})")


def _load_raster(path) -> np.ndarray:
    if str(path).lower().endswith(".pgm"):
        return load_pgm(path)
    return load_dmap(path)


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise UsageError(f"{THREADS_ENV}={raw!r} is not an integer") from None
    return 1


def _write_json(path_or_none, obj, outs: OutputSet):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path_or_none is None:
        sys.stdout.write(text)
    else:
        with open(outs.stage(path_or_none), "w", encoding="utf-8") as fh:
            fh.write(text)


# --- subcommands -----------------------------------------------------------

def cmd_window(args, outs: OutputSet):
    win = _resolve_window(args)
    save_dmap(outs.stage(args.output), window_values(win))


def cmd_generate(args, outs: OutputSet):
    if args.height < 1 or args.width < 1:
        raise UsageError("--height and --width must be positive")
    heads = load_heads_csv(args.heads, args.height, args.width)
    win = _resolve_window(args)
    dmap = generate_density_map(heads, win, border=args.border)
    save_dmap(outs.stage(args.output), dmap)


def cmd_probmap(args, outs: OutputSet):
    coarse = _load_raster(args.coarse).astype(np.float64)
    win = _resolve_window(args)
    prob = probability_map(coarse, win, backend=args.backend)
    save_dmap(outs.stage(args.output), prob)


def cmd_reconstruct(args, outs: OutputSet):
    coarse = _load_raster(args.coarse).astype(np.float64)
    win = _resolve_window(args)
    result = reconstruct(coarse, win, count_override=args.count,
                         mode=args.mode, backend=args.backend)
    save_heads_csv(outs.stage(args.heads_out), result.heads)
    if args.map_out:
        save_dmap(outs.stage(args.map_out), result.pseudo_map)
    if args.trace_out:
        save_trace_jsonl(outs.stage(args.trace_out), result.trace)


def _eval_one(name: str, pred_dir: Path, gt_dir: Path, metrics: tuple[str, ...],
              params: QualityParams, norm: str) -> dict:
    gt = _load_raster(gt_dir / name).astype(np.float64)
    pred = _load_raster(pred_dir / name).astype(np.float64)
    entry: dict = {"name": name}
    if "mae" in metrics or "mse" in metrics:
        truth, est = float(gt.sum()), float(pred.sum())
        entry["truth"] = truth
        entry["prediction"] = est
        entry["abs_error"] = abs(truth - est)
    if "psnr" in metrics:
        v = psnr(pred, gt, params, norm)
        entry["psnr"] = "inf" if math.isinf(v) else v
    if "ssim" in metrics:
        entry["ssim"] = ssim(pred, gt, params, norm)
    return entry


def cmd_eval(args, outs: OutputSet):
    metrics = tuple(m.strip() for m in args.metrics.split(",") if m.strip())
    unknown = [m for m in metrics if m not in ALL_METRICS]
    if unknown or not metrics:
        raise UsageError(f"--metrics must select from {','.join(ALL_METRICS)}")
    pred_dir, gt_dir = Path(args.pred), Path(args.gt)
    if not gt_dir.is_dir() or not pred_dir.is_dir():
        raise UsageError("--pred and --gt must be directories")
    names = sorted(p.name for p in gt_dir.iterdir()
                   if p.suffix.lower() in (".dmap", ".pgm"))
    if not names:
        raise FormatError(f"no .dmap/.pgm files in {gt_dir}")
    missing = [n for n in names if not (pred_dir / n).is_file()]
    if missing:
        raise FormatError(f"missing predictions for: {', '.join(missing)}")

    threads = args.threads if args.threads else _default_threads()
    params = QualityParams()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_eval_one, n, pred_dir, gt_dir, metrics,
                                   params, args.norm) for n in names]
            entries = [f.result() for f in futures]
    else:
        entries = [_eval_one(n, pred_dir, gt_dir, metrics, params, args.norm)
                   for n in names]

    aggregate: dict = {"n": len(entries)}
    if "mae" in metrics or "mse" in metrics:
        mae, mse = counting_errors([(e["truth"], e["prediction"]) for e in entries])
        if "mae" in metrics:
            aggregate["mae"] = mae
        if "mse" in metrics:
            aggregate["mse"] = mse
    if "psnr" in metrics:
        finite = [e["psnr"] for e in entries if e["psnr"] != "inf"]
        aggregate["psnr"] = float(np.mean(finite)) if finite else "inf"
        aggregate["psnr_excluded"] = len(entries) - len(finite)
    if "ssim" in metrics:
        aggregate["ssim"] = float(np.mean([e["ssim"] for e in entries]))
    _write_json(args.output, {"images": entries, "aggregate": aggregate}, outs)


def _parse_int_set(text: str, flag: str) -> frozenset[int]:
    try:
        values = frozenset(int(t) for t in text.split(",") if t.strip() != "")
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated integers, got {text!r}") from None
    if not values:
        raise UsageError(f"{flag} must be nonempty")
    return values


def _parse_span(text: str, flag: str, conv):
    lo, sep, hi = text.partition("-")
    if not sep:
        raise UsageError(f"{flag} expects LO-HI, got {text!r}")
    try:
        return conv(lo), conv(hi)
    except (ValueError, InvalidArgumentError):
        raise UsageError(f"{flag} expects LO-HI, got {text!r}") from None


def cmd_filter(args, outs: OutputSet):
    explicit = (args.levels, args.time, args.weathers, args.count, args.ratio)
    if args.preset and any(v is not None for v in explicit):
        raise UsageError("--preset cannot be combined with explicit rule flags")
    if args.preset:
        rule = preset_rule(args.preset)
    else:
        if any(v is None for v in explicit):
            raise UsageError("without --preset, all of --levels/--time/--weathers/"
                             "--count/--ratio are required")
        rule = FilterRule(
            levels=_parse_int_set(args.levels, "--levels"),
            time_range=_parse_span(args.time, "--time", parse_time_of_day),
            weathers=_parse_int_set(args.weathers, "--weathers"),
            count_range=_parse_span(args.count, "--count", int),
            ratio_range=_parse_span(args.ratio, "--ratio", float),
        )
    metas = load_scenes_jsonl(args.scenes)
    kept = [m.id for m in metas if rule.accepts(m)]
    text = "".join(f"{i}\n" for i in kept)
    if args.output is None:
        sys.stdout.write(text)
    else:
        with open(outs.stage(args.output), "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_roundtrip(args, outs: OutputSet):
    win = _resolve_window(args)
    rng = np.random.default_rng(args.seed)
    heads = random_head_list(rng, args.heads, args.size, args.size,
                             min_separation=args.sep, margin=args.margin)
    dmap = generate_density_map(heads, win)
    result = reconstruct(dmap, win, mode=args.mode, backend=args.backend)
    truth = {tuple(p) for p in heads.points}
    got = {tuple(p) for p in result.heads.points}
    missed = sorted(truth - got)
    extra = sorted(got - truth)
    max_err = float(np.abs(result.pseudo_map - dmap).max())
    exact = not missed and not extra and result.count == len(heads)
    report = {
        "requested": len(heads),
        "recovered": result.count,
        "matched": len(truth & got),
        "missed": [list(p) for p in missed],
        "extra": [list(p) for p in extra],
        "max_pixel_error": max_err,
        "exact": exact,
        "seed": args.seed,
        "size": args.size,
    }
    _write_json(args.output, report, outs)
    print(f"roundtrip: {report['matched']}/{report['requested']} heads recovered, "
          f"max pixel error {max_err:g}, exact={exact}")


def _parse_sizes(text: str) -> list[tuple[int, int]]:
    sizes = []
    for part in text.split(","):
        h, sep, w = part.strip().partition("x")
        if not sep:
            raise UsageError(f"--sizes expects HxW[,HxW...], got {text!r}")
        try:
            sizes.append((int(h), int(w)))
        except ValueError:
            raise UsageError(f"--sizes expects HxW[,HxW...], got {text!r}") from None
    if not sizes:
        raise UsageError("--sizes must be nonempty")
    return sizes


def run_bench(sizes: list[tuple[int, int]], head_count: int, naive_heads: int,
              seed: int, window: GaussianWindow | np.ndarray,
              backends: list[str]) -> dict:
    """Time naive vs incremental reconstruction per size and backend.

    The naive mode rescans the whole raster every head, so it runs with a
    capped head count; the equality check compares both modes at that cap.
    """
    win = window_values(window)
    verify = min(head_count, naive_heads)
    cases = []
    for height, width in sizes:
        rng = np.random.default_rng([seed, height, width])
        heads = random_head_list(rng, head_count, height, width)
        coarse = generate_density_map(heads, win)
        arr = np.ascontiguousarray(coarse)
        for backend in backends:
            t0 = time.perf_counter()
            _init_state(arr, win, MODE_INCREMENTAL, backend)
            init_s = time.perf_counter() - t0

            t0 = time.perf_counter()
            reconstruct(coarse, win, count_override=head_count,
                        mode=MODE_INCREMENTAL, backend=backend)
            inc_s = time.perf_counter() - t0

            t0 = time.perf_counter()
            naive = reconstruct(coarse, win, count_override=verify,
                                mode=MODE_NAIVE, backend=backend)
            naive_s = time.perf_counter() - t0
            check = reconstruct(coarse, win, count_override=verify,
                                mode=MODE_INCREMENTAL, backend=backend)
            cases.append({
                "height": height,
                "width": width,
                "backend": backend,
                "heads": head_count,
                "init_seconds": init_s,
                "incremental_seconds": inc_s,
                "incremental_per_head_seconds": (inc_s - init_s) / head_count,
                "naive_heads": verify,
                "naive_seconds": naive_s,
                "naive_per_head_seconds": (naive_s - init_s) / max(1, verify),
                "heads_equal": bool(np.array_equal(check.heads.points,
                                                   naive.heads.points)),
            })
    return {
        "seed": seed,
        "head_count": head_count,
        "naive_head_count": verify,
        "backends": backends,
        "cases": cases,
    }


def cmd_bench(args, outs: OutputSet):
    win = _resolve_window(args)
    if args.backend == "both":
        backends = available_backends()
    elif args.backend:
        backends = [args.backend]
    else:
        backends = [DEFAULT_BACKEND]
    report = run_bench(_parse_sizes(args.sizes), args.heads, args.naive_heads,
                       args.seed, win, backends)
    _write_json(args.output, report, outs)


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crowdmap",
        description="Density-map tooling: Gaussian stamping, greedy head "
                    "reconstruction, quality metrics, scene filtering.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("window", help="emit the Gaussian window as a DMAP file")
    _add_window_flags(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_window)

    p = sub.add_parser("generate", help="stamp a head CSV into a density map")
    p.add_argument("--heads", required=True, help="head list CSV (x,y)")
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--width", type=int, required=True)
    _add_window_flags(p)
    p.add_argument("--border", choices=(BORDER_TRUNCATE, BORDER_RENORMALIZE),
                   default=BORDER_TRUNCATE)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("probmap", help="per-pixel window-similarity map")
    p.add_argument("--coarse", required=True, help="input raster (.dmap or .pgm)")
    _add_window_flags(p)
    _add_backend_flag(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_probmap)

    p = sub.add_parser("reconstruct",
                       help="extract heads from a coarse map, emit pseudo label")
    p.add_argument("--coarse", required=True, help="input raster (.dmap or .pgm)")
    _add_window_flags(p)
    _add_backend_flag(p)
    p.add_argument("--mode", choices=(MODE_INCREMENTAL, MODE_NAIVE),
                   default=MODE_INCREMENTAL)
    p.add_argument("--count", type=int, default=None,
                   help="override the head count (default: map mass)")
    p.add_argument("--heads-out", required=True, help="output head CSV")
    p.add_argument("--map-out", default=None, help="output pseudo-label DMAP")
    p.add_argument("--trace-out", default=None, help="output selection trace JSONL")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("eval", help="score prediction maps against ground truth")
    p.add_argument("--pred", required=True, help="directory of predicted maps")
    p.add_argument("--gt", required=True, help="directory of ground-truth maps")
    p.add_argument("--metrics", default=",".join(ALL_METRICS))
    p.add_argument("--norm", choices=(NORM_GT_MAX_255, NORM_NONE),
                   default=NORM_GT_MAX_255)
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker threads (default ${THREADS_ENV} or 1)")
    p.add_argument("-o", "--output", default=None, help="report path (default stdout)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("filter", help="select scene ids matching a rule")
    p.add_argument("--scenes", required=True, help="scene metadata JSONL")
    p.add_argument("--preset", choices=PRESET_IDS, default=None)
    p.add_argument("--levels", default=None, help="e.g. 1,2,3,4,5")
    p.add_argument("--time", default=None, help="e.g. 6:00-19:59")
    p.add_argument("--weathers", default=None, help="e.g. 0,1,5,6")
    p.add_argument("--count", default=None, help="e.g. 10-600")
    p.add_argument("--ratio", default=None, help="e.g. 0.3-1")
    p.add_argument("-o", "--output", default=None, help="id list path (default stdout)")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("roundtrip",
                       help="self-test: random heads -> map -> reconstruct -> diff")
    p.add_argument("--heads", type=int, default=50)
    p.add_argument("--size", type=int, default=512, help="square raster side")
    p.add_argument("--sep", type=int, default=16, help="min Chebyshev separation")
    p.add_argument("--margin", type=int, default=8, help="min distance from edges")
    p.add_argument("--seed", type=int, default=0)
    _add_window_flags(p)
    _add_backend_flag(p)
    p.add_argument("--mode", choices=(MODE_INCREMENTAL, MODE_NAIVE),
                   default=MODE_INCREMENTAL)
    p.add_argument("-o", "--output", default=None, help="report path (default stdout)")
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("bench", help="time naive vs incremental reconstruction")
    p.add_argument("--sizes", default="540x960,1080x1920")
    p.add_argument("--heads", type=int, default=1000)
    p.add_argument("--naive-heads", type=int, default=5,
                   help="head cap for the naive-mode timing/equality run")
    p.add_argument("--seed", type=int, default=1)
    _add_window_flags(p)
    p.add_argument("--backend", choices=available_backends() + ["both"], default=None,
                   help=f"kernel backend or 'both' (default {DEFAULT_BACKEND})")
    p.add_argument("-o", "--output", default=None, help="report path (default stdout)")
    p.set_defaults(func=cmd_bench)

    return parser


def _fail(kind: str, code: int, exc: BaseException) -> int:
    sys.stderr.write(json.dumps(
        {"error": kind, "exit": code, "message": str(exc)}) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    outs = OutputSet()
    try:
        args.func(args, outs)
        outs.commit()
        return EXIT_OK
    except UsageError as exc:
        outs.cleanup()
        return _fail("usage", EXIT_USAGE, exc)
    except (FormatError, InvalidArgumentError, OSError) as exc:
        outs.cleanup()
        return _fail("data", EXIT_DATA, exc)
    except Exception as exc:  # noqa: BLE001 - last-resort guard for exit code 4
        outs.cleanup()
        return _fail("internal", EXIT_INTERNAL, exc)


if __name__ == "__main__":
    sys.exit(main())
