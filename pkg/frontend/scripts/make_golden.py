#!/usr/bin/env python3
"""Regenerate the golden fixtures by driving the crowdmap CLI.

Each case directory holds the shared inputs (window DMAP, head CSV,
coarse DMAP) plus the CLI's outputs for `generate` and `reconstruct` and
a metrics.json with reference metric values.  The TypeScript suite must
reproduce the generate/reconstruct artifacts byte for byte.

Usage: python3 scripts/make_golden.py [output_dir]
"""

import json
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np

import crowdmap as cm

CASES = [
    # name, (height, width), k, sigma, heads, separation, margin, noise
    ("separated", (64, 64), 15, 4.0, 4, 16, 8, 0.0),
    ("crowded", (96, 128), 15, 4.0, 12, 4, 8, 0.0),
    ("borders", (128, 96), 15, 4.0, 8, 16, 0, 0.0),
    ("noisy", (80, 80), 15, 4.0, 6, 16, 8, 1e-3),
    ("small_kernel", (72, 56), 9, 2.5, 6, 10, 4, 0.0),
]


def cli(*args):
    subprocess.run(["crowdmap", *map(str, args)], check=True)


def main(root: Path):
    if root.exists():
        shutil.rmtree(root)
    for seed, (name, (height, width), k, sigma, n, sep, margin, noise) in enumerate(CASES):
        case = root / name
        case.mkdir(parents=True)
        cli("window", "--k", k, "--sigma", sigma, "-o", case / "window.dmap")

        rng = np.random.default_rng(1000 + seed)
        win = cm.make_window(k, sigma)
        heads = cm.random_head_list(rng, n, height, width,
                                    min_separation=sep, margin=margin)
        cm.save_heads_csv(case / "heads.csv", heads)

        cli("generate", "--heads", case / "heads.csv", "--height", height,
            "--width", width, "--window", case / "window.dmap",
            "-o", case / "expected_generate.dmap")

        if noise > 0.0:
            base = cm.load_dmap(case / "expected_generate.dmap").astype(np.float64)
            base += rng.uniform(-noise, noise, size=base.shape)
            cm.save_dmap(case / "coarse.dmap", base)
        else:
            shutil.copyfile(case / "expected_generate.dmap", case / "coarse.dmap")

        cli("reconstruct", "--coarse", case / "coarse.dmap",
            "--window", case / "window.dmap",
            "--heads-out", case / "expected_heads.csv",
            "--map-out", case / "expected_pseudo.dmap",
            "--trace-out", case / "expected_trace.jsonl")

        coarse = cm.load_dmap(case / "coarse.dmap").astype(np.float64)
        pseudo = cm.load_dmap(case / "expected_pseudo.dmap").astype(np.float64)
        rec = cm.load_heads_csv(case / "expected_heads.csv", height, width)
        mae, mse = cm.counting_errors([(coarse.sum(), pseudo.sum())])

        def finite(v):  # "inf" string, as in the eval report format
            return v if np.isfinite(v) else "inf"

        metrics = {
            "count": len(rec),
            "mae": mae,
            "mse": mse,
            "psnr_gt255": finite(cm.psnr(pseudo, coarse)),
            "psnr_none": finite(cm.psnr(pseudo, coarse, norm_policy="none")),
            "ssim_gt255": cm.ssim(pseudo, coarse),
            "ssim_none": cm.ssim(pseudo, coarse, norm_policy="none"),
        }
        meta = {"height": height, "width": width, "k": k, "sigma": sigma,
                "true_heads": n, "noise": noise, "seed": 1000 + seed}
        (case / "metrics.json").write_text(json.dumps(metrics, indent=2) + "\n")
        (case / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")
        print(f"case {name}: {len(rec)} heads reconstructed")


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent.parent / "golden"
    main(target)
