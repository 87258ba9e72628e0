"""Command-line entry point: ``tango cluster|sweep|segment|generate``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import datasets
from .errors import TangoError
from .pipeline import ALGORITHMS, RunConfig, load, resolve_workers, run_cluster, sweep, tango


def _add_run_args(p):
    p.add_argument("--input", required=True, help="CSV file, comma or whitespace delimited")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="tango")
    p.add_argument("--clusters", type=int, default=2, help="target cluster count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--label-col", type=int, default=None,
                   help="column holding true labels (excluded from features; negative counts from the end)")
    p.add_argument("--header", action="store_true", help="skip the first row")
    p.add_argument("--no-normalize", action="store_true", help="skip per-column min-max scaling")
    p.add_argument("--tau", type=float, default=0.0, help="similarity threshold for quickshift/dpc")
    p.add_argument("--rho-threshold", type=float, default=0.0, help="density threshold for dpc")
    p.add_argument("--workers", type=int, default=None, help="threads for the similarity stage (env TANGO_WORKERS)")


def _config(args, **extra) -> RunConfig:
    return RunConfig(
        input=args.input,
        algorithm=args.algorithm,
        clusters=args.clusters,
        seed=args.seed,
        tau=args.tau,
        rho_threshold=args.rho_threshold,
        label_col=args.label_col,
        header=args.header,
        normalize=not args.no_normalize,
        workers=args.workers,
        **extra,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tango", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster one dataset")
    _add_run_args(p)
    p.add_argument("--k", type=int, required=True, help="neighbourhood size")
    p.add_argument("--out", required=True, help="label file, one integer per line")
    p.add_argument("--dump-dir", default=None,
                   help="also write similarity, forest, mode and PBSim tables here (tango only)")

    p = sub.add_parser("sweep", help="evaluate a range of k against the truth column")
    _add_run_args(p)
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=100)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--out", required=True, help="CSV of k,ari,nmi,acc")

    p = sub.add_parser("segment", help="segment an RGB image")
    p.add_argument("--image", required=True)
    p.add_argument("--k", type=int, default=50)
    p.add_argument("--clusters", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", required=True, help="indexed-palette label image (PNG)")

    p = sub.add_parser("generate", help="write a synthetic dataset with a trailing truth column")
    p.add_argument("--kind", choices=datasets.KINDS, required=True)
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--noise", type=float, default=None)
    p.add_argument("--centers", type=int, default=3, help="blob count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    return parser


def _dump(config: RunConfig, directory):
    from .pathsim import dump_pbsim
    from .typicality import dump_modes

    x, _ = load(config)
    res = tango(x, config.k, config.clusters, config.seed, config.workers)
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    res.sim.dump(d / "similarity.csv")
    res.forest.dump(d / "forest.csv")
    dump_modes(d / "modes.csv", res.typicality, res.subclusters)
    dump_pbsim(d / "pbsim.csv", res.pbsim, res.subclusters.modes)


def _run(args) -> int:
    if args.command == "cluster":
        config = _config(args, k=args.k, out=args.out)
        metrics = run_cluster(config)
        if args.dump_dir and config.algorithm == "tango":
            _dump(config, args.dump_dir)
        if metrics:
            print(json.dumps(metrics))
    elif args.command == "sweep":
        rows = sweep(_config(args), args.k_min, args.k_max, args.step, out=args.out)
        done = [r for r in rows if r["ari"] == r["ari"]]
        if done:
            best = max(done, key=lambda r: r["ari"])
            print(f"best k={best['k']} ari={best['ari']:.4f} nmi={best['nmi']:.4f} acc={best['acc']:.4f}")
        print(f"{len(done)}/{len(rows)} k values evaluated")
    elif args.command == "segment":
        from .image import segment_image

        labels, res = segment_image(args.image, args.k, args.clusters, args.seed, args.out,
                                    resolve_workers(args.workers))
        print(f"similarity stage: {res.similarity_seconds:.2f} s")
        print(f"remaining stages: {res.remaining_seconds:.2f} s")
        print(f"{labels.size} pixels, {res.subclusters.q} modes, {args.clusters} segments")
    elif args.command == "generate":
        x, y = datasets.generate(args.kind, args.n, args.noise, args.seed, args.centers)
        datasets.write_csv(args.out, x, y)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except TangoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
