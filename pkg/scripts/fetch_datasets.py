#!/usr/bin/env python3
"""Fetch the UCI datasets used by the acceptance suite into ./data.

Each output is a headerless CSV of features followed by an integer class
column (use ``--label-col -1``). Downloads are validated by shape and class
counts, and wdbc additionally by a SHA-256 of the written CSV.

    python scripts/fetch_datasets.py                 # both datasets
    python scripts/fetch_datasets.py --banknote-file data_banknote_authentication.txt

wdbc falls back to the copy bundled with scikit-learn when UCI is unreachable.
banknote has no offline source; pass a local copy of the UCI file if the
download fails.
"""

import argparse
import hashlib
import io
import sys
import urllib.request
from pathlib import Path

import numpy as np

BANKNOTE_URL = "https://archive.ics.uci.edu/ml/machine-learning-databases/00267/data_banknote_authentication.txt"
WDBC_URL = "https://archive.ics.uci.edu/ml/machine-learning-databases/breast-cancer-wisconsin/wdbc.data"

BANKNOTE_SHAPE = (1372, 4)
BANKNOTE_CLASSES = {0: 762, 1: 610}
WDBC_SHAPE = (569, 30)
WDBC_CLASSES = {0: 212, 1: 357}  # 0 = malignant, 1 = benign
WDBC_CSV_SHA256 = "ce0d3153c7a04cade14d697ec8737e1b8b7942282073fd0ee785c4ada95148e6"


def _download(url, timeout=30):
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        return resp.read().decode("utf-8")


def _check(name, x, y, shape, classes):
    if x.shape != shape:
        raise SystemExit(f"{name}: expected shape {shape}, got {x.shape}")
    counts = {int(c): int(n) for c, n in zip(*np.unique(y, return_counts=True))}
    if counts != classes:
        raise SystemExit(f"{name}: expected class counts {classes}, got {counts}")


def _write(path, x, y):
    lines = [",".join([repr(float(v)) for v in row] + [str(int(c))]) for row, c in zip(x, y)]
    text = "\n".join(lines) + "\n"
    path.write_text(text)
    return hashlib.sha256(text.encode()).hexdigest()


def banknote(out_dir, local=None):
    text = Path(local).read_text() if local else _download(BANKNOTE_URL)
    table = np.loadtxt(io.StringIO(text), delimiter=",")
    x, y = table[:, :4], table[:, 4].astype(int)
    _check("banknote", x, y, BANKNOTE_SHAPE, BANKNOTE_CLASSES)
    digest = _write(out_dir / "banknote.csv", x, y)
    print(f"banknote.csv  {x.shape}  sha256={digest}")


def _wdbc_from_text(text):
    rows = [line.split(",") for line in text.splitlines() if line.strip()]
    x = np.array([[float(v) for v in r[2:]] for r in rows])
    y = np.array([0 if r[1] == "M" else 1 for r in rows])
    return x, y


def wdbc(out_dir):
    try:
        x, y = _wdbc_from_text(_download(WDBC_URL))
        source = "UCI"
    except OSError:
        from sklearn.datasets import load_breast_cancer

        d = load_breast_cancer()
        x, y, source = d.data, d.target, "scikit-learn bundle"
    _check("wdbc", x, y, WDBC_SHAPE, WDBC_CLASSES)
    digest = _write(out_dir / "wdbc.csv", x, y)
    if digest != WDBC_CSV_SHA256:
        raise SystemExit(f"wdbc: checksum mismatch ({digest})")
    print(f"wdbc.csv      {x.shape}  sha256={digest}  ({source})")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "data"))
    p.add_argument("--banknote-file", default=None, help="local copy of data_banknote_authentication.txt")
    p.add_argument("--only", choices=["banknote", "wdbc"], default=None)
    args = p.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    failed = False
    if args.only in (None, "wdbc"):
        wdbc(out)
    if args.only in (None, "banknote"):
        try:
            banknote(out, args.banknote_file)
        except OSError as exc:
            print(f"banknote: download failed ({exc}); rerun with --banknote-file", file=sys.stderr)
            failed = True
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
