"""Run the full strategy comparison from the command line.

Example:
    python -m evz_harness --out results/ --seeds 5 --epochs 30
"""

import argparse
import sys
import tempfile
from pathlib import Path

from . import data
from .experiment import DEFAULT_STRATEGIES, Budget, format_table, run_experiment


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="evz-harness")
    parser.add_argument("--out", required=True)
    parser.add_argument("--train-per-class", type=int, default=100)
    parser.add_argument("--test-per-class", type=int, default=50)
    parser.add_argument("--seeds", type=int, default=5)
    parser.add_argument("--epochs", type=int, default=30)
    parser.add_argument("--strategies", nargs="+", default=list(DEFAULT_STRATEGIES))
    args = parser.parse_args(argv)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        train_manifest = data.synth_dataset(tmp / "train", args.train_per_class, seed=1001)
        test_manifest = data.synth_dataset(tmp / "test", args.test_per_class, seed=2002)
        rows = run_experiment(
            train_manifest,
            test_manifest,
            args.strategies,
            seeds=list(range(args.seeds)),
            budget=Budget(epochs=args.epochs),
            work_dir=tmp / "work",
            out_dir=Path(args.out),
        )
    print(format_table(rows, args.strategies), end="")
    print(f"wrote {args.out}/results.csv and {args.out}/results.png")
    return 0


if __name__ == "__main__":
    sys.exit(main())
