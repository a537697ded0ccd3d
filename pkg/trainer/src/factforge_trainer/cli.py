"""Command-line entry points: factforge-train and factforge-predict."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import DEFAULT_BASE_MODEL, TrainingConfig
from .predict import predict
from .train import ValidationError, train

logger = logging.getLogger(__name__)


def train_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="factforge-train", description="Fine-tune a claim-document fact checker"
    )
    parser.add_argument("--train", required=True, help="augmented-set JSONL")
    parser.add_argument("--out", required=True, help="checkpoint output directory")
    parser.add_argument("--base-model", default=DEFAULT_BASE_MODEL)
    parser.add_argument("--epochs", type=int, default=10)
    parser.add_argument("--lr", type=float, default=2e-5)
    parser.add_argument("--batch-size", type=int, default=16)
    parser.add_argument("--weight-decay", type=float, default=1e-2)
    parser.add_argument("--max-seq-len", type=int, default=512)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    cfg = TrainingConfig(
        base_model=args.base_model,
        epochs=args.epochs,
        learning_rate=args.lr,
        batch_size=args.batch_size,
        weight_decay=args.weight_decay,
        max_sequence_length=args.max_seq_len,
        seed=args.seed,
    )
    try:
        result = train(args.train, cfg, args.out)
    except (ValidationError, OSError) as exc:
        logger.error("%s", exc)
        return 1
    print(result.checkpoint_dir)
    return 0


def predict_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="factforge-predict", description="Batch-predict claim-document pairs"
    )
    parser.add_argument("--ckpt", required=True, help="checkpoint directory")
    parser.add_argument("--pairs", required=True, help="pairs JSONL: id, claim, text")
    parser.add_argument("--out", required=True, help="predictions JSONL path")
    parser.add_argument("--batch-size", type=int, default=32)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        predict(args.ckpt, args.pairs, args.out, batch_size=args.batch_size)
    except OSError as exc:
        logger.error("%s", exc)
        return 1
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(train_main())
