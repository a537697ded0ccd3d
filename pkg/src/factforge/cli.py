"""factforge command-line interface.

One subcommand per pipeline stage plus run-all. Options can come from a TOML
config file (--config); explicit flags override config values, which override
built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .errors import FactForgeError
from .pipeline import ON_DEMAND_STAGES, STAGES, PipelineRun, RunConfig

logger = logging.getLogger(__name__)

_STAGE_COMMANDS = list(STAGES) + list(ON_DEMAND_STAGES) + ["run-all"]


def _add_shared_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML config file mirroring these flags")
    parser.add_argument("--out", help="output directory for stage artifacts")
    parser.add_argument("--seed", type=int, help="run seed, recorded in every artifact")
    parser.add_argument("--cache-dir", dest="cache_dir", help="LLM response cache directory")
    parser.add_argument("--backend", choices=["live", "mock"], help="LLM backend mode")
    parser.add_argument("--model", help="model identifier sent to the backend")
    parser.add_argument("--concurrency", type=int, help="max in-flight LLM requests")
    parser.add_argument("--prompt-dir", dest="prompt_dir", help="prompt template overrides")
    parser.add_argument("--abbrev-file", dest="abbrev_file", help="abbreviation list override")
    parser.add_argument(
        "--dataset", choices=["pubhealth", "scifact", "generic"], help="input corpus kind"
    )
    parser.add_argument("--data", dest="data_path", help="dataset file (TSV or JSONL)")
    parser.add_argument("--claims", dest="claims_path", help="claims JSONL (scifact only)")
    parser.add_argument(
        "--predict-cmd",
        dest="predict_cmd",
        help="shell command with {pairs}/{out} placeholders for a classifier scorer",
    )


def _add_synthesis_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--proportion",
        dest="proportions",
        type=int,
        action="append",
        help="percent of sentences per synthetic text (repeatable)",
    )
    parser.add_argument(
        "--subset-size", dest="subset_size", type=int, help="balanced subset size (even)"
    )
    parser.add_argument(
        "--instances-per-doc", dest="instances_per_doc", type=int,
        help="synthetic instances per document",
    )
    parser.add_argument(
        "--fact-selection",
        dest="fact_selection",
        choices=["uniform", "balance-target"],
        help="fact column selection mode",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="factforge",
        description="Synthetic text-claim data generation and hallucination scanning",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _STAGE_COMMANDS:
        stage_parser = sub.add_parser(name, help=f"run the {name} stage")
        _add_shared_flags(stage_parser)
        _add_synthesis_flags(stage_parser)
        if name == "score":
            stage_parser.add_argument("--pred", required=True, help="predictions JSONL")
            stage_parser.add_argument("--gold", required=True, help="gold labels JSONL")
    return parser


def _merge_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        with open(args.config, "rb") as fh:
            file_values = tomllib.load(fh)
        known = {f.name for f in fields(RunConfig)}
        unknown = set(file_values) - known
        if unknown:
            raise FactForgeError(f"unknown config keys: {sorted(unknown)}")
        values.update(file_values)
    for f in fields(RunConfig):
        flag_value = getattr(args, f.name, None)
        if flag_value is not None:
            values[f.name] = flag_value
    if "fact_selection" in values:
        values["fact_selection"] = values["fact_selection"].replace("-", "_")
    return RunConfig(**values)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = _merge_config(args)
        run = PipelineRun(cfg)
        if args.command == "run-all":
            for path in run.run_all():
                print(path)
        elif args.command == "score":
            report = run.run_score(args.pred, args.gold)
            print(json.dumps(report.to_record(), indent=2, sort_keys=True))
        else:
            print(run.run_stage(args.command))
    except FactForgeError as exc:
        logger.error("%s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
