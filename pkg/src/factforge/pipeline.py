"""Stage orchestration: each stage reads the previous stage's JSONL artifact,
writes its own atomically, and records content hashes in a manifest so
completed stages are skipped on re-run.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Callable, Iterable

from . import corpus as corpus_mod
from . import decomposition as decomp_mod
from . import synthesis as synth_mod
from .corpus import ClaimRecord, Document, Pair
from .errors import ConfigurationError, DependencyError
from .evaluation import EvalReport, read_gold, read_predictions, score
from .fact_table import (
    EntailmentScorer,
    LlmEntailmentScorer,
    PredictionFileScorer,
    SentenceFactTable,
    build_table,
    command_predictor,
)
from .halluscan import batch_scan
from .llm_backend import DEFAULT_CACHE_DIR, LlmBackend, make_backend
from .prompts import PromptLibrary
from .schemas import validate_record
from .segmenter import SegmentationConfig, load_abbreviations

logger = logging.getLogger(__name__)

STAGES = ("ingest", "summarize", "decompose", "table", "synth", "augment")
ON_DEMAND_STAGES = ("scan", "score")

# Artifacts each stage reads. A stage re-runs when any of these change.
UPSTREAM: dict[str, tuple[str, ...]] = {
    "ingest": (),
    "summarize": ("ingest",),
    "decompose": ("summarize",),
    "table": ("ingest", "decompose"),
    "synth": ("table",),
    "augment": ("ingest", "synth"),
    "scan": ("ingest", "summarize"),
}

MANIFEST_NAME = "manifest.json"


@dataclass
class RunConfig:
    dataset: str = "generic"  # pubhealth | scifact | generic
    data_path: str | None = None
    claims_path: str | None = None  # scifact only
    out: str = "out"
    seed: int = 0
    backend: str = "mock"  # mock | live
    model: str = "mock-model"
    cache_dir: str = DEFAULT_CACHE_DIR
    concurrency: int = 4
    proportions: list[int] = field(default_factory=lambda: [100])
    subset_size: int | None = None
    instances_per_doc: int = 1
    fact_selection: str = synth_mod.FACT_SELECTION_UNIFORM
    min_sentences_excl: int = 3
    max_sentences_excl: int = 40
    prompt_dir: str | None = None
    abbrev_file: str | None = None
    predict_cmd: str | None = None  # classifier-backed scorer for scan

    def validate(self) -> None:
        if self.dataset not in ("pubhealth", "scifact", "generic"):
            raise ConfigurationError(f"unknown dataset kind {self.dataset!r}")
        if self.backend not in ("mock", "live"):
            raise ConfigurationError(f"unknown backend {self.backend!r}")
        for p in self.proportions:
            if not 0 <= p <= 100:
                raise ConfigurationError(f"proportion {p} outside [0, 100]")
        if self.subset_size is not None and self.subset_size % 2 != 0:
            raise ConfigurationError("subset_size must be even (balanced halves)")
        if self.concurrency < 1:
            raise ConfigurationError("concurrency must be >= 1")
        if self.instances_per_doc < 1:
            raise ConfigurationError("instances_per_doc must be >= 1")

    def experiment_params(self) -> dict:
        """Config subset that identifies the experiment; deliberately excludes
        filesystem locations so manifests compare equal across machines."""
        params = asdict(self)
        for key in ("data_path", "claims_path", "out", "cache_dir", "prompt_dir",
                    "abbrev_file", "predict_cmd", "concurrency"):
            params.pop(key)
        params["uses_classifier_scorer"] = bool(self.predict_cmd)
        return params

    def segmentation_config(self) -> SegmentationConfig:
        if self.abbrev_file:
            return SegmentationConfig(abbreviations=load_abbreviations(self.abbrev_file))
        return SegmentationConfig()

    def prompt_library(self) -> PromptLibrary:
        return PromptLibrary(self.prompt_dir)


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _atomic_write_jsonl(path: Path, records: Iterable[dict], schema_name: str) -> int:
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            for rec in records:
                validate_record(rec, schema_name)
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
                n += 1
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return n


def _read_jsonl(path: Path) -> list[dict]:
    return [
        json.loads(line)
        for line in path.read_text("utf-8").splitlines()
        if line.strip()
    ]


class PipelineRun:
    """Binds a RunConfig to an output directory, manifest, and backend."""

    def __init__(self, cfg: RunConfig):
        cfg.validate()
        self.cfg = cfg
        self.out_dir = Path(cfg.out)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.seg_cfg = cfg.segmentation_config()
        self.prompts = cfg.prompt_library()
        self._backend: LlmBackend | None = None
        self.manifest = self._load_manifest()

    # -- manifest -----------------------------------------------------------

    def _manifest_path(self) -> Path:
        return self.out_dir / MANIFEST_NAME

    def _load_manifest(self) -> dict:
        path = self._manifest_path()
        if path.exists():
            return json.loads(path.read_text("utf-8"))
        return {"config": self.cfg.experiment_params(), "stages": {}}

    def _save_manifest(self) -> None:
        self.manifest["config"] = self.cfg.experiment_params()
        payload = json.dumps(self.manifest, indent=2, sort_keys=True) + "\n"
        fd, tmp = tempfile.mkstemp(dir=self.out_dir, prefix=".manifest.")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(payload)
        os.replace(tmp, self._manifest_path())

    def artifact_path(self, stage: str) -> Path:
        return self.out_dir / f"{stage}.jsonl"

    def _input_hashes(self, stage: str) -> dict[str, str]:
        hashes: dict[str, str] = {}
        if stage == "ingest":
            for label, p in self._dataset_files():
                hashes[label] = _sha256_file(p)
        for upstream in UPSTREAM[stage]:
            artifact = self.artifact_path(upstream)
            if not artifact.exists():
                raise DependencyError(stage, upstream)
            hashes[upstream] = _sha256_file(artifact)
        return hashes

    def _fingerprint(self, stage: str, input_hashes: dict[str, str]) -> str:
        identity = json.dumps(
            {"stage": stage, "config": self.cfg.experiment_params(), "inputs": input_hashes},
            sort_keys=True,
        )
        return hashlib.sha256(identity.encode("utf-8")).hexdigest()

    def _dataset_files(self) -> list[tuple[str, Path]]:
        if self.cfg.data_path is None:
            raise ConfigurationError("data_path is required for ingest")
        files = [("data", Path(self.cfg.data_path))]
        if self.cfg.dataset == "scifact":
            if self.cfg.claims_path is None:
                raise ConfigurationError("claims_path is required for scifact")
            files.append(("claims", Path(self.cfg.claims_path)))
        for _, p in files:
            if not p.exists():
                raise ConfigurationError(f"dataset file not found: {p}")
        return files

    # -- backend ------------------------------------------------------------

    @property
    def backend(self) -> LlmBackend:
        if self._backend is None:
            self._backend = make_backend(
                self.cfg.backend, self.cfg.cache_dir, self.cfg.concurrency
            )
        return self._backend

    def scorer(self) -> EntailmentScorer:
        if self.cfg.predict_cmd:
            return PredictionFileScorer(
                command_predictor(self.cfg.predict_cmd),
                scorer_id=f"classifier:{self.cfg.predict_cmd}",
            )
        return LlmEntailmentScorer(self.backend, self.cfg.model, self.prompts)

    # -- stage running ------------------------------------------------------

    def run_stage(self, stage: str) -> Path:
        """Run one stage (or skip it if inputs and output are unchanged)."""
        if stage not in STAGES and stage not in ON_DEMAND_STAGES:
            raise ConfigurationError(f"unknown stage {stage!r}")
        if stage == "score":
            raise ConfigurationError("score runs via run_score(pred, gold), not run_stage")
        input_hashes = self._input_hashes(stage)
        fingerprint = self._fingerprint(stage, input_hashes)
        out_path = self.artifact_path(stage)
        entry = self.manifest["stages"].get(stage)
        if (
            entry is not None
            and entry.get("fingerprint") == fingerprint
            and out_path.exists()
            and _sha256_file(out_path) == entry.get("output_hash")
        ):
            logger.info("stage %s is up to date; skipping", stage)
            return out_path

        runner: Callable[[Path], int] = getattr(self, f"_run_{stage}")
        n_records = runner(out_path)
        self.manifest["stages"][stage] = {
            "fingerprint": fingerprint,
            "inputs": input_hashes,
            "output_hash": _sha256_file(out_path),
            "n_records": n_records,
        }
        self._save_manifest()
        logger.info("stage %s wrote %d records to %s", stage, n_records, out_path)
        return out_path

    def run_all(self) -> list[Path]:
        return [self.run_stage(stage) for stage in STAGES]

    def run_score(self, pred_path: str | Path, gold_path: str | Path) -> EvalReport:
        report = score(read_predictions(pred_path), read_gold(gold_path))
        out = self.out_dir / "score.json"
        out.write_text(json.dumps(report.to_record(), indent=2, sort_keys=True) + "\n", "utf-8")
        return report

    # -- individual stages ----------------------------------------------------

    def _load_pairs(self) -> list[Pair]:
        files = dict(self._dataset_files())
        if self.cfg.dataset == "pubhealth":
            result = corpus_mod.load_pubhealth(files["data"])
        elif self.cfg.dataset == "scifact":
            result = corpus_mod.load_scifact(files["data"], files["claims"])
        else:
            result = corpus_mod.load_generic(files["data"])
        for err in result.errors:
            logger.warning("ingest skipped row: %s", err)
        return result.pairs

    def _run_ingest(self, out_path: Path) -> int:
        pairs = self._load_pairs()
        for doc, _ in pairs:
            doc.ensure_segmented(self.seg_cfg)
        pairs = corpus_mod.filter_pairs_by_length(
            pairs, self.cfg.min_sentences_excl, self.cfg.max_sentences_excl
        )
        if self.cfg.subset_size is not None:
            pairs = corpus_mod.select_balanced_subset(
                pairs, self.cfg.subset_size, self.cfg.seed
            )
        records = [
            {
                "id": doc.id,
                "text": doc.text,
                "sentences": doc.sentences,
                "claim": claim.claim if claim else None,
                "label": claim.label if claim else None,
                "source": doc.source,
            }
            for doc, claim in pairs
        ]
        return _atomic_write_jsonl(out_path, records, "ingest")

    def _unique_docs(self) -> list[Document]:
        docs: dict[str, Document] = {}
        for rec in _read_jsonl(self.artifact_path("ingest")):
            if rec["id"] not in docs:
                docs[rec["id"]] = Document(
                    id=rec["id"],
                    text=rec["text"],
                    sentences=rec["sentences"],
                    source=rec["source"],
                )
        return list(docs.values())

    def _run_summarize(self, out_path: Path) -> int:
        docs = self._unique_docs()

        def work(doc: Document) -> dict:
            summary = decomp_mod.summarize(
                doc, self.backend, self.cfg.model, self.prompts, self.seg_cfg
            )
            return {
                "doc_id": summary.doc_id,
                "summary": summary.text,
                "sentences": summary.sentences,
                "warnings": summary.warnings,
            }

        with ThreadPoolExecutor(max_workers=self.cfg.concurrency) as pool:
            records = list(pool.map(work, docs))
        return _atomic_write_jsonl(out_path, records, "summarize")

    def _run_decompose(self, out_path: Path) -> int:
        summaries = [
            decomp_mod.Summary(
                doc_id=rec["doc_id"],
                text=rec["summary"],
                sentences=rec["sentences"],
                warnings=rec.get("warnings", []),
            )
            for rec in _read_jsonl(self.artifact_path("summarize"))
        ]

        def work(summary: decomp_mod.Summary) -> dict:
            facts = decomp_mod.decompose(summary, self.backend, self.cfg.model, self.prompts)
            return {
                "doc_id": summary.doc_id,
                "facts": [
                    {"id": f.id, "text": f.text, "source_sentence": f.source_summary_sentence}
                    for f in facts
                ],
            }

        with ThreadPoolExecutor(max_workers=self.cfg.concurrency) as pool:
            records = list(pool.map(work, summaries))
        return _atomic_write_jsonl(out_path, records, "decompose")

    def _run_table(self, out_path: Path) -> int:
        docs = {d.id: d for d in self._unique_docs()}
        scorer = self.scorer()
        fact_rows = _read_jsonl(self.artifact_path("decompose"))

        def work(rec: dict) -> dict:
            doc = docs[rec["doc_id"]]
            facts = [
                decomp_mod.AtomicFact(f["id"], f["text"], f["source_sentence"])
                for f in rec["facts"]
            ]
            return build_table(doc, facts, scorer).to_record()

        with ThreadPoolExecutor(max_workers=self.cfg.concurrency) as pool:
            records = list(pool.map(work, fact_rows))
        return _atomic_write_jsonl(out_path, records, "table")

    def _run_synth(self, out_path: Path) -> int:
        tables = [
            SentenceFactTable.from_record(rec)
            for rec in _read_jsonl(self.artifact_path("table"))
        ]
        records = []
        for p in self.cfg.proportions:
            cfg = synth_mod.SynthesisConfig(
                proportion_pct=p,
                instances_per_document=self.cfg.instances_per_doc,
                seed=self.cfg.seed,
                fact_selection=self.cfg.fact_selection,
            )
            records.extend(
                inst.to_record() for inst in synth_mod.synthesize_corpus(tables, cfg)
            )
        return _atomic_write_jsonl(out_path, records, "synth")

    def _run_augment(self, out_path: Path) -> int:
        originals: list[Pair] = []
        for rec in _read_jsonl(self.artifact_path("ingest")):
            claim = (
                ClaimRecord(rec["claim"], rec["label"], rec["id"])
                if rec["claim"] is not None and rec["label"] is not None
                else None
            )
            doc = Document(rec["id"], rec["text"], rec["sentences"], rec["source"])
            originals.append((doc, claim))
        synthetic = [
            synth_mod.SyntheticInstance.from_record(rec)
            for rec in _read_jsonl(self.artifact_path("synth"))
        ]
        merged = synth_mod.build_augmented_set(originals, synthetic, self.cfg.seed)
        return _atomic_write_jsonl(out_path, (r.to_record() for r in merged), "augment")

    def _run_scan(self, out_path: Path) -> int:
        docs = {d.id: d for d in self._unique_docs()}
        pairs = []
        for rec in _read_jsonl(self.artifact_path("summarize")):
            summary = decomp_mod.Summary(
                doc_id=rec["doc_id"], text=rec["summary"], sentences=rec["sentences"]
            )
            pairs.append((docs[rec["doc_id"]], summary))

        def decomposer(summary: decomp_mod.Summary):
            return decomp_mod.decompose(summary, self.backend, self.cfg.model, self.prompts)

        reports, aggregate, errors = batch_scan(pairs, self.scorer(), decomposer)
        for err in errors:
            logger.warning("scan error: %s", err)
        logger.info(
            "scanned %d summaries, %d abnormal", aggregate["n_scanned"], aggregate["n_abnormal"]
        )
        return _atomic_write_jsonl(out_path, (r.to_record() for r in reports), "scan")
