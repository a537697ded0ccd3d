"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line with its measured numbers.

Criterion 2 (reference-results internal consistency) is expected to fail:
the transcribed published grid itself contains rows whose F is not the
harmonic mean of the printed P and R (see test_evaluation's transcription
test for the exact rows). The criterion is asserted as stated rather than
weakened to fit the data.
"""

from __future__ import annotations

import json
import random
import time
from pathlib import Path

from conftest import make_table
from factforge.cli import main
from factforge.corpus import ClaimRecord, Document, filter_by_length, select_balanced_subset
from factforge.decomposition import Summary, decompose
from factforge.evaluation import consistency_check
from factforge.fact_table import LlmEntailmentScorer, unsupported_columns
from factforge.halluscan import scan
from factforge.pipeline import STAGES
from factforge.schemas import validate_jsonl_file
from factforge.synthesis import SynthesisConfig, synthesize


def _report(name: str, ok: bool, detail: str = "") -> bool:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"\nACCEPTANCE {status}: {name}{suffix}")
    return ok


def test_labeling_rule_oracle_equivalence():
    """Every synthetic label must equal a brute-force OR over the recorded
    sentence indices, across >= 1000 random tables, exactly."""
    started = time.monotonic()
    rng = random.Random(20240501)
    n_tables = 1000
    n_checked = 0
    mismatches = 0
    for t in range(n_tables):
        rows = rng.randint(1, 8)
        cols = rng.randint(1, 6)
        matrix = [[rng.random() < 0.45 for _ in range(cols)] for _ in range(rows)]
        table = make_table(f"tbl{t}", matrix)
        cfg = SynthesisConfig(
            proportion_pct=rng.choice([10, 20, 30, 50, 70, 90, 100]),
            instances_per_document=rng.randint(1, 3),
            seed=t,
        )
        for inst in synthesize(table, cfg):
            expected = False
            for r in inst.selected_sentence_indices:
                if matrix[r][inst.fact_index]:
                    expected = True
            if (inst.label == "true") is not expected:
                mismatches += 1
            n_checked += 1
    elapsed = time.monotonic() - started
    ok = mismatches == 0 and elapsed < 10.0
    assert _report(
        "labeling-rule oracle equivalence",
        ok,
        f"{n_checked} labels over {n_tables} tables, {mismatches} mismatches, {elapsed:.2f}s",
    )


def test_reference_results_internal_consistency(data_dir):
    """All 44 transcribed (P, R, F) triples must satisfy
    |F - 2PR/(P+R)| <= 0.001."""
    started = time.monotonic()
    ref = json.loads((data_dir / "reference_results.json").read_text("utf-8"))
    n_rows = 0
    violations = []
    for group in ref["groups"]:
        rows = [tuple(ref["triples"][group][label]) for label in ref["row_labels"]]
        n_rows += len(rows)
        for v in consistency_check(rows, tolerance=0.001):
            violations.append((group, ref["row_labels"][v.index], round(v.delta, 4)))
    elapsed = time.monotonic() - started
    # the two worked examples must hold regardless
    assert consistency_check([(0.949, 0.656, 0.776)]) == []
    assert consistency_check([(0.891, 0.780, 0.831)]) == []
    ok = n_rows == 44 and not violations and elapsed < 1.0
    assert _report(
        "reference-results internal consistency",
        ok,
        f"{n_rows} triples, {len(violations)} violations {violations}, {elapsed:.2f}s",
    )


def test_end_to_end_determinism(data_dir, tmp_path):
    """Two mock-backend runs over the 5-document fixture with seed 7 must
    produce byte-identical artifacts and manifests."""
    started = time.monotonic()

    def run(tag: str) -> Path:
        out = tmp_path / tag
        code = main(
            [
                "run-all",
                "--dataset", "generic",
                "--data", str(data_dir / "docs5.jsonl"),
                "--out", str(out),
                "--backend", "mock",
                "--cache-dir", str(tmp_path / f"cache-{tag}"),
                "--seed", "7",
            ]
        )
        assert code == 0
        return out

    out_a, out_b = run("a"), run("b")
    differing = []
    for name in [f"{s}.jsonl" for s in STAGES] + ["manifest.json"]:
        if (out_a / name).read_bytes() != (out_b / name).read_bytes():
            differing.append(name)
    elapsed = time.monotonic() - started
    ok = not differing and elapsed < 30.0
    assert _report(
        "end-to-end determinism",
        ok,
        f"{len(STAGES)} artifacts + manifest compared, differing={differing}, {elapsed:.2f}s",
    )


class _MatrixScorer:
    """Scorer wired to a preset support matrix keyed by fixture texts."""

    scorer_id = "preset-matrix"

    def __init__(self, verdicts: dict[tuple[str, str], bool]):
        self.verdicts = verdicts

    def scores(self, sentence: str, fact: str) -> bool:
        return self.verdicts[(sentence, fact)]

    def score_batch(self, pairs):
        return [self.scores(s, f) for s, f in pairs]


def test_hallucination_scan_exactness(mock_backend):
    """Flagged facts must equal the all-false columns exactly, on random
    preset matrices and on the injected-unsupported-fact fixture."""
    rng = random.Random(77)
    failures = 0
    n_trials = 60
    for trial in range(n_trials):
        n_rows = rng.randint(1, 5)
        n_cols = rng.randint(1, 4)
        sentences = [f"Source sentence {trial}-{r} stands alone." for r in range(n_rows)]
        facts = [f"Candidate fact {trial}-{c} stands alone." for c in range(n_cols)]
        matrix = [[rng.random() < 0.35 for _ in range(n_cols)] for _ in range(n_rows)]
        doc = Document(id=f"doc{trial}", text=" ".join(sentences), sentences=sentences)
        summary = Summary(doc_id=doc.id, text=" ".join(facts), sentences=facts)
        scorer = _MatrixScorer(
            {
                (s, f): matrix[r][c]
                for r, s in enumerate(sentences)
                for c, f in enumerate(facts)
            }
        )
        # facts pass through undivided: each fixture "sentence" is one fact
        report = scan(doc, summary, scorer, lambda summ: _identity_facts(summ))
        expected = [c for c in range(n_cols) if not any(matrix[r][c] for r in range(n_rows))]
        if [f.fact_index for f in report.flagged_facts] != expected:
            failures += 1
        if report.verdict != ("abnormal" if expected else "clean"):
            failures += 1

    # injected-fact fixture: a fabricated cause appears in no source sentence
    doc = Document(
        id="bridge",
        text=" ",
        sentences=[
            "A photo of a cracked beam spread quickly online.",
            "Posts claimed the city bridge was about to collapse.",
            "Inspectors examined the bridge the same week.",
            "The bridge stayed open with a clean safety rating.",
        ],
    )
    injected = "The panic traced to corrosion caused by road salt."
    summary = Summary(
        doc_id="bridge",
        text="",
        sentences=[doc.sentences[1], doc.sentences[2], injected],
    )
    report = scan(
        doc,
        summary,
        LlmEntailmentScorer(mock_backend, "m1"),
        lambda summ: decompose(summ, mock_backend, "m1"),
    )
    injected_ok = (
        report.verdict == "abnormal"
        and [f.fact_text for f in report.flagged_facts] == [injected]
        and [f.fact_index for f in report.flagged_facts]
        == unsupported_columns(report.table)
    )
    ok = failures == 0 and injected_ok
    assert _report(
        "hallucination scan exactness",
        ok,
        f"{n_trials} random matrices, {failures} mismatches, injected-fact fixture ok={injected_ok}",
    )


def _identity_facts(summary: Summary):
    from factforge.decomposition import AtomicFact

    return [AtomicFact(i, s, i) for i, s in enumerate(summary.sentences)]


def test_length_filter_boundary():
    """Documents of exactly 3 and 40 sentences are excluded; 4 and 39 kept."""

    def doc_with(n: int) -> Document:
        sentences = [f"Sentence {i} of this document." for i in range(n)]
        return Document(id=f"n{n}", text=" ".join(sentences), sentences=sentences)

    kept = filter_by_length([doc_with(3), doc_with(4), doc_with(39), doc_with(40)])
    ok = [d.id for d in kept] == ["n4", "n39"]
    assert _report("length-filter boundary", ok, f"kept={[d.id for d in kept]}")


def test_balanced_subset_histogram():
    """Label histogram must be exactly (k/2, k/2) for k in {4, 500}."""

    def pairs(n_true: int, n_false: int):
        out = []
        for i, label in enumerate(["true"] * n_true + ["false"] * n_false):
            doc = Document(id=f"d{i}", text="Text.", sentences=["Text."])
            out.append((doc, ClaimRecord(f"Claim {i}.", label, doc.id)))
        return out

    results = {}
    for k, corpus in ((4, pairs(3, 3)), (500, pairs(300, 280))):
        subset = select_balanced_subset(corpus, k, seed=13)
        labels = [c.label for _, c in subset]
        results[k] = (labels.count("true"), labels.count("false"))
    ok = all(results[k] == (k // 2, k // 2) for k in (4, 500))
    assert _report("balanced subset histogram", ok, f"histograms={results}")


def test_artifact_schema_validation(data_dir, tmp_path):
    """Every emitted JSONL line across all stages (plus scan) must validate
    against its declared schema."""
    out = tmp_path / "out"
    code = main(
        [
            "run-all",
            "--dataset", "generic",
            "--data", str(data_dir / "docs5.jsonl"),
            "--out", str(out),
            "--backend", "mock",
            "--cache-dir", str(tmp_path / "cache"),
            "--seed", "7",
        ]
    )
    assert code == 0
    code = main(
        [
            "scan",
            "--dataset", "generic",
            "--data", str(data_dir / "docs5.jsonl"),
            "--out", str(out),
            "--backend", "mock",
            "--cache-dir", str(tmp_path / "cache"),
            "--seed", "7",
        ]
    )
    assert code == 0
    counts = {}
    for stage in list(STAGES) + ["scan"]:
        counts[stage] = validate_jsonl_file(out / f"{stage}.jsonl", stage)
    ok = all(n > 0 for n in counts.values())
    assert _report("artifact schema validation", ok, f"lines validated per stage: {counts}")
