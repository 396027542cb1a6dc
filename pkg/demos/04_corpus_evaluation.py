"""
Evaluating a corpus of predictions
==================================

Batch evaluation takes a reference corpus (a JSON object keyed by record
id) and a prediction set (a JSON mapping or JSONL rows), scores every
shared id, and reports per-record breakdowns plus corpus aggregates.
"""

import json
import tempfile
from pathlib import Path

from navscore import (
    emit_report,
    evaluate_corpus,
    lexical_backend,
    load_corpus,
    load_predictions,
    report_to_dict,
)

workdir = Path(tempfile.mkdtemp(prefix="navscore_demo_"))

# A miniature corpus: augmented ids like "0_1" are ordinary ids.
corpus_path = workdir / "corpus.json"
corpus_path.write_text(json.dumps({
    "0": {
        "path": "cafe/entrance.jpg",
        "query": "How do I reach the counter",
        "answer": "Walk forward and turn left at the pillar.",
    },
    "0_1": {
        "path": "cafe/entrance.jpg",
        "query": "How do I reach the counter",
        "answer": "Go straight, then take a left at the pillar.",
    },
    "1": {
        "path": "cafe/stairs.jpg",
        "query": "Where are the restrooms",
        "answer": "Go upstairs and turn right.",
    },
}, indent=2))

# Predictions as a JSON mapping; JSONL with {"id", "prediction"} rows works too.
predictions_path = workdir / "predictions.json"
predictions_path.write_text(json.dumps({
    "0": "Walk forward and turn left at the pillar.",   # exact match
    "0_1": "Walk forward and take a left at the pillar.",  # paraphrase
    "1": "Go downstairs and turn left.",                # wrong on both counts
}))

corpus = load_corpus(corpus_path)
predictions = load_predictions(predictions_path)
report = evaluate_corpus(corpus, predictions, lexical_backend())

print(f"scored {report.counts['records']} records")
for record_id, breakdown in report.per_record:
    flags = []
    if breakdown.conflict:
        flags.append("conflict")
    if breakdown.critical_mismatch:
        flags.append("critical")
    print(f"  {record_id}: final={breakdown.final_score:.4f} "
          f"enhanced={breakdown.enhanced_score:.4f} {' '.join(flags)}")

print()
print("aggregates:")
for field, stats in report.aggregates.items():
    line = ", ".join(f"{stat}={value:.4f}" for stat, value in stats.items())
    print(f"  {field}: {line}")

# Reports serialize to JSON (machine-readable, round-trips exactly) or CSV
# (spreadsheet-friendly, aggregate lines as trailing comments).
json_out = workdir / "report.json"
csv_out = workdir / "report.csv"
emit_report(report, "json", json_out)
emit_report(report, "csv", csv_out)
print()
print("JSON report keys:", sorted(json.loads(json_out.read_text())))
print("CSV first lines:")
for line in csv_out.read_text().splitlines()[:3]:
    print("  " + line)

# The in-memory report and the emitted JSON agree field for field.
assert json.loads(json_out.read_text()) == report_to_dict(report)
print()
print("wrote", json_out, "and", csv_out)
