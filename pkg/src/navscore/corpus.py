"""Corpus ingestion, batch evaluation, and report emission.

The corpus format is a JSON object mapping record ids to {"path", "query",
"answer"} objects; predictions arrive either as a JSON object mapping id to
text or as JSON lines of {"id", "prediction"}. Evaluation scores every
prediction against its reference answer and aggregates the results into a
report that can be written as JSON or CSV.
"""
from __future__ import annotations

import csv
import datetime
import json
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

from .directional import ConflictPairSet
from .instructions import DirectionLexicon
from .scoring import MetricConfig, ScoreBreakdown, enhanced_score
from .similarity import EmbeddingBackend


class CorpusError(ValueError):
    """Base class for corpus and prediction file problems."""


class SchemaError(CorpusError):
    """A file parsed but its contents violate the expected schema."""


class MissingIdError(CorpusError):
    """Strict evaluation found ids present on one side only."""


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    path: str
    query: str
    answer: str


@dataclass(frozen=True)
class PredictionRecord:
    id: str
    prediction: str


def _reject_duplicate_keys(pairs: list[tuple[str, Any]]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in pairs:
        if key in out:
            raise SchemaError(f"duplicate key {key!r}")
        out[key] = value
    return out


def _parse_json(text: str, origin: str) -> Any:
    try:
        return json.loads(text, object_pairs_hook=_reject_duplicate_keys)
    except SchemaError as exc:
        raise SchemaError(f"{origin}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{origin}: invalid JSON at line {exc.lineno}: {exc.msg}") from None


def load_corpus(path) -> list[CorpusRecord]:
    """Read a corpus file: JSON object of id -> {path, query, answer}.

    Ids are preserved verbatim (augmentation suffixes like "0_1" included)
    and records come back sorted by id so iteration order is reproducible.
    """
    with open(path, encoding="utf-8") as handle:
        document = _parse_json(handle.read(), origin=str(path))
    if not isinstance(document, dict):
        raise SchemaError(f"{path}: corpus root must be a JSON object, not {_kind(document)}")
    records = []
    for record_id, body in document.items():
        if not isinstance(body, dict):
            raise SchemaError(f"{path}: record {record_id!r} must be an object, not {_kind(body)}")
        for key in ("path", "query", "answer"):
            if key not in body:
                raise SchemaError(f"{path}: record {record_id!r} is missing {key!r}")
            if not isinstance(body[key], str):
                raise SchemaError(f"{path}: record {record_id!r} field {key!r} must be a string")
        if not body["query"].strip():
            raise SchemaError(f"{path}: record {record_id!r} has an empty query")
        if not body["answer"].strip():
            raise SchemaError(f"{path}: record {record_id!r} has an empty answer")
        records.append(
            CorpusRecord(id=record_id, path=body["path"], query=body["query"], answer=body["answer"])
        )
    records.sort(key=lambda r: r.id)
    return records


def _kind(value: Any) -> str:
    return {dict: "object", list: "array", str: "string"}.get(type(value), type(value).__name__)


def load_predictions(path) -> list[PredictionRecord]:
    """Read predictions: JSON object id -> text, or JSON lines.

    The whole document is parsed first; if that fails, each nonblank line is
    parsed as a {"id": ..., "prediction": ...} object. A single-line file
    holding one such object is treated as JSON lines, since a mapping would
    make "id" and "prediction" record ids.
    """
    with open(path, encoding="utf-8") as handle:
        text = handle.read()

    records: list[PredictionRecord] | None = None
    try:
        document = json.loads(text, object_pairs_hook=_reject_duplicate_keys)
    except SchemaError as exc:
        raise SchemaError(f"{path}: {exc}") from None
    except json.JSONDecodeError:
        document = None  # not a single JSON document; try JSON lines below
    if isinstance(document, dict):
        if set(document) == {"id", "prediction"} and isinstance(document.get("id"), str):
            records = [_prediction_from_object(document, str(path), lineno=1)]
        else:
            records = []
            for record_id, value in document.items():
                if not isinstance(value, str):
                    raise SchemaError(
                        f"{path}: prediction for id {record_id!r} must be a string"
                    )
                records.append(PredictionRecord(id=record_id, prediction=value))
    elif document is not None:
        raise SchemaError(f"{path}: predictions root must be a JSON object or JSON lines")

    if records is None:
        records = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            row = _parse_json(line, origin=f"{path}:{lineno}")
            if not isinstance(row, dict):
                raise SchemaError(f"{path}:{lineno}: expected a JSON object per line")
            records.append(_prediction_from_object(row, str(path), lineno))

    seen: set[str] = set()
    for record in records:
        if record.id in seen:
            raise SchemaError(f"{path}: duplicate prediction id {record.id!r}")
        seen.add(record.id)
    records.sort(key=lambda r: r.id)
    return records


def _prediction_from_object(row: Mapping[str, Any], origin: str, lineno: int) -> PredictionRecord:
    if "id" not in row or "prediction" not in row:
        raise SchemaError(f"{origin}:{lineno}: prediction rows need 'id' and 'prediction'")
    record_id, prediction = row["id"], row["prediction"]
    if not isinstance(record_id, str) or not isinstance(prediction, str):
        raise SchemaError(f"{origin}:{lineno}: 'id' and 'prediction' must be strings")
    return PredictionRecord(id=record_id, prediction=prediction)


_AGGREGATE_FIELDS = ("bert_f1", "enhanced_score", "final_score")


@dataclass(frozen=True)
class EvaluationReport:
    per_record: tuple[tuple[str, ScoreBreakdown], ...]
    aggregates: dict[str, dict[str, float]] | None
    counts: dict[str, int]
    metadata: dict[str, Any]


def _compute_aggregates(
    per_record: Sequence[tuple[str, ScoreBreakdown]],
) -> dict[str, dict[str, float]] | None:
    if not per_record:
        return None
    out = {}
    for name in _AGGREGATE_FIELDS:
        values = [getattr(breakdown, name) for _, breakdown in per_record]
        out[name] = {
            "mean": statistics.fmean(values),
            "median": statistics.median(values),
            "min": min(values),
            "max": max(values),
        }
    return out


def evaluate_corpus(
    corpus: Sequence[CorpusRecord],
    predictions: Sequence[PredictionRecord],
    backend: EmbeddingBackend,
    lexicon: DirectionLexicon | None = None,
    pairs: ConflictPairSet | None = None,
    cfg: MetricConfig | None = None,
    strictness: str = "strict",
    *,
    jobs: int = 1,
    with_timestamp: bool = True,
) -> EvaluationReport:
    """Score every prediction against its reference answer.

    In "strict" mode any id present on only one side raises MissingIdError;
    "skip_missing" scores the intersection and records how many ids fell out
    on either side. Records are processed sorted by id (concurrently when
    jobs > 1, without affecting order), so reports are reproducible.
    """
    if strictness not in ("strict", "skip_missing"):
        raise ValueError(f"strictness must be 'strict' or 'skip_missing', got {strictness!r}")
    cfg = cfg or MetricConfig()
    lexicon = lexicon or DirectionLexicon.default()
    pairs = pairs or ConflictPairSet.default()

    answer_by_id = {record.id: record.answer for record in corpus}
    prediction_by_id = {record.id: record.prediction for record in predictions}
    missing = sorted(set(answer_by_id) - set(prediction_by_id))
    unmatched = sorted(set(prediction_by_id) - set(answer_by_id))
    if strictness == "strict" and (missing or unmatched):
        parts = []
        if missing:
            parts.append(f"ids without predictions: {', '.join(missing)}")
        if unmatched:
            parts.append(f"prediction ids not in corpus: {', '.join(unmatched)}")
        raise MissingIdError("; ".join(parts))

    shared = sorted(set(answer_by_id) & set(prediction_by_id))

    def score_one(record_id: str) -> tuple[str, ScoreBreakdown]:
        breakdown = enhanced_score(
            answer_by_id[record_id], prediction_by_id[record_id], backend, cfg, lexicon, pairs
        )
        return record_id, breakdown

    if jobs > 1 and len(shared) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_record = tuple(pool.map(score_one, shared))
    else:
        per_record = tuple(score_one(record_id) for record_id in shared)

    counts = {
        "records": len(per_record),
        "conflicts": sum(1 for _, b in per_record if b.conflict),
        "critical_mismatches": sum(1 for _, b in per_record if b.flow.critical_mismatch),
        "empty_action_pairs": sum(
            1 for _, b in per_record if b.flow.ref_steps == 0 and b.flow.pred_steps == 0
        ),
        "missing_predictions": len(missing),
        "unmatched_predictions": len(unmatched),
    }
    timestamp = (
        datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
        if with_timestamp
        else None
    )
    metadata = {
        "config": cfg.to_dict(),
        "backend": backend.identity,
        "strictness": strictness,
        "timestamp": timestamp,
    }
    return EvaluationReport(
        per_record=per_record,
        aggregates=_compute_aggregates(per_record),
        counts=counts,
        metadata=metadata,
    )


def report_to_dict(report: EvaluationReport) -> dict[str, Any]:
    return {
        "metadata": report.metadata,
        "counts": report.counts,
        "aggregates": report.aggregates,
        "records": [
            {"id": record_id, **breakdown.to_dict()}
            for record_id, breakdown in report.per_record
        ],
    }


_CSV_COLUMNS = (
    "id",
    "bert_f1",
    "similarity",
    "flow_bonus",
    "semantic_similarity",
    "special_boost",
    "conflict",
    "critical_mismatch",
    "enhanced_score",
    "final_score",
)


def _csv_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_report(report: EvaluationReport, format: str, path) -> None:
    """Write a report as JSON (full nested breakdowns) or CSV (one row per
    record, aggregates as trailing comment lines)."""
    if format == "json":
        payload = json.dumps(report_to_dict(report), indent=2, ensure_ascii=False)
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(payload + "\n")
        return
    if format != "csv":
        raise ValueError(f"unknown report format {format!r}: expected 'json' or 'csv'")

    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(_CSV_COLUMNS)
        for record_id, breakdown in report.per_record:
            row_map = {"id": record_id, **breakdown.to_dict()}
            writer.writerow(_csv_cell(row_map[column]) for column in _CSV_COLUMNS)
        if report.aggregates is not None:
            for stat in ("mean", "median", "min", "max"):
                cells = ", ".join(
                    f"{name}={_csv_cell(report.aggregates[name][stat])}"
                    for name in _AGGREGATE_FIELDS
                )
                handle.write(f"# {stat} {cells}\n")


def read_report(path) -> dict[str, Any]:
    """Load a JSON report back into plain dictionaries (round-trip helper)."""
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)
