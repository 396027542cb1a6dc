"""Composite scoring: blend token similarity with directional checks.

The enhanced score combines direction-weighted similarity, flow agreement,
and plain semantic similarity, with a small boost for paraphrases that take
the same path; directional conflicts and critical order mismatches knock it
down. The final score mixes the enhanced score with the unweighted
token-match F1.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, fields
from typing import Any, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .directional import ConflictPairSet, FlowAnalysis, analyze_flow, detect_conflict
from .instructions import ActionSequence, DirectionLexicon, Instruction, extract_actions, normalize
from .similarity import EmbeddingBackend, token_match_f1, weighted_directional_similarity


class ConfigError(ValueError):
    """A configuration value or file is invalid."""


_PENALIZE_RE = re.compile(r"^penalize\(\s*([0-9.eE+-]+)\s*\)$")


@dataclass(frozen=True)
class ConflictPolicy:
    """What a detected directional conflict does to the enhanced score.

    "zero" discards it entirely; "penalize(f)" multiplies it by (1 - f),
    so penalize(1.0) behaves like "zero" and penalize(0.0) is a no-op.
    """

    mode: str = "zero"
    factor: float = 0.0

    def __post_init__(self):
        if self.mode not in ("zero", "penalize"):
            raise ConfigError(f"unknown conflict policy mode {self.mode!r}")
        if self.mode == "penalize" and not 0.0 <= self.factor <= 1.0:
            raise ConfigError(f"penalize factor must be in [0, 1], got {self.factor}")

    @classmethod
    def parse(cls, text: str) -> "ConflictPolicy":
        stripped = text.strip()
        if stripped == "zero":
            return cls(mode="zero")
        match = _PENALIZE_RE.match(stripped)
        if match:
            try:
                factor = float(match.group(1))
            except ValueError:
                raise ConfigError(f"bad penalize factor in {text!r}") from None
            return cls(mode="penalize", factor=factor)
        raise ConfigError(f"bad conflict policy {text!r}: expected 'zero' or 'penalize(f)'")

    def apply(self, enhanced: float) -> float:
        if self.mode == "zero":
            return 0.0
        return enhanced * (1.0 - self.factor)

    def __str__(self) -> str:
        if self.mode == "zero":
            return "zero"
        return f"penalize({self.factor:g})"


def _clamp01(value: float) -> float:
    return min(1.0, max(0.0, value))


@dataclass(frozen=True)
class MetricConfig:
    """Scoring weights and thresholds.

    alpha/beta/gamma weight direction-aware similarity, flow bonus, and
    semantic similarity inside the enhanced score and must sum to 1 (checked
    to 1e-9, then gamma is snapped to exactly 1 - alpha - beta so the blend
    of three equal inputs reproduces the input bit for bit). w mixes the
    enhanced score into the final score.
    """

    alpha: float = 0.4
    beta: float = 0.3
    gamma: float = 0.3
    w: float = 0.7
    order_threshold: float = 0.6
    step_penalty_rate: float = 0.5
    boost_factor: float = 2.0
    special_case_boost: float = 0.1
    conflict_policy: ConflictPolicy = field(default_factory=ConflictPolicy)

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {value}")
        total = self.alpha + self.beta + self.gamma
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"alpha, beta, gamma must sum to 1, got {total}")
        object.__setattr__(self, "gamma", 1.0 - (self.alpha + self.beta))
        for name, low, high in (
            ("w", 0.0, 1.0),
            ("order_threshold", 0.0, 1.0),
            ("special_case_boost", 0.0, 1.0),
        ):
            value = getattr(self, name)
            if not low <= value <= high:
                raise ConfigError(f"{name} must be in [{low}, {high}], got {value}")
        if self.step_penalty_rate < 0.0:
            raise ConfigError(f"step_penalty_rate must be >= 0, got {self.step_penalty_rate}")
        if self.boost_factor < 1.0:
            raise ConfigError(f"boost_factor must be >= 1, got {self.boost_factor}")
        if not isinstance(self.conflict_policy, ConflictPolicy):
            object.__setattr__(self, "conflict_policy", ConflictPolicy.parse(self.conflict_policy))

    def to_dict(self) -> dict[str, Any]:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "w": self.w,
            "order_threshold": self.order_threshold,
            "step_penalty_rate": self.step_penalty_rate,
            "boost_factor": self.boost_factor,
            "special_case_boost": self.special_case_boost,
            "conflict_policy": str(self.conflict_policy),
        }


@dataclass(frozen=True)
class ScoreBreakdown:
    """Every intermediate of a single reference/prediction comparison."""

    bert_f1: float
    similarity: float
    flow: FlowAnalysis
    semantic_similarity: float
    special_boost: float
    conflict: bool
    enhanced_score: float
    final_score: float
    config: MetricConfig

    @property
    def flow_bonus(self) -> float:
        return self.flow.flow_bonus

    @property
    def critical_mismatch(self) -> bool:
        return self.flow.critical_mismatch

    def to_dict(self, include_config: bool = False) -> dict[str, Any]:
        out = {
            "bert_f1": self.bert_f1,
            "similarity": self.similarity,
            "flow_bonus": self.flow.flow_bonus,
            "semantic_similarity": self.semantic_similarity,
            "special_boost": self.special_boost,
            "conflict": self.conflict,
            "critical_mismatch": self.flow.critical_mismatch,
            "order_similarity": self.flow.order_similarity,
            "ref_steps": self.flow.ref_steps,
            "pred_steps": self.flow.pred_steps,
            "enhanced_score": self.enhanced_score,
            "final_score": self.final_score,
        }
        if include_config:
            out["config"] = self.config.to_dict()
        return out


def special_case(
    ref_seq: ActionSequence,
    pred_seq: ActionSequence,
    ref: Instruction,
    pred: Instruction,
    cfg: MetricConfig,
) -> float:
    """Fixed boost for distinct texts that describe the identical route.

    Applies when both sides extract the same nonempty direction sequence but
    the raw strings differ — a paraphrase that preserved every turn.
    """
    if (
        ref_seq.directions
        and ref_seq.directions == pred_seq.directions
        and ref.raw != pred.raw
    ):
        return cfg.special_case_boost
    return 0.0


def enhanced_score(
    ref: Instruction | str,
    pred: Instruction | str,
    backend: EmbeddingBackend,
    cfg: MetricConfig | None = None,
    lexicon: DirectionLexicon | None = None,
    pairs: ConflictPairSet | None = None,
) -> ScoreBreakdown:
    """Score a prediction against a reference with full intermediates.

    enhanced = clamp(alpha * weighted_similarity + beta * flow_bonus
                     + gamma * semantic_similarity + special_boost),
    zeroed on a critical order mismatch and then subjected to the conflict
    policy if the two sides oppose each other directionally. final =
    clamp((1 - w) * token_match_f1 + w * enhanced).
    """
    cfg = cfg or MetricConfig()
    lexicon = lexicon or DirectionLexicon.default()
    pairs = pairs or ConflictPairSet.default()
    ref_instr = ref if isinstance(ref, Instruction) else normalize(ref)
    pred_instr = pred if isinstance(pred, Instruction) else normalize(pred)

    ref_seq = extract_actions(ref_instr, lexicon)
    pred_seq = extract_actions(pred_instr, lexicon)

    similarity = weighted_directional_similarity(
        ref_instr, pred_instr, backend, lexicon, cfg.boost_factor
    ).f1
    flow = analyze_flow(ref_seq, pred_seq, cfg)
    semantic = token_match_f1(ref_instr, pred_instr, backend).f1
    boost = special_case(ref_seq, pred_seq, ref_instr, pred_instr, cfg)
    conflict = detect_conflict(ref_seq, pred_seq, pairs).conflict

    enhanced = _clamp01(
        cfg.alpha * similarity + cfg.beta * flow.flow_bonus + cfg.gamma * semantic + boost
    )
    if flow.critical_mismatch:
        enhanced = 0.0
    if conflict:
        enhanced = cfg.conflict_policy.apply(enhanced)

    bert = semantic
    final = _clamp01((1.0 - cfg.w) * bert + cfg.w * enhanced)
    return ScoreBreakdown(
        bert_f1=bert,
        similarity=similarity,
        flow=flow,
        semantic_similarity=semantic,
        special_boost=boost,
        conflict=conflict,
        enhanced_score=enhanced,
        final_score=final,
        config=cfg,
    )


def final_score(
    ref: Instruction | str,
    pred: Instruction | str,
    backend: EmbeddingBackend,
    cfg: MetricConfig | None = None,
    lexicon: DirectionLexicon | None = None,
    pairs: ConflictPairSet | None = None,
) -> ScoreBreakdown:
    """Alias of enhanced_score; the breakdown carries both scores."""
    return enhanced_score(ref, pred, backend, cfg, lexicon, pairs)


def score_texts(
    ref: str,
    pred: str,
    backend: EmbeddingBackend | None = None,
    cfg: MetricConfig | None = None,
) -> ScoreBreakdown:
    """One-call convenience: defaults to the offline lexical backend."""
    if backend is None:
        from .similarity import lexical_backend

        backend = lexical_backend()
    return enhanced_score(ref, pred, backend, cfg)


@dataclass(frozen=True)
class RuntimeSettings:
    """Where to find resources: lexicon and pair files, embedding backend."""

    lexicon_path: str | None = None
    conflict_pairs_path: str | None = None
    backend: str = "lexical"
    endpoint: str = "http://127.0.0.1:8900"
    timeout_ms: int = 5000

    def __post_init__(self):
        if self.backend not in ("lexical", "remote"):
            raise ConfigError(f"unknown backend {self.backend!r}: expected lexical or remote")
        if self.timeout_ms < 1:
            raise ConfigError(f"timeout_ms must be >= 1, got {self.timeout_ms}")


_METRIC_KEYS = frozenset(
    {
        "alpha",
        "beta",
        "gamma",
        "w",
        "order_threshold",
        "step_penalty_rate",
        "boost_factor",
        "special_case_boost",
        "conflict_policy",
    }
)
_RUNTIME_KEYS = frozenset(
    {"lexicon_path", "conflict_pairs_path", "backend", "endpoint", "timeout_ms"}
)


def load_config_file(path) -> dict[str, Any]:
    """Read a TOML config file of flat, known keys.

    Unknown keys are an error rather than silently ignored, so typos in a
    config file fail loudly.
    """
    try:
        with open(path, "rb") as handle:
            raw = tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: invalid TOML: {exc}") from exc
    unknown = set(raw) - _METRIC_KEYS - _RUNTIME_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown config keys: {', '.join(sorted(unknown))}")
    return raw


def build_config(
    file_values: Mapping[str, Any] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> tuple[MetricConfig, RuntimeSettings]:
    """Layer defaults, config-file values, and explicit overrides.

    Later layers win; `None` overrides mean "not set". The alpha/beta/gamma
    sum-to-1 check applies to the merged result, so overriding part of the
    trio without keeping the sum at 1 raises ConfigError.
    """
    merged: dict[str, Any] = {}
    for layer in (file_values or {}, overrides or {}):
        for key, value in layer.items():
            if value is None:
                continue
            if key not in _METRIC_KEYS and key not in _RUNTIME_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            merged[key] = value

    metric_kwargs = {k: v for k, v in merged.items() if k in _METRIC_KEYS}
    if "conflict_policy" in metric_kwargs and isinstance(metric_kwargs["conflict_policy"], str):
        metric_kwargs["conflict_policy"] = ConflictPolicy.parse(metric_kwargs["conflict_policy"])
    for name in ("alpha", "beta", "gamma", "w", "order_threshold", "step_penalty_rate",
                 "boost_factor", "special_case_boost"):
        if name in metric_kwargs:
            try:
                metric_kwargs[name] = float(metric_kwargs[name])
            except (TypeError, ValueError):
                raise ConfigError(f"{name} must be a number, got {metric_kwargs[name]!r}") from None

    runtime_kwargs = {k: v for k, v in merged.items() if k in _RUNTIME_KEYS}
    if "timeout_ms" in runtime_kwargs:
        try:
            runtime_kwargs["timeout_ms"] = int(runtime_kwargs["timeout_ms"])
        except (TypeError, ValueError):
            raise ConfigError(
                f"timeout_ms must be an integer, got {runtime_kwargs['timeout_ms']!r}"
            ) from None
    try:
        metric = MetricConfig(**metric_kwargs)
        runtime = RuntimeSettings(**runtime_kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return metric, runtime


def config_field_names() -> tuple[str, ...]:
    """All recognized flat config keys, metric first then runtime."""
    return tuple(f.name for f in fields(MetricConfig)) + tuple(
        f.name for f in fields(RuntimeSettings)
    )
