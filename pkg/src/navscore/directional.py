"""Directional conflict detection and action-flow analysis.

Conflict: do the reference and prediction contain opposing directions
(left vs right, forward vs backward, up vs down)? Flow: do they agree on
step count and ordering, with a hard zero for reversed or substantially
mismatched sequences?
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import TYPE_CHECKING, Iterable, Iterator

from .instructions import ActionSequence, Direction, DirectionalAction

if TYPE_CHECKING:  # pragma: no cover
    from .scoring import MetricConfig


class ConflictPairSet:
    """Unordered set of opposing direction pairs.

    Symmetric by construction (pairs are stored unordered) and irreflexive
    (a direction never opposes itself).
    """

    def __init__(self, pairs: Iterable[tuple[Direction, Direction]]):
        closed = set()
        for a, b in pairs:
            if a is b:
                raise ValueError(f"reflexive conflict pair: {a}")
            closed.add(frozenset((a, b)))
        self._pairs = frozenset(closed)

    def opposes(self, a: Direction, b: Direction) -> bool:
        return a is not b and frozenset((a, b)) in self._pairs

    def __contains__(self, pair: tuple[Direction, Direction]) -> bool:
        a, b = pair
        return self.opposes(a, b)

    def __len__(self) -> int:
        return len(self._pairs)

    def __iter__(self) -> Iterator[tuple[Direction, Direction]]:
        for pair in sorted(self._pairs, key=lambda p: sorted(d.value for d in p)):
            a, b = sorted(pair, key=lambda d: d.value)
            yield a, b

    @classmethod
    def from_lines(cls, lines: Iterable[str], origin: str = "<pairs>") -> "ConflictPairSet":
        pairs = []
        for lineno, line in enumerate(lines, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{origin}:{lineno}: expected 'DIRECTION<TAB>DIRECTION'")
            try:
                a, b = Direction[parts[0].strip()], Direction[parts[1].strip()]
            except KeyError as exc:
                raise ValueError(f"{origin}:{lineno}: unknown direction {exc}") from None
            pairs.append((a, b))
        return cls(pairs)

    @classmethod
    def from_file(cls, path) -> "ConflictPairSet":
        with open(path, encoding="utf-8") as handle:
            return cls.from_lines(handle, origin=str(path))

    @classmethod
    def default(cls) -> "ConflictPairSet":
        """LEFT-RIGHT, FORWARD-BACKWARD, UP-DOWN (data/conflict_pairs.tsv)."""
        return _default_pairs()


@lru_cache(maxsize=1)
def _default_pairs() -> ConflictPairSet:
    text = resources.files(__package__).joinpath("data/conflict_pairs.tsv").read_text("utf-8")
    return ConflictPairSet.from_lines(text.splitlines(), origin="data/conflict_pairs.tsv")


@dataclass(frozen=True)
class ConflictReport:
    """Outcome of conflict detection: the 0/1 verdict plus the opposing
    (reference action, prediction action) pairs that triggered it."""

    conflict: bool
    witnesses: tuple[tuple[DirectionalAction, DirectionalAction], ...]


def detect_conflict(
    ref_seq: ActionSequence, pred_seq: ActionSequence, pairs: ConflictPairSet
) -> ConflictReport:
    """Report whether the two sequences contain opposing directions.

    Aligned positions are compared first, so "left then right" against
    "right then left" conflicts even though both sides mention both
    directions. Only if no aligned pair opposes do we fall back to comparing
    directions that have no same-direction counterpart anywhere on the other
    side.
    """
    witnesses = []
    for ref_action, pred_action in zip(ref_seq, pred_seq):
        if pairs.opposes(ref_action.direction, pred_action.direction):
            witnesses.append((ref_action, pred_action))
    if not witnesses:
        ref_dirs = set(ref_seq.directions)
        pred_dirs = set(pred_seq.directions)
        lone_ref = [a for a in ref_seq if a.direction not in pred_dirs]
        lone_pred = [a for a in pred_seq if a.direction not in ref_dirs]
        for ref_action in lone_ref:
            for pred_action in lone_pred:
                if pairs.opposes(ref_action.direction, pred_action.direction):
                    witnesses.append((ref_action, pred_action))
    return ConflictReport(conflict=bool(witnesses), witnesses=tuple(witnesses))


def _lcs_length(a: tuple[Direction, ...], b: tuple[Direction, ...]) -> int:
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for x in a:
        current = [0]
        for j, y in enumerate(b):
            current.append(previous[j] + 1 if x is y else max(current[j], previous[j + 1]))
        previous = current
    return previous[-1]


def order_similarity(ref_seq: ActionSequence, pred_seq: ActionSequence) -> float:
    """Longest common direction subsequence over the longer length.

    1.0 when both sequences are empty; 0.0 when exactly one is.
    """
    n_ref, n_pred = len(ref_seq), len(pred_seq)
    if n_ref == 0 and n_pred == 0:
        return 1.0
    if n_ref == 0 or n_pred == 0:
        return 0.0
    return _lcs_length(ref_seq.directions, pred_seq.directions) / max(n_ref, n_pred)


@dataclass(frozen=True)
class FlowAnalysis:
    ref_steps: int
    pred_steps: int
    step_delta: int
    order_similarity: float
    critical_mismatch: bool
    flow_bonus: float


def step_penalty_factor(step_delta: int, ref_steps: int, rate: float) -> float:
    """Linear penalty on the relative step-count difference, clamped at 0."""
    return max(0.0, 1.0 - rate * step_delta / max(ref_steps, 1))


def analyze_flow(
    ref_seq: ActionSequence, pred_seq: ActionSequence, cfg: "MetricConfig"
) -> FlowAnalysis:
    """Step-count and ordering agreement between two action sequences.

    A reversed or substantially mismatched order (order_similarity below
    cfg.order_threshold, both sequences nonempty) is critical and forces the
    bonus to zero. Otherwise the bonus is the order similarity scaled down
    linearly with the relative step-count difference. Two empty sequences are
    vacuously in agreement (bonus 1).
    """
    n_ref, n_pred = len(ref_seq), len(pred_seq)
    delta = abs(n_ref - n_pred)
    order = order_similarity(ref_seq, pred_seq)
    critical = n_ref > 0 and n_pred > 0 and order < cfg.order_threshold
    if critical:
        bonus = 0.0
    else:
        bonus = order * step_penalty_factor(delta, n_ref, cfg.step_penalty_rate)
    return FlowAnalysis(
        ref_steps=n_ref,
        pred_steps=n_pred,
        step_delta=delta,
        order_similarity=order,
        critical_mismatch=critical,
        flow_bonus=bonus,
    )
