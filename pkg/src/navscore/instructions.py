"""Instruction normalization and directional action extraction.

Turns raw navigation utterances into lowercase token lists and scans them
against a phrase lexicon to produce ordered sequences of canonical
directional actions ("turn left then walk forward" -> LEFT, FORWARD).
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Iterator, Mapping

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


class Direction(enum.Enum):
    """Canonical movement directions. Closed set: the lexicon may only map
    phrases onto these labels."""

    LEFT = "LEFT"
    RIGHT = "RIGHT"
    FORWARD = "FORWARD"
    BACKWARD = "BACKWARD"
    UP = "UP"
    DOWN = "DOWN"
    STOP = "STOP"
    TURN_AROUND = "TURN_AROUND"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Instruction:
    """A navigation utterance: the raw text plus its normalized tokens."""

    raw: str
    tokens: tuple[str, ...]


def normalize(raw: str) -> Instruction:
    """Normalize raw text into an Instruction.

    Lowercases (Unicode-aware), treats every non-alphanumeric character as a
    token boundary, and splits. Total: any string, including the empty one,
    yields a well-formed Instruction. No stemming.
    """
    return Instruction(raw=raw, tokens=tuple(_TOKEN_RE.findall(raw.lower())))


@dataclass(frozen=True)
class DirectionalAction:
    """One extracted directional step.

    token_index is the position of the trigger token (the last token of the
    matched phrase) in the source token list; surface is the matched phrase.
    """

    direction: Direction
    token_index: int
    surface: str


@dataclass(frozen=True)
class ActionSequence:
    """Ordered directional actions extracted from one instruction.

    May be empty: plenty of valid answers ("Yes, there is a table.") carry
    no directional content.
    """

    actions: tuple[DirectionalAction, ...]
    source: Instruction

    def __len__(self) -> int:
        return len(self.actions)

    def __iter__(self) -> Iterator[DirectionalAction]:
        return iter(self.actions)

    @property
    def directions(self) -> tuple[Direction, ...]:
        return tuple(action.direction for action in self.actions)


class DirectionLexicon:
    """Phrase-to-direction map with longest-match-wins lookup.

    Phrases are normalized with the same rules as instructions, so lookups
    operate purely on token tuples. All phrases mapping to one direction form
    that direction's equivalence class ("go straight" ~ "walk forward").
    """

    def __init__(self, entries: Mapping[str, Direction] | Iterable[tuple[str, Direction]]):
        pairs = entries.items() if isinstance(entries, Mapping) else entries
        self._phrases: dict[tuple[str, ...], Direction] = {}
        for phrase, direction in pairs:
            words = tuple(_TOKEN_RE.findall(phrase.lower()))
            if not words:
                raise ValueError(f"empty lexicon phrase: {phrase!r}")
            previous = self._phrases.get(words)
            if previous is not None and previous is not direction:
                raise ValueError(
                    f"lexicon phrase {' '.join(words)!r} maps to both "
                    f"{previous} and {direction}"
                )
            self._phrases[words] = direction
        self._max_words = max((len(words) for words in self._phrases), default=0)

    def __len__(self) -> int:
        return len(self._phrases)

    @property
    def phrases(self) -> tuple[str, ...]:
        return tuple(sorted(" ".join(words) for words in self._phrases))

    def direction_of(self, phrase: str) -> Direction | None:
        return self._phrases.get(tuple(_TOKEN_RE.findall(phrase.lower())))

    def phrases_for(self, direction: Direction) -> tuple[str, ...]:
        """The equivalence class of phrases mapped to `direction`."""
        return tuple(
            sorted(" ".join(words) for words, d in self._phrases.items() if d is direction)
        )

    def match_at(self, tokens: tuple[str, ...], start: int) -> tuple[int, Direction] | None:
        """Longest phrase match beginning at `start`, as (word count, direction)."""
        limit = min(self._max_words, len(tokens) - start)
        for length in range(limit, 0, -1):
            direction = self._phrases.get(tokens[start : start + length])
            if direction is not None:
                return length, direction
        return None

    @classmethod
    def from_lines(cls, lines: Iterable[str], origin: str = "<lexicon>") -> "DirectionLexicon":
        entries = []
        for lineno, line in enumerate(lines, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{origin}:{lineno}: expected 'phrase<TAB>DIRECTION'")
            phrase, name = parts[0].strip(), parts[1].strip()
            try:
                direction = Direction[name]
            except KeyError:
                raise ValueError(f"{origin}:{lineno}: unknown direction {name!r}") from None
            entries.append((phrase, direction))
        return cls(entries)

    @classmethod
    def from_file(cls, path) -> "DirectionLexicon":
        with open(path, encoding="utf-8") as handle:
            return cls.from_lines(handle, origin=str(path))

    @classmethod
    def default(cls) -> "DirectionLexicon":
        """The lexicon shipped with the package (data/lexicon.tsv)."""
        return _default_lexicon()


@lru_cache(maxsize=1)
def _default_lexicon() -> DirectionLexicon:
    text = resources.files(__package__).joinpath("data/lexicon.tsv").read_text("utf-8")
    return DirectionLexicon.from_lines(text.splitlines(), origin="data/lexicon.tsv")


def extract_actions(instr: Instruction, lex: DirectionLexicon) -> ActionSequence:
    """Scan tokens left to right, emitting one action per matched phrase.

    Longest match wins and consumes its tokens, so "turn around" produces a
    single TURN_AROUND rather than a spurious extra match. Unmatched tokens
    are skipped; nothing errors.
    """
    actions = []
    tokens = instr.tokens
    position = 0
    while position < len(tokens):
        match = lex.match_at(tokens, position)
        if match is None:
            position += 1
            continue
        length, direction = match
        actions.append(
            DirectionalAction(
                direction=direction,
                token_index=position + length - 1,
                surface=" ".join(tokens[position : position + length]),
            )
        )
        position += length
    return ActionSequence(actions=tuple(actions), source=instr)
