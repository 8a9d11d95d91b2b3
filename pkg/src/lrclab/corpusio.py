"""Ingestion of plain token files and a documented subset of the CHAT
transcript format used by child-speech corpora such as CHILDES.

Only the tier-line structure is parsed: speaker lines, tab-indented
continuations, header lines, and dependent annotation tiers. Inline
annotations are stripped, not interpreted. Surface forms are lowercased
before id assignment so capitalization never splits a type.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .seqcore import DataError, TokenSequence, sequence_from_surface

DEFAULT_DROP_CODES = frozenset({"xxx", "yyy", "www"})

_TIER_RE = re.compile(r"^\*([A-Z0-9]{2,3}):[ \t]?(.*)$")
_BRACKETED_RE = re.compile(r"\[[^\]]*\]")
_TERMINATORS = frozenset(".?!")


class ChatParseError(DataError):
    """A transcript line that cannot be classified, with its line number."""

    def __init__(self, line_number: int, message: str) -> None:
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class Utterance:
    speaker: str
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class ChatDocument:
    """Speaker-attributed utterances plus the raw header lines."""

    utterances: tuple[Utterance, ...]
    headers: tuple[str, ...]

    def speakers(self) -> set[str]:
        return {u.speaker for u in self.utterances}


def _clean_utterance(text: str) -> tuple[str, ...]:
    """Strip bracketed annotations, angle-bracket scope markers, fragment
    tokens starting with '&', and terminal punctuation tokens."""
    text = _BRACKETED_RE.sub(" ", text)
    text = text.replace("<", " ").replace(">", " ")
    out = []
    for tok in text.split():
        if tok.startswith("&"):
            continue
        if all(ch in _TERMINATORS for ch in tok):
            continue
        out.append(tok)
    return tuple(out)


def parse_chat(text: str) -> ChatDocument:
    """Parse CHAT-style transcript text.

    Lines starting '@' are headers (kept verbatim), '*SPK:' starts an
    utterance by SPK, '%' starts a dependent tier (ignored along with its
    continuations), and tab-indented lines continue the preceding tier.
    Any other non-blank line raises a located error.
    """
    headers: list[str] = []
    utterances: list[Utterance] = []
    pending_speaker: str | None = None
    pending_text: list[str] = []
    mode: str | None = None  # "utterance" | "dependent" | "header"

    def flush() -> None:
        nonlocal pending_speaker, pending_text
        if pending_speaker is not None:
            utterances.append(
                Utterance(pending_speaker, _clean_utterance(" ".join(pending_text)))
            )
        pending_speaker = None
        pending_text = []

    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            continue
        if line.startswith("@"):
            flush()
            headers.append(line)
            mode = "header"
        elif line.startswith("*"):
            if ":" not in line:
                raise ChatParseError(lineno, "malformed tier line (no ':' after speaker)")
            m = _TIER_RE.match(line)
            if m is None:
                raise ChatParseError(lineno, "malformed tier line")
            flush()
            pending_speaker = m.group(1)
            pending_text = [m.group(2)]
            mode = "utterance"
        elif line.startswith("%"):
            flush()
            mode = "dependent"
        elif line.startswith("\t"):
            if mode == "utterance":
                pending_text.append(line.strip())
            elif mode == "dependent":
                continue
            elif mode == "header" and headers:
                headers[-1] = headers[-1] + " " + line.strip()
            else:
                raise ChatParseError(lineno, "continuation without a tier")
        else:
            raise ChatParseError(lineno, "unclassified line")
    flush()
    return ChatDocument(tuple(utterances), tuple(headers))


def parse_chat_file(path: str | Path) -> ChatDocument:
    return parse_chat(Path(path).read_text(encoding="utf-8"))


def extract_speaker_with_stats(
    doc: ChatDocument,
    speakers: Iterable[str],
    drop_codes: Iterable[str] = DEFAULT_DROP_CODES,
) -> tuple[TokenSequence, int]:
    """Concatenate the tokens of the selected speakers in document order,
    dropping unknown-word codes. Returns the sequence and the number of
    dropped code tokens."""
    wanted = {s.upper() for s in speakers}
    if not wanted:
        raise DataError("no speakers requested")
    drop = {c.lower() for c in drop_codes}
    kept: list[str] = []
    dropped = 0
    for utt in doc.utterances:
        if utt.speaker not in wanted:
            continue
        for tok in utt.tokens:
            low = tok.lower()
            if low in drop:
                dropped += 1
            else:
                kept.append(low)
    if not kept:
        raise DataError("no tokens for speakers")
    return sequence_from_surface(kept), dropped


def extract_speaker(
    doc: ChatDocument,
    speakers: Iterable[str],
    drop_codes: Iterable[str] = DEFAULT_DROP_CODES,
) -> TokenSequence:
    return extract_speaker_with_stats(doc, speakers, drop_codes)[0]


def read_tokens(text: str) -> TokenSequence:
    """Whitespace tokenization, lowercased, ids in first-occurrence order."""
    tokens = text.split()
    if not tokens:
        raise DataError("empty input")
    return sequence_from_surface(tokens, lowercase=True)


def read_token_file(path: str | Path) -> TokenSequence:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    try:
        return read_tokens(text)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from exc
