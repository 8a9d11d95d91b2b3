"""Core sequence types, elementary statistics, and the on-disk formats shared
by the analysis and generation modules.

All types are immutable after construction and safe to share across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np


class DataError(ValueError):
    """The input data cannot support the requested computation."""


class CurveTooShortError(DataError):
    """An interval sequence is too short for a reliable autocorrelation curve."""


def moments(xs: Sequence[float] | np.ndarray) -> tuple[float, float]:
    """Mean and population standard deviation (divide by count, no Bessel
    correction) of a series.

    Raises DataError("empty series") on empty input.
    """
    arr = np.asarray(xs, dtype=np.float64)
    if arr.size == 0:
        raise DataError("empty series")
    mean = float(arr.mean())
    sd = float(np.sqrt(np.mean((arr - mean) ** 2)))
    return mean, sd


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TokenSequence:
    """Ordered symbol ids (one per token position) with an optional id -> surface
    table. Ids are assigned in first-occurrence order at ingestion/generation
    time, which makes every downstream tie-break deterministic.
    """

    tokens: np.ndarray
    symbols: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        arr = np.array(self.tokens, dtype=np.int64)
        if arr.ndim != 1 or arr.size == 0:
            raise DataError("empty input")
        if arr.min() < 0:
            raise DataError("negative symbol id")
        if self.symbols is not None:
            table = tuple(self.symbols)
            if int(arr.max()) >= len(table):
                raise DataError("symbol table does not cover all ids")
            object.__setattr__(self, "symbols", table)
        object.__setattr__(self, "tokens", _freeze(arr))

    @property
    def m(self) -> int:
        """Total token count."""
        return int(self.tokens.size)

    def __len__(self) -> int:
        return self.m

    def surface(self, token_id: int) -> str:
        if self.symbols is not None:
            return self.symbols[token_id]
        return f"w{token_id}"

    def surfaces(self) -> Iterator[str]:
        if self.symbols is not None:
            table = self.symbols
            return (table[t] for t in self.tokens.tolist())
        return (f"w{t}" for t in self.tokens.tolist())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TokenSequence):
            return NotImplemented
        return self.symbols == other.symbols and np.array_equal(self.tokens, other.tokens)


def sequence_from_surface(surfaces: Iterable[str], lowercase: bool = False) -> TokenSequence:
    """Build a TokenSequence from surface tokens, assigning ids in
    first-occurrence order."""
    ids: dict[str, int] = {}
    out: list[int] = []
    append = out.append
    for tok in surfaces:
        if lowercase:
            tok = tok.lower()
        i = ids.get(tok)
        if i is None:
            i = len(ids)
            ids[tok] = i
        append(i)
    if not out:
        raise DataError("empty input")
    return TokenSequence(np.array(out, dtype=np.int64), symbols=tuple(ids))


@dataclass(frozen=True, eq=False)
class IntervalSequence:
    """Position gaps between successive occurrences of the rare-token set.

    `n` is the rarity divisor used to pick the set (None when the set was
    forced explicitly). The count of intervals is one less than the number
    of rare-token occurrences.
    """

    intervals: np.ndarray
    n: int | None = None
    mu: float = field(init=False)
    sigma: float = field(init=False)

    def __post_init__(self) -> None:
        arr = np.array(self.intervals, dtype=np.int64)
        if arr.ndim != 1 or arr.size == 0:
            raise DataError("empty interval sequence")
        if arr.min() < 1:
            raise DataError("intervals must be positive")
        mu, sigma = moments(arr)
        object.__setattr__(self, "intervals", _freeze(arr))
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def m_n(self) -> int:
        """Interval count (number of rare occurrences minus one)."""
        return int(self.intervals.size)

    def __len__(self) -> int:
        return self.m_n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalSequence):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.intervals, other.intervals)


@dataclass(frozen=True, eq=False)
class AcfCurve:
    """Autocorrelation samples (s, c) on a geometric offset grid.

    `source_length` is the length of the analyzed series; offsets never
    exceed source_length // 100, past which the estimates are unreliable.
    """

    offsets: np.ndarray
    values: np.ndarray
    source_length: int

    def __post_init__(self) -> None:
        s = np.array(self.offsets, dtype=np.int64)
        c = np.array(self.values, dtype=np.float64)
        if s.ndim != 1 or s.size == 0 or s.shape != c.shape:
            raise DataError("malformed autocorrelation curve")
        if s.min() < 1 or np.any(np.diff(s) <= 0):
            raise DataError("offsets must be strictly increasing positive integers")
        if int(s.max()) > self.source_length // 100:
            raise DataError("offsets exceed the reliable range")
        if not np.all(np.isfinite(c)):
            raise DataError("non-finite correlation value")
        object.__setattr__(self, "offsets", _freeze(s))
        object.__setattr__(self, "values", _freeze(c))

    @property
    def points(self) -> list[tuple[int, float]]:
        return list(zip(self.offsets.tolist(), self.values.tolist()))

    def __len__(self) -> int:
        return int(self.offsets.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AcfCurve):
            return NotImplemented
        return (
            self.source_length == other.source_length
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares power law in log10-log10 space.

    `exponent` is reported positive for decay laws (y ~ x**-exponent); for
    growth laws it is the signed log-log slope. `amplitude` is the fitted
    value at x = 1. The per-point error is sqrt(sum of squared log-space
    residuals) divided by the number of fitted points.
    """

    exponent: float
    amplitude: float
    fit_error_per_point: float
    n_points_used: int
    n_points_excluded: int

    def __post_init__(self) -> None:
        if self.n_points_used < 2:
            raise DataError("not enough positive points")
        if self.fit_error_per_point < 0:
            raise DataError("negative fit error")

    def to_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "amplitude": self.amplitude,
            "fit_error_per_point": self.fit_error_per_point,
            "n_points_used": self.n_points_used,
            "n_points_excluded": self.n_points_excluded,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PowerLawFit":
        return cls(
            exponent=float(d["exponent"]),
            amplitude=float(d["amplitude"]),
            fit_error_per_point=float(d["fit_error_per_point"]),
            n_points_used=int(d["n_points_used"]),
            n_points_excluded=int(d["n_points_excluded"]),
        )


@dataclass(frozen=True, eq=False)
class RankFrequency:
    """Type frequencies in descending order; rank u is 1-based (index + 1).
    Ties are broken by first occurrence in the source sequence."""

    frequencies: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.frequencies, dtype=np.int64)
        if arr.ndim != 1 or arr.size == 0:
            raise DataError("empty rank-frequency table")
        if arr.min() < 1:
            raise DataError("frequencies must be positive")
        if np.any(np.diff(arr) > 0):
            raise DataError("frequencies must be non-increasing")
        object.__setattr__(self, "frequencies", _freeze(arr))

    @property
    def entries(self) -> list[tuple[int, int]]:
        return list(enumerate(self.frequencies.tolist(), start=1))

    @property
    def total(self) -> int:
        return int(self.frequencies.sum())

    def __len__(self) -> int:
        return int(self.frequencies.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RankFrequency):
            return NotImplemented
        return np.array_equal(self.frequencies, other.frequencies)


@dataclass(frozen=True, eq=False)
class TypeTokenCurve:
    """Vocabulary size V(m) sampled at geometrically spaced prefix lengths m."""

    sizes: np.ndarray
    vocab: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.sizes, dtype=np.int64)
        v = np.array(self.vocab, dtype=np.int64)
        if m.ndim != 1 or m.size == 0 or m.shape != v.shape:
            raise DataError("malformed type-token curve")
        if m.min() < 1 or np.any(np.diff(m) <= 0):
            raise DataError("prefix lengths must be strictly increasing")
        if np.any(np.diff(v) < 0) or np.any(v > m) or v.min() < 1:
            raise DataError("vocabulary sizes must be non-decreasing and <= m")
        if int(m[0]) == 1 and int(v[0]) != 1:
            raise DataError("one token means one type")
        object.__setattr__(self, "sizes", _freeze(m))
        object.__setattr__(self, "vocab", _freeze(v))

    @property
    def samples(self) -> list[tuple[int, int]]:
        return list(zip(self.sizes.tolist(), self.vocab.tolist()))

    def __len__(self) -> int:
        return int(self.sizes.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TypeTokenCurve):
            return NotImplemented
        return np.array_equal(self.sizes, other.sizes) and np.array_equal(self.vocab, other.vocab)


# ---------------------------------------------------------------------------
# File formats: whitespace token files and CSV curve outputs.
# All CSVs carry a header row, '.' decimal point and '\n' newlines.
# ---------------------------------------------------------------------------


def write_token_file(seq: TokenSequence, path: str | Path) -> None:
    """Write one surface token per line (ids render as w<id> when there is
    no symbol table)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(seq.surfaces()))
        fh.write("\n")


def _write_csv(path: str | Path, header: str, rows: Iterable[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")


def _read_csv(path: str | Path, expected_header: str) -> list[list[str]]:
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln]
    if not lines or lines[0] != expected_header:
        raise DataError(f"expected CSV header '{expected_header}' in {path}")
    return [ln.split(",") for ln in lines[1:]]


def write_acf_csv(curve: AcfCurve, path: str | Path) -> None:
    _write_csv(
        path,
        "s,c",
        (f"{s},{c!r}" for s, c in zip(curve.offsets.tolist(), curve.values.tolist())),
    )


def read_acf_csv(path: str | Path, source_length: int) -> AcfCurve:
    """Read an `s,c` CSV back into a curve. The source series length is not
    part of the CSV and must be supplied (the analysis report carries it)."""
    rows = _read_csv(path, "s,c")
    s = [int(r[0]) for r in rows]
    c = [float(r[1]) for r in rows]
    return AcfCurve(np.array(s), np.array(c), source_length=source_length)


def write_rank_frequency_csv(rank: RankFrequency, path: str | Path) -> None:
    _write_csv(path, "rank,freq", (f"{u},{f}" for u, f in rank.entries))


def read_rank_frequency_csv(path: str | Path) -> RankFrequency:
    rows = _read_csv(path, "rank,freq")
    freqs = []
    for i, r in enumerate(rows, start=1):
        if int(r[0]) != i:
            raise DataError("ranks must be consecutive from 1")
        freqs.append(int(r[1]))
    return RankFrequency(np.array(freqs))


def write_type_token_csv(curve: TypeTokenCurve, path: str | Path) -> None:
    _write_csv(path, "m,v", (f"{m},{v}" for m, v in curve.samples))


def read_type_token_csv(path: str | Path) -> TypeTokenCurve:
    rows = _read_csv(path, "m,v")
    return TypeTokenCurve(
        np.array([int(r[0]) for r in rows]), np.array([int(r[1]) for r in rows])
    )


def write_intervals_csv(ints: IntervalSequence, path: str | Path) -> None:
    _write_csv(path, "interval", (str(x) for x in ints.intervals.tolist()))


def read_intervals_csv(path: str | Path, n: int | None = None) -> IntervalSequence:
    """Read an interval CSV; the rarity divisor is metadata, not stored in
    the CSV, so it must be supplied to round-trip exactly."""
    rows = _read_csv(path, "interval")
    return IntervalSequence(np.array([int(r[0]) for r in rows]), n=n)


def log_grid(limit: int, per_decade: int = 20) -> np.ndarray:
    """Geometrically spaced integers 1..limit: round(10**(k / per_decade))
    for k = 0, 1, 2, ..., deduplicated after rounding."""
    if limit < 1:
        return np.array([], dtype=np.int64)
    kmax = int(math.ceil(per_decade * math.log10(limit))) + 1
    raw = np.round(10.0 ** (np.arange(kmax + 1) / per_decade)).astype(np.int64)
    vals = np.unique(raw)
    return vals[vals <= limit]
