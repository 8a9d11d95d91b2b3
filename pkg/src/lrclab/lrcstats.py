"""Long-range correlation analysis for symbol sequences.

The pipeline turns a token sequence into the sequence of gaps between
successive occurrences of its rarest types (the rarest 1/N of all tokens,
N = 16 by default), evaluates the autocorrelation of that interval sequence
on a geometric offset grid, and fits power laws to the autocorrelation
curve, the rank-frequency table, and the type-token growth curve.

A sequence is judged long-range correlated when every autocorrelation value
at offsets below 10 is positive; a single negative early value rejects it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .seqcore import (
    AcfCurve,
    CurveTooShortError,
    DataError,
    IntervalSequence,
    PowerLawFit,
    RankFrequency,
    TokenSequence,
    TypeTokenCurve,
    log_grid,
)

DEFAULT_RARITY = 16
SMALL_OFFSET_LIMIT = 10
MIN_CURVE_LENGTH = 200


def _acf_value(devs: np.ndarray, variance: float, s: int) -> float:
    m = devs.size
    if s == 0:
        cov = float(np.mean(devs * devs))
    else:
        cov = float(np.dot(devs[:-s], devs[s:])) / (m - s)
    return cov / variance


def autocorrelation(series: Sequence[float] | np.ndarray, s: int) -> float:
    """Normalized autocovariance at offset s:

        C(s) = (1 / ((M - s) * sigma**2)) * sum_{i=1..M-s} (r_i - mu)(r_{i+s} - mu)

    with mu and sigma the mean and population standard deviation of the whole
    series. C(0) is 1.0 by definition.
    """
    arr = np.asarray(series, dtype=np.float64)
    if s < 0 or s >= arr.size:
        raise DataError("offset out of range")
    mu = float(arr.mean())
    devs = arr - mu
    variance = float(np.mean(devs * devs))
    if variance <= 0.0:
        raise DataError("degenerate series")
    return _acf_value(devs, variance, s)


def select_rare_set(seq: TokenSequence, n: int = DEFAULT_RARITY) -> set[int]:
    """Ids of the rarest types jointly covering about one Nth of all tokens.

    Types are taken in (ascending frequency, ascending first occurrence)
    order until their total token count reaches floor(M / n): the largest
    prefix not exceeding the target is kept, plus one more type if the
    count is still short of it.
    """
    if n < 2:
        raise DataError("rarity divisor must be at least 2")
    if seq.m < n:
        raise DataError("sequence too short")
    uniq, first_pos = np.unique(seq.tokens, return_index=True)
    freqs = np.bincount(seq.tokens)[uniq]
    order = np.lexsort((first_pos, freqs))
    cum = np.cumsum(freqs[order])
    target = seq.m // n
    k = int(np.searchsorted(cum, target, side="right"))
    if (k == 0 or cum[k - 1] < target) and k < uniq.size:
        k += 1
    return set(uniq[order[:k]].tolist())


def extract_intervals(
    seq: TokenSequence, rare: Iterable[int], n: int | None = None
) -> IntervalSequence:
    """Gaps between successive occurrences of any rare-set token, merged over
    the whole set. The interval count is the occurrence count minus one."""
    rare_ids = np.fromiter((int(r) for r in rare), dtype=np.int64)
    if rare_ids.size == 0:
        raise DataError("insufficient occurrences")
    mask = np.zeros(int(seq.tokens.max()) + 1, dtype=bool)
    mask[rare_ids[rare_ids <= seq.tokens.max()]] = True
    positions = np.flatnonzero(mask[seq.tokens])
    if positions.size < 2:
        raise DataError("insufficient occurrences")
    return IntervalSequence(np.diff(positions), n=n)


def acf_curve(ints: IntervalSequence) -> AcfCurve:
    """Autocorrelation of the interval sequence at geometric offsets
    s = round(10**(k/20)), k = 0, 1, ..., up to floor(M_N / 100). All
    evaluated points are returned, including negative ones."""
    m_n = ints.m_n
    if m_n < MIN_CURVE_LENGTH:
        raise CurveTooShortError("interval sequence too short for curve")
    devs = ints.intervals.astype(np.float64) - ints.mu
    variance = float(np.mean(devs * devs))
    if variance <= 0.0:
        raise DataError("degenerate series")
    grid = log_grid(m_n // 100)
    values = np.array([_acf_value(devs, variance, int(s)) for s in grid])
    return AcfCurve(grid, values, source_length=m_n)


def fit_power_law(
    points: Iterable[tuple[float, float]], decay: bool = True
) -> PowerLawFit:
    """Ordinary least squares on (log10 x, log10 y) over the points with
    positive coordinates.

    With decay=True (the default) the slope is negated so that decay
    exponents come out positive; decay=False reports the signed slope, as
    appropriate for growth laws. The amplitude is the fitted y at x = 1.
    """
    pts = [(float(x), float(y)) for x, y in points]
    usable = [(x, y) for x, y in pts if x > 0.0 and y > 0.0]
    excluded = len(pts) - len(usable)
    if len(usable) < 2:
        raise DataError("not enough positive points")
    lx = np.log10([x for x, _ in usable])
    ly = np.log10([y for _, y in usable])
    slope, intercept = np.polyfit(lx, ly, 1)
    residuals = ly - (slope * lx + intercept)
    error = float(np.sqrt(np.sum(residuals**2))) / len(usable)
    return PowerLawFit(
        exponent=float(-slope if decay else slope),
        amplitude=float(10.0**intercept),
        fit_error_per_point=error,
        n_points_used=len(usable),
        n_points_excluded=excluded,
    )


def rank_frequency(seq: TokenSequence) -> RankFrequency:
    """Exhaustive type frequencies in descending order, ties broken by first
    occurrence in the sequence."""
    uniq, first_pos = np.unique(seq.tokens, return_index=True)
    freqs = np.bincount(seq.tokens)[uniq]
    order = np.lexsort((first_pos, -freqs))
    return RankFrequency(freqs[order])


def fit_heaps(curve: TypeTokenCurve) -> PowerLawFit:
    """Vocabulary-growth exponent: signed log-log slope of V(m), fitted over
    samples with m >= 10. Below that, integer prefix lengths cannot fill the
    geometric grid (every integer is present, over-weighting the first
    decade) and the counts are dominated by seed noise. Curves without two
    such samples fall back to the full range."""
    points = [(float(m), float(v)) for m, v in curve.samples if m >= 10]
    if len(points) < 2:
        points = [(float(m), float(v)) for m, v in curve.samples]
    return fit_power_law(points, decay=False)


def fit_zipf(rank: RankFrequency) -> PowerLawFit:
    """Rank-frequency decay exponent, fitted at geometrically subsampled
    ranks (always including the last) so every decade weighs equally."""
    freqs = rank.frequencies
    grid = log_grid(freqs.size)
    if grid.size == 0 or int(grid[-1]) != freqs.size:
        grid = np.append(grid, freqs.size)
    points = [(float(u), float(freqs[u - 1])) for u in grid]
    return fit_power_law(points, decay=True)


def type_token_curve(seq: TokenSequence) -> TypeTokenCurve:
    """Vocabulary size V(m) over prefixes of length m, sampled at geometric
    m (20 points per decade) and always including m = M."""
    tokens = seq.tokens
    _, first_pos = np.unique(tokens, return_index=True)
    is_new = np.zeros(tokens.size, dtype=np.int64)
    is_new[first_pos] = 1
    cum_vocab = np.cumsum(is_new)
    grid = log_grid(seq.m)
    if grid.size == 0 or int(grid[-1]) != seq.m:
        grid = np.append(grid, seq.m)
    return TypeTokenCurve(grid, cum_vocab[grid - 1])


@dataclass(frozen=True)
class LrcVerdict:
    """Outcome of the long-range correlation check, with the offending
    small-offset points when it fails."""

    holds: bool
    reason: str
    offending: tuple[tuple[int, float], ...] = ()

    def __bool__(self) -> bool:
        return self.holds


def judge_lrc(curve: AcfCurve) -> LrcVerdict:
    """Long-range correlation holds iff every curve point with s < 10 is
    positive."""
    small = [(int(s), float(c)) for s, c in curve.points if s < SMALL_OFFSET_LIMIT]
    if not small:
        raise DataError("curve lacks small offsets")
    offending = tuple((s, c) for s, c in small if c <= 0.0)
    if offending:
        listed = ", ".join(f"s={s} (c={c:.6g})" for s, c in offending)
        return LrcVerdict(False, f"non-positive autocorrelation at {listed}", offending)
    return LrcVerdict(True, f"all {len(small)} points below offset {SMALL_OFFSET_LIMIT} are positive")


@dataclass(frozen=True)
class AnalysisReport:
    """Bundle of the curves, fits, and the long-range correlation verdict
    for one sequence."""

    n: int
    m: int
    rank: RankFrequency
    typetoken: TypeTokenCurve
    intervals: IntervalSequence | None
    acf: AcfCurve | None
    gamma_fit: PowerLawFit | None
    zipf_fit: PowerLawFit
    heaps_fit: PowerLawFit
    verdict: LrcVerdict | None
    acf_skipped: str | None = None

    @property
    def m_n(self) -> int | None:
        return self.intervals.m_n if self.intervals is not None else None

    @property
    def gamma(self) -> float | None:
        return self.gamma_fit.exponent if self.gamma_fit is not None else None

    @property
    def gamma_fit_error(self) -> float | None:
        return self.gamma_fit.fit_error_per_point if self.gamma_fit is not None else None

    @property
    def zipf_exponent(self) -> float:
        return self.zipf_fit.exponent

    @property
    def heaps_exponent(self) -> float:
        return self.heaps_fit.exponent

    @property
    def lrc_verdict(self) -> bool | None:
        return self.verdict.holds if self.verdict is not None else None

    @property
    def negative_small_s_points(self) -> list[tuple[int, float]]:
        if self.acf is None:
            return []
        return [
            (int(s), float(c))
            for s, c in self.acf.points
            if s < SMALL_OFFSET_LIMIT and c <= 0.0
        ]

    def to_dict(self) -> dict:
        d = {
            "n": self.n,
            "m": self.m,
            "m_n": self.m_n,
            "gamma": self.gamma,
            "gamma_fit_error": self.gamma_fit_error,
            "zipf_exponent": self.zipf_exponent,
            "heaps_exponent": self.heaps_exponent,
            "lrc_verdict": self.lrc_verdict,
            "negative_small_s_points": [[s, c] for s, c in self.negative_small_s_points],
        }
        if self.acf_skipped is not None:
            d["acf_skipped"] = self.acf_skipped
        return d


def analyze(
    seq: TokenSequence, n: int = DEFAULT_RARITY, rare: Iterable[int] | None = None
) -> AnalysisReport:
    """Run the full pipeline on one sequence.

    The rare set is chosen by `select_rare_set` unless `rare` forces explicit
    ids. Sequences that cannot support the interval pipeline (shorter than
    the rarity divisor, fewer than two rare occurrences, or an interval
    sequence too short for a reliable curve) still yield the two corpus
    power laws; the skipped stage is recorded in the report. A degenerate
    (zero-variance) interval sequence is an error, not a skip. A forced
    rare set must occur at least twice, also as an error.

    Fit conventions: the rank-frequency fit uses ranks subsampled on the same
    geometric grid as the other curves, which weights every decade equally;
    the type-token fit drops samples with m < 10, where integer prefix
    lengths cannot fill the geometric grid (every integer is present, over-
    weighting the first decade) and the counts are dominated by seed noise.
    """
    ints: IntervalSequence | None = None
    skipped: str | None = None
    if rare is not None:
        rare_ids: set[int] | None = set(int(r) for r in rare)
        ints = extract_intervals(seq, rare_ids, n=None)
    elif seq.m >= n:
        rare_ids = select_rare_set(seq, n)
        occurrences = int(np.isin(seq.tokens, list(rare_ids)).sum())
        if occurrences >= 2:
            ints = extract_intervals(seq, rare_ids, n=n)
        else:
            skipped = "insufficient occurrences"
    else:
        skipped = "sequence too short"

    curve: AcfCurve | None = None
    gamma_fit: PowerLawFit | None = None
    verdict: LrcVerdict | None = None
    if ints is not None:
        try:
            curve = acf_curve(ints)
        except CurveTooShortError as exc:
            skipped = str(exc)
    if curve is not None:
        verdict = judge_lrc(curve)
        try:
            gamma_fit = fit_power_law(curve.points, decay=True)
        except DataError as exc:
            skipped = f"gamma fit unavailable: {exc}"

    rank = rank_frequency(seq)
    zipf_fit = fit_zipf(rank)
    ttc = type_token_curve(seq)
    heaps_fit = fit_heaps(ttc)

    return AnalysisReport(
        n=n,
        m=seq.m,
        rank=rank,
        typetoken=ttc,
        intervals=ints,
        acf=curve,
        gamma_fit=gamma_fit,
        zipf_fit=zipf_fit,
        heaps_fit=heaps_fit,
        verdict=verdict,
        acf_skipped=skipped,
    )
