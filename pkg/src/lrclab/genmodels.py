"""Seeded generative processes over an unbounded symbol vocabulary.

Three incremental models share one state shape (step count, vocabulary
size, per-type counts): the constant-innovation / uniform-reuse model
("rich get richer"), the two-parameter (a, b) model with discounted
frequency reuse, and a conjunct of the two that pairs the (a, b)
innovation rate with uniform reuse. Three reference generators round out
the set: an i.i.d. sampler with an exact power-law rank distribution, a
first-order Markov resampler of a corpus, and a word-level shuffler.

All randomness comes from numpy's PCG64 generator seeded explicitly, so a
(parameters, seed) pair reproduces the same sequence on any platform.
Every sequence starts from the same state: one type with one occurrence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .seqcore import DataError, TokenSequence

_CHECK_MASK = 0xFFFF  # state invariant re-checked every 65536 steps


class PrefixSumSampler:
    """Fenwick (binary indexed) tree over non-negative weights supporting
    O(log n) point updates and O(log n) inverse-CDF lookups.

    Capacity doubles on demand so the tree depth tracks the live size, not
    a preallocated bound.
    """

    __slots__ = ("_tree", "_weights", "_cap", "_size")

    def __init__(self, capacity: int = 1024) -> None:
        cap = 1
        while cap < max(1, capacity):
            cap <<= 1
        self._cap = cap
        self._tree = [0.0] * (cap + 1)
        self._weights: list[float] = []
        self._size = 0

    def __len__(self) -> int:
        return self._size

    @property
    def total(self) -> float:
        return self.prefix_sum(self._size)

    def weight(self, index: int) -> float:
        return self._weights[index]

    def append(self, weight: float) -> None:
        if weight < 0:
            raise DataError("negative weight")
        if self._size == self._cap:
            self._rebuild(self._cap * 2)
        self._size += 1
        self._weights.append(0.0)
        self.add(self._size - 1, weight)

    def add(self, index: int, delta: float) -> None:
        """Add delta to the weight at a 0-based index."""
        if not 0 <= index < self._size:
            raise IndexError(index)
        self._weights[index] += delta
        tree = self._tree
        i = index + 1
        cap = self._cap
        while i <= cap:
            tree[i] += delta
            i += i & (-i)

    def prefix_sum(self, count: int) -> float:
        """Sum of the first `count` weights."""
        tree = self._tree
        s = 0.0
        i = count
        while i > 0:
            s += tree[i]
            i -= i & (-i)
        return s

    def find(self, x: float) -> int:
        """0-based index i with prefix_sum(i) <= x < prefix_sum(i + 1).

        For x in [0, total) this is the inverse CDF of the weight
        distribution; out-of-range x clamps to the last live index.
        """
        tree = self._tree
        cap = self._cap
        pos = 0
        bit = cap
        while bit:
            nxt = pos + bit
            if nxt <= cap and tree[nxt] <= x:
                x -= tree[nxt]
                pos = nxt
            bit >>= 1
        if pos >= self._size:
            pos = self._size - 1
        return pos

    def _rebuild(self, capacity: int) -> None:
        tree = [0.0] * (capacity + 1)
        for i, w in enumerate(self._weights, start=1):
            tree[i] += w
            j = i + (i & (-i))
            if j <= capacity:
                tree[j] += tree[i]
        self._cap = capacity
        self._tree = tree


@dataclass
class GeneratorState:
    """Evolving model state: t tokens emitted so far, counts[i] occurrences
    of type i, and (for discounted-reuse sampling) a prefix-sum index over
    the per-type weights counts[i] - discount.

    The shared starting point is one type with one occurrence (t = 1).
    """

    t: int
    counts: list[int]
    weight_index: PrefixSumSampler | None = None

    @property
    def k(self) -> int:
        """Vocabulary size."""
        return len(self.counts)

    @classmethod
    def initial(cls, discount: float | None = None) -> "GeneratorState":
        return cls.from_counts([1], discount=discount)

    @classmethod
    def from_counts(
        cls, counts: Sequence[int], discount: float | None = None
    ) -> "GeneratorState":
        counts = [int(c) for c in counts]
        if not counts or any(c < 1 for c in counts):
            raise DataError("counts must be positive")
        index = None
        if discount is not None:
            index = PrefixSumSampler()
            for c in counts:
                index.append(c - discount)
        return cls(t=sum(counts), counts=counts, weight_index=index)

    def apply(self, token_id: int, discount: float | None = None) -> None:
        """Record an emission: either an existing type or the next fresh id."""
        if token_id == self.k:
            self.counts.append(1)
            if self.weight_index is not None:
                self.weight_index.append(1.0 - (discount or 0.0))
        elif 0 <= token_id < self.k:
            self.counts[token_id] += 1
            if self.weight_index is not None:
                self.weight_index.add(token_id, 1.0)
        else:
            raise DataError("token id out of range")
        self.t += 1

    def check(self) -> None:
        assert sum(self.counts) == self.t, "per-type counts must sum to t"


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the three incremental models.

    `length` counts all emitted elements, including the seed element that
    every model starts from. `seed` feeds the PCG64 generator. The (a, b)
    models accept the degenerate a = b = 0 pair (innovation probability 0,
    so the sequence is constant); it is flagged in run metadata rather than
    rejected.
    """

    model: str
    length: int
    seed: int
    alpha: float | None = None
    a: float | None = None
    b: float | None = None

    def __post_init__(self) -> None:
        if self.model not in ("simon", "pitman_yor", "conjunct"):
            raise DataError(f"unknown model '{self.model}'")
        if self.length < 1:
            raise DataError("parameter out of range: length must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise DataError("parameter out of range: seed must fit in 64 bits")
        if self.model == "simon":
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise DataError("parameter out of range: alpha must be in (0, 1)")
            if self.a is not None or self.b is not None:
                raise DataError("simon takes alpha, not (a, b)")
        else:
            if self.a is None or not 0.0 <= self.a < 1.0:
                raise DataError("parameter out of range: a must be in [0, 1)")
            if self.b is None or self.b < 0.0:
                raise DataError("parameter out of range: b must be >= 0")
            if self.alpha is not None:
                raise DataError(f"{self.model} takes (a, b), not alpha")

    @property
    def degenerate(self) -> bool:
        return self.model != "simon" and self.a == 0.0 and self.b == 0.0

    def to_dict(self) -> dict:
        if self.model == "simon":
            return {"alpha": self.alpha}
        return {"a": self.a, "b": self.b}


# ---------------------------------------------------------------------------
# Single-step kernels. These spell out one draw from each model's
# next-token distribution given an explicit state; the bulk generators
# below run the same arithmetic over pre-drawn random arrays.
# ---------------------------------------------------------------------------


def simon_next(past: Sequence[int], alpha: float, rng: np.random.Generator, k: int | None = None) -> int:
    """One draw: a fresh id with probability alpha, otherwise the id at a
    uniformly random past position (equivalent to a frequency-proportional
    type draw). Ids in `past` must be dense 0..k-1."""
    if k is None:
        k = int(max(past)) + 1
    if rng.random() < alpha:
        return k
    return int(past[int(rng.integers(0, len(past)))])


def pitman_yor_next(state: GeneratorState, a: float, b: float, rng: np.random.Generator) -> int:
    """One draw: a fresh id with probability (a*K + b) / (t + b), otherwise
    type i with probability (counts[i] - a) / (t + b), via the prefix-sum
    weight index."""
    t, k = state.t, state.k
    eta = (a * k + b) / (t + b)
    if rng.random() < eta:
        return k
    index = state.weight_index
    if index is None:
        raise DataError("state lacks a weight index")
    return index.find(rng.random() * (t - a * k))


def conjunct_next(past: Sequence[int], a: float, b: float, rng: np.random.Generator, k: int | None = None) -> int:
    """One draw: a fresh id with probability eta = (a*K + b) / (t + b),
    otherwise uniform reuse from the past sequence."""
    if k is None:
        k = int(max(past)) + 1
    t = len(past)
    eta = (a * k + b) / (t + b)
    if rng.random() < eta:
        return k
    return int(past[int(rng.integers(0, t))])


# ---------------------------------------------------------------------------
# Bulk generators.
# ---------------------------------------------------------------------------


def _require(params: ModelParams, model: str) -> None:
    if params.model != model:
        raise DataError(f"expected {model} params, got {params.model}")


def generate_simon(params: ModelParams) -> TokenSequence:
    """Constant-innovation model: at every step emit a new type with
    probability alpha, else repeat the token at a uniformly random past
    position."""
    _require(params, "simon")
    alpha = params.alpha
    m = params.length
    rng = np.random.default_rng(params.seed)
    tokens = [0]
    counts = [1]
    if m > 1:
        u = rng.random(m - 1).tolist()
        pos = rng.integers(0, np.arange(1, m)).tolist()
        k = 1
        append = tokens.append
        for step in range(m - 1):
            if u[step] < alpha:
                tok = k
                k += 1
                counts.append(1)
            else:
                tok = tokens[pos[step]]
                counts[tok] += 1
            append(tok)
            if step & _CHECK_MASK == _CHECK_MASK:
                assert sum(counts) == step + 2
    assert sum(counts) == m
    return TokenSequence(np.array(tokens, dtype=np.int64))


def generate_pitman_yor(params: ModelParams) -> TokenSequence:
    """Two-parameter model: innovation probability (a*K + b) / (t + b) and
    reuse of type i with probability (counts[i] - a) / (t + b). Reuse draws
    go through the prefix-sum index, so each step costs O(log K)."""
    _require(params, "pitman_yor")
    a, b = params.a, params.b
    m = params.length
    rng = np.random.default_rng(params.seed)
    tokens = [0]
    counts = [1]
    sampler = PrefixSumSampler()
    sampler.append(1.0 - a)
    if m > 1:
        u_new = rng.random(m - 1).tolist()
        u_pick = rng.random(m - 1).tolist()
        k = 1
        t = 1
        append = tokens.append
        find = sampler.find
        add = sampler.add
        grow = sampler.append
        for step in range(m - 1):
            if u_new[step] < (a * k + b) / (t + b):
                tok = k
                k += 1
                counts.append(1)
                grow(1.0 - a)
            else:
                # Total reuse weight is exactly t - a*K; the index resolves
                # the inverse CDF over counts[i] - a.
                tok = find(u_pick[step] * (t - a * k))
                counts[tok] += 1
                add(tok, 1.0)
            append(tok)
            t += 1
            if step & _CHECK_MASK == _CHECK_MASK:
                assert sum(counts) == t
    assert sum(counts) == m
    return TokenSequence(np.array(tokens, dtype=np.int64))


def generate_conjunct(params: ModelParams) -> TokenSequence:
    """Conjunct model: the (a, b) innovation rate eta = (a*K + b) / (t + b)
    combined with uniform reuse from the past sequence."""
    _require(params, "conjunct")
    a, b = params.a, params.b
    m = params.length
    rng = np.random.default_rng(params.seed)
    tokens = [0]
    counts = [1]
    if m > 1:
        u = rng.random(m - 1).tolist()
        pos = rng.integers(0, np.arange(1, m)).tolist()
        k = 1
        t = 1
        append = tokens.append
        for step in range(m - 1):
            if u[step] < (a * k + b) / (t + b):
                tok = k
                k += 1
                counts.append(1)
            else:
                tok = tokens[pos[step]]
                counts[tok] += 1
            append(tok)
            t += 1
            if step & _CHECK_MASK == _CHECK_MASK:
                assert sum(counts) == t
    assert sum(counts) == m
    return TokenSequence(np.array(tokens, dtype=np.int64))


def generate(params: ModelParams) -> TokenSequence:
    """Dispatch to the model named in the params."""
    if params.model == "simon":
        return generate_simon(params)
    if params.model == "pitman_yor":
        return generate_pitman_yor(params)
    return generate_conjunct(params)


def _relabel_first_occurrence(ids: np.ndarray) -> np.ndarray:
    """Map arbitrary int labels to dense ids in first-occurrence order."""
    uniq, first_pos, inverse = np.unique(ids, return_index=True, return_inverse=True)
    order = np.argsort(first_pos)
    new_id = np.empty(uniq.size, dtype=np.int64)
    new_id[order] = np.arange(uniq.size)
    return new_id[inverse]


def generate_zipf_iid(
    vocab_size: int, exponent: float, length: int, seed: int
) -> TokenSequence:
    """I.i.d. draws from p(u) proportional to u**-exponent over ranks
    u = 1..vocab_size, via binary search on the cumulative weight table.
    Ids are relabeled in first-occurrence order."""
    if vocab_size < 1 or exponent <= 0.0 or length < 1:
        raise DataError("parameter out of range")
    rng = np.random.default_rng(seed)
    weights = np.arange(1, vocab_size + 1, dtype=np.float64) ** (-exponent)
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    ranks = np.searchsorted(cdf, rng.random(length), side="right")
    return TokenSequence(_relabel_first_occurrence(ranks))


def generate_bigram(corpus: TokenSequence, length: int, seed: int) -> TokenSequence:
    """First-order Markov resample of a corpus: the first token comes from
    the unigram distribution, each next token from the empirical successor
    distribution of the current type. A type with no recorded successor
    (it only closes the corpus) restarts from the unigram draw."""
    if corpus.m < 2:
        raise DataError("corpus too short for bigrams")
    if length < 1:
        raise DataError("parameter out of range")
    rng = np.random.default_rng(seed)
    ids = corpus.tokens
    heads = ids[:-1]
    order = np.argsort(heads, kind="stable")
    successors = ids[1:][order].tolist()
    n_types = int(ids.max()) + 1
    head_counts = np.bincount(heads, minlength=n_types)
    offsets = np.concatenate(([0], np.cumsum(head_counts))).tolist()
    head_counts = head_counts.tolist()
    corpus_list = ids.tolist()
    m_c = corpus.m

    u = rng.random(length).tolist()
    out = [corpus_list[int(u[0] * m_c)]]
    append = out.append
    cur = out[0]
    for step in range(1, length):
        n_succ = head_counts[cur]
        if n_succ:
            cur = successors[offsets[cur] + int(u[step] * n_succ)]
        else:
            cur = corpus_list[int(u[step] * m_c)]
        append(cur)
    return TokenSequence(np.array(out, dtype=np.int64), symbols=corpus.symbols)


def shuffle(seq: TokenSequence, seed: int) -> TokenSequence:
    """Uniform random permutation of the tokens (Fisher-Yates, PCG64)."""
    rng = np.random.default_rng(seed)
    perm = rng.permutation(seq.m)
    return TokenSequence(seq.tokens[perm], symbols=seq.symbols)


def run_metadata(params: ModelParams, seq: TokenSequence) -> dict:
    """Metadata mirror of one generation run."""
    meta = {
        "model": params.model,
        "params": params.to_dict(),
        "seed": params.seed,
        "length": seq.m,
        "final_vocab": int(seq.tokens.max()) + 1,
    }
    if params.degenerate:
        meta["degenerate"] = True
    return meta
