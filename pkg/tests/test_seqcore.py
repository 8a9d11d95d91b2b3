import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrclab.corpusio import read_token_file
from lrclab.seqcore import (
    AcfCurve,
    DataError,
    IntervalSequence,
    PowerLawFit,
    RankFrequency,
    TokenSequence,
    TypeTokenCurve,
    log_grid,
    moments,
    read_acf_csv,
    read_intervals_csv,
    read_rank_frequency_csv,
    read_type_token_csv,
    sequence_from_surface,
    write_acf_csv,
    write_intervals_csv,
    write_rank_frequency_csv,
    write_token_file,
    write_type_token_csv,
)


class TestMoments:
    def test_constant_series(self):
        assert moments([2, 2, 2]) == (2.0, 0.0)

    def test_two_values(self):
        assert moments([1, 4]) == (2.5, 1.5)

    def test_population_sigma(self):
        mean, sd = moments([1, 1, 3])
        assert mean == pytest.approx(5 / 3)
        assert sd == pytest.approx(math.sqrt(8 / 9))

    def test_empty(self):
        with pytest.raises(DataError, match="empty series"):
            moments([])

    @given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=200), st.randoms())
    def test_permutation_invariant(self, xs, rnd):
        base = moments(xs)
        shuffled = list(xs)
        rnd.shuffle(shuffled)
        perm = moments(shuffled)
        assert perm[0] == pytest.approx(base[0], abs=1e-9)
        assert perm[1] == pytest.approx(base[1], abs=1e-9)


class TestTokenSequence:
    def test_basic(self):
        seq = TokenSequence(np.array([0, 1, 0]), symbols=("a", "b"))
        assert seq.m == 3
        assert seq.surface(1) == "b"

    def test_empty_rejected(self):
        with pytest.raises(DataError):
            TokenSequence(np.array([], dtype=np.int64))

    def test_symbol_table_must_cover_ids(self):
        with pytest.raises(DataError):
            TokenSequence(np.array([0, 3]), symbols=("a", "b"))

    def test_negative_ids_rejected(self):
        with pytest.raises(DataError):
            TokenSequence(np.array([0, -1]))

    def test_immutable(self):
        seq = TokenSequence(np.array([0, 1]))
        with pytest.raises(ValueError):
            seq.tokens[0] = 5

    def test_first_occurrence_ids(self):
        seq = sequence_from_surface(["b", "a", "b", "c"])
        assert seq.tokens.tolist() == [0, 1, 0, 2]
        assert seq.symbols == ("b", "a", "c")


class TestIntervalSequence:
    def test_moments_recomputable(self):
        ints = IntervalSequence(np.array([1, 4]), n=16)
        assert ints.m_n == 2
        mu, sigma = moments(ints.intervals)
        assert abs(ints.mu - mu) < 1e-9
        assert abs(ints.sigma - sigma) < 1e-9

    def test_positive_required(self):
        with pytest.raises(DataError):
            IntervalSequence(np.array([1, 0]))


class TestLogGrid:
    def test_limit_one(self):
        assert log_grid(1).tolist() == [1]

    def test_strictly_increasing_and_bounded(self):
        grid = log_grid(1000)
        assert grid[0] == 1
        assert grid[-1] == 1000
        assert np.all(np.diff(grid) > 0)

    def test_twenty_per_decade(self):
        grid = log_grid(10**5)
        last_decade = grid[(grid > 10**4) & (grid <= 10**5)]
        assert len(last_decade) == 20

    def test_small_integers_dense(self):
        grid = log_grid(10)
        assert grid.tolist() == [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]


class TestRoundTrips:
    def test_token_file(self, tmp_path):
        seq = sequence_from_surface(["oh", "romeo", "romeo", "wherefore"])
        path = tmp_path / "tokens.txt"
        write_token_file(seq, path)
        assert read_token_file(path) == seq

    def test_token_file_without_symbols(self, tmp_path):
        seq = TokenSequence(np.array([0, 1, 0, 2]))
        path = tmp_path / "tokens.txt"
        write_token_file(seq, path)
        back = read_token_file(path)
        assert back.tokens.tolist() == seq.tokens.tolist()
        assert back.symbols == ("w0", "w1", "w2")

    @given(
        st.lists(
            st.text(alphabet="abcdefg", min_size=1, max_size=4),
            min_size=1,
            max_size=50,
        )
    )
    @settings(max_examples=50, deadline=None)
    def test_token_file_property(self, words):
        import tempfile

        seq = sequence_from_surface(words)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "tokens.txt"
            write_token_file(seq, path)
            assert read_token_file(path) == seq

    def test_acf_csv(self, tmp_path):
        curve = AcfCurve(
            np.array([1, 2, 5]), np.array([0.5, -0.25, 0.125]), source_length=1000
        )
        path = tmp_path / "acf.csv"
        write_acf_csv(curve, path)
        assert read_acf_csv(path, source_length=1000) == curve

    def test_acf_csv_full_precision(self, tmp_path):
        values = np.array([0.1 + 1e-17, 1 / 3, -0.07923611111])
        curve = AcfCurve(np.array([1, 2, 3]), values, source_length=500)
        path = tmp_path / "acf.csv"
        write_acf_csv(curve, path)
        back = read_acf_csv(path, source_length=500)
        assert np.array_equal(back.values, curve.values)

    def test_rank_frequency_csv(self, tmp_path):
        rank = RankFrequency(np.array([5, 2, 2, 1]))
        path = tmp_path / "rankfreq.csv"
        write_rank_frequency_csv(rank, path)
        assert read_rank_frequency_csv(path) == rank

    def test_type_token_csv(self, tmp_path):
        curve = TypeTokenCurve(np.array([1, 2, 5, 9]), np.array([1, 2, 3, 3]))
        path = tmp_path / "typetoken.csv"
        write_type_token_csv(curve, path)
        assert read_type_token_csv(path) == curve

    def test_intervals_csv(self, tmp_path):
        ints = IntervalSequence(np.array([1, 4, 2]), n=16)
        path = tmp_path / "intervals.csv"
        write_intervals_csv(ints, path)
        assert read_intervals_csv(path, n=16) == ints

    def test_power_law_fit_dict(self):
        fit = PowerLawFit(0.301, 0.82, 0.00158, 45, 3)
        assert PowerLawFit.from_dict(fit.to_dict()) == fit


class TestTypeValidation:
    def test_acf_offsets_bounded(self):
        with pytest.raises(DataError):
            AcfCurve(np.array([1, 20]), np.array([0.5, 0.1]), source_length=1000)

    def test_rank_frequencies_non_increasing(self):
        with pytest.raises(DataError):
            RankFrequency(np.array([1, 2]))

    def test_type_token_v_not_above_m(self):
        with pytest.raises(DataError):
            TypeTokenCurve(np.array([1, 2]), np.array([1, 3]))

    def test_type_token_first_sample(self):
        with pytest.raises(DataError):
            TypeTokenCurve(np.array([1, 2]), np.array([2, 2]))
