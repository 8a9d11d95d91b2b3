from pathlib import Path

import pytest

from lrclab.corpusio import (
    ChatParseError,
    extract_speaker,
    extract_speaker_with_stats,
    parse_chat,
    parse_chat_file,
    read_token_file,
    read_tokens,
)
from lrclab.seqcore import DataError, write_token_file

DATA = Path(__file__).parent / "data"

ROMEO = "Oh Romeo Romeo wherefore art thou Romeo"


class TestParseChat:
    def test_minimal_tier_line(self):
        doc = parse_chat("*CHI:\tmore cookie .\n")
        assert len(doc.utterances) == 1
        assert doc.utterances[0].speaker == "CHI"
        assert doc.utterances[0].tokens == ("more", "cookie")

    def test_annotation_stripping(self):
        doc = parse_chat("*MOT:\tyou want <the ball> [?] ?\n")
        assert doc.utterances[0].tokens == ("you", "want", "the", "ball")

    def test_dependent_tier_ignored(self):
        doc = parse_chat("*CHI:\tmore .\n%mor:\tqn|more .\n*CHI:\tball .\n")
        assert len(doc.utterances) == 2

    def test_continuation_extends_utterance(self):
        doc = parse_chat("*CHI:\tI like it\n\tvery much .\n")
        assert doc.utterances[0].tokens == ("I", "like", "it", "very", "much")

    def test_continuation_of_dependent_tier_ignored(self):
        doc = parse_chat("*CHI:\thi .\n%mor:\tco|hi\n\tmore-annotation\n")
        assert len(doc.utterances) == 1
        assert doc.utterances[0].tokens == ("hi",)

    def test_headers_retained(self):
        doc = parse_chat("@UTF8\n@Begin\n*CHI:\thi .\n@End\n")
        assert doc.headers == ("@UTF8", "@Begin", "@End")

    def test_fragment_tokens_stripped(self):
        doc = parse_chat("*CHI:\t&um doggie &=laughs .\n")
        assert doc.utterances[0].tokens == ("doggie",)

    def test_malformed_tier_line(self):
        with pytest.raises(ChatParseError, match="line 2"):
            parse_chat("@Begin\n*CHI more cookie .\n")

    def test_unclassified_line(self):
        with pytest.raises(ChatParseError, match="line 1"):
            parse_chat("just some text\n")

    def test_empty_utterance_allowed(self):
        doc = parse_chat("*CHI:\txxx .\n")
        assert doc.utterances[0].tokens == ("xxx",)
        doc = parse_chat("*CHI:\t.\n")
        assert doc.utterances[0].tokens == ()


class TestExtractSpeaker:
    def test_speaker_filtering(self):
        doc = parse_chat("*CHI:\tmore cookie .\n*MOT:\tyou want it ?\n*CHI:\tyes .\n")
        seq = extract_speaker(doc, {"CHI"})
        assert list(seq.surfaces()) == ["more", "cookie", "yes"]

    def test_drop_codes(self):
        doc = parse_chat("*CHI:\txxx ball .\n")
        seq, dropped = extract_speaker_with_stats(doc, {"CHI"})
        assert list(seq.surfaces()) == ["ball"]
        assert dropped == 1

    def test_lowercasing_merges_types(self):
        doc = parse_chat("*CHI:\tThe ball the Ball .\n")
        seq = extract_speaker(doc, {"CHI"})
        assert seq.symbols == ("the", "ball")
        assert seq.tokens.tolist() == [0, 1, 0, 1]

    def test_no_tokens_error(self):
        doc = parse_chat("*CHI:\txxx .\n*MOT:\tfine .\n")
        with pytest.raises(DataError, match="no tokens for speakers"):
            extract_speaker(doc, {"CHI"})

    def test_golden_fixture(self):
        doc = parse_chat_file(DATA / "sample.cha")
        assert len(doc.headers) == 5
        assert len(doc.utterances) == 10
        seq, dropped = extract_speaker_with_stats(doc, {"CHI"})
        assert list(seq.surfaces()) == [
            "more",
            "cookie",
            "i",
            "want",
            "cookie",
            "thank",
            "you",
            "mommy",
            "where",
            "ball",
            "go",
            "doggie",
            "eat",
            "food",
        ]
        assert dropped == 3

    def test_golden_fixture_mother(self):
        doc = parse_chat_file(DATA / "sample.cha")
        seq = extract_speaker(doc, {"MOT"})
        assert list(seq.surfaces())[:4] == ["you", "want", "the", "ball"]


class TestReadTokens:
    def test_romeo_clause(self):
        seq = read_tokens(ROMEO)
        assert seq.m == 7
        assert len(set(seq.tokens.tolist())) == 5
        romeo = seq.symbols.index("romeo")
        positions = [i + 1 for i, t in enumerate(seq.tokens.tolist()) if t == romeo]
        assert positions == [2, 3, 7]

    def test_empty_input(self):
        with pytest.raises(DataError, match="empty input"):
            read_tokens("")

    def test_whitespace_equivalence(self):
        a = read_tokens("a b\tc\nd")
        b = read_tokens("a b c d")
        assert a == b

    def test_round_trip(self, tmp_path):
        seq = read_tokens("Oh Romeo Romeo wherefore art thou Romeo")
        path = tmp_path / "tokens.txt"
        write_token_file(seq, path)
        assert read_token_file(path) == seq

    def test_file_context_in_errors(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("")
        with pytest.raises(DataError, match="empty.txt"):
            read_token_file(path)
