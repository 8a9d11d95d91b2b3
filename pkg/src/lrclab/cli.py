"""Command-line interface.

Exit codes are a stable contract for scripting: 0 on success, 1 on usage
errors, 2 on data or degeneracy errors. Every randomized command requires
an explicit --seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import harness, lrcstats
from .corpusio import (
    DEFAULT_DROP_CODES,
    extract_speaker_with_stats,
    parse_chat_file,
    read_token_file,
)
from .genmodels import (
    ModelParams,
    generate_bigram,
    generate_zipf_iid,
    shuffle,
)
from .seqcore import DataError, write_token_file

USAGE_EXIT = 1
DATA_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def _cmd_analyze(args: argparse.Namespace) -> int:
    rare = args.rare.split(",") if args.rare else None
    report = harness.run_analysis(args.input, n=args.n, out_dir=args.out, rare_words=rare)
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def _cmd_generate(args: argparse.Namespace, parser: _Parser) -> int:
    model = args.model
    out = Path(args.out)
    if model in ("simon", "py", "conjunct"):
        if model == "simon":
            if args.alpha is None:
                parser.error("--alpha is required for --model simon")
            params = ModelParams(model="simon", length=args.length, seed=args.seed, alpha=args.alpha)
        else:
            if args.a is None or args.b is None:
                parser.error(f"--a and --b are required for --model {model}")
            name = "pitman_yor" if model == "py" else "conjunct"
            params = ModelParams(model=name, length=args.length, seed=args.seed, a=args.a, b=args.b)
        harness.generate_to_file(params, out)
        return 0
    if model == "zipf":
        if args.vocab is None or args.exponent is None:
            parser.error("--vocab and --exponent are required for --model zipf")
        seq = generate_zipf_iid(args.vocab, args.exponent, args.length, args.seed)
        write_token_file(seq, out)
        meta = {
            "model": "zipf",
            "params": {"vocab_size": args.vocab, "exponent": args.exponent},
            "seed": args.seed,
            "length": seq.m,
            "final_vocab": int(np.unique(seq.tokens).size),
        }
        _write_json(Path(str(out) + ".meta.json"), meta)
        return 0
    if model == "bigram":
        if args.corpus is None:
            parser.error("--corpus is required for --model bigram")
        corpus = read_token_file(args.corpus)
        seq = generate_bigram(corpus, args.length, args.seed)
        write_token_file(seq, out)
        meta = {
            "model": "bigram",
            "params": {"corpus": str(args.corpus)},
            "seed": args.seed,
            "length": seq.m,
            "final_vocab": int(np.unique(seq.tokens).size),
        }
        _write_json(Path(str(out) + ".meta.json"), meta)
        return 0
    parser.error(f"unknown model {model}")
    return USAGE_EXIT


def _cmd_shuffle(args: argparse.Namespace) -> int:
    seq = read_token_file(args.input)
    out_seq = shuffle(seq, args.seed)
    write_token_file(out_seq, args.out)
    meta = {
        "model": "shuffle",
        "params": {"input": str(args.input)},
        "seed": args.seed,
        "length": out_seq.m,
        "final_vocab": int(np.unique(out_seq.tokens).size),
    }
    _write_json(Path(str(args.out) + ".meta.json"), meta)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    spec = harness.SweepSpec.from_json(args.spec)
    result = harness.run_sweep(spec, workers=args.workers)
    harness.write_sweep_result(result, args.out)
    failed = sum(1 for r in result.records if r.error)
    print(f"sweep complete: {len(result.records)} runs, {failed} failed cells -> {args.out}")
    return 0


def _cmd_chat_extract(args: argparse.Namespace) -> int:
    doc = parse_chat_file(args.input)
    speakers = [s for s in args.speakers.split(",") if s]
    drop = set(args.drop_codes.split(",")) if args.drop_codes else set(DEFAULT_DROP_CODES)
    seq, dropped = extract_speaker_with_stats(doc, speakers, drop)
    write_token_file(seq, args.out)
    provenance = {
        "source_file": str(args.input),
        "speakers": sorted(s.upper() for s in speakers),
        "dropped_token_count": dropped,
    }
    _write_json(Path(str(args.out) + ".provenance.json"), provenance)
    return 0


def _cmd_figure(args: argparse.Namespace) -> int:
    manifest = harness.emit_figure_data(args.input, args.id, args.out)
    print(json.dumps(manifest, indent=2))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="lrclab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze a token file")
    p.add_argument("--input", required=True)
    p.add_argument("--n", type=int, default=lrcstats.DEFAULT_RARITY, help="rarity divisor (default 16)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--rare", default=None, help="comma-separated surface forms forcing the rare set")

    p = sub.add_parser("generate", help="generate a sequence from a model")
    p.add_argument("--model", required=True, choices=["simon", "py", "conjunct", "zipf", "bigram"])
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--exponent", type=float, default=None)
    p.add_argument("--vocab", type=int, default=None)
    p.add_argument("--corpus", default=None, help="corpus token file (bigram model)")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output token file")

    p = sub.add_parser("shuffle", help="shuffle a token file at the word level")
    p.add_argument("--input", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("sweep", help="run a parameter sweep from a JSON spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("chat-extract", help="extract speaker tokens from a CHAT transcript")
    p.add_argument("--input", required=True)
    p.add_argument("--speakers", required=True, help="comma-separated speaker codes")
    p.add_argument("--out", required=True)
    p.add_argument("--drop-codes", default=None, help="comma-separated codes to drop (default xxx,yyy,www)")

    p = sub.add_parser("figure", help="emit the data behind one figure panel")
    p.add_argument("--input", required=True, help="analysis or sweep output directory")
    p.add_argument("--id", required=True, choices=list(harness.FIGURE_IDS))
    p.add_argument("--out", required=True, help="output directory")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "generate":
            return _cmd_generate(args, parser)
        if args.command == "shuffle":
            return _cmd_shuffle(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "chat-extract":
            return _cmd_chat_extract(args)
        if args.command == "figure":
            return _cmd_figure(args)
    except DataError as exc:
        print(f"lrclab: error: {exc}", file=sys.stderr)
        return DATA_EXIT
    except OSError as exc:
        print(f"lrclab: error: {exc}", file=sys.stderr)
        return DATA_EXIT
    parser.error("no command given")
    return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
