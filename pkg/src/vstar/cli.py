"""Command-line front end: ``vstar learn | eval | tokenize | export | infer-tags``."""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .alphabet import Tagging
from .evaluation import EvalReport, f1, format_table, precision, recall
from .oracle import OracleError, parse_oracle_spec
from .pipeline import LearnedModel, PipelineError, RunConfig, run_pipeline, trace_lines
from .sevpa import MachineError, Sevpa, to_vpg
from .tags import SeedRejected, TagConfig, tag_infer
from .tokens import PartialTokenizer, TokenConfig, conv, token_infer, tokenize
from .vpg import GrammarError, load_grammar

EXIT_OK, EXIT_ERROR, EXIT_BUDGET = 0, 1, 2


class CliError(Exception):
    pass


def decode_line(line: str) -> str:
    r"""Undo the seed-file escapes ``\n \t \\ \xHH`` (and other Python escapes)."""
    if "\\" not in line:
        return line
    return line.encode("latin-1", "backslashreplace").decode("unicode_escape")


def read_lines(path: str) -> list[str]:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror or e}") from e
    return [decode_line(line) for line in text.splitlines()]


def read_seeds(path: str) -> list[str]:
    seeds = [s for s in read_lines(path) if s]
    if not seeds:
        raise CliError(f"no seed strings in {path}")
    return seeds


def _write(out: Path, name: str, text: str) -> None:
    (out / name).write_text(text, encoding="utf-8")


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, ensure_ascii=True) + "\n"


def _config(args) -> RunConfig:
    return RunConfig(mode=args.mode, eq_mode=args.eq, eq_max_len=args.eq_max_len,
                     max_fragment=args.max_fragment, max_corpus=args.max_corpus,
                     infixes=args.infixes, k_cap=args.k_cap, max_frag=args.max_frag,
                     max_rounds=args.max_rounds, rng_seed=args.rng_seed)


def cmd_learn(args) -> int:
    cfg = _config(args)
    seeds = read_seeds(args.seeds)
    oracle = parse_oracle_spec(args.oracle)
    reference = None
    if cfg.eq_mode == "perfect":
        if not args.oracle.startswith("vpg:"):
            raise CliError("--eq perfect needs a vpg: oracle")
        reference = load_grammar(args.oracle[4:])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    res = run_pipeline(oracle, seeds, cfg, reference=reference)
    elapsed = time.perf_counter() - t0

    model = res.model
    g = to_vpg(model.machine)
    _write(out, "machine.json", model.machine.to_json() + "\n")
    _write(out, "grammar.txt", g.to_text())
    _write(out, "grammar.json", g.to_json() + "\n")
    if model.tokenizer is not None:
        _write(out, "tokenizer.json", model.tokenizer.to_json() + "\n")
        structure = {"tokenizer": [[p.call_example, p.ret_example] for p in model.tokenizer.pairs]}
        warnings = res.structure.warnings
    else:
        _write(out, "tagging.json", model.tagging.to_json() + "\n")
        structure = {"tagging": [list(p) for p in model.tagging.pairs]}
        warnings = []
    _write(out, "trace.jsonl", trace_lines(res.learn))
    report = {
        "converged": res.converged,
        "rounds": res.learn.rounds,
        "states": model.machine.size,
        "K": res.structure.K,
        "structure": structure,
        "warnings": warnings,
        "stats": res.stats,
        "corpus_size": len(res.corpus) if res.corpus is not None else 0,
        "counterexamples": res.learn.counterexamples,
        "cex_queries": res.learn.cex_queries,
        "config": cfg.to_dict(),
        "seeds": len(seeds),
    }
    _write(out, "report.json", _dump(report))
    _write(out, "timing.json", _dump({"elapsed_s": round(elapsed, 3)}))

    print(f"{'converged' if res.converged else 'NOT converged'} after {res.learn.rounds} rounds: "
          f"{model.machine.size} states, {res.stats['unique']} unique queries")
    print(f"structure: {json.dumps(structure, ensure_ascii=False)}")
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"artifacts written to {out}")
    return EXIT_OK if res.converged else EXIT_BUDGET


def load_model(art: Path, oracle=None) -> LearnedModel:
    try:
        machine = Sevpa.from_json((art / "machine.json").read_text(encoding="utf-8"))
        if (art / "tokenizer.json").exists():
            D = PartialTokenizer.from_json((art / "tokenizer.json").read_text(encoding="utf-8"))
            return LearnedModel(machine, tokenizer=D, oracle=oracle)
        t = Tagging.from_json((art / "tagging.json").read_text(encoding="utf-8"))
    except OSError as e:
        raise CliError(f"cannot read artifacts in {art}: {e}") from e
    except (ValueError, KeyError, TypeError) as e:
        raise CliError(f"malformed artifacts in {art}: {e}") from e
    return LearnedModel(machine, tagging=t)


def cmd_eval(args) -> int:
    art = Path(args.artifacts)
    oracle = parse_oracle_spec(args.oracle)
    model = load_model(art, oracle)
    dataset = [s for s in read_lines(args.dataset) if s]
    if not dataset:
        raise CliError(f"empty dataset {args.dataset}: recall is undefined")
    learn_report = {}
    if (art / "report.json").exists():
        learn_report = json.loads((art / "report.json").read_text(encoding="utf-8"))
    elapsed = None
    if (art / "timing.json").exists():
        elapsed = json.loads((art / "timing.json").read_text(encoding="utf-8")).get("elapsed_s")

    r = recall(model.accepts, dataset)
    p, _ = precision(model.grammar(), oracle, args.samples, args.rng_seed, args.sample_depth)
    rep = EvalReport(r, p, f1(r, p), learn_report.get("stats", {}), learn_report.get("corpus_size", 0),
                     args.samples, len(dataset), elapsed)
    (art / "eval.json").write_text(rep.to_json(with_time=False) + "\n", encoding="utf-8")
    print(format_table([(args.name or art.name, rep)]))
    return EXIT_OK


def cmd_tokenize(args) -> int:
    try:
        D = PartialTokenizer.from_json(Path(args.tokenizer).read_text(encoding="utf-8"))
    except OSError as e:
        raise CliError(f"cannot read {args.tokenizer}: {e.strerror or e}") from e
    except (ValueError, KeyError, TypeError) as e:
        raise CliError(f"malformed tokenizer {args.tokenizer}: {e}") from e
    oracle = parse_oracle_spec(args.oracle) if args.oracle else None
    if args.text is not None:
        inputs = [decode_line(args.text)]
    else:
        inputs = read_lines(args.input)
    for s in inputs:
        ms = tokenize(D, s, oracle)
        for m in ms:
            a, b = m.span
            print(f"{m.pair}\t{m.side.name.lower()}\t{m.start}\t{m.end}\t{s[a:b]}")
        if ms or s:
            print(f"conv\t{conv(D, s, ms)}")
    return EXIT_OK


def cmd_export(args) -> int:
    try:
        m = Sevpa.from_json(Path(args.machine).read_text(encoding="utf-8"))
    except OSError as e:
        raise CliError(f"cannot read {args.machine}: {e.strerror or e}") from e
    g = to_vpg(m)
    text = g.to_json() + "\n" if args.format == "json" else g.to_text()
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_infer_tags(args) -> int:
    seeds = read_seeds(args.seeds)
    oracle = parse_oracle_spec(args.oracle)
    if args.mode == "char":
        res = tag_infer(oracle, seeds, TagConfig(args.k_cap, args.max_frag))
        if res.tagging is None:
            raise CliError(f"no compatible tagging up to K={args.k_cap}")
        print(res.tagging.to_json())
    else:
        res = token_infer(oracle, seeds, TokenConfig(args.k_cap, args.max_frag))
        if res.tokenizer is None:
            raise CliError(f"no compatible tokenizer up to K={args.k_cap}")
        print(res.tokenizer.to_json())
        for w in res.warnings:
            print(f"warning: {w}", file=sys.stderr)
    print(f"K={res.K}, {len(res.patterns)} nesting patterns", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vstar", description="Learn visibly pushdown grammars from a membership oracle.")
    sub = ap.add_subparsers(dest="command", required=True)
    d = RunConfig()

    def common(p, learn=True):
        p.add_argument("--seeds", required=True, help="seed file, one string per line")
        p.add_argument("--oracle", required=True, help="cmd:<command> (exit 0 = accept, {} = temp file) or vpg:<grammar>")
        p.add_argument("--mode", choices=("char", "token"), default=d.mode)
        p.add_argument("--k-cap", type=int, default=d.k_cap, help="largest pumping bound K tried")
        p.add_argument("--max-frag", type=int, default=d.max_frag, help="longest x or y in a nesting pattern")

    p = sub.add_parser("learn", help="infer structure, learn a machine, export a grammar")
    common(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--eq", choices=("seeds", "perfect"), default=d.eq_mode)
    p.add_argument("--eq-max-len", type=int, default=d.eq_max_len, help="length bound of the perfect teacher")
    p.add_argument("--max-fragment", type=int, default=d.max_fragment, help="longest corpus fragment")
    p.add_argument("--max-corpus", type=int, default=d.max_corpus)
    p.add_argument("--infixes", type=int, choices=(0, 1, 2), default=d.infixes)
    p.add_argument("--max-rounds", type=int, default=d.max_rounds)
    p.add_argument("--rng-seed", type=int, default=d.rng_seed)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("eval", help="recall / precision / F1 of learned artifacts")
    p.add_argument("--artifacts", required=True, help="directory written by learn")
    p.add_argument("--oracle", required=True)
    p.add_argument("--dataset", required=True, help="positive examples, one per line")
    p.add_argument("--samples", type=int, default=d.precision_samples)
    p.add_argument("--sample-depth", type=int, default=d.sample_depth)
    p.add_argument("--rng-seed", type=int, default=d.rng_seed)
    p.add_argument("--name", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("tokenize", help="run a tokenizer on strings")
    p.add_argument("--tokenizer", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--input", help="file of strings, one per line")
    g.add_argument("--text", help="a single string")
    p.add_argument("--oracle", default=None, help="enables the repetition probe")
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("export", help="convert a machine to a grammar")
    p.add_argument("--machine", required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("infer-tags", help="only infer the tagging or tokenizer")
    common(p)
    p.set_defaults(func=cmd_infer_tags)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        for name in ("k_cap", "max_frag", "max_fragment", "max_corpus", "max_rounds", "eq_max_len", "samples"):
            if getattr(args, name, 1) <= 0:
                raise CliError(f"--{name.replace('_', '-')} must be positive")
        return args.func(args)
    except (CliError, PipelineError, OracleError, SeedRejected, GrammarError, MachineError, ValueError) as e:
        print(f"vstar: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
