"""Reduced-scale accuracy table: learn each fixture from its seeds and report
recall / precision / F1 / queries as a results table."""
import argparse
import json
import time
from pathlib import Path

from vstar.cli import read_lines, read_seeds
from vstar.evaluation import EvalReport, f1, format_table, precision, recall
from vstar.grammars import FIXTURES
from vstar.oracle import vpg_oracle
from vstar.pipeline import RunConfig, run_pipeline

DATA = Path(__file__).parent / "data"
DEFAULT = ("fig1", "toy-xml", "mini-json", "mini-lisp", "mini-xml")


def run_one(name: str, samples: int, rng: int) -> EvalReport:
    fx = FIXTURES[name]
    g = fx.grammar()
    oracle = vpg_oracle(g)
    seeds = read_seeds(str(DATA / f"{name}.seeds"))
    dataset = [s for s in read_lines(str(DATA / f"{name}.heldout")) if s]
    if fx.mode == "token":
        # the learned alphabet is the seed alphabet; keep held-out strings over it
        alpha = set("".join(seeds))
        dataset = [s for s in dataset if set(s) <= alpha] or dataset
    t0 = time.perf_counter()
    res = run_pipeline(oracle, seeds, RunConfig(mode=fx.mode))
    elapsed = time.perf_counter() - t0
    r = recall(res.model.accepts, dataset)
    p, _ = precision(res.model.grammar(), g.accepts, samples, rng)
    return EvalReport(r, p, f1(r, p), res.stats, len(res.corpus), samples, len(dataset), elapsed,
                      {"states": res.model.machine.size, "converged": res.converged, "seeds": len(seeds)})


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=list(DEFAULT))
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--rng-seed", type=int, default=0)
    ap.add_argument("--json", default=None, help="also write the reports here")
    args = ap.parse_args()
    rows = [(n, run_one(n, args.samples, args.rng_seed)) for n in args.names]
    print(format_table(rows))
    if args.json:
        Path(args.json).write_text(json.dumps({n: r.to_dict() for n, r in rows}, indent=1, sort_keys=True))


if __name__ == "__main__":
    main()
