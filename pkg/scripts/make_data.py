"""Write fixture grammars, generated seeds and held-out datasets to scripts/data/."""
import argparse
from pathlib import Path

from vstar.evaluation import generate_seeds, held_out
from vstar.grammars import FIXTURES

FIXED_SEEDS = {
    "fig1": ["agcdcdhbcd", "agagcdhbhbcd"],
    "toy-xml": ["<p><p>p</p></p>", "<p><p><p>p</p></p></p>"],
}


def escape(s: str) -> str:
    return s.encode("unicode_escape").decode("ascii")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).parent / "data"))
    ap.add_argument("--seeds", type=int, default=40)
    ap.add_argument("--held-out", type=int, default=500)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, fx in FIXTURES.items():
        g = fx.grammar()
        (out / f"{name}.vpg").write_text(fx.text.lstrip())
        seeds = FIXED_SEEDS.get(name) or generate_seeds(g, args.seeds)
        (out / f"{name}.seeds").write_text("".join(escape(s) + "\n" for s in seeds))
        data = held_out(g, args.held_out, exclude=seeds)
        (out / f"{name}.heldout").write_text("".join(escape(s) + "\n" for s in data))
        print(f"{name}: {len(seeds)} seeds, {len(data)} held-out strings")


if __name__ == "__main__":
    main()
