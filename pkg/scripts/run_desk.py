"""Desk-scale benchmark of one family: metrics CSV plus summary JSON.

    python3 scripts/run_desk.py synthetic --out runs/syn
    python3 scripts/run_desk.py uc --jobs 1 --out runs/uc
"""
import argparse
import json
import time
from pathlib import Path

from warmcg.bench import prepare, run_pipeline, write_metrics, write_summary
from warmcg.formats import write_dataset
from warmcg.instances import SyntheticFamilyConfig, UcFamilyConfig, gen_synthetic, gen_uc

FAMILIES = {
    "synthetic": lambda seed: gen_synthetic(SyntheticFamilyConfig(seed=seed)),
    "uc": lambda seed: gen_uc(UcFamilyConfig(seed=seed)),
}
DEFAULT_SEED = {"synthetic": 7, "uc": 11}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("family", choices=sorted(FAMILIES))
    ap.add_argument("--seed", type=int)
    ap.add_argument("--k", default="1,5,10,50")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", required=True, help="output directory")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seed = DEFAULT_SEED[args.family] if args.seed is None else args.seed
    t0 = time.perf_counter()
    data = FAMILIES[args.family](seed)
    write_dataset(out / "dataset.jsonl", data)
    offline = prepare(data)
    print(f"generated and prepared {len(data)} instances in {time.perf_counter() - t0:.1f}s")

    runs = []
    for method in ("cg", "b-learner", "s-learner"):
        for k in ([int(v) for v in args.k.split(",")] if "learner" in method else [None]):
            r, agg = run_pipeline(data, method, k, offline=offline, jobs=args.jobs)
            runs += r
            print(json.dumps({key: agg[key] for key in
                              ("method", "k", "C_min", "C_max", "I_min", "I_max", "P1", "Delta")}))
    write_metrics(out / "metrics.csv", runs)
    write_summary(out / "summary.json", runs)
    print(f"done in {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
