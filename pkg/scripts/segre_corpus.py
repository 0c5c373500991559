"""Invariants and Segre-ODE verification for every corpus hypersurface.

    python3 scripts/segre_corpus.py --order 8 --samples 10
"""

import argparse
import time
from dataclasses import dataclass

from crds.corpus import CORPUS, corpus_segre_system, segre_trunc
from crds.hypersurface import invariants
from crds.segre_ode import default_samples, verify_segre_solutions


@dataclass
class Config:
    order: int = 8
    samples: int = 10
    seed: int = 0


def run(cfg: Config) -> bool:
    ok = True
    print(f"{'name':16} {'m':>7} {'p':>3} {'k':>4}  {'system':16} {'trunc':>5}  result   time")
    for name in sorted(CORPUS):
        e = CORPUS[name]
        t0 = time.perf_counter()
        inv = invariants(e.hypersurface(segre_trunc(e.kind, cfg.order))).as_dict()
        sysm, fam = corpus_segre_system(name, cfg.order, cfg.seed)
        rep = verify_segre_solutions(sysm, fam, default_samples(cfg.samples, cfg.seed))
        ok &= rep.passed
        print(f"{name:16} {str(inv['m']):>7} {str(inv['p']):>3} {str(inv['k']):>4}  {type(sysm).__name__:16} "
              f"{rep.trunc:>5}  {'pass' if rep.passed else 'FAIL':7} {time.perf_counter() - t0:5.2f}s")
    return ok


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--order", type=int, default=Config.order)
    ap.add_argument("--samples", type=int, default=Config.samples)
    ap.add_argument("--seed", type=int, default=Config.seed)
    a = ap.parse_args()
    raise SystemExit(0 if run(Config(a.order, a.samples, a.seed)) else 1)
