"""crds <command> --manifest FILE [--seed N] [--trunc N] [--out FILE]

Exit codes: 0 all verifications pass, 1 a verification failed, 2 usage or
parse error.  CRDS_TRUNC sets the default truncation.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import List, Optional

from .manifest import COMMANDS, ManifestError, Step, parse_manifest
from .pipeline import dumps, run_pipeline

ITEMS = {
    "invariants": ("hypersurface", "hypersurfaces"),
    "associate": ("hypersurface", "hypersurfaces"),
    "blowup": ("hypersurface", "hypersurfaces"),
    "adapt": ("hypersurface", "hypersurfaces"),
    "prolong": ("map", "maps"),
    "sum": ("series", "series"),
}
SUM_FLAGS = ("k", "q", "direction", "grid", "pade")


def _steps(command: str, man, args) -> List[Step]:
    if command == "run":
        return list(man.steps)
    extra = []
    if command == "sum":
        extra = [(f, getattr(args, f)) for f in SUM_FLAGS if getattr(args, f) is not None]
    if command == "prolong" and args.order is not None:
        extra = [("order", str(args.order))]
    listed = [s for s in man.steps if s.command == command]
    if listed:
        out = []
        for s in listed:
            merged = dict(s.args)
            merged.update(extra)
            out.append(Step(command, tuple(merged.items()), s.line))
        return out
    if command in ITEMS:
        key, attr = ITEMS[command]
        return [Step(command, ((key, name),) + tuple(extra)) for name in getattr(man, attr)]
    # pair commands: every hypersurface against every map
    return [Step(command, (("source", h), ("map", p))) for h in man.hypersurfaces for p in man.maps]


def _env_trunc() -> Optional[int]:
    v = os.environ.get("CRDS_TRUNC")
    if v is None or v == "":
        return None
    try:
        return int(v)
    except ValueError:
        raise ManifestError(f"CRDS_TRUNC must be an integer, got {v!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crds", description="Exact CR-geometry series pipeline")
    p.add_argument("command", choices=sorted(COMMANDS) + ["run"])
    p.add_argument("--manifest", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--trunc", type=int)
    p.add_argument("--out")
    p.add_argument("--order", type=int, help="jet order for prolong")
    p.add_argument("--k")
    p.add_argument("--q")
    p.add_argument("--direction")
    p.add_argument("--grid")
    p.add_argument("--pade", help="L,M")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.manifest, encoding="utf-8") as fh:
            man = parse_manifest(fh.read())
        trunc = args.trunc
        if trunc is None and man.trunc is None:
            trunc = _env_trunc()
        steps = _steps(args.command, man, args)
    except OSError as e:
        print(f"crds: {e}", file=sys.stderr)
        return 2
    except ManifestError as e:
        print(f"crds: {args.manifest}:{e}", file=sys.stderr)
        return 2
    report = run_pipeline(man, steps, trunc=trunc, seed=args.seed)
    text = dumps(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
