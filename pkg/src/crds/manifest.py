"""Sectioned key-value manifests.

    # comment
    [hypersurface]
    name = h1
    terms = (1,1,2) -> 1; (2,2,3) -> 1/3

    [map]
    name = H
    random = 3
    degree = 2

    [series]
    name = e
    kind = euler
    count = 30

    [pipeline]
    seed = 0
    trunc = 8
    step = invariants hypersurface=h1
    step = reduce source=h1 map=H

Terms are ``(exponents) -> coefficient`` separated by ``;`` with exact
Gaussian coefficients ``re + im·i``.  Hypersurface terms are those of the
real defining series F in (z, z̄, u).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .series import Gaussian, SeriesError, format_gaussian, parse_gaussian


class ManifestError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.line, self.col = line, col


Terms = Tuple[Tuple[Tuple[int, ...], Gaussian], ...]


@dataclass(frozen=True)
class HypersurfaceSpec:
    name: str
    terms: Terms = ()
    corpus: Optional[str] = None
    trunc: Optional[int] = None


@dataclass(frozen=True)
class MapSpec:
    name: str
    F: Terms = ()
    G: Terms = ()
    random: Optional[int] = None
    degree: int = 2
    trunc: Optional[int] = None
    perturb: Tuple[Tuple[str, Tuple[int, ...], Gaussian], ...] = ()


@dataclass(frozen=True)
class SeriesSpec:
    name: str
    kind: str
    count: int = 30
    coeffs: Tuple[Gaussian, ...] = ()


@dataclass(frozen=True)
class Step:
    command: str
    args: Tuple[Tuple[str, str], ...] = ()
    line: int = 0

    def get(self, key: str, default=None):
        return dict(self.args).get(key, default)

    def text(self) -> str:
        return " ".join([self.command] + [f"{k}={v}" for k, v in self.args])

    def __eq__(self, o):
        return isinstance(o, Step) and (self.command, self.args) == (o.command, o.args)

    def __hash__(self):
        return hash((self.command, self.args))


@dataclass
class Manifest:
    hypersurfaces: Dict[str, HypersurfaceSpec] = field(default_factory=dict)
    maps: Dict[str, MapSpec] = field(default_factory=dict)
    series: Dict[str, SeriesSpec] = field(default_factory=dict)
    steps: List[Step] = field(default_factory=list)
    seed: Optional[int] = None
    trunc: Optional[int] = None

    def __eq__(self, o):
        return isinstance(o, Manifest) and (self.hypersurfaces, self.maps, self.series, self.steps, self.seed,
                                            self.trunc) == (o.hypersurfaces, o.maps, o.series, o.steps, o.seed,
                                                            o.trunc)


SECTION_KEYS = {
    "hypersurface": {"name", "vars", "trunc", "terms", "corpus"},
    "map": {"name", "vars", "trunc", "F", "G", "random", "degree", "perturb"},
    "series": {"name", "kind", "count", "coeffs"},
    "pipeline": {"seed", "trunc", "step"},
}
DEFAULT_VARS = {"hypersurface": "z, zbar, u", "map": "z, w"}
SERIES_KINDS = ("coefficients", "euler", "geometric", "ode")

COMMANDS = {
    "invariants": {"hypersurface"},
    "associate": {"hypersurface", "perturb", "samples"},
    "prolong": {"map", "order"},
    "verify-equivalence": {"source", "map", "target"},
    "reduce": {"source", "map", "solve"},
    "blowup": {"hypersurface", "s", "map"},
    "adapt": {"hypersurface", "seed"},
    "sum": {"series", "k", "q", "direction", "grid", "pade", "against"},
}
REFS = {"hypersurface": "hypersurfaces", "source": "hypersurfaces", "target": "hypersurfaces", "map": "maps",
        "series": "series", "against": "series"}
REQUIRED = {
    "invariants": {"hypersurface"}, "associate": {"hypersurface"}, "prolong": {"map"},
    "verify-equivalence": {"source", "map"}, "reduce": {"source", "map"}, "blowup": {"hypersurface"},
    "adapt": {"hypersurface"}, "sum": {"series"},
}

_TERM = re.compile(r"^\s*\(([\d,\s]*)\)\s*->\s*(.+?)\s*$")


def parse_terms(text: str, arity: int, line: int = 0, col: int = 0) -> Terms:
    out = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        m = _TERM.match(part)
        if not m:
            raise ManifestError(f"bad term {part.strip()!r}", line, col)
        exp = tuple(int(x) for x in m.group(1).replace(" ", "").split(",") if x)
        if len(exp) != arity:
            raise ManifestError(f"term {part.strip()!r} needs {arity} exponents", line, col)
        if exp in out:
            raise ManifestError(f"repeated exponent {exp}", line, col)
        try:
            out[exp] = parse_gaussian(m.group(2))
        except SeriesError as e:
            raise ManifestError(str(e), line, col) from None
    return tuple(sorted(out.items()))


def format_terms(terms: Terms) -> str:
    return "; ".join(f"({','.join(map(str, e))}) -> {format_gaussian(c)}" for e, c in terms)


def _int(v: str, line: int, col: int) -> int:
    try:
        return int(v)
    except ValueError:
        raise ManifestError(f"expected an integer, got {v!r}", line, col) from None


def parse_manifest(text: str) -> Manifest:
    sections: List[Tuple[str, int, Dict[str, Tuple[str, int, int]], List[Tuple[str, int, int]]]] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        s = line.strip()
        col = len(line) - len(line.lstrip()) + 1
        if s.startswith("["):
            if not s.endswith("]"):
                raise ManifestError("unterminated section header", ln, col)
            kind = s[1:-1].strip()
            if kind not in SECTION_KEYS:
                raise ManifestError(f"unknown section [{kind}]", ln, col + 1)
            if kind == "pipeline" and any(k == "pipeline" for k, *_ in sections):
                raise ManifestError("duplicate [pipeline] section", ln, col)
            sections.append((kind, ln, {}, []))
            continue
        if "=" not in s:
            raise ManifestError("expected key = value", ln, col)
        if not sections:
            raise ManifestError("key outside of a section", ln, col)
        key, value = s.split("=", 1)
        key, value = key.strip(), value.strip()
        kind, _, kv, steps = sections[-1]
        if key not in SECTION_KEYS[kind]:
            raise ManifestError(f"unknown key {key!r} in [{kind}]", ln, col)
        vcol = line.index("=") + 2 + (len(line.split("=", 1)[1]) - len(line.split("=", 1)[1].lstrip()))
        if kind == "pipeline" and key == "step":
            steps.append((value, ln, vcol))
            continue
        if key in kv:
            raise ManifestError(f"duplicate key {key!r}", ln, col)
        kv[key] = (value, ln, vcol)

    man = Manifest()
    names: Dict[str, int] = {}
    for kind, ln, kv, steps in sections:
        if kind == "pipeline":
            if "seed" in kv:
                man.seed = _int(*kv["seed"])
            if "trunc" in kv:
                man.trunc = _int(*kv["trunc"])
            man.steps = [_parse_step(*st) for st in steps]
            continue
        if "name" not in kv:
            raise ManifestError(f"[{kind}] section without a name", ln, 1)
        name, nl, nc = kv["name"]
        if not re.match(r"^[A-Za-z_][\w.-]*$", name):
            raise ManifestError(f"bad name {name!r}", nl, nc)
        if name in names:
            raise ManifestError(f"duplicate name {name!r} (first defined on line {names[name]})", nl, nc)
        names[name] = nl
        if "vars" in kv and kind in DEFAULT_VARS:
            v, vl, vc = kv["vars"]
            if [x.strip() for x in v.split(",")] != [x.strip() for x in DEFAULT_VARS[kind].split(",")]:
                raise ManifestError(f"[{kind}] vars must be {DEFAULT_VARS[kind]}", vl, vc)
        trunc = _int(*kv["trunc"]) if "trunc" in kv else None
        if kind == "hypersurface":
            if ("terms" in kv) == ("corpus" in kv):
                raise ManifestError("hypersurface needs exactly one of terms, corpus", ln, 1)
            terms = parse_terms(*kv["terms"][:1], 3, *kv["terms"][1:]) if "terms" in kv else ()
            corpus = kv["corpus"][0] if "corpus" in kv else None
            if corpus is not None:
                from .corpus import CORPUS
                if corpus not in CORPUS:
                    raise ManifestError(f"unknown corpus entry {corpus!r}", *kv["corpus"][1:])
            man.hypersurfaces[name] = HypersurfaceSpec(name, terms, corpus, trunc)
        elif kind == "map":
            explicit = "F" in kv or "G" in kv
            if explicit == ("random" in kv) or (explicit and not ("F" in kv and "G" in kv)):
                raise ManifestError("map needs F and G, or random", ln, 1)
            if explicit and trunc is None:
                raise ManifestError("explicit map needs trunc", ln, 1)
            F = parse_terms(kv["F"][0], 2, *kv["F"][1:]) if "F" in kv else ()
            G = parse_terms(kv["G"][0], 2, *kv["G"][1:]) if "G" in kv else ()
            perturb = ()
            if "perturb" in kv:
                perturb = _parse_perturb(*kv["perturb"])
            man.maps[name] = MapSpec(name, F, G, _int(*kv["random"]) if "random" in kv else None,
                                     _int(*kv["degree"]) if "degree" in kv else 2, trunc, perturb)
        else:
            if "kind" not in kv:
                raise ManifestError("series needs a kind", ln, 1)
            sk, sl, sc = kv["kind"]
            if sk not in SERIES_KINDS:
                raise ManifestError(f"unknown series kind {sk!r}", sl, sc)
            coeffs: Tuple[Gaussian, ...] = ()
            if sk == "coefficients":
                if "coeffs" not in kv:
                    raise ManifestError("coefficient series needs coeffs", ln, 1)
                cv, cl, cc = kv["coeffs"]
                try:
                    coeffs = tuple(parse_gaussian(x) for x in cv.split(";") if x.strip())
                except SeriesError as e:
                    raise ManifestError(str(e), cl, cc) from None
            elif "coeffs" in kv:
                raise ManifestError("coeffs only allowed for kind coefficients", *kv["coeffs"][1:])
            count = _int(*kv["count"]) if "count" in kv else (len(coeffs) or 30)
            man.series[name] = SeriesSpec(name, sk, count, coeffs)

    for st in man.steps:
        for key, value in st.args:
            if key in REFS and value not in getattr(man, REFS[key]):
                raise ManifestError(f"unresolved reference {key}={value}", st.line, 1)
        missing = REQUIRED[st.command] - {k for k, _ in st.args}
        if missing:
            raise ManifestError(f"step {st.command} missing {sorted(missing)}", st.line, 1)
    for h in man.hypersurfaces.values():
        if h.trunc is not None and man.trunc is not None and h.trunc < man.trunc:
            raise ManifestError(f"hypersurface {h.name} trunc {h.trunc} below pipeline trunc {man.trunc}")
    return man


def _parse_perturb(value: str, line: int, col: int):
    out = []
    for part in value.split(";"):
        if not part.strip():
            continue
        comp, _, rest = part.partition(":")
        comp = comp.strip()
        if comp not in ("F", "G"):
            raise ManifestError(f"perturbation must start with F: or G:, got {part.strip()!r}", line, col)
        ((e, c),) = parse_terms(rest, 2, line, col)
        out.append((comp, e, c))
    return tuple(out)


def _parse_step(value: str, line: int, col: int) -> Step:
    toks = value.split()
    if not toks:
        raise ManifestError("empty step", line, col)
    cmd = toks[0]
    if cmd not in COMMANDS:
        raise ManifestError(f"unknown command {cmd!r}", line, col)
    args = []
    seen = set()
    pos = col + len(cmd) + 1
    for tok in toks[1:]:
        if "=" not in tok:
            raise ManifestError(f"expected key=value, got {tok!r}", line, pos)
        k, v = tok.split("=", 1)
        if k not in COMMANDS[cmd]:
            raise ManifestError(f"unknown option {k!r} for {cmd}", line, pos)
        if k in seen:
            raise ManifestError(f"duplicate option {k!r}", line, pos)
        seen.add(k)
        args.append((k, v))
        pos += len(tok) + 1
    return Step(cmd, tuple(args), line)


def serialize_manifest(m: Manifest) -> str:
    out: List[str] = []
    for h in m.hypersurfaces.values():
        out += ["[hypersurface]", f"name = {h.name}"]
        if h.trunc is not None:
            out.append(f"trunc = {h.trunc}")
        out.append(f"corpus = {h.corpus}" if h.corpus else f"terms = {format_terms(h.terms)}")
        out.append("")
    for p in m.maps.values():
        out += ["[map]", f"name = {p.name}"]
        if p.trunc is not None:
            out.append(f"trunc = {p.trunc}")
        if p.random is not None:
            out += [f"random = {p.random}", f"degree = {p.degree}"]
        else:
            out += [f"F = {format_terms(p.F)}", f"G = {format_terms(p.G)}"]
        if p.perturb:
            out.append("perturb = " + "; ".join(f"{c}:({','.join(map(str, e))}) -> {format_gaussian(v)}"
                                                for c, e, v in p.perturb))
        out.append("")
    for s in m.series.values():
        out += ["[series]", f"name = {s.name}", f"kind = {s.kind}", f"count = {s.count}"]
        if s.coeffs:
            out.append("coeffs = " + "; ".join(format_gaussian(c) for c in s.coeffs))
        out.append("")
    if m.steps or m.seed is not None or m.trunc is not None:
        out.append("[pipeline]")
        if m.seed is not None:
            out.append(f"seed = {m.seed}")
        if m.trunc is not None:
            out.append(f"trunc = {m.trunc}")
        out += [f"step = {s.text()}" for s in m.steps]
    return "\n".join(out).rstrip() + "\n"
