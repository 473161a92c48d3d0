"""Command-line front end.

Exit status: 0 success, 2 unparseable input, 3 violated precondition,
4 an Undetermined verdict when --strict is given.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from importlib import resources
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO

from .exactalg import AbHom
from .simplicial import (CoefficientGroup, SimplicialComplex, SimplicialPair, cohomology,
                         les_is_exact, les_of_pair)
from .telescope import (SimplicialTelescope, borsuk_eilenberg, classify, hopf_bracket, milnor,
                        telescope_from_json)
from .torsionfree import ext_to_Z, group_from_json, hom_to_Z
from .towers import (AbTower, TowerCocycle, is_coboundary, lim, lim1_descriptor, mittag_leffler,
                     probe_depth)

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_UNDETERMINED = 0, 2, 3, 4


class CliParseError(Exception):
    def __init__(self, message: str, position: Optional[str] = None):
        super().__init__(message)
        self.position = position

    def __str__(self):
        base = super().__str__()
        return f"{self.position}: {base}" if self.position else base


CITATIONS = {
    "cohomology": ["simplicial cohomology from alternating cochains", "Smith normal form over Z"],
    "les": ["long exact cohomology sequence of a simplicial pair", "connecting map by the snake lemma"],
    "tower": ["Mittag-Leffler condition forces lim^1 = 0; for countable towers it is equivalent"],
    "ext": ["Jensen: lim^1 of Hom(Lambda_n, Z) is Ext(colim Lambda_n, Z)",
            "finite-rank torsion-free Lambda: Ext(Lambda, Z) = 0 iff Lambda is free"],
    "hom": ["Hom(colim Lambda_n, Z) = lim Hom(Lambda_n, Z)"],
    "classify": ["Baer: rank-1 torsion-free groups are classified by types",
                 "telescopes of nontrivial sphere or torus sequences are classified by the colimit group"],
    "telescope": ["Milnor exact sequence 0 -> lim^1 H^(q-1) -> H^q -> lim H^q -> 0"],
    "borsuk-eilenberg": ["the p-adic solenoid complement is a telescope of degree-p circle maps",
                         "Milnor exact sequence", "Hopf: maps to S^2 are classified by H^2",
                         "Ext(Z[1/p], Z) classification is essentially hyperfinite and not smooth"],
}


@dataclass
class Report:
    verb: str
    inputs: list = field(default_factory=list)
    options: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    citations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"verb": self.verb, "inputs": self.inputs, "options": self.options,
                "results": self.results, "citations": self.citations}


# ---------------------------------------------------------------------------
# input parsing


def parse_range(text: str) -> tuple[int, int]:
    """``a..b`` (inclusive) or a single degree."""
    if ".." not in text:
        if not text.strip().isdigit():
            raise CliParseError(f"bad degree {text!r}", "--range position 0")
        q = int(text)
        return q, q
    lo, _, hi = text.partition("..")
    if not lo.isdigit():
        raise CliParseError(f"bad lower bound in {text!r}", "--range position 0")
    if not hi.isdigit():
        raise CliParseError(f"bad upper bound in {text!r}", f"--range position {len(lo) + 2}")
    a, b = int(lo), int(hi)
    if a > b:
        raise CliParseError(f"empty range {text!r}", "--range position 0")
    return a, b


def parse_coeff(text: str) -> CoefficientGroup:
    try:
        return CoefficientGroup.parse(text)
    except ValueError as exc:
        raise CliParseError(str(exc), "--coeff") from None


class _Inputs:
    """Loads JSON files, remembering their digests."""

    def __init__(self):
        self.digests: list[dict] = []

    def load(self, path: str):
        try:
            with open(path, "rb") as fh:
                raw = fh.read()
        except OSError as exc:
            raise CliParseError(f"cannot read input: {exc.strerror}", path) from None
        self.digests.append({"name": os.path.basename(path), "sha256": hashlib.sha256(raw).hexdigest()})
        try:
            return json.loads(raw.decode("utf-8"))
        except json.JSONDecodeError as exc:
            raise CliParseError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from None
        except UnicodeDecodeError as exc:
            raise CliParseError("input is not UTF-8", f"{path}:byte {exc.start}") from None

    def build(self, path: str, builder, needs: Sequence[str] = ()):
        """Load ``path`` and build from it; ``needs`` lists alternative required top-level keys."""
        obj = self.load(path)
        if not isinstance(obj, dict):
            raise CliParseError("expected a JSON object at top level", f"{path}:1:1")
        if needs and not any(k in obj for k in needs):
            raise CliParseError(f"missing key {' or '.join(repr(k) for k in needs)}", path)
        try:
            return builder(obj)
        except (KeyError, TypeError, AttributeError, IndexError) as exc:
            raise CliParseError(f"malformed input ({type(exc).__name__}: {exc})", path) from None


# ---------------------------------------------------------------------------
# verbs


_COMPLEX = ("facets",)


def _hom_json(label: str, f: AbHom) -> dict:
    return {"map": label, "source": str(f.source), "target": str(f.target), "matrix": f.matrix.to_rows()}


def _cmd_cohomology(args, inp: _Inputs, rep: Report):
    K = inp.build(args.complex, SimplicialComplex.from_json, _COMPLEX)
    sub = inp.build(args.pair, SimplicialComplex.from_json, _COMPLEX) if args.pair else None
    if sub is not None:
        SimplicialPair(K, sub)
    G = parse_coeff(args.coeff)
    lo, hi = parse_range(args.range or f"0..{max(K.dimension, 0)}")
    rep.options.update({"coeff": str(G), "range": [lo, hi], "relative": sub is not None})
    rep.results["groups"] = [{"q": q, "group": str(cohomology(K, q, G, sub))} for q in range(lo, hi + 1)]


def _cmd_les(args, inp: _Inputs, rep: Report):
    K = inp.build(args.complex, SimplicialComplex.from_json, _COMPLEX)
    L = inp.build(args.sub, SimplicialComplex.from_json, _COMPLEX)
    pair = SimplicialPair(K, L)
    G = parse_coeff(args.coeff)
    _, hi = parse_range(args.range or f"0..{max(K.dimension, 0)}")
    rep.options.update({"coeff": str(G), "max_degree": hi})
    maps = les_of_pair(pair, G, hi)
    labels = []
    for n in range(hi + 1):
        labels += [f"H^{n}(K,L) -> H^{n}(K)", f"H^{n}(K) -> H^{n}(L)"]
        if n < hi:
            labels.append(f"H^{n}(L) -> H^{n + 1}(K,L)")
    rep.results["sequence"] = [_hom_json(lbl, f) for lbl, f in zip(labels, maps)]
    rep.results["exact"] = les_is_exact(maps)


def _cmd_tower(args, inp: _Inputs, rep: Report):
    T = inp.build(args.tower, AbTower.from_json, ("prefix", "tail"))
    depth = probe_depth(args.depth)
    rep.options.update({"action": args.action, "depth": depth})
    if args.action == "lim":
        rep.results["lim"] = lim(T).to_json()
    elif args.action == "lim1":
        rep.results["lim1"] = lim1_descriptor(T, depth).to_json()
    elif args.action == "ml":
        rep.results["mittag_leffler"] = mittag_leffler(T, depth).to_json()
    else:
        if not args.cocycle:
            raise CliParseError("coboundary needs a cocycle file", "argv")
        h = inp.build(args.cocycle, lambda o: TowerCocycle.from_json(T, o),
                      ("eventually_zero", "eventually_periodic"))
        rep.results["coboundary"] = is_coboundary(h, depth).to_json()


def _cmd_ext(args, inp: _Inputs, rep: Report):
    G = inp.build(args.group, group_from_json, ("type",))
    rep.results["ext"] = ext_to_Z(G).to_json()


def _cmd_hom(args, inp: _Inputs, rep: Report):
    G = inp.build(args.group, group_from_json, ("type",))
    rep.results["hom"] = str(hom_to_Z(G))
    rep.results["source"] = G.to_json()


def _load_telescope(inp: _Inputs, path: str):
    base = os.path.dirname(path) or "."
    return inp.build(path, lambda o: telescope_from_json(o, base), ("kind",))


def _cmd_classify(args, inp: _Inputs, rep: Report):
    a = _load_telescope(inp, args.telA)
    b = _load_telescope(inp, args.telB)
    rep.results["classification"] = classify(a, b).to_json()


def _cmd_telescope(args, inp: _Inputs, rep: Report):
    tel = _load_telescope(inp, args.telescope)
    G = parse_coeff(args.coeff)
    dim = max(K.dimension for K in tel.complexes) if isinstance(tel, SimplicialTelescope) else tel.d
    lo, hi = parse_range(args.range or f"0..{dim + 2}")
    depth = probe_depth(args.depth)
    rep.options.update({"coeff": str(G), "range": [lo, hi], "depth": depth})
    rep.results["milnor"] = [milnor(tel, q, G, depth).to_json() for q in range(lo, hi + 1)]
    if args.hopf:
        rep.results["hopf"] = hopf_bracket(tel, dim, G)
        rep.citations.append("Hopf: maps into S^(d+1) are classified by H^(d+1) when higher cohomology vanishes")


def _cmd_borsuk(args, inp: _Inputs, rep: Report):
    depth = probe_depth(args.depth)
    rep.options.update({"prime": args.prime, "depth": depth})
    rep.results.update(borsuk_eilenberg(args.prime, depth))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON document")
    common.add_argument("--strict", action="store_true", help="exit 4 on any Undetermined verdict")
    common.add_argument("--depth", type=int, default=None, help="tower probe depth")

    p = argparse.ArgumentParser(prog="telescoped", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("cohomology", parents=[common], help="cohomology of a complex or pair")
    c.add_argument("complex")
    c.add_argument("--pair", help="subcomplex for relative cohomology")
    c.add_argument("--coeff", default="Z")
    c.add_argument("--range")
    c.set_defaults(func=_cmd_cohomology)

    c = sub.add_parser("les", parents=[common], help="long exact sequence of a pair")
    c.add_argument("complex")
    c.add_argument("sub")
    c.add_argument("--coeff", default="Z")
    c.add_argument("--range")
    c.set_defaults(func=_cmd_les)

    c = sub.add_parser("tower", parents=[common], help="lim, lim^1, Mittag-Leffler, coboundaries")
    c.add_argument("action", choices=["lim", "lim1", "ml", "coboundary"])
    c.add_argument("tower")
    c.add_argument("cocycle", nargs="?")
    c.set_defaults(func=_cmd_tower)

    c = sub.add_parser("ext", parents=[common], help="Ext(G, Z) descriptor")
    c.add_argument("group")
    c.set_defaults(func=_cmd_ext)

    c = sub.add_parser("hom", parents=[common], help="Hom(G, Z)")
    c.add_argument("group")
    c.set_defaults(func=_cmd_hom)

    c = sub.add_parser("classify", parents=[common], help="homotopy classification of two telescopes")
    c.add_argument("telA")
    c.add_argument("telB")
    c.set_defaults(func=_cmd_classify)

    c = sub.add_parser("telescope", parents=[common], help="Milnor decomposition of a telescope")
    c.add_argument("telescope")
    c.add_argument("--coeff", default="Z")
    c.add_argument("--range")
    c.add_argument("--hopf", action="store_true", help="add the Hopf bracket report")
    c.set_defaults(func=_cmd_telescope)

    c = sub.add_parser("borsuk-eilenberg", parents=[common], help="solenoid complement report")
    c.add_argument("--prime", type=int, required=True)
    c.set_defaults(func=_cmd_borsuk)
    return p


# ---------------------------------------------------------------------------
# output


def _has_undetermined(obj) -> bool:
    if isinstance(obj, dict):
        return any(_has_undetermined(v) for v in obj.values())
    if isinstance(obj, list):
        return any(_has_undetermined(v) for v in obj)
    return obj == "Undetermined"


def _flatten(obj, prefix: str = ""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, json.dumps(obj, sort_keys=True)


def render_human(report: dict) -> str:
    lines = [f"telescoped {report['verb']}"]
    for item in report["inputs"]:
        lines.append(f"  input {item['name']}  sha256 {item['sha256'][:16]}")
    for key, val in _flatten(report["options"]):
        lines.append(f"  option {key} = {val}")
    lines.append("results:")
    for key, val in _flatten(report["results"]):
        lines.append(f"  {key} = {val}")
    lines.append("citations:")
    for c in report["citations"]:
        lines.append(f"  - {c}")
    return "\n".join(lines) + "\n"


def report_schema() -> dict:
    """The JSON schema that every ``--json`` report satisfies."""
    return json.loads(resources.files("telescoped").joinpath("report.schema.json").read_text())


def render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def run(argv: Sequence[str], stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    rep = Report(args.verb, citations=list(CITATIONS[args.verb]))
    inp = _Inputs()
    try:
        args.func(args, inp, rep)
    except CliParseError as exc:
        print(f"parse error: {exc}", file=stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"precondition violated: {exc}", file=stderr)
        return EXIT_PRECONDITION
    rep.inputs = inp.digests
    doc = rep.to_json()
    stdout.write(render_json(doc) if args.json else render_human(doc))
    if args.strict and _has_undetermined(doc["results"]):
        print("undetermined result under --strict", file=stderr)
        return EXIT_UNDETERMINED
    return EXIT_OK


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
