"""Command-line experiment runner.

Every subcommand builds an :class:`ExperimentReport` and prints it as JSON, or
writes it as CSV (``--out``/``--format``).  Exit codes: 0 when the experiment's
verdicts all hold, 1 when one fails (the report carries the witness), 2 on
invalid input or a cost-cap refusal.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import closure, core, extensions, orders, patterns, thickness
from .errors import CostCapExceeded, FraisseError


@dataclass
class ExperimentReport:
    experiment: str
    parameters: dict
    verdicts: dict = field(default_factory=dict)
    counters: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    seed: int | None = None
    duration: float | None = None
    rows: list = field(default_factory=list)  # CSV rows, when the experiment defines a table
    columns: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.verdicts.values())

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "experiment": self.experiment,
            "parameters": self.parameters,
            "seed": self.seed,
            "verdicts": self.verdicts,
            "counters": self.counters,
            "witnesses": self.witnesses,
        }
        if self.rows:
            out["columns"] = self.columns
            out["rows"] = self.rows
        if timing:
            out["duration"] = self.duration
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentReport":
        return cls(
            data["experiment"], data["parameters"], data.get("verdicts", {}), data.get("counters", {}),
            data.get("witnesses", {}), data.get("seed"), data.get("duration"),
            data.get("rows", []), data.get("columns", []),
        )


def emit_report(report: ExperimentReport, fmt: str = "json", timing: bool = False) -> bytes:
    """Serialize a report; identical reports give identical bytes."""
    if fmt == "json":
        return (json.dumps(report.to_json(timing), sort_keys=True, indent=2) + "\n").encode()
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if report.rows:
        writer.writerow(report.columns)
        for row in report.rows:
            writer.writerow([row[c] for c in report.columns])
    else:
        writer.writerow(["section", "key", "value"])
        for section in ("parameters", "verdicts", "counters"):
            for key, value in sorted(getattr(report, section).items()):
                writer.writerow([section, key, json.dumps(value)])
    return buf.getvalue().encode()


def load_report(data: bytes) -> ExperimentReport:
    return ExperimentReport.from_json(json.loads(data))


def load_structure(path: str | Path) -> core.FiniteStructure:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise core.StructureError(f"{path}: malformed JSON ({exc})") from exc
    return core.FiniteStructure.from_json(data)


# named hosts and templates

def _named(name: str) -> core.FiniteStructure:
    table = {
        "edge": lambda: core.graph(2, [(0, 1)]),
        "k3": lambda: core.complete(3),
        "k4": lambda: core.complete(4),
        "c5": lambda: core.cycle(5),
        "path3": lambda: core.path(3),
        "path4": lambda: core.path(4),
        "turan6": lambda: core.graph(6, [(a, b) for a in range(3) for b in range(3, 6)]),
        "edge3": lambda: core.hypergraph(3, 3, [(0, 1, 2)]),
        "k4_3": lambda: core.complete(4, 3),
        "pendant3": lambda: core.hypergraph(4, 3, [(0, 1, 2), (1, 2, 3)]),
    }
    if name in table:
        return table[name]()
    if name.endswith(".json"):
        return load_structure(name)
    raise core.StructureError(f"unknown structure {name!r}; known: {', '.join(sorted(table))} or a .json path")


def _parse_class(text: str, r: int | None) -> tuple[str, int | None]:
    flavor, _, arity = text.partition(":")
    if flavor not in core.FLAVORS:
        raise core.StructureError(f"unknown class {text!r}")
    if arity:
        r = int(arity)
    if flavor in ("hypergraph", "krfree") and r is None:
        raise core.StructureError(f"class {flavor} needs r (use {flavor}:r or --r)")
    return flavor, r


def _ints(text: str | None) -> list[int]:
    if not text:
        return []
    return [int(v) for v in text.split(",") if v.strip()]


def _as_krfree(g: core.FiniteStructure, r: int) -> core.FiniteStructure:
    return g if g.flavor == "krfree" else core.FiniteStructure("krfree", g.n, g.edges, r)


# experiments

def run_emb(args) -> ExperimentReport:
    report = ExperimentReport("emb", {})
    if args.source and args.target:
        a, b = _named(args.source), _named(args.target)
        maps = list(core.iter_embedding_maps(a, b))
        report.parameters.update(source=a.to_json(), target=b.to_json())
        report.counters["embeddings"] = len(maps)
        report.witnesses["embeddings"] = [list(f) for f in maps]
        report.verdicts["enumerated"] = True
        return report
    flavor, _ = _parse_class(args.cls, args.r)
    if flavor != "set":
        raise core.StructureError("the dual-map sweep runs on the set class; pass --source/--target for others")
    m, n, u = args.m, args.n, args.universe
    report.parameters.update({"class": flavor, "m": m, "n": n, "universe": u})
    small, big, universe = core.pure_set(m), core.pure_set(n), core.pure_set(u)
    surjective, failures, extensions_ok = 0, [], 0
    for f in core.enumerate_embeddings(small, big):
        verdict = core.dual_surjective(f, universe)
        if verdict:
            surjective += 1
        else:
            failures.append({"f": list(f.map), "unhit": list(verdict.unhit)})
        _, h = core.left_inverse_extension(f)
        if tuple(h.map[v] for v in f.map) == tuple(range(m)):
            extensions_ok += 1
    total = len(core.embedding_index(small, big))
    report.counters.update(maps=total, surjective=surjective, left_inverses=extensions_ok)
    report.verdicts["dual_surjective"] = surjective == total
    report.verdicts["left_inverse"] = extensions_ok == total
    if failures:
        report.witnesses["failures"] = failures
    return report


def run_thick(args) -> ExperimentReport:
    if args.ramsey:
        target, host = args.ramsey
        verdict = thickness.ramsey_partition_check(target, host)
        report = ExperimentReport("thick", {"target": target, "host": host})
        report.verdicts["ramsey_partition"] = verdict.holds
        report.counters["partitions"] = 2 ** (host * (host - 1) // 2)
        if not verdict.holds:
            cells = verdict.color_classes(host)
            report.witnesses["coloring"] = [[list(t) for t in sorted(c.members)] for c in cells]
        return report
    if not args.family:
        raise core.StructureError("thick needs --family FILE or --ramsey TARGET HOST")
    family = core.TupleFamily.from_json(json.loads(Path(args.family).read_text()))
    report = ExperimentReport("thick", {"family": family.to_json(), "level": args.level, "ordered": args.ordered})
    probe = thickness.preimage(family) if args.ordered else family
    witness = thickness.is_thick_upto(probe, args.level)
    report.verdicts["thick"] = witness is not None
    report.witnesses["reason"] = thickness.thickness_reason(probe, args.level)
    if witness is not None:
        report.witnesses["witness"] = list(witness.witness)
    return report


def run_patterns(args) -> ExperimentReport:
    flavor, _ = _parse_class(args.cls, args.r)
    if flavor != "set":
        raise core.StructureError("pattern sweeps are implemented for the set class")
    m, big_n, u = args.m, args.N, args.universe
    report = ExperimentReport("patterns", {"class": flavor, "m": m, "N": big_n, "universe": u})
    source, stage, universe = core.pure_set(m), core.pure_set(big_n), core.pure_set(u)
    order = orders.LinearOrder.natural(u)
    bound = 2 ** math.factorial(m) * math.factorial(big_n)
    counts = {}
    for size in range(len(patterns.all_orders(m)) + 1):
        for chosen in itertools.combinations(sorted(patterns.all_orders(m)), size):
            spec = patterns.MinimalSetSpec(source, frozenset(chosen), order)
            found = patterns.n_patterns(patterns.minimal_set(spec, universe), stage)
            counts[json.dumps([list(e) for e in chosen])] = len(found)
    report.counters["patterns_by_expansion_set"] = counts
    report.counters["per_minimal_set_bound"] = bound
    report.verdicts["within_bound"] = all(c <= bound for c in counts.values())
    if args.full:
        witness = patterns.build_full_pattern_witness(m, stage)
        report.counters["full_witness_blocks"] = len(witness.targets)
        report.verdicts["full_witness"] = witness.verify()
    return report


def run_pestov(args) -> ExperimentReport:
    flavor, r = _parse_class(args.cls, args.r)
    base = r if flavor == "hypergraph" else 2
    report = ExperimentReport("pestov", {"class": args.cls, "n": args.n, "k": args.k, "r": r})
    try:
        crossing = patterns.separation_crossing(flavor, args.n, args.k, r)
    except patterns.NoCrossing as exc:
        report.verdicts["crossing"] = False
        report.witnesses["reason"] = str(exc)
        return report
    report.verdicts["crossing"] = True
    report.counters.update(N=crossing.N, minimal_bound=str(crossing.minimal_bound), dense_bound=str(crossing.dense_bound))
    report.columns = ["class", "m", "n", "k", "N", "minimal_bound", "dense_bound", "crossing_flag"]
    for big_n in range(max(base, args.n), crossing.N + 1):
        upper = patterns.minimal_pattern_bound(args.n, big_n, args.k)
        dense = patterns.dense_pattern_lower_bound(flavor, 2 if flavor == "set" else r, big_n)
        report.rows.append({
            "class": args.cls, "m": base, "n": args.n, "k": args.k, "N": big_n,
            "minimal_bound": str(upper), "dense_bound": str(dense), "crossing_flag": int(dense > upper),
        })
    return report


def run_extend(args) -> ExperimentReport:
    flavor, r = _parse_class(args.cls, args.r)
    host, template = _named(args.host), _named(args.template)
    edge = tuple(_ints(args.edge)) or template.sorted_edges()[0]
    report = ExperimentReport("extend", {"class": args.cls, "r": r, "host": args.host,
                                         "template": args.template, "edge": list(edge)})
    if flavor == "krfree":
        task = extensions.ExtensionTask(_as_krfree(host, r), template, edge, r)
        result = extensions.extend_kr_free(task)
        expected = host.n + result.parts * (result.parts - 1) * (template.n - 2)
    elif flavor in ("hypergraph", "graph"):
        r = r or 2
        task = extensions.ExtensionTask(host, template, edge, r)
        result = extensions.extend_hypergraph(task)
        expected = host.n + result.parts * math.factorial(r) * (template.n - r)
    else:
        raise core.StructureError("extend supports hypergraph:r and krfree:r")
    check = extensions.verify_extension(result, task)
    report.counters.update(D=result.structure.n, C=host.n, B=template.n, parts=result.parts,
                           edges=len(result.structure.edges))
    report.verdicts["verified"] = check.ok
    report.verdicts["size_formula"] = result.structure.n == expected
    report.witnesses["D"] = result.to_json()
    if not check.ok:
        report.witnesses["failing"] = list(check.failing) if check.failing else check.reason
    return report


def run_orders(args) -> ExperimentReport:
    if args.o0 and args.o1:
        o0 = orders.LinearOrder(len(_ints(args.o0)), _ints(args.o0))
        o1 = orders.LinearOrder(len(_ints(args.o1)), _ints(args.o1))
        report = ExperimentReport("orders", {"o0": o0.to_json(), "o1": o1.to_json(), "m": args.m})
        agree = orders.agreement_set(o0, o1, args.m)
        anti = orders.anti_agreement_set(o0, o1, args.m)
        report.counters.update(agreement=len(agree), anti_agreement=len(anti))
        report.witnesses.update(agreement=[list(t) for t in agree], anti_agreement=[list(t) for t in anti])
        report.verdicts["computed"] = True
        return report
    n = args.n
    blocks = orders.BlockPartition(n, tuple(tuple(_ints(b)) for b in (args.blocks or "").split(";") if b.strip()))
    a = _ints(args.A)
    report = ExperimentReport("orders", {"n": n, "A": a, "blocks": blocks.to_json()["blocks"]})
    o0, o1 = orders.build_block_orders(a, blocks)
    agree = orders.agreement_set(o0, o1, 2)
    report.verdicts["agreement_is_tilde"] = agree == orders.tilde(a, blocks)
    report.counters["agreement_pairs"] = len(agree)
    report.witnesses.update(o0=o0.to_json(), o1=o1.to_json(), agreement=[list(t) for t in agree])
    return report


def run_closure(args) -> ExperimentReport:
    u, n, m = args.universe, args.n, args.m
    report = ExperimentReport("closure", {"universe": u, "n": n, "m": m, "trials": args.trials}, seed=args.seed)
    pair = closure.ClosurePair(n, m, u)
    try:
        report.counters["closed_sets"] = len(closure.closed_masks(u, pair))
    except CostCapExceeded:
        # the count is informational; the axiom checks below do not need it
        report.counters["closed_sets"] = None
    failures = []
    for trial in range(args.trials):
        t0 = closure.random_hypergraph(u, n, 0.5, args.seed + trial)
        t1 = closure.random_hypergraph(u, n, 0.5, args.seed + trial + 10**6)
        p0, p1 = closure.psi(t0, m), closure.psi(t1, m)
        checks = {
            "extensive": t0 <= p0,
            "idempotent": closure.psi(p0, m) == p0,
            "monotone": closure.psi(t0 & t1, m) <= p0,
            "meet": closure.psi(t0 & t1, m) <= (p0 & p1),
        }
        bad = [name for name, ok in checks.items() if not ok]
        if bad:
            failures.append({"trial": trial, "failed": bad, "family": [list(t) for t in t0]})
    empty = core.TupleFamily.empty(n, u)
    report.verdicts["axioms"] = not failures
    report.verdicts["psi_empty"] = closure.psi(empty, m) == empty
    if failures:
        report.witnesses["failures"] = failures[:5]
    return report


def run_census(args) -> ExperimentReport:
    u, n, m, ell, k = args.universe, args.n, args.m, args.ell, args.k
    report = ExperimentReport("census", {"universe": u, "n": n, "m": m, "ell": ell, "k": k,
                                         "sample": args.sample, "trials": args.trials if args.sample else None},
                              seed=args.seed)
    result = closure.near_closed_census(u, n, m, ell, k, sample=args.sample, trials=args.trials, seed=args.seed)
    row = result.row()
    report.counters.update({key: str(v) if isinstance(v, int) and v > 2**53 else v for key, v in row.items()})
    report.columns = list(closure.CENSUS_COLUMNS)
    report.rows = [report.counters.copy()]
    if result.sampled:
        report.counters["wilson_interval"] = list(result.interval)
        report.verdicts["sampled"] = True
    else:
        report.verdicts["census_bound"] = result.bound_holds
    return report


RUNNERS = {
    "emb": run_emb, "thick": run_thick, "patterns": run_patterns, "extend": run_extend,
    "orders": run_orders, "closure": run_closure, "census": run_census, "pestov": run_pestov,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--class", dest="cls", default="set", help="set|graph|hypergraph:r|krfree:r")
    common.add_argument("--r", type=int, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--timing", action="store_true", help="include wall-clock duration")

    parser = argparse.ArgumentParser(prog="fraisselab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("emb", parents=[common], help="embeddings and the dual-map sweep")
    p.add_argument("--source")
    p.add_argument("--target")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--universe", type=int, default=5)

    p = sub.add_parser("thick", parents=[common], help="thickness witnesses and the Ramsey partition kernel")
    p.add_argument("--family")
    p.add_argument("--level", type=int, default=3)
    p.add_argument("--ordered", action="store_true")
    p.add_argument("--ramsey", type=int, nargs=2, metavar=("TARGET", "HOST"))

    p = sub.add_parser("patterns", parents=[common], help="N-pattern counts of minimal sets")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--N", type=int, default=4)
    p.add_argument("--universe", type=int, default=8)
    p.add_argument("--full", action="store_true", help="also build the full pattern witness")

    p = sub.add_parser("extend", parents=[common], help="extension lemma constructions")
    p.add_argument("--host", required=True)
    p.add_argument("--template", required=True)
    p.add_argument("--edge", help="designated edge of the template, e.g. 0,1")

    p = sub.add_parser("orders", parents=[common], help="agreement sets and block orders")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--A", default="")
    p.add_argument("--blocks", default="", help="blocks separated by ';', e.g. '2,3;4,5'")
    p.add_argument("--o0")
    p.add_argument("--o1")
    p.add_argument("--m", type=int, default=2)

    p = sub.add_parser("closure", parents=[common], help="closure axioms on random families")
    p.add_argument("--universe", type=int, default=6)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--trials", type=int, default=100)

    p = sub.add_parser("census", parents=[common], help="near-closed census")
    p.add_argument("--universe", type=int, default=5)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--ell", type=int, default=4)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--sample", action="store_true")
    p.add_argument("--trials", type=int, default=1000)

    p = sub.add_parser("pestov", parents=[common], help="pattern-count separation crossing")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--k", type=int, default=1)
    return parser


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        report = RUNNERS[args.command](args)
    except (FraisseError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        offending = getattr(exc, "offending", None)
        suffix = f" (offending: {list(offending)})" if offending is not None else ""
        print(f"fraisselab {args.command}: {exc}{suffix}", file=stderr)
        return 2
    report.duration = time.perf_counter() - start
    if report.seed is None:
        report.seed = args.seed
    fmt = args.format or ("csv" if args.out else "json")
    payload = emit_report(report, fmt, timing=args.timing)
    if args.out:
        Path(args.out).write_bytes(payload)
    else:
        stdout.write(payload.decode())
    return 0 if report.ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
