"""Command line front end: ``multloop catalog`` and ``multloop verify``.

Every check becomes one JSON record; the exit code is 0 when each record
matches its catalog expectation, 1 on any mismatch and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from . import exprdsl, groupcat, kepka, liealg, loopcore
from .numerics import DEFAULT_SEED, DELTA_OBS, TAU_FD, TAU_GRP, TAU_LOOP
from .report import Report

SCHEMA = "multloop/1"


class UnknownTarget(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    seed: int = DEFAULT_SEED
    tol_grp: float = TAU_GRP
    tol_loop: float = TAU_LOOP
    tol_fd: float = TAU_FD
    delta_obs: float = DELTA_OBS
    samples: int = 1000
    box: float = 2.0
    output: str | None = None
    timing: bool = False

    def __post_init__(self):
        for name in ("tol_grp", "tol_loop", "tol_fd", "delta_obs", "box"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")


# --- suites --------------------------------------------------------------------------


def _parse_params(text: str) -> dict[str, str]:
    out = {}
    for part in filter(None, text.split(",")):
        if "=" not in part:
            raise UnknownTarget(f"parameter {part!r} is not of the form name=value")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def algebra_reports(name: str, params: dict[str, str] | None = None) -> list[Report]:
    try:
        alg = liealg.get(name, **{k: Fraction(v) for k, v in (params or {}).items()})
    except KeyError:
        raise UnknownTarget(f"unknown algebra {name!r}") from None
    fp = liealg.fingerprint(alg)
    info = {"dim": alg.dim, "stub": alg.is_stub, "fingerprint": [fp.dim, list(fp.derived), list(fp.lower_central),
                                                                  fp.center_dim, fp.commutator_dim,
                                                                  fp.commutator_abelian]}
    anti = liealg.antisymmetry_defect(alg)
    jac = liealg.jacobi_check(alg)
    return [Report("antisymmetry", name, anti == 0, float(anti), 0.0, "", params=info),
            Report("jacobi", name, jac, 0.0 if jac else 1.0, 0.0, "", params=info)]


def algebra_claims() -> list[Report]:
    """The exact statements about named algebras the suite pins down."""
    f4 = liealg.get("F4")
    l2 = liealg.get("l2")
    m2 = liealg.get("mult2")
    cls = liealg.nilpotency_class(f4)
    cen = liealg.center(m2)
    e5 = liealg.Subspace.span([liealg.e(5, 5)], 5)
    return [
        Report("nilpotency_class", "F4", cls == 3, float(abs((cls or 0) - 3)), 0.0, "", params={"class": cls}),
        Report("solvable_not_nilpotent", "l2", liealg.is_solvable(l2) and not liealg.is_nilpotent(l2), 0.0, 0.0, "",
               params={"derived": liealg.series(l2, "derived").dims,
                       "lower_central": liealg.series(l2, "lower_central").dims}),
        Report("center", "mult2", cen == e5, float(abs(cen.dim - 1)), 0.0, "", params={"center_dim": cen.dim}),
    ]


def group_reports(name: str, cfg: RunConfig, params: dict[str, str] | None = None) -> list[Report]:
    try:
        law = groupcat.get_law(name, **{k: float(v) for k, v in (params or {}).items()})
    except KeyError:
        raise UnknownTarget(f"unknown group law {name!r}") from None
    res = groupcat.law_axioms(law, cfg.samples, cfg.box, cfg.seed)
    worst = max(res, key=res.get)
    ax = Report("group_axioms", name, res[worst] < cfg.tol_grp, res[worst], cfg.tol_grp,
                params={"samples": cfg.samples, "box": cfg.box, "worst": worst, **res})
    err = groupcat.tangent_rounding_error(law)
    tang = groupcat.tangent_algebra(law)
    ref = law.reference_algebra()
    match = tang.c == ref.c
    tr = Report("tangent_algebra", name, match and err < cfg.tol_fd, err, cfg.tol_fd,
                params={"reference": law.lie_algebra_ref, "exact_match": match})
    return [ax, tr]


def _loop_for(spec: str) -> loopcore.LoopLaw:
    if spec in ("case1", "case2"):
        return loopcore.loop_from_section(loopcore.case_section(int(spec[-1])))
    fam, _, rest = spec.partition(":")
    if fam not in loopcore.FAMILIES:
        raise UnknownTarget(f"unknown loop family {fam!r}")
    _, pname, _ = loopcore.FAMILIES[fam]
    expr = rest
    if "=" in rest:
        params = _parse_params(rest)
        if set(params) != {pname}:
            raise UnknownTarget(f"{fam} takes exactly one parameter {pname}=<expr>")
        expr = params[pname]
    if not expr:
        raise UnknownTarget(f"{fam} needs {pname}=<expr>")
    exprdsl.parse(expr)  # surface syntax errors before building the loop
    return loopcore.get_family(fam, expr)


def loop_reports(spec: str, cfg: RunConfig) -> list[Report]:
    loop = _loop_for(spec)
    pts = loopcore.default_points(box=cfg.box, n_random=min(cfg.samples, 500), seed=cfg.seed)
    out = [loopcore.axioms_check(loop, pts, seed=cfg.seed, tol=cfg.tol_loop)]
    solver_ok = np.isfinite(out[0].max_residual)
    if solver_ok:
        assoc = loopcore.associator_report(loop, pts, seed=cfg.seed, tol=cfg.tol_loop)
        assoc.expected = None
        out.append(assoc)
        for d in loop.central_dirs:
            nc = loopcore.nilpotency_class2_check(loop, d, pts, seed=cfg.seed, tol=cfg.tol_loop)
            nc.expected = None
            out.append(nc)
    return out


def kepka_reports(name: str, cfg: RunConfig) -> list[Report]:
    if name not in kepka.CASES:
        raise UnknownTarget(f"unknown kepka case {name!r}")
    return kepka.run_case(name, seed=cfg.seed, tol=cfg.tol_grp)


def obstruction_reports(name: str, cfg: RunConfig) -> list[Report]:
    names = list(kepka.OBSTRUCTIONS) if name == "all" else [name]
    for n in names:
        if n not in kepka.OBSTRUCTIONS:
            raise UnknownTarget(f"unknown obstruction {n!r}")
    return [kepka.obstruction_report(n, seed=cfg.seed, delta=cfg.delta_obs) for n in names]


def niemenmaa_reports(name: str) -> list[Report]:
    names = list(kepka.NIEMENMAA_PAIRS) if name == "all" else [name]
    for n in names:
        if n not in kepka.NIEMENMAA_PAIRS:
            raise UnknownTarget(f"unknown niemenmaa pair {n!r}")
    return [kepka.niemenmaa_pair(n) for n in names]


def loop_claims(cfg: RunConfig) -> list[Report]:
    """Loop statements with catalog expectations attached."""
    out = []
    pts = loopcore.default_points(box=cfg.box, seed=cfg.seed)
    sq = loopcore.family_a("z^2")
    out.append(loopcore.axioms_check(sq, pts, seed=cfg.seed, tol=cfg.tol_loop))
    assoc = loopcore.associator_report(sq, pts, seed=cfg.seed)
    out.append(Report("properness", "family_a f=z^2", assoc.max_residual > 0.1, assoc.max_residual, 0.1, ">",
                      assoc.witnesses, assoc.params))
    out.append(loopcore.nilpotency_class2_check(sq, (0, 1, 0), pts, seed=cfg.seed, tol=cfg.tol_loop))
    lin = loopcore.associator_report(loopcore.family_a("z"), pts, seed=cfg.seed, tol=cfg.tol_loop)
    lin.case = "family_a f=z"
    out.append(lin)
    c1 = loopcore.loop_from_section(loopcore.case_section(1))
    out.append(loopcore.axioms_check(c1, pts, seed=cfg.seed, tol=cfg.tol_loop))
    out.append(loopcore.nilpotency_class2_check(c1, (0, 0, 1), pts, seed=cfg.seed, tol=cfg.tol_loop))
    return out


def functional_claims(cfg: RunConfig) -> list[Report]:
    out = []
    pairs = np.random.default_rng(cfg.seed).uniform(-2, 2, (2, 200))
    for c in (-2, 0, 3):
        f = f"{c}*(1-exp(-z))" if c >= 0 else f"-{-c}*(1-exp(-z))"
        r = loopcore.functional_residual(f, pairs)
        out.append(Report("functional_equation", f"f={f}", r < 1e-12, r, 1e-12, "<", params={"pairs": 200}))
    r = loopcore.functional_residual("z", pairs)
    out.append(Report("functional_equation", "f=z", r >= 0.1, r, 0.1, ">=", params={"pairs": 200}))
    w = loopcore.bijectivity_witness("z^2")
    ok = isinstance(w, loopcore.Witness) and (w.u, w.z1, w.z2) == (1.0, 0.0, -1.0)
    rep = Report("bijectivity_witness", "f=z^2", ok, getattr(w, "residual", float("nan")), cfg.tol_loop, "<")
    if isinstance(w, loopcore.Witness):
        rep.witness("u, x0, y0, z1, z2", [w.u, w.x0, w.y0, w.z1, w.z2])
    out.append(rep)
    return out


def repro_all(cfg: RunConfig) -> list[Report]:
    out: list[Report] = []
    for name in sorted(liealg.CATALOG):
        out.extend(algebra_reports(name))
    out.extend(algebra_claims())
    for name in groupcat.LAW_FACTORIES:
        out.extend(group_reports(name, cfg))
    for name in sorted(kepka.CASES):
        out.extend(kepka_reports(name, cfg))
    out.extend(niemenmaa_reports("all"))
    out.extend(obstruction_reports("all", cfg))
    out.extend(loop_claims(cfg))
    out.extend(functional_claims(cfg))
    return out


def run_target(target: str, cfg: RunConfig) -> list[Report]:
    kind, _, rest = target.partition(":")
    if kind == "repro" and rest == "all":
        return repro_all(cfg)
    if not rest:
        raise UnknownTarget(f"target {target!r} needs a name after ':'")
    if kind == "algebra":
        name, _, p = rest.partition(":")
        return algebra_reports(name, _parse_params(p))
    if kind == "group":
        name, _, p = rest.partition(":")
        return group_reports(name, cfg, _parse_params(p))
    if kind == "loop":
        return loop_reports(rest, cfg)
    if kind == "kepka":
        return kepka_reports(rest, cfg)
    if kind == "obstruction":
        return obstruction_reports(rest, cfg)
    if kind == "niemenmaa":
        return niemenmaa_reports(rest)
    raise UnknownTarget(f"unknown target kind {kind!r}")


# --- catalog listing ---------------------------------------------------------------------


def catalog_entries(filt: str = "") -> list[dict]:
    """One entry per catalog name; a name used by several kinds lists them all."""
    entries: dict[str, dict] = {}

    def add(name, kind, dim, desc):
        e = entries.setdefault(name, {"name": name, "kinds": [], "dim": dim, "description": desc})
        e["kinds"].append(kind)
        if not e["description"]:
            e["description"] = desc

    for name, alg in liealg.CATALOG.items():
        add(name, "algebra", alg.dim, "relations not written out (stub)" if alg.is_stub else "")
    for name in groupcat.LAW_FACTORIES:
        law = groupcat.get_law(name)
        add(name, "group", law.dim, law.description)
    for name, (_, pname, args) in loopcore.FAMILIES.items():
        add(name, "loop", 3, f"section loop family with parameter {pname}({', '.join(args)})")
    for name, case in kepka.CASES.items():
        add(name, "kepka", 5, f"transversals in {case.law_name}" + (f"; {case.note}" if case.note else ""))
    for name, (_, expected) in kepka.NIEMENMAA_PAIRS.items():
        add(name, "niemenmaa", None, "expected to hold" if expected else "expected to fail")
    for name, obs in kepka.OBSTRUCTIONS.items():
        add(name, "obstruction", None, obs.description)
    f = filt.lower()
    return [e for name, e in sorted(entries.items()) if f in name.lower()]


# --- JSON ------------------------------------------------------------------------------------


def _num(x: float) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == int(x) and abs(x) < 1e16:
        return f"{int(x)}.0"
    return format(x, ".17g")


def _dump(v, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_, int, float, np.integer, np.floating)):
        return _num(v)
    if isinstance(v, str):
        import json

        return json.dumps(v, ensure_ascii=False)
    if isinstance(v, Fraction):
        return _dump(str(v), indent, level)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{pad}{_dump(str(k), indent, level + 1)}: {_dump(val, indent, level + 1)}" for k, val in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        seq = list(v)
        if not seq:
            return "[]"
        if all(not isinstance(x, (dict, list, tuple, np.ndarray)) for x in seq):
            return "[" + ", ".join(_dump(x, indent, level + 1) for x in seq) + "]"
        return "[\n" + ",\n".join(pad + _dump(x, indent, level + 1) for x in seq) + "\n" + end + "]"
    return _dump(str(v), indent, level)


def report_record(r: Report, seed: int, runtime_ms: int) -> dict:
    """Canonical field order; params sorted by key."""
    return {
        "check": r.check,
        "case": r.case,
        "passed": bool(r.passed),
        "expected": r.expected,
        "matched": r.matched,
        "max_residual": r.max_residual,
        "tolerance": r.tolerance,
        "relation": r.relation,
        "witnesses": [{"label": lab, "vector": vec} for lab, vec in r.witnesses],
        "params": {k: r.params[k] for k in sorted(r.params)},
        "seed": seed,
        "runtime_ms": runtime_ms,
    }


def render(target: str, cfg: RunConfig, reports: Iterable[Report], runtimes: list[int]) -> str:
    reports = list(reports)
    doc = {
        "schema": SCHEMA,
        "target": target,
        "config": {"seed": cfg.seed, "tol_grp": cfg.tol_grp, "tol_loop": cfg.tol_loop, "tol_fd": cfg.tol_fd,
                   "delta_obs": cfg.delta_obs, "samples": cfg.samples, "box": cfg.box},
        "summary": {"total": len(reports), "matched": sum(r.matched for r in reports),
                    "mismatched": sum(not r.matched for r in reports)},
        "reports": [report_record(r, cfg.seed, ms) for r, ms in zip(reports, runtimes)],
    }
    return _dump(doc, 2, 0) + "\n"


# --- entry point -------------------------------------------------------------------------------


def _seed_default() -> int:
    env = os.environ.get("MULTLOOP_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise SystemExit(f"multloop: MULTLOOP_SEED must be an integer, got {env!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="multloop", description="Verification harness for low-dimensional "
                                "multiplication groups of topological loops.")
    sub = p.add_subparsers(dest="cmd", required=True)
    c = sub.add_parser("catalog", help="list catalog entries whose name contains FILTER")
    c.add_argument("filter", nargs="?", default="")
    c.add_argument("--json", action="store_true", help="print the listing as JSON")
    v = sub.add_parser("verify", help="run a check suite and emit JSON reports")
    v.add_argument("target", help="algebra:<name> | group:<name> | loop:<family>:<param>=<expr> | loop:case1 | "
                                   "kepka:case<i> | obstruction:<name|all> | niemenmaa:<pair|all> | repro:all")
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--samples", type=int, default=1000)
    v.add_argument("--box", type=float, default=2.0)
    v.add_argument("--tol-grp", type=float, default=TAU_GRP)
    v.add_argument("--tol-loop", type=float, default=TAU_LOOP)
    v.add_argument("--tol-fd", type=float, default=TAU_FD)
    v.add_argument("--delta-obs", type=float, default=DELTA_OBS)
    v.add_argument("--json", dest="output", default=None, metavar="PATH", help="write the JSON here, not stdout")
    v.add_argument("--timing", action="store_true", help="record wall-clock runtime_ms (breaks byte equality)")
    return p


def _timed(fn: Callable[[], list[Report]], timing: bool) -> tuple[list[Report], list[int]]:
    t0 = time.perf_counter()
    reps = fn()
    ms = int(round((time.perf_counter() - t0) * 1000)) if timing else 0
    return reps, [ms] * len(reps)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.cmd == "catalog":
        entries = catalog_entries(args.filter)
        if args.json:
            sys.stdout.write(_dump({"schema": SCHEMA, "entries": entries}, 2, 0) + "\n")
        else:
            for e in entries:
                dim = "-" if e["dim"] is None else str(e["dim"])
                sys.stdout.write(f"{e['name']}\t{','.join(e['kinds'])}\t{dim}\t{e['description']}\n")
        return 0
    try:
        cfg = RunConfig(seed=_seed_default() if args.seed is None else args.seed, tol_grp=args.tol_grp,
                        tol_loop=args.tol_loop, tol_fd=args.tol_fd, delta_obs=args.delta_obs,
                        samples=args.samples, box=args.box, output=args.output, timing=args.timing)
        reports, runtimes = _timed(lambda: run_target(args.target, cfg), cfg.timing)
    except (UnknownTarget, exprdsl.DSLError, ValueError) as exc:
        sys.stderr.write(f"multloop: {exc}\n")
        return 2
    text = render(args.target, cfg, reports, runtimes)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(r.matched for r in reports) else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
