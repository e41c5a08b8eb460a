"""Command line: predict, build, compare, classgroup and sweep.

Exit codes: 0 success, 1 profile mismatch, 2 usage or parameter error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from math import gcd
from pathlib import Path

from sympy import isprime

from .curve import CurveError, curve_new
from .graph import attach_level_structures, build_crater, check_principal_counts, components
from .qorder import OrderError, QuadOrder, factor_prime
from .report import (
    JobConfig,
    dumps,
    graph_document,
    measurement_block,
    prediction_block,
    profile_diff,
    to_dot,
)
from .resring import KINDS
from .theory import (
    ComponentProfile,
    InertPrimeError,
    ParameterError,
    corollary_gamma0,
    corollary_gamma1,
    crater_data,
    generalized_class_group_orders,
    predict,
)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2

CONFIG_KEYS = ("p", "a", "b", "ell", "N", "kind", "disc", "out", "max_ext_degree", "seed")
DEFAULTS = {"kind": "gamma0", "max_ext_degree": 24, "seed": 0, "out": None}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration


def _add_job_flags(sp: argparse.ArgumentParser, need_curve: bool):
    sp.add_argument("--config", help="JSON file with any of the flags below; explicit flags win")
    sp.add_argument("--p", type=int, help="field characteristic" + ("" if need_curve else " (optional here)"))
    sp.add_argument("--a", type=int, help="curve coefficient a in y^2 = x^3 + ax + b")
    sp.add_argument("--b", type=int, help="curve coefficient b")
    sp.add_argument("--ell", type=int, help="isogeny degree (prime)")
    sp.add_argument("--N", type=int, help="level")
    sp.add_argument("--kind", choices=KINDS, help="level structure type (default gamma0)")
    sp.add_argument("--disc", type=int, help="discriminant of the endomorphism ring on the crater")
    sp.add_argument("--out", help="output path prefix")
    sp.add_argument("--max-ext-degree", dest="max_ext_degree", type=int, help="largest torsion field degree allowed (default 24)")
    sp.add_argument("--seed", type=int, help="seed for randomized subroutines (default 0)")
    sp.add_argument("--json", action="store_true", help="print the report as JSON")


def load_config(args, need_curve: bool) -> JobConfig:
    vals = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(data) - set(CONFIG_KEYS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        vals.update(data)
    for k in CONFIG_KEYS:
        v = getattr(args, k, None)
        if v is not None:
            vals[k] = v
    required = ["ell", "N", "disc"] + (["p", "a", "b"] if need_curve else [])
    missing = [k for k in required if vals.get(k) is None]
    if missing:
        raise UsageError("missing parameters: " + ", ".join("--" + m for m in missing))
    if vals["kind"] not in KINDS:
        raise UsageError(f"kind must be one of {KINDS}")
    cfg = JobConfig(
        p=vals.get("p") or 0,
        a=vals.get("a") or 0,
        b=vals.get("b") or 0,
        ell=int(vals["ell"]),
        N=int(vals["N"]),
        kind=vals["kind"],
        disc=int(vals["disc"]),
        out=vals.get("out"),
        max_ext_degree=int(vals["max_ext_degree"]),
        seed=int(vals["seed"]),
    )
    validate(cfg, need_curve)
    return cfg


def validate(cfg: JobConfig, need_curve: bool):
    D = cfg.disc
    if D >= 0 or D % 4 not in (0, 1):
        raise UsageError(f"--disc {D} is not a negative discriminant")
    if not isprime(cfg.ell):
        raise UsageError(f"--ell {cfg.ell} is not prime")
    if cfg.N < 1:
        raise UsageError("--N must be >= 1")
    if gcd(cfg.N, cfg.ell) != 1:
        raise UsageError(f"N = {cfg.N} and ell = {cfg.ell} must be coprime")
    O = QuadOrder(D)
    if gcd(cfg.N, O.conductor) != 1:
        raise UsageError(f"N = {cfg.N} and the conductor {O.conductor} must be coprime")
    if O.conductor % cfg.ell == 0:
        raise UsageError(f"ell = {cfg.ell} divides the conductor {O.conductor}")
    if need_curve or cfg.p:
        if not isprime(cfg.p) or cfg.p < 5:
            raise UsageError(f"--p {cfg.p} must be a prime >= 5")
        if gcd(cfg.N, cfg.p) != 1:
            raise UsageError(f"N = {cfg.N} and p = {cfg.p} must be coprime")
        if cfg.ell == cfg.p:
            raise UsageError("ell must differ from p")


def parse_profile(text: str) -> dict:
    """'14:3,7:6' -> {14: 3, 7: 6}."""
    out = {}
    try:
        for part in text.split(","):
            s, k = part.split(":")
            out[int(s)] = out.get(int(s), 0) + int(k)
    except ValueError as exc:
        raise UsageError(f"bad profile {text!r}; expected size:count,...") from exc
    return out


# ---------------------------------------------------------------------------
# engines


def run_prediction(cfg: JobConfig) -> dict:
    O = QuadOrder(cfg.disc)
    pred = predict(O, cfg.ell, cfg.N, cfg.kind)
    alts = {}
    if cfg.kind != "gamma0" and cfg.N > 1:
        alts = {g: predict(O, cfg.ell, cfg.N, cfg.kind, gens=g) for g in ("conjugates", "lambda")}
    block = prediction_block(pred, alts)
    n_cl, ray = generalized_class_group_orders(O, cfg.N)
    block["class_groups"] = {"h": O.class_number, "Cl_NO(N)": n_cl, "Cl_O1(N)": ray}
    if cfg.N > 1 and isprime(cfg.N):
        cor = None
        if cfg.kind == "gamma0":
            cor = corollary_gamma0(O, cfg.ell, cfg.N)
        elif cfg.kind == "gamma1" and cfg.N > 2:
            cor = corollary_gamma1(O, cfg.ell, cfg.N)
        if cor is not None:
            entry = {"case": cor.case, "profile": [[s, k] for s, k in cor.profile.counts], "agrees": cor.profile == pred.profile}
            if cor.flagged:
                entry["flag"] = cor.note
            block["closed_form"] = entry
            if cor.profile != pred.profile:
                raise AssertionError(f"closed form {cor.profile} disagrees with the general path {pred.profile}")
    block["_profile"] = pred.profile
    return block


def run_build(cfg: JobConfig):
    E = curve_new(cfg.a, cfg.b, cfg.p)
    C = build_crater(E, cfg.ell, QuadOrder(cfg.disc), cfg.seed)
    G = attach_level_structures(C, cfg.N, cfg.kind, cfg.max_ext_degree, cfg.seed)
    return G


def write_artifacts(G, cfg: JobConfig):
    if not cfg.out:
        return []
    base = Path(cfg.out)
    base.parent.mkdir(parents=True, exist_ok=True)
    paths = [base.with_name(base.name + ".json"), base.with_name(base.name + ".dot")]
    paths[0].write_text(dumps(graph_document(G, cfg)), encoding="utf-8")
    paths[1].write_text(to_dot(G), encoding="utf-8")
    return paths


def _strip(block: dict) -> dict:
    return {k: v for k, v in block.items() if not k.startswith("_")}


def _print(doc: dict, as_json: bool, lines: list[str]):
    if as_json:
        sys.stdout.write(dumps(doc))
    else:
        print("\n".join(lines))


def _fmt_pairs(pairs) -> str:
    return "{" + ", ".join(f"{s}: {k}" for s, k in pairs) + "}"


# ---------------------------------------------------------------------------
# commands


def cmd_predict(args) -> int:
    cfg = load_config(args, need_curve=False)
    block = run_prediction(cfg)
    doc = {"input": cfg.params(), "prediction": _strip(block)}
    lines = [
        f"D = {cfg.disc}, ell = {cfg.ell}: {block['ell_factorization']}, crater {block['shape']} (n = {block['n']})",
        f"lambda = {block['lambda']}, lambda_bar = {block['lambda_bar']}",
        f"NO = {block['N_factorization']}",
    ]
    for r in block["rows"]:
        lines.append(
            f"  a = {r['ideal']:<22} phi_O(a^-1 NO) = {r['phi_O']:<4} m = {r['m']:<3} {r['components']} x size {r['size']}"
        )
    lines.append(f"{cfg.kind}({cfg.N}) profile: {_fmt_pairs(block['profile'])}")
    for k, v in block.items():
        if k.startswith("profile_generators_"):
            lines.append(f"  generators {k[len('profile_generators_'):]}: {_fmt_pairs(v)}")
    cg = block["class_groups"]
    lines.append(f"h(O) = {cg['h']}, |Cl_NO(N)| = {cg['Cl_NO(N)']}, |Cl_O,1(N)| = {cg['Cl_O1(N)']}")
    if "closed_form" in block:
        cf = block["closed_form"]
        lines.append(f"closed form ({cf['case']} N): {_fmt_pairs(cf['profile'])}" + (f"  [flag: {cf['flag']}]" if "flag" in cf else ""))
    if cfg.out:
        Path(cfg.out + ".report.json").write_text(dumps(doc), encoding="utf-8")
    _print(doc, args.json, lines)
    return EXIT_OK


def cmd_build(args) -> int:
    cfg = load_config(args, need_curve=True)
    t = time.perf_counter()
    G = run_build(cfg)
    meas = measurement_block(G)
    paths = write_artifacts(G, cfg)
    doc = {"input": cfg.params(), "measurement": meas}
    lines = [
        f"crater j-cycle {meas['j_cycle']} (n = {meas['n']}, orientation by {meas['orientation']})",
        f"E[{cfg.N}] over F_p^{meas['torsion_field_degree']}; {meas['vertices']} vertices",
        f"{cfg.kind}({cfg.N}) components: {_fmt_pairs(meas['profile'])}",
    ]
    if "profile_l_edges_only" in meas:
        lines.append(f"  l-edges only: {_fmt_pairs(meas['profile_l_edges_only'])}")
    lines += [f"wrote {p}" for p in paths]
    lines.append(f"{time.perf_counter() - t:.2f} s")
    _print(doc, args.json, lines)
    return EXIT_OK


def compare_config(cfg: JobConfig, expect: dict | None = None):
    """(ok, report document, graph)."""
    block = run_prediction(cfg)
    G = run_build(cfg)
    predicted: ComponentProfile = block["_profile"]
    measured = components(G)
    principal_ok = check_principal_counts(G)
    equal = predicted == measured
    verdict = {"equal": equal, "principal_counts_ok": principal_ok}
    if not equal:
        verdict["diff_predicted_vs_measured"] = profile_diff(predicted, measured)
    ok = equal and principal_ok
    if expect is not None:
        exp = ComponentProfile.from_counter(expect, measured.n)
        verdict["expected"] = [[s, k] for s, k in exp.counts]
        verdict["expected_matches"] = exp == measured
        if exp != measured:
            verdict["diff_expected_vs_measured"] = profile_diff(exp, measured)
            ok = False
    doc = {
        "input": cfg.params(),
        "prediction": _strip(block),
        "measurement": measurement_block(G),
        "verdict": verdict,
    }
    return ok, doc, G


def cmd_compare(args) -> int:
    cfg = load_config(args, need_curve=True)
    expect = parse_profile(args.expect) if args.expect else None
    ok, doc, G = compare_config(cfg, expect)
    if cfg.out:
        write_artifacts(G, cfg)
        Path(cfg.out + ".report.json").write_text(dumps(doc), encoding="utf-8")
    v = doc["verdict"]
    lines = [
        f"predicted {_fmt_pairs(doc['prediction']['profile'])}",
        f"measured  {_fmt_pairs(doc['measurement']['profile'])}",
        f"principal vertex counts {'ok' if v['principal_counts_ok'] else 'WRONG'}",
    ]
    if "expected" in v:
        lines.append(f"expected  {_fmt_pairs(v['expected'])} -> {'match' if v['expected_matches'] else 'MISMATCH'}")
    lines.append("OK" if ok else "MISMATCH " + json.dumps({k: v[k] for k in v if k.startswith("diff")}))
    _print(doc, args.json, lines)
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_classgroup(args) -> int:
    D = args.disc
    if D is None or D >= 0 or D % 4 not in (0, 1):
        raise UsageError(f"--disc {D} is not a negative discriminant")
    O = QuadOrder(D)
    cg = O.class_group
    doc = {"D": D, "fundamental_disc": O.fundamental_disc, "conductor": O.conductor, "h": cg.h, "forms": [list(f) for f in cg.forms]}
    lines = [f"D = {D} = {O.conductor}^2 * {O.fundamental_disc}: h = {cg.h}", "forms: " + " ".join(str(tuple(f)) for f in cg.forms)]
    if args.ell is not None:
        if not isprime(args.ell):
            raise UsageError(f"--ell {args.ell} is not prime")
        fp = factor_prime(O, args.ell)
        entry = {"kind": fp.kind, "factorization": repr(fp)}
        lines.append(f"{args.ell}O = {fp!r} ({fp.kind})")
        if fp.kind != "inert":
            cd = crater_data(O, args.ell)
            entry.update(n=cd.n, l=repr(cd.l), lam=O.fmt(cd.lam), lam_bar=O.fmt(cd.lam_bar))
            lines.append(f"l = {cd.l}: order n = {cd.n}; l^{cd.n} = ({O.fmt(cd.lam)})")
            powers = []
            for k in range(1, cd.n):
                I = cd.l**k
                powers.append({"k": k, "ideal": repr(I), "principal": I.is_principal()})
            entry["powers"] = powers
        doc["ell"] = entry
    if args.N is not None:
        if args.N < 1 or gcd(args.N, O.conductor) != 1:
            raise UsageError("--N must be positive and prime to the conductor")
        a, b = generalized_class_group_orders(O, args.N)
        doc["N"] = {"N": args.N, "Cl_NO(N)": a, "Cl_O1(N)": b}
        lines.append(f"N = {args.N}: |Cl_NO(N)| = {a} (class number of the index-{args.N} suborder), |Cl_O,1(N)| = {b}")
    _print(doc, args.json, lines)
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .sweep import sweep_tuples

    kinds = tuple(args.kinds.split(",")) if args.kinds else KINDS
    if any(k not in KINDS for k in kinds):
        raise UsageError(f"--kinds must be drawn from {KINDS}")
    tuples, skipped = sweep_tuples(args.max_ext_degree, kinds)
    failures = []
    rows = []
    t0 = time.perf_counter()
    for t in tuples:
        c = t.curve
        cfg = JobConfig(c.p, c.a, c.b, t.ell, t.N, t.kind, c.D, None, args.max_ext_degree, args.seed)
        ok, doc, _ = compare_config(cfg)
        rows.append({"tuple": t.label(), "ok": ok, "profile": doc["measurement"]["profile"]})
        if not ok:
            failures.append(doc)
        if not args.json:
            print(f"{'ok ' if ok else 'BAD'} {t.label():<52} {_fmt_pairs(doc['measurement']['profile'])}")
    summary = {
        "tuples": len(tuples),
        "failures": len(failures),
        "skipped": [f"p={s.curve.p} ell={s.ell} N={s.N}: {s.reason}" for s in skipped],
        "seconds": round(time.perf_counter() - t0, 1),
    }
    if args.json:
        sys.stdout.write(dumps({"summary": summary, "rows": rows, "failures": failures}))
    else:
        for s in summary["skipped"]:
            print(f"skip {s}")
        print(f"{len(tuples) - len(failures)}/{len(tuples)} tuples agree ({summary['seconds']} s)")
    return EXIT_OK if not failures else EXIT_MISMATCH


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="isocrater", description="Isogeny craters with level structure: predict, build, compare.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("predict", help="component profile from ideal arithmetic")
    _add_job_flags(sp, need_curve=False)
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("build", help="build the level-structure graph with explicit isogenies")
    _add_job_flags(sp, need_curve=True)
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("compare", help="run both engines; exit 1 when they disagree")
    _add_job_flags(sp, need_curve=True)
    sp.add_argument("--expect", help="also require this measured profile, e.g. 14:3,7:6")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("classgroup", help="class group data for a discriminant")
    sp.add_argument("--disc", type=int, required=True)
    sp.add_argument("--ell", type=int)
    sp.add_argument("--N", type=int)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_classgroup)

    sp = sub.add_parser("sweep", help="compare both engines over the standard parameter sweep")
    sp.add_argument("--kinds", help="comma separated subset of " + ",".join(KINDS))
    sp.add_argument("--max-ext-degree", dest="max_ext_degree", type=int, default=24)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InertPrimeError, ParameterError, OrderError, CurveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
