"""Command-line front end.

Subcommands: `check` (stationarity concepts), `qual` (qualification
conditions), `oracle` (brute-force no-descent check and implication
audit), `generate` (seeded random instances).  Exit code 0 means the
requested computation ran (whatever the verdicts); 2 is a malformed
document, 3 an infeasible point or violated assumption, 4 a cap
overflow.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__, ge, mpcc, mpvc, oracle, report
from .errors import (
    CapExceeded,
    ConstancyNotEstablished,
    GeInfeasibleAtPoint,
    InfeasiblePoint,
    MfcqViolated,
    ParseError,
)
from .instances import (
    DEFAULT_CAP,
    GeInstance,
    MpccInstance,
    MpvcInstance,
    Partition,
    active_sets,
    parse_instance,
    serialize,
)

EXIT_OK, EXIT_PARSE, EXIT_INFEASIBLE, EXIT_CAP = 0, 2, 3, 4


def _load_instance(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    return parse_instance(doc)


def _parse_beta1(text: str | None):
    if text is None:
        return None
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(sorted(int(t) for t in text.split(",")))
    except ValueError as exc:
        raise ParseError(f"bad partition list {text!r}") from exc


def _partition_from_flag(beta1, universe) -> Partition:
    uni = set(universe)
    if not set(beta1) <= uni:
        raise ParseError(f"partition indices {beta1} outside {sorted(uni)}")
    return Partition(tuple(sorted(beta1)), tuple(sorted(uni - set(beta1))))


def _emit(doc_or_report, fmt: str, elapsed: float | None):
    if isinstance(doc_or_report, report.Report):
        if fmt == "json":
            sys.stdout.write(doc_or_report.to_json())
        else:
            sys.stdout.write(report.render_text(doc_or_report, elapsed))
    else:
        sys.stdout.write(json.dumps(doc_or_report, sort_keys=True, indent=2) + "\n")


def _cmd_check(args) -> int:
    inst = _load_instance(args.input)
    nd_branches = None
    if args.nd_branches:
        if not isinstance(inst, GeInstance):
            raise ParseError("--nd-branches only applies to ge instances")
        with open(args.nd_branches, "r", encoding="utf-8") as fh:
            nd_branches = ge.parse_nd_branches(fh.read(), inst)
    beta1 = _parse_beta1(args.partition)
    start = time.monotonic()
    if args.concept == "all":
        if isinstance(inst, MpccInstance):
            results = mpcc.certify(inst, args.cap)
        elif isinstance(inst, MpvcInstance):
            results = mpvc.certify(inst, args.cap)
        else:
            results = ge.certify(inst, nd_branches, args.cap)
        rep = report.build_report(inst, results)
    else:
        rep = _single_concept(inst, args.concept, beta1, nd_branches, args.cap)
    _emit(rep, args.format, time.monotonic() - start)
    return EXIT_OK


def _single_concept(inst, concept, beta1, nd_branches, cap):
    from .instances import enumerate_partitions

    if isinstance(inst, GeInstance):
        mp = ge.multiplier_polytope(inst)
        universe = mp.izero
    else:
        universe = active_sets(inst).i00
    mod = {MpccInstance: mpcc, MpvcInstance: mpvc, GeInstance: ge}[type(inst)]

    if concept == "b":
        certs = {"b_oracle": oracle.b_stationary(inst, cap), "q": {}}
    elif concept == "s":
        certs = {"s": mod.check_s(inst), "q": {}}
    elif concept == "m":
        if isinstance(inst, GeInstance):
            raise ParseError("the limiting concept needs a supplied cone family here; use qm")
        certs = {"m": mod.check_m(inst, cap), "q": {}}
    elif concept == "q":
        if beta1 is not None:
            parts = [_partition_from_flag(beta1, universe)]
        else:
            parts = list(enumerate_partitions(universe, cap))
        if isinstance(inst, GeInstance):
            certs = {"q": {(p.beta1, p.beta2): ge.check_q(inst, (p.beta1, p.beta2)) for p in parts}}
        else:
            certs = {"q": {p: mod.check_q(inst, p) for p in parts}}
    elif concept == "qm":
        if isinstance(inst, GeInstance):
            pair = None
            if beta1 is not None:
                p = _partition_from_flag(beta1, universe)
                pair = (p.beta1, p.beta2)
            certs = {"qm": ge.check_qm(inst, pair=pair, nd_branches=nd_branches, cap=cap), "q": {}}
        elif isinstance(inst, MpccInstance):
            p = _partition_from_flag(beta1, universe) if beta1 is not None else None
            certs = {"qm": mpcc.check_qm(inst, p=p, cap=cap), "q": {}}
        else:
            certs = {"qm": mpvc.check_qm(inst, cap), "q": {}}
    else:
        raise ParseError(f"unknown concept {concept!r}")
    return report.build_report(inst, {"certificates": certs})


def _cmd_qual(args) -> int:
    inst = _load_instance(args.input)
    beta1 = _parse_beta1(args.partition)
    start = time.monotonic()
    name = args.qual
    out = {"qual": name}
    if name in ("thm5", "cor5", "a3", "licq"):
        if not isinstance(inst, MpccInstance):
            raise ParseError(f"--qual {name} needs a complementarity instance")
        if name == "licq":
            out["result"] = mpcc.check_licq(inst)
        else:
            act = active_sets(inst)
            if name == "thm5":
                universe = act.i00
                fn = mpcc.qual_sign_products
            else:
                _, _, beta_gh = mpcc.nonsingular_sets(inst)
                universe = beta_gh
                fn = (
                    mpcc.qual_sign_products_nonsingular
                    if name == "cor5"
                    else mpcc.qual_pang_fukushima
                )
            parts = (
                [_partition_from_flag(beta1, universe)]
                if beta1 is not None
                else list(_all_partitions(universe, args.cap))
            )
            out["result"] = {report._key(p): report.render_value(fn(inst, p)) for p in parts}
            out["nonsingular_sets"] = report.render_value(mpcc.nonsingular_sets(inst))
    elif name == "thm7":
        if not isinstance(inst, MpvcInstance):
            raise ParseError("--qual thm7 needs a vanishing-constraint instance")
        universe = active_sets(inst).i00
        parts = (
            [_partition_from_flag(beta1, universe)]
            if beta1 is not None
            else list(_all_partitions(universe, args.cap))
        )
        out["result"] = {
            report._key(p): report.render_value(mpvc.qual_exactness(inst, p)) for p in parts
        }
    elif name in ("thm11", "thm9"):
        if not isinstance(inst, GeInstance):
            raise ParseError(f"--qual {name} needs a generalized-equation instance")
        if name == "thm9":
            out["result"] = report.render_value(ge.qual_constant_multiplier(inst, args.cap))
        else:
            universe = ge.multiplier_polytope(inst).izero
            parts = (
                [_partition_from_flag(beta1, universe)]
                if beta1 is not None
                else list(_all_partitions(universe, args.cap))
            )
            out["result"] = {
                report._key(p): report.render_value(
                    ge.qual_partition_systems(inst, (p.beta1, p.beta2))
                )
                for p in parts
            }
    else:
        raise ParseError(f"unknown qualification {name!r}")
    _emit(out, "json", time.monotonic() - start)
    return EXIT_OK


def _all_partitions(universe, cap):
    from .instances import enumerate_partitions

    return enumerate_partitions(universe, cap)


def _cmd_oracle(args) -> int:
    inst = _load_instance(args.input)
    start = time.monotonic()
    cert = oracle.b_stationary(inst, args.cap)
    out = {"b_oracle": report.render_value(cert)}
    if isinstance(inst, (MpccInstance, MpvcInstance)):
        out["implication_violations"] = oracle.implication_audit(inst, args.cap)
    _emit(out, "json", time.monotonic() - start)
    return EXIT_OK


def _cmd_generate(args) -> int:
    if args.kind == "mpcc":
        inst = oracle.random_mpcc(args.seed, mode=args.mode)
    elif args.kind == "mpvc":
        inst = oracle.random_mpvc(args.seed, mode=args.mode)
    else:
        inst = oracle.random_ge(args.seed, mode=args.mode, coordinate_tc=args.coordinate_tc)
    _emit(serialize(inst), "json", None)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mpeccert",
        description="exact stationarity certificates for MPCC / MPVC / GE point data",
    )
    ap.add_argument("--version", action="version", version=f"mpeccert {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--input", required=True, help="instance JSON document")
        p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="enumeration cap")

    p_check = sub.add_parser("check", help="decide stationarity concepts")
    common(p_check)
    p_check.add_argument("--concept", default="all", choices=["b", "s", "m", "q", "qm", "all"])
    p_check.add_argument("--partition", help="comma-separated first-block indices")
    p_check.add_argument("--nd-branches", help="JSON halfspace cones for the limiting graph cone (ge)")
    p_check.add_argument("--format", default="json", choices=["json", "text"])
    p_check.set_defaults(fn=_cmd_check)

    p_qual = sub.add_parser("qual", help="decide qualification conditions")
    common(p_qual)
    p_qual.add_argument(
        "--qual",
        required=True,
        choices=["thm5", "cor5", "a3", "licq", "thm7", "thm11", "thm9"],
    )
    p_qual.add_argument("--partition", help="comma-separated first-block indices")
    p_qual.set_defaults(fn=_cmd_qual)

    p_oracle = sub.add_parser("oracle", help="brute-force no-descent check and audit")
    common(p_oracle)
    p_oracle.set_defaults(fn=_cmd_oracle)

    p_gen = sub.add_parser("generate", help="emit a seeded random instance")
    p_gen.add_argument("--kind", required=True, choices=["mpcc", "mpvc", "ge"])
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--mode", default="random", choices=["random", "s", "m"])
    p_gen.add_argument("--coordinate-tc", action="store_true")
    p_gen.set_defaults(fn=_cmd_generate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InfeasiblePoint, MfcqViolated, GeInfeasibleAtPoint, ConstancyNotEstablished) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
