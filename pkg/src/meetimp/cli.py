"""Command-line entry point: ``meetimp <command> [options]``.

Exit codes: 0 success (valid, proved, isomorphic, equivalent), 1 a negative
answer (invalid proof, countermodel found, not equivalent), 2 usage or input
errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from . import duality as D
from . import equational as E
from . import hilbert as H
from . import search as S
from .order import OrderError
from .semantics import (
    BoxFrame,
    FrameViolation,
    Model,
    MonFrame,
    SemanticsError,
    derived_frame_conditions,
    model_from_json,
    model_to_json,
)
from .syntax import ParseError, depth, parse, render

OK, NEGATIVE, INPUT_ERROR = 0, 1, 2


class InputError(Exception):
    pass


Result = Tuple[int, Any, str]  # exit code, JSON payload, human-readable text


def _load(path: Optional[str], what: str = "--file"):
    if not path:
        raise InputError(f"{what} is required")
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _formula(text: Optional[str]):
    if text is None:
        raise InputError("--formula is required")
    return parse(text)


def _frame_json(frame) -> dict:
    return model_to_json(Model(frame, {}))


def _is_algebra(obj) -> bool:
    return isinstance(obj, dict) and "size" in obj and ("box" in obj or "mon" in obj)


def _algebra(obj):
    if "box" in obj:
        return D.islo_from_json(obj)
    return D.mon_algebra_from_json(obj)


def _algebra_json(a) -> dict:
    from .order import semilattice_to_json

    out = semilattice_to_json(a.algebra)
    if isinstance(a, D.ISLO):
        out["box"] = list(a.box)
    else:
        out["mon"] = list(a.mon)
    if a.labels is not None:
        out["filters"] = [sorted(s) for s in a.labels]
    return out


# ---------------------------------------------------------------- commands


def cmd_parse(args) -> Result:
    f = _formula(args.formula)
    return OK, {"formula": render(f), "depth": depth(f)}, render(f)


def cmd_check_proof(args) -> Result:
    obj = _load(args.file)
    if isinstance(obj, dict) and "lhs" in obj:
        p = E.eq_proof_from_json(obj)
        rep = E.check_eq_proof(p, modal=args.system != "mi")
        payload = {"ok": rep.ok, "kind": "equational", "path": list(rep.path), "reason": rep.reason}
    else:
        p = H.proof_from_json(obj)
        rep = H.check_proof(H.system(args.system), p)
        payload = {"ok": rep.ok, "kind": "hilbert", "path": list(rep.path), "reason": rep.reason}
    text = "valid" if rep.ok else f"invalid at {list(rep.path)}: {rep.reason}"
    return (OK if rep.ok else NEGATIVE), payload, text


def cmd_transform(args) -> Result:
    obj = _load(args.file)
    op = args.op
    sysobj = H.system(args.system)
    if op == "e2h":
        fwd, bwd = E.eq_to_hilbert(E.eq_proof_from_json(obj))
        payload = {"forward": H.proof_to_json(fwd), "backward": H.proof_to_json(bwd)}
        return OK, payload, f"{render(fwd.conclusion)}\n{render(bwd.conclusion)}"
    p = H.proof_from_json(obj)
    rep = H.check_proof(sysobj, p)
    if not rep:
        raise InputError(f"input proof does not check: {rep.reason}")
    if op == "deduction":
        out = H.deduction(p, _formula(args.formula))
    elif op == "undeduction":
        out = H.undeduction(p)
    elif op == "weaken":
        out = H.weaken(p, _formula(args.formula))
    elif op == "h2e":
        e = E.hilbert_to_eq(p, sysobj)
        return OK, E.eq_proof_to_json(e), f"{render(e.concl.lhs)} = {render(e.concl.rhs)}"
    else:  # pragma: no cover - argparse restricts the choices
        raise InputError(f"unknown transform {op!r}")
    ctx = ", ".join(render(c) for c in out.context)
    return OK, H.proof_to_json(out), f"{ctx} |- {render(out.conclusion)}"


def _witness_json(w: S.Countermodel) -> dict:
    return {**model_to_json(w.model), "refuted_at": w.world}


def cmd_countermodel(args) -> Result:
    phi = _formula(args.formula)
    w = S.find_countermodel(S.SearchSpec(args.system, phi, args.max_worlds))
    if w is None:
        msg = f"no countermodel <= {args.max_worlds} worlds"
        return OK, {"found": False, "max_worlds": args.max_worlds, "message": msg}, msg
    payload = {"found": True, "witness": _witness_json(w)}
    val = ", ".join(f"{p}={sorted(v)}" for p, v in sorted(w.model.valuation.items()))
    return NEGATIVE, payload, f"countermodel: {w.model.frame.algebra.size} worlds, refuted at {w.world}; {val}"


def cmd_validate_frame(args) -> Result:
    from .semantics import frame_from_json

    obj = _load(args.file)
    try:
        f = frame_from_json(obj)
    except FrameViolation as exc:
        payload = {"valid": False, "condition": exc.condition, "witness": repr(exc.witness)}
        return NEGATIVE, payload, f"invalid: {exc.condition} {exc.witness}"
    payload: Dict[str, Any] = {"valid": True, "kind": f.kind, "worlds": f.base.algebra.size}
    if isinstance(f, BoxFrame):
        payload["derived_conditions"] = derived_frame_conditions(f)
    return OK, payload, f"valid {f.kind} frame with {f.base.algebra.size} worlds"


def cmd_dualize(args) -> Result:
    obj = _load(args.file)
    if _is_algebra(obj):
        a = _algebra(obj)
        f = D.dual_frame(a) if isinstance(a, D.ISLO) else D.dual_mon_frame(a)
        return OK, _frame_json(f), f"dual frame with {f.base.algebra.size} worlds"
    from .semantics import frame_from_json

    f = frame_from_json(obj)
    if isinstance(f, BoxFrame):
        a = D.complex_algebra(f)
    elif isinstance(f, MonFrame):
        a = D.complex_mon_algebra(f)
    else:
        raise InputError("dualize needs a box/mon frame or an algebra with a box/mon table")
    return OK, _algebra_json(a), f"complex algebra with {a.algebra.size} elements"


def cmd_roundtrip(args) -> Result:
    if args.islo:
        a = D.islo_from_json(_load(args.islo, "--islo"))
        check: Callable[[], D.IsoReport] = lambda: D.duality_roundtrip_algebra(a)
        which = "algebra"
    else:
        from .semantics import frame_from_json

        f = frame_from_json(_load(args.file))
        if not isinstance(f, BoxFrame):
            raise InputError("roundtrip --file needs a box frame")
        check = lambda: D.duality_roundtrip_frame(f)
        which = "frame"
    try:
        rep = check()
    except D.NotIso as exc:
        return NEGATIVE, {"iso": False, "condition": exc.condition, "witness": repr(exc.witness)}, str(exc)
    return OK, {"iso": True, "side": which, "witness": list(rep.witness)}, f"isomorphic via {list(rep.witness)}"


def cmd_filter_extension(args) -> Result:
    obj = _load(args.file)
    m = model_from_json(obj)
    ext, eta = D.extend_model(m)
    payload = {"extension": model_to_json(ext), "eta": list(eta)}
    return OK, payload, f"extension with {ext.frame.base.algebra.size} worlds; eta = {list(eta)}"


def cmd_equiv(args) -> Result:
    m1 = model_from_json(_load(args.file))
    m2 = model_from_json(_load(args.file2, "--file2")) if args.file2 else m1
    n1, n2 = m1.frame.base.algebra.size, m2.frame.base.algebra.size
    if not (0 <= args.x1 < n1 and 0 <= args.x2 < n2):
        raise InputError("state index out of range")
    logical = D.logical_equivalence(m1, m2, args.x1, args.x2, args.depth)
    e1, eta1 = D.extend_model(m1)
    e2, eta2 = D.extend_model(m2)
    beh = D.behavioural_equivalence(e1, e2, eta1[args.x1], eta2[args.x2], args.max_worlds)
    payload = {
        "logical": logical,
        "depth": args.depth,
        "behavioural": beh.equivalent,
        "bound": beh.bound,
        "complete_up_to_bound_only": beh.exhausted_bound,
    }
    if beh.equivalent:
        payload["h1"], payload["h2"] = list(beh.h1), list(beh.h2)
    text = f"logical (depth {args.depth}): {logical}; behavioural (bound {beh.bound}): {beh.equivalent}"
    return (OK if logical else NEGATIVE), payload, text


def cmd_probe(args) -> Result:
    phi = _formula(args.formula)
    rep = S.conservativity_probe(phi, args.max_worlds)
    payload = {
        "agree": rep.agree,
        "bound": rep.bound,
        "i_witness": _witness_json(rep.i_witness) if rep.i_witness else None,
        "box_witness": _witness_json(rep.box_witness) if rep.box_witness else None,
    }
    status = lambda w: "refuted" if w else f"no countermodel <= {rep.bound}"
    text = f"I-frames: {status(rep.i_witness)}; box frames: {status(rep.box_witness)}"
    return (OK if rep.agree else NEGATIVE), payload, text


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a single JSON document")
    common.add_argument("--system", choices=sorted(H.SYSTEMS), default="mi")

    parser = argparse.ArgumentParser(prog="meetimp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(run=fn)
        return p

    add("parse", cmd_parse, "parse and pretty-print a formula").add_argument("--formula")
    add("check-proof", cmd_check_proof, "check a Hilbert or equational proof file").add_argument("--file")
    p = add("transform", cmd_transform, "transform a proof file")
    p.add_argument("--op", required=True, choices=["deduction", "undeduction", "weaken", "h2e", "e2h"])
    p.add_argument("--file")
    p.add_argument("--formula", help="assumption to discharge or add")
    p = add("countermodel", cmd_countermodel, "search for a countermodel")
    p.add_argument("--formula")
    p.add_argument("--max-worlds", type=int, default=3)
    add("validate-frame", cmd_validate_frame, "validate a frame file").add_argument("--file")
    add("dualize", cmd_dualize, "dual frame of an algebra, or complex algebra of a frame").add_argument("--file")
    p = add("roundtrip", cmd_roundtrip, "check a duality round trip")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--islo", help="algebra file")
    g.add_argument("--file", help="box frame file")
    add("filter-extension", cmd_filter_extension, "filter extension of a model file").add_argument("--file")
    p = add("equiv", cmd_equiv, "compare logical and behavioural equivalence of two states")
    p.add_argument("--file")
    p.add_argument("--file2")
    p.add_argument("--x1", type=int, required=True)
    p.add_argument("--x2", type=int, required=True)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--max-worlds", type=int, default=6)
    p = add("probe-conservativity", cmd_probe, "compare refutability over I-frames and box frames")
    p.add_argument("--formula")
    p.add_argument("--max-worlds", type=int, default=3)
    return parser


_INPUT_ERRORS = (
    InputError,
    ParseError,
    H.InvalidInput,
    E.InvalidInput,
    OrderError,
    SemanticsError,
    S.SearchError,
    D.DualityError,
    KeyError,
    TypeError,
    ValueError,
)


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    try:
        code, payload, text = args.run(args)
    except _INPUT_ERRORS as exc:
        msg = str(exc) or exc.__class__.__name__
        if args.json:
            print(json.dumps({"error": msg}), file=out)
        print(f"error: {msg}", file=err)
        return INPUT_ERROR
    if args.json:
        print(json.dumps(payload, sort_keys=True), file=out)
    else:
        print(text, file=out)
    return code


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
