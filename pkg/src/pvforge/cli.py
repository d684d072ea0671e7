"""Command-line front end: ``pvforge <subcommand> <file> [--order N] [--json]``.

Exit codes: 0 when every check passes, 2 on a mathematical failure (the
report carries the witness), 1 on an input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from .arith import ExactMatrix, format_rational_function
from .errors import FundamentalMatrixError, InstabilityError, MembershipError, PvforgeError
from .expr import parse_rational_function
from .lie import SPLIT_CAVEAT, STABILITY_MARGIN, compare_lie, hull_lie, pv_lie
from .series import check_membership_base, compute_B, format_series, solve_fundamental, taylor, taylor_matrix
from .specdoc import load_spec
from .tower import check_fundamental, new_constants_report

REPORT_FORMAT = "pvforge-report/1"
SUBCOMMANDS = ("check", "taylor", "bmatrix", "pvlie", "hulllie", "compare", "constants")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_MATH = 2


class _Report:
    def __init__(self, subcommand, doc, order):
        self.subcommand = subcommand
        self.doc = doc
        self.order = order
        self.checks = []
        self.payload = {}
        self.caveats = []
        self.result = None
        self.timing = {}

    def check(self, name, passed, detail=None):
        entry = {"name": name, "passed": bool(passed)}
        if detail is not None:
            entry["detail"] = detail
        self.checks.append(entry)
        return passed

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks)

    def as_dict(self, timing):
        out = {
            "format": REPORT_FORMAT,
            "subcommand": self.subcommand,
            "input": {"path": self.doc.path, "name": self.doc.name, "digest": "sha256:" + self.doc.digest},
            "order": self.order,
            "outcome": "pass" if self.passed else "fail",
            "checks": self.checks,
            "result": self.result,
            "payload": self.payload,
            "caveats": self.caveats,
        }
        if timing:
            out["timing"] = self.timing
        return out


def _rf(e) -> str:
    if isinstance(e, (int, Fraction)):
        return str(Fraction(e))
    return format_rational_function(e)


def _matrix(m: ExactMatrix) -> list[list[str]]:
    return [[_rf(m[i, j]) for j in range(m.cols)] for i in range(m.rows)]


def _series_payload(s) -> dict:
    return {"series": format_series(s), "coefficients": [_rf(c) for c in s.coefficients]}


def _need_system(doc):
    if doc.system is None:
        raise PvforgeError(f"{doc.path}: this subcommand needs a linear system ('n', 'A', 'Z')")
    return doc.system


def _fundamental_checks(rep, s) -> bool:
    diag = check_fundamental(s)
    rep.check(
        "ode",
        diag.ode_ok,
        [{"entry": [i, j], "residual": _rf(r)} for i, j, r in diag.ode_failures] or None,
    )
    rep.check("det", diag.det_ok, _rf(diag.det))
    rep.check(
        "recovery",
        diag.recovery_ok,
        [{"generator": g, "value": _rf(v)} for g, v in diag.recovery_failures] or None,
    )
    return diag.passed


def _do_check(rep, doc):
    s = _need_system(doc)
    ok = _fundamental_checks(rep, s)
    rep.result = "fundamental matrix verified" if ok else "fundamental matrix check failed"


def _do_taylor(rep, doc):
    t = doc.tower
    names = doc.expand or t.variables
    out = {}
    for e in names:
        out[e] = _series_payload(taylor(t.element(_parse(doc, e)), t, rep.order))
    rep.payload["expansions"] = out
    rep.caveats.append(f"truncated at order {rep.order}")
    rep.result = f"{len(out)} expansion(s)"


def _parse(doc, text):
    return parse_rational_function(text, doc.tower.variables)


def _do_bmatrix(rep, doc):
    s = _need_system(doc)
    if not _fundamental_checks(rep, s):
        rep.result = "fundamental matrix check failed"
        return
    B = compute_B(s, rep.order)
    F = solve_fundamental(taylor_matrix(s.A, s.tower, rep.order))
    rep.check("routes-agree", B == F)
    mem = check_membership_base(B, s.tower)
    w = mem.witness
    rep.check(
        "membership",
        mem.ok,
        None if w is None else {"entry": [w.row, w.col], "degree": w.degree, "coefficient": _rf(w.coefficient)},
    )
    rep.payload["B"] = [[format_series(B.entry(i, j)) for j in range(B.n)] for i in range(B.n)]
    rep.payload["coefficients"] = [_matrix(B[k]) for k in range(B.order + 1)]
    rep.caveats.append(f"truncated at order {rep.order}")
    rep.result = "B coefficients lie in the base field" if mem.ok else "B has a coefficient outside the base field"


def _do_pvlie(rep, doc):
    s = _need_system(doc)
    r = pv_lie(s)
    rep.payload["dimension"] = r.dimension
    rep.payload["basis"] = [_matrix(m) for m in r.basis]
    rep.payload["rank"] = r.diagnostics["rank"]
    rep.caveats.extend(r.caveats)
    rep.result = f"pv dim {r.dimension}"


def _do_hulllie(rep, doc):
    s = _need_system(doc)
    r = hull_lie(s, rep.order)
    rep.check("stability-gate", True, {"orders": list(r.diagnostics["orders"])})
    rep.check("membership", True)
    rep.payload["dimension"] = r.dimension
    rep.payload["basis"] = [_matrix(m) for m in r.basis]
    rep.payload["b_action_basis"] = [_matrix(m) for m in r.b_action_basis]
    rep.caveats.append(f"truncated at order {rep.order}")
    rep.result = f"hull dim {r.dimension}"


def _do_compare(rep, doc):
    s = _need_system(doc)
    c = compare_lie(s, rep.order)
    rep.check("stability-gate", True, {"orders": list(c.orders)})
    rep.check("dimensions-equal", c.dimensions_equal,
              {"pv": c.pv.dimension, "hull": c.hull.dimension})
    rep.check("transport-verified", c.transport_verified)
    rep.payload["pv_basis"] = [_matrix(m) for m in c.pv.basis]
    rep.payload["hull_basis"] = [_matrix(m) for m in c.hull.basis]
    rep.payload["transported"] = [_matrix(m) for m in c.transported]
    rep.payload["transported_b_action"] = [_matrix(m) for m in c.transported_b_action]
    rep.caveats.append(SPLIT_CAVEAT)
    rep.caveats.append(f"truncated at order {rep.order}")
    verdict = "transport verified" if c.transport_verified else "transport failed"
    rep.result = f"pv dim {c.pv.dimension}, hull dim {c.hull.dimension}, {verdict}"


def _do_constants(rep, doc):
    t = doc.tower
    probes = new_constants_report(t, [_parse(doc, p) for p in doc.probes])
    rep.payload["probes"] = [
        {"element": _rf(p.element), "constant": p.is_constant, "in_rationals": p.in_rationals,
         "new_constant": p.new_constant}
        for p in probes
    ]
    fresh = [p for p in probes if p.new_constant]
    rep.result = f"{len(fresh)} new constant(s) among {len(probes)} probe(s)"


_HANDLERS = {
    "check": _do_check,
    "taylor": _do_taylor,
    "bmatrix": _do_bmatrix,
    "pvlie": _do_pvlie,
    "hulllie": _do_hulllie,
    "compare": _do_compare,
    "constants": _do_constants,
}


def _failure(rep, exc):
    """Turn a mathematical exception into a failed check carrying its witness."""
    if isinstance(exc, FundamentalMatrixError):
        d = exc.diagnostics
        rep.check("fundamental", False, d.summary())
    elif isinstance(exc, MembershipError):
        w = exc.witness
        rep.check("membership", False,
                  {"entry": [w.row, w.col], "degree": w.degree, "coefficient": _rf(w.coefficient)})
    elif isinstance(exc, InstabilityError):
        rep.check("stability-gate", False, str(exc))
    rep.result = str(exc)


def render_text(d: dict) -> str:
    lines = [
        f"format: {d['format']}",
        f"subcommand: {d['subcommand']}",
        f"input: {d['input']['path']}",
        f"name: {d['input']['name']}",
        f"digest: {d['input']['digest']}",
        f"order: {d['order']}",
    ]
    for c in d["checks"]:
        line = f"check {c['name']}: {'pass' if c['passed'] else 'FAIL'}"
        if "detail" in c:
            line += f"  {_flat(c['detail'])}"
        lines.append(line)
    for key, value in d["payload"].items():
        _emit(lines, key, value)
    for cav in d["caveats"]:
        lines.append(f"caveat: {cav}")
    for key, value in d.get("timing", {}).items():
        lines.append(f"timing {key}: {value:.3f}s")
    lines.append(f"result: {d['result']}")
    lines.append(f"outcome: {d['outcome']}")
    return "\n".join(lines) + "\n"


def _flat(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_flat(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_flat(x)}" for k, x in v.items()) + "}"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _is_matrix(v) -> bool:
    return all(isinstance(r, list) and all(isinstance(x, str) for x in r) for r in v)


def _emit(lines, key, value):
    if isinstance(value, dict):
        for k, v in value.items():
            _emit(lines, f"{key}.{k}", v)
    elif isinstance(value, list) and value and not _is_matrix(value) and all(
            isinstance(x, (list, dict)) for x in value):
        for i, v in enumerate(value):
            if isinstance(v, dict):
                _emit(lines, f"{key}[{i}]", v)
            else:
                lines.append(f"{key}[{i}]: {_flat(v)}")
    else:
        lines.append(f"{key}: {_flat(value)}")


def run(subcommand: str, path, order: int | None = None, json_output: bool = False,
        timing: bool = False) -> tuple[int, str]:
    """Run one subcommand on one spec file; returns (exit code, report text)."""
    if subcommand not in _HANDLERS:
        return EXIT_INPUT, f"error: unknown subcommand {subcommand!r}\n"
    if order is not None and order < 0:
        return EXIT_INPUT, "error: --order must be non-negative\n"
    try:
        doc = load_spec(path)
    except PvforgeError as exc:
        return EXIT_INPUT, f"error: {exc}\n"
    rep = _Report(subcommand, doc, doc.order if order is None else order)
    start = time.perf_counter()
    try:
        _HANDLERS[subcommand](rep, doc)
    except (FundamentalMatrixError, MembershipError, InstabilityError) as exc:
        _failure(rep, exc)
    except PvforgeError as exc:
        return EXIT_INPUT, f"error: {exc}\n"
    rep.timing["total"] = time.perf_counter() - start
    d = rep.as_dict(timing)
    text = json.dumps(d, indent=2) + "\n" if json_output else render_text(d)
    return (EXIT_OK if rep.passed else EXIT_MATH), text


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pvforge", description="Exact Picard-Vessiot and Galois hull computations.")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("file", help="JSON spec document")
    p.add_argument("--order", type=int, default=None,
                   help=f"truncation order (default from the input document, else 12; compare and hulllie "
                        f"also recompute at order + {STABILITY_MARGIN})")
    p.add_argument("--json", action="store_true", help="emit the report as JSON")
    p.add_argument("--timing", action="store_true", help="include wall-clock timing (breaks byte-identity)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    code, text = run(args.subcommand, args.file, args.order, args.json, args.timing)
    stream = sys.stderr if code == EXIT_INPUT else sys.stdout
    stream.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
