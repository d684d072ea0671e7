"""Loading version-tagged JSON spec documents.

Every mathematical payload is an expression string.  A document always
presents a tower; the linear-system keys (``n``, ``A``, ``Z``,
``recovery``) are optional as a group.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import PvforgeError, SpecFormatError
from .expr import parse_rational_function
from .tower import DifferentialTower, SystemSpec, recovery_variables

SPEC_FORMAT = "pvforge-spec/1"
DEFAULT_ORDER = 12
BUNDLED_DIR = Path(__file__).parent / "specs"

_KNOWN_KEYS = {
    "format", "name", "description", "derivations", "base", "generators",
    "n", "A", "Z", "recovery", "probes", "expand", "order",
}


@dataclass(frozen=True)
class SpecDocument:
    path: str
    digest: str
    name: str
    tower: DifferentialTower
    system: SystemSpec | None
    probes: tuple[str, ...]
    expand: tuple[str, ...]
    order: int


def bundled_spec_path(name: str) -> Path:
    return BUNDLED_DIR / f"{name}.json"


def bundled_spec_names() -> list[str]:
    return sorted(p.stem for p in BUNDLED_DIR.glob("*.json"))


def _line_of(text: str, expression: str) -> int | None:
    needle = json.dumps(expression)
    idx = text.find(needle)
    if idx < 0:
        return None
    return text.count("\n", 0, idx) + 1


def _need_str(value, what, path, text):
    if not isinstance(value, str):
        raise SpecFormatError(f"{what} must be an expression string, got {type(value).__name__}",
                              path, _line_of(text, value) if isinstance(value, str) else None)
    return value


def load_spec(path) -> SpecDocument:
    path = str(path)
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise SpecFormatError(f"cannot read input: {exc.strerror or exc}", path) from None
    text = raw.decode("utf-8", errors="replace")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFormatError(f"invalid JSON: {exc.msg}", path, exc.lineno) from None
    return parse_spec(doc, path=path, text=text, digest=hashlib.sha256(raw).hexdigest())


def parse_spec(doc, path="<memory>", text=None, digest="") -> SpecDocument:
    if text is None:
        text = json.dumps(doc, indent=2)
    if not isinstance(doc, dict):
        raise SpecFormatError("top level must be a JSON object", path, 1)
    fmt = doc.get("format")
    if fmt != SPEC_FORMAT:
        raise SpecFormatError(f"unsupported format {fmt!r}; expected {SPEC_FORMAT!r}", path,
                              _line_of(text, fmt) if isinstance(fmt, str) else None)
    unknown = sorted(set(doc) - _KNOWN_KEYS)
    if unknown:
        raise SpecFormatError(f"unknown key(s) {unknown}", path)

    def checked(value, what, variables):
        e = _need_str(value, what, path, text)
        try:
            parse_rational_function(e, variables)
        except PvforgeError as exc:
            raise SpecFormatError(f"{what}: {exc}", path, _line_of(text, e), e) from None
        return e

    d = doc.get("derivations", 1)
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise SpecFormatError("'derivations' must be a positive integer", path)
    base_raw = _section(doc.get("base"), "base", path)
    gens_raw = _section(doc.get("generators", {}), "generators", path)
    names = list(base_raw) + list(gens_raw)

    def rules(section, what):
        out = {}
        for name, rule in section.items():
            if isinstance(rule, list):
                out[name] = [checked(r, f"{what}[{name}]", names) for r in rule]
            else:
                out[name] = checked(rule, f"{what}[{name}]", names)
        return out

    base = rules(base_raw, "base")
    gens = rules(gens_raw, "generators")
    try:
        tower = DifferentialTower(base, gens, derivations=d)
    except PvforgeError as exc:
        raise SpecFormatError(str(exc), path) from None
    variables = tower.variables

    system = None
    sys_keys = [k for k in ("n", "A", "Z") if k in doc]
    if sys_keys:
        if len(sys_keys) != 3:
            raise SpecFormatError("'n', 'A' and 'Z' must be given together", path)
        n = doc["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise SpecFormatError("'n' must be a positive integer", path)
        A = _square(doc["A"], n, "A", lambda e, w: checked(e, w, variables), path)
        Z = _square(doc["Z"], n, "Z", lambda e, w: checked(e, w, variables), path)
        rec = doc.get("recovery", {})
        if not isinstance(rec, dict):
            raise SpecFormatError("'recovery' must map generator names to expressions", path)
        rv = recovery_variables(n, tower.base)
        rec = {g: checked(v, f"recovery[{g}]", rv) for g, v in rec.items()}
        try:
            system = SystemSpec.build(tower, A, Z, rec)
        except PvforgeError as exc:
            raise SpecFormatError(str(exc), path) from None

    probes = tuple(checked(p, "probe", variables) for p in doc.get("probes", []))
    expand = tuple(checked(p, "expand entry", variables) for p in doc.get("expand", []))

    order = doc.get("order", DEFAULT_ORDER)
    if not isinstance(order, int) or isinstance(order, bool) or order < 0:
        raise SpecFormatError("'order' must be a non-negative integer", path)
    return SpecDocument(
        path=path,
        digest=digest,
        name=str(doc.get("name", Path(path).stem)),
        tower=tower,
        system=system,
        probes=probes,
        expand=expand,
        order=order,
    )


def _section(section, what, path):
    if section is None:
        raise SpecFormatError(f"missing '{what}'", path)
    if not isinstance(section, dict):
        raise SpecFormatError(f"'{what}' must map variable names to derivative rules", path)
    return section


def _square(rows, n, what, expr, path):
    if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise SpecFormatError(f"'{what}' must be an {n}x{n} array of expression strings", path)
    return [[expr(e, f"{what}[{i + 1},{j + 1}]") for j, e in enumerate(r)] for i, r in enumerate(rows)]
