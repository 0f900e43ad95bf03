"""Reading identity and rule corpora from disk.

Two formats:

``*.qid``
    one series identity per line, ``name : LHS == RHS``.  A trailing
    ``# ...`` comment on the same line is kept as the record's source.
``*.json``
    ``{"records": [...]}`` where each record has a ``type`` of
    ``gf_identity``, ``linear_rule``, ``correction_rule`` or ``generated_rules``.

Any JSON record may be a template: give ``instances`` (a list of parameter
bindings) and optionally ``require`` (a boolean expression in the parameters).
Inside a template every ``{expr}`` in a string is replaced by the value of the
integer expression ``expr``; division must be exact.
"""

from __future__ import annotations

import ast
import json
import operator
import re
from pathlib import Path
from typing import Any, Union

from . import qdsl
from .relations import (
    CorrectionRule,
    GfIdentity,
    IdentityRecord,
    IndexMap,
    Item,
    LinearRule,
    QuadraticFamily,
    ResidueSet,
    RuleError,
    SeqRef,
    generate_classical_rules,
)
from .seq import SeqSpec

PACKAGE_CORPUS = Path(__file__).parent / "corpus"
DEFAULT_FILES = ("identities.qid", "gf_identities.json", "theorems.json", "conjectures.json")


class CorpusError(ValueError):
    def __init__(self, path: Union[str, Path], where: str, message: str):
        self.path = str(path)
        self.where = where
        super().__init__(f"{path}:{where}: {message}")


def default_paths() -> list[Path]:
    return [PACKAGE_CORPUS / name for name in DEFAULT_FILES]


def load_corpus(path: Union[str, Path]) -> list[Item]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CorpusError(path, "0", f"cannot read file ({exc.strerror or exc})") from exc
    if path.suffix == ".qid":
        return parse_qid(text, path)
    if path.suffix == ".json":
        return parse_json_corpus(text, path)
    raise CorpusError(path, "0", "unknown corpus format (expected .qid or .json)")


# -- .qid -------------------------------------------------------------------

def parse_qid(text: str, path: Union[str, Path] = "<string>") -> list[IdentityRecord]:
    records = []
    names = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        body, _, comment = raw.partition("#")
        if not body.strip():
            continue
        name, sep, rest = body.partition(":")
        if not sep or not name.strip():
            raise CorpusError(path, str(lineno), "expected 'name : LHS == RHS'")
        lhs_text, sep, rhs_text = rest.partition("==")
        if not sep:
            raise CorpusError(path, str(lineno), "missing '=='")
        name = name.strip()
        if name in names:
            raise CorpusError(path, str(lineno), f"duplicate name {name!r}")
        names.add(name)
        sides = []
        offset = len(name) + 1
        for side in (lhs_text, rhs_text):
            try:
                sides.append(qdsl.parse(side))
            except qdsl.QdslSyntaxError as exc:
                col = raw.index(side, offset) + exc.column if side else exc.column
                raise CorpusError(path, f"{lineno}:{col}", str(exc).split(": ", 1)[1]) from exc
            offset += len(side) + 2
        records.append(IdentityRecord(name, sides[0], sides[1], comment.strip()))
    return records


# -- templates --------------------------------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.FloorDiv: operator.floordiv,
    ast.Mod: operator.mod,
}
_CMPOPS = {ast.Eq: operator.eq, ast.NotEq: operator.ne, ast.Lt: operator.lt,
           ast.LtE: operator.le, ast.Gt: operator.gt, ast.GtE: operator.ge}


def eval_int_expr(text: str, env: dict) -> Any:
    """Evaluate a small integer expression; '/' must divide exactly."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and type(node.value) is int:
            return node.value
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise ValueError(f"unknown parameter {node.id!r}")
            return env[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Div):
            num, den = ev(node.left), ev(node.right)
            if den == 0 or num % den:
                raise ValueError(f"{num}/{den} is not an exact integer")
            return num // den
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.Compare) and len(node.ops) == 1 and type(node.ops[0]) in _CMPOPS:
            return _CMPOPS[type(node.ops[0])](ev(node.left), ev(node.comparators[0]))
        if isinstance(node, ast.BoolOp):
            values = [ev(v) for v in node.values]
            return all(values) if isinstance(node.op, ast.And) else any(values)
        raise ValueError(f"unsupported expression {ast.dump(node)}")

    return ev(ast.parse(text.strip(), mode="eval"))


_BRACES = re.compile(r"\{([^{}]*)\}")


def _substitute(value: Any, env: dict) -> Any:
    if isinstance(value, str):
        return _BRACES.sub(lambda m: str(eval_int_expr(m.group(1), env)), value)
    if isinstance(value, list):
        return [_substitute(v, env) for v in value]
    if isinstance(value, dict):
        return {k: _substitute(v, env) for k, v in value.items()}
    return value


def expand_template(record: dict) -> list[dict]:
    instances = record.get("instances")
    if instances is None:
        return [record]
    base = {k: v for k, v in record.items() if k not in ("instances", "require")}
    out = []
    for env in instances:
        require = record.get("require")
        if require and not eval_int_expr(require, env):
            raise ValueError(f"instance {env} violates requirement {require!r}")
        inst = _substitute(base, env)
        binding = ",".join(f"{k}={v}" for k, v in env.items())
        inst["name"] = f"{inst['name']} [{binding}]"
        out.append(inst)
    return out


# -- JSON records -----------------------------------------------------------

def _int(value: Any, what: str) -> int:
    if isinstance(value, bool):
        raise ValueError(f"{what}: expected an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, str) and re.fullmatch(r"-?\d+", value.strip()):
        return int(value)
    raise ValueError(f"{what}: expected an integer, got {value!r}")


def _fields(obj: Any, what: str, required: set, optional: set = frozenset()) -> dict:
    if not isinstance(obj, dict):
        raise ValueError(f"{what}: expected an object")
    unknown = set(obj) - required - optional
    if unknown:
        raise ValueError(f"{what}: unknown field(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ValueError(f"{what}: missing field(s) {sorted(missing)}")
    return obj


def _spec(obj: dict, what: str) -> SeqSpec:
    form = obj["form"]
    if not isinstance(form, list) or len(form) != 3:
        raise ValueError(f"{what}.form: expected three entries")
    return SeqSpec(obj["kind"], tuple(_int(v, f"{what}.form") for v in form))


def _index(obj: Any, what: str) -> IndexMap:
    if not isinstance(obj, list) or len(obj) != 2:
        raise ValueError(f"{what}: expected [mul, add]")
    return IndexMap(_int(obj[0], what), _int(obj[1], what))


def _ref(obj: Any, what: str) -> SeqRef:
    _fields(obj, what, {"kind", "form"}, {"map"})
    return SeqRef(_spec(obj, what), _index(obj.get("map", [1, 0]), f"{what}.map"))


def _residues(obj: Any, what: str) -> ResidueSet:
    _fields(obj, what, {"modulus", "residues"})
    return ResidueSet(_int(obj["modulus"], what),
                      frozenset(_int(r, what) for r in obj["residues"]))


def _rhs_terms(obj: Any, what: str) -> tuple:
    if not isinstance(obj, list) or not obj:
        raise ValueError(f"{what}: expected a non-empty list")
    terms = []
    for i, term in enumerate(obj):
        _fields(term, f"{what}[{i}]", {"kind", "form"}, {"map", "coef"})
        coef = _int(term.get("coef", 1), f"{what}[{i}].coef")
        ref = _ref({k: v for k, v in term.items() if k != "coef"}, f"{what}[{i}]")
        terms.append((coef, ref))
    return tuple(terms)


def _ratio(obj: Any, what: str) -> tuple[int, int]:
    if not isinstance(obj, list) or len(obj) != 2:
        raise ValueError(f"{what}: expected [num, den]")
    return _int(obj[0], what), _int(obj[1], what)


_RULE_FIELDS = {"lhs", "rhs"}
_RULE_OPTIONAL = {"ratio", "domain", "exclusions", "n_start", "source"}


def _linear_rule(rec: dict, name: str) -> LinearRule:
    return LinearRule(
        name=name,
        lhs=_ref(rec["lhs"], "lhs"),
        rhs_terms=_rhs_terms(rec["rhs"], "rhs"),
        ratio=_ratio(rec.get("ratio", [1, 1]), "ratio"),
        domain=_residues(rec["domain"], "domain") if "domain" in rec else ResidueSet(1, {0}),
        exclusions=_residues(rec["exclusions"], "exclusions") if "exclusions" in rec else None,
        n_start=_int(rec.get("n_start", 1), "n_start"),
        source=rec.get("source", ""),
    )


def _family(obj: Any, what: str) -> QuadraticFamily:
    _fields(obj, what, {"quadratic", "linear"}, {"sign_offset", "target_offset", "condition"})
    quad = obj["quadratic"]
    lin = obj["linear"]
    if not isinstance(quad, list) or len(quad) != 3:
        raise ValueError(f"{what}.quadratic: expected [a, b, c]")
    if not isinstance(lin, list) or len(lin) != 2:
        raise ValueError(f"{what}.linear: expected [slope, intercept]")
    return QuadraticFamily(
        quadratic=tuple(_int(v, what) for v in quad),
        slope=_int(lin[0], what),
        intercept=_int(lin[1], what),
        sign_offset=_int(obj.get("sign_offset", 0), what),
        target_offset=_int(obj.get("target_offset", 0), what),
        condition=_residues(obj["condition"], f"{what}.condition") if "condition" in obj else None,
    )


def _record(rec: dict) -> list[Item]:
    kind = rec.get("type")
    name = rec.get("name")
    if not isinstance(name, str) or not name:
        raise ValueError("record needs a non-empty 'name'")
    if kind == "gf_identity":
        _fields(rec, name, {"type", "name", "seq", "map", "rhs"}, {"scale_den", "source", "flags"})
        _fields(rec["seq"], f"{name}.seq", {"kind", "form"})
        return [GfIdentity(
            name=name,
            seq=_spec(rec["seq"], "seq"),
            index_map=_index(rec["map"], "map"),
            rhs=qdsl.parse(rec["rhs"]),
            scale_den=_int(rec.get("scale_den", 1), "scale_den"),
            source=rec.get("source", ""),
            flags=tuple(rec.get("flags", ())),
        )]
    if kind == "linear_rule":
        _fields(rec, name, {"type", "name"} | _RULE_FIELDS, _RULE_OPTIONAL)
        return [_linear_rule(rec, name)]
    if kind == "correction_rule":
        _fields(rec, name, {"type", "name", "families"} | _RULE_FIELDS, _RULE_OPTIONAL)
        fams = rec["families"]
        if not isinstance(fams, list):
            raise ValueError("families: expected a list")
        return [CorrectionRule(
            name=name,
            base=_linear_rule(rec, name),
            families=tuple(_family(f, f"families[{i}]") for i, f in enumerate(fams)),
            source=rec.get("source", ""),
        )]
    if kind == "generated_rules":
        _fields(rec, name, {"type", "name"}, {"bound", "source"})
        return list(generate_classical_rules(_int(rec.get("bound", 12), "bound")))
    raise ValueError(f"unknown record type {kind!r}")


def parse_json_corpus(text: str, path: Union[str, Path] = "<string>") -> list[Item]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorpusError(path, f"{exc.lineno}:{exc.colno}", f"invalid JSON ({exc.msg})") from exc
    if not isinstance(doc, dict) or set(doc) - {"records", "description"} or "records" not in doc:
        raise CorpusError(path, "0", "expected an object with a 'records' list")
    items: list[Item] = []
    for i, raw in enumerate(doc["records"]):
        where = f"record {i}"
        if isinstance(raw, dict) and "name" in raw:
            where += f" ({raw['name']})"
        try:
            if not isinstance(raw, dict):
                raise ValueError("expected an object")
            for rec in expand_template(raw):
                items.extend(_record(rec))
        except (ValueError, RuleError, SyntaxError) as exc:
            raise CorpusError(path, where, str(exc)) from exc
    names = [it.name for it in items]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise CorpusError(path, "0", f"duplicate record names {dupes}")
    return items
