"""Identity catalog: records, JSON persistence and grid verification.

A record pairs a finite sum (``lhs``) with its closed form (``rhs``), both in
the expression grammar of :mod:`fibsum.expr`.  Sequence letters G, H, K are
seed slots; a record may pin a slot, otherwise verification ranges the slot
over the standard seed set.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from . import expr as E
from .arith import format_rat
from .errors import FibsumError, SchemaError, UnknownRecord
from .runner import pmap
from .sequences import FIB, LUCAS, STANDARD_SEEDS, Seed
from .sums import weighted_sum_brute

FIELDS = ("id", "lhs", "rhs", "vars", "constraint", "seeds", "note")
SLOT_LETTERS = ("G", "H", "K")
_ID_RE = re.compile(r"^\d{2}\.\d{2}$")


@dataclass(frozen=True, eq=False)
class IdentityRecord:
    id: str
    lhs: str
    rhs: str
    vars: dict[str, tuple[int, int]]
    constraint: str | None = None
    seeds: dict[str, Seed] = field(default_factory=dict)
    note: str | None = None

    def __post_init__(self):
        validate_record(self)

    def __eq__(self, other):
        return isinstance(other, IdentityRecord) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(self.id)

    @property
    def section(self) -> str:
        return self.id.split(".")[0]

    @cached_property
    def lhs_ast(self) -> E.Expr:
        return E.parse(self.lhs)

    @cached_property
    def rhs_ast(self) -> E.Expr:
        return E.parse(self.rhs)

    @cached_property
    def constraint_ast(self) -> E.Expr | None:
        return E.parse(self.constraint) if self.constraint is not None else None

    @cached_property
    def letters(self) -> tuple[str, ...]:
        """Free seed slots: G/H/K letters used and not pinned."""
        used = E.seq_letters(self.lhs_ast) | E.seq_letters(self.rhs_ast)
        return tuple(c for c in SLOT_LETTERS if c in used and c not in self.seeds)

    @property
    def params(self) -> tuple[str, ...]:
        return tuple(sorted(self.vars))

    def _ctx(self, params: Mapping[str, Any], seeds: Mapping[str, Seed]) -> E.EvalContext:
        s = dict(self.seeds)
        s.update({k: v for k, v in seeds.items() if k not in self.seeds})
        return E.EvalContext(bindings={k: Fraction(v) for k, v in params.items()}, seeds=s)

    def eval_lhs(self, params: Mapping[str, Any], seeds: Mapping[str, Seed] | None = None) -> Fraction:
        return E.evaluate(self.lhs_ast, self._ctx(params, seeds or {}))

    def eval_rhs(self, params: Mapping[str, Any], seeds: Mapping[str, Seed] | None = None) -> Fraction:
        return E.evaluate(self.rhs_ast, self._ctx(params, seeds or {}))

    def in_domain(self, params: Mapping[str, Any], seeds: Mapping[str, Seed] | None = None) -> bool:
        if self.constraint_ast is None:
            return True
        try:
            return E.evaluate(self.constraint_ast, self._ctx(params, seeds or {})) != 0
        except (ZeroDivisionError, FibsumError):
            return False

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "lhs": E.canonical(self.lhs),
            "rhs": E.canonical(self.rhs),
            "vars": {k: [lo, hi] for k, (lo, hi) in sorted(self.vars.items())},
            "constraint": E.canonical(self.constraint) if self.constraint is not None else None,
            "seeds": {k: [s.g0, s.g1] for k, s in sorted(self.seeds.items())},
            "note": self.note,
        }

    @classmethod
    def from_json(cls, d: Any) -> "IdentityRecord":
        rid = d.get("id", "?") if isinstance(d, dict) else "?"
        if not isinstance(d, dict):
            raise SchemaError(rid, "record must be a JSON object")
        missing = [f for f in FIELDS if f not in d]
        if missing:
            raise SchemaError(rid, f"missing field {missing[0]!r}")
        extra = sorted(set(d) - set(FIELDS))
        if extra:
            raise SchemaError(rid, f"unknown field {extra[0]!r}")
        vars_ = d["vars"]
        if not isinstance(vars_, dict):
            raise SchemaError(rid, "vars must be an object of [lo, hi] ranges")
        ranges = {}
        for name, rng in vars_.items():
            if not (isinstance(rng, list) and len(rng) == 2 and all(type(v) is int for v in rng)):
                raise SchemaError(rid, f"range for {name!r} must be [lo, hi] integers")
            ranges[name] = (rng[0], rng[1])
        seeds = d["seeds"]
        if not isinstance(seeds, dict):
            raise SchemaError(rid, "seeds must be an object")
        pinned = {}
        for letter, pair in seeds.items():
            if not (isinstance(pair, list) and len(pair) == 2 and all(type(v) is int for v in pair)):
                raise SchemaError(rid, f"seed for {letter!r} must be [g0, g1] integers")
            pinned[letter] = Seed(pair[0], pair[1])
        for key in ("lhs", "rhs"):
            if not isinstance(d[key], str):
                raise SchemaError(rid, f"{key} must be a string")
        if d["constraint"] is not None and not isinstance(d["constraint"], str):
            raise SchemaError(rid, "constraint must be a string or null")
        if d["note"] is not None and not isinstance(d["note"], str):
            raise SchemaError(rid, "note must be a string or null")
        if not isinstance(rid, str):
            raise SchemaError(str(rid), "id must be a string")
        return cls(rid, d["lhs"], d["rhs"], ranges, d["constraint"], pinned, d["note"])


def validate_record(rec: IdentityRecord) -> None:
    if not _ID_RE.match(rec.id):
        raise SchemaError(rec.id, "id must look like 'SS.NN'")
    asts = {}
    for key in ("lhs", "rhs", "constraint"):
        text = getattr(rec, key)
        if text is None:
            continue
        try:
            asts[key] = E.parse(text)
        except E.ExprSyntaxError as exc:
            raise SchemaError(rec.id, f"{key} does not parse: {exc}") from None
    for name, (lo, hi) in rec.vars.items():
        if not name.isidentifier() or name in E.RESERVED:
            raise SchemaError(rec.id, f"bad variable name {name!r}")
        if lo > hi:
            raise SchemaError(rec.id, f"empty range for {name!r}")
    for letter in rec.seeds:
        if letter not in SLOT_LETTERS:
            raise SchemaError(rec.id, f"only G, H, K can be pinned, not {letter!r}")
    for key, ast in asts.items():
        for sym in sorted(E.free_symbols(ast)):
            if sym not in rec.vars:
                raise SchemaError(rec.id, f"symbol {sym!r} in {key} has no declared range")


# --------------------------------------------------------------------------
# Persistence
# --------------------------------------------------------------------------


def dumps_catalog(records: Iterable[IdentityRecord]) -> str:
    """Canonical text: records in id order, fixed key order, two-space indent."""
    recs = sorted(records, key=lambda r: r.id)
    ids = [r.id for r in recs]
    if len(set(ids)) != len(ids):
        dup = next(i for i in ids if ids.count(i) > 1)
        raise SchemaError(dup, "duplicate id")
    if not recs:
        return "[]\n"
    return json.dumps([r.to_json() for r in recs], indent=2, ensure_ascii=False) + "\n"


def loads_catalog(text: str) -> list[IdentityRecord]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("?", f"not valid JSON: {exc}") from None
    if not isinstance(data, list):
        raise SchemaError("?", "catalog must be a JSON array")
    records = [IdentityRecord.from_json(d) for d in data]
    seen = set()
    for r in records:
        if r.id in seen:
            raise SchemaError(r.id, "duplicate id")
        seen.add(r.id)
    return records


def load_catalog(path: str | Path) -> list[IdentityRecord]:
    return loads_catalog(Path(path).read_text(encoding="utf-8"))


def save_catalog(records: Iterable[IdentityRecord], path: str | Path) -> None:
    Path(path).write_text(dumps_catalog(records), encoding="utf-8")


def shipped_catalog_path() -> Path:
    return Path(str(resources.files("fibsum") / "data" / "catalog.json"))


_SHIPPED: list[IdentityRecord] | None = None


def shipped_catalog() -> list[IdentityRecord]:
    global _SHIPPED
    if _SHIPPED is None:
        _SHIPPED = load_catalog(shipped_catalog_path())
    return list(_SHIPPED)


def find_record(rid: str, records: Sequence[IdentityRecord] | None = None, sections: Iterable[str] | None = None) -> IdentityRecord:
    records = shipped_catalog() if records is None else records
    for r in records:
        if r.id == rid and (sections is None or r.section in sections):
            return r
    raise UnknownRecord(f"no catalog record {rid!r}")


# --------------------------------------------------------------------------
# Verification
# --------------------------------------------------------------------------


def var_range(lo: int, hi: int, grid_scale: int) -> range:
    """Grid for one variable: limits (lo >= 0) run to 2R+4, offsets cover [-R, R]."""
    if lo >= 0:
        return range(lo, 2 * grid_scale + 5)
    return range(-grid_scale, grid_scale + 1)


def seed_assignments(letters: Sequence[str], seeds: Sequence[Seed] = STANDARD_SEEDS) -> list[dict[str, Seed]]:
    """Seed combinations for the free slots.

    Up to two slots get the full product.  Three slots get a pairwise-covering
    array (i, j, i+j mod |seeds|) joined with every FIB/LUCAS combination; the
    latter alone proves a trilinear identity for all seeds, since the two
    sequences span every Fibonacci-like sequence.
    """
    letters = list(letters)
    if len(letters) <= 2:
        return [dict(zip(letters, c)) for c in itertools.product(seeds, repeat=len(letters))]
    n = len(seeds)
    combos = []
    for i, j in itertools.product(range(n), repeat=2):
        idx = [i, j, (i + j) % n] + [(i + 2 * j) % n] * (len(letters) - 3)
        combos.append(tuple(seeds[t] for t in idx))
    for c in itertools.product((FIB, LUCAS), repeat=len(letters)):
        if c not in combos:
            combos.append(c)
    return [dict(zip(letters, c)) for c in combos]


@dataclass
class RecordResult:
    id: str
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    first_failure: dict | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.error is None and self.passed > 0

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "ok": self.ok,
            "passed": self.passed,
            "failed": self.failed,
            "skipped": self.skipped,
            "first_failure": self.first_failure,
            "error": self.error,
        }


@dataclass
class VerifyReport:
    grid_scale: int
    results: list[RecordResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    @property
    def failing(self) -> list[str]:
        return [r.id for r in self.results if not r.ok]

    def to_json(self) -> dict:
        return {
            "grid_scale": self.grid_scale,
            "ok": self.ok,
            "records": len(self.results),
            "failing": self.failing,
            "results": [r.to_json() for r in self.results],
        }

    def lines(self) -> list[str]:
        out = []
        for r in self.results:
            status = "PASS" if r.ok else "FAIL"
            line = f"{r.id}  {status}  passed={r.passed} failed={r.failed} skipped={r.skipped}"
            if r.error:
                line += f"  error: {r.error}"
            elif r.first_failure:
                line += f"  first failure: {r.first_failure}"
            out.append(line)
        return out


class _Compiled:
    """Closures for one record; the LHS sum is accumulated across the limit n."""

    def __init__(self, rec: IdentityRecord):
        params = rec.params
        self.params = params
        self.rhs = E.compile_expr(rec.rhs_ast, params)
        self.lhs = E.compile_expr(rec.lhs_ast, params)
        self.constraint = E.compile_expr(rec.constraint_ast, params) if rec.constraint_ast is not None else None
        # sum(k=0..n, body) with body free of n: partial sums give every n in one pass
        self.body = None
        lhs = rec.lhs_ast
        if (
            isinstance(lhs, E.Sum)
            and lhs.lo == E.Num(Fraction(0))
            and isinstance(lhs.hi, E.Sym)
            and lhs.hi.name in params
            and lhs.hi.name not in E.free_symbols(lhs.body)
        ):
            self.limit = lhs.hi.name
            others = tuple(p for p in params if p != self.limit)
            self.others = others
            self.body = E.compile_expr(lhs.body, (lhs.var,) + others)


def _fmt(v) -> str:
    return format_rat(Fraction(v))


def _verify_one(args) -> RecordResult:
    rec, grid_scale, seeds = args
    res = RecordResult(rec.id)
    try:
        comp = _Compiled(rec)
    except FibsumError as exc:
        res.error = str(exc)
        return res
    ranges = {p: var_range(*rec.vars[p], grid_scale) for p in rec.params}
    assignments = seed_assignments(rec.letters, seeds)
    for assign in assignments:
        all_seeds = dict(rec.seeds)
        all_seeds.update(assign)
        tables = E.tables_for(all_seeds)
        try:
            if comp.body is not None:
                _grid_partial(rec, comp, ranges, tables, all_seeds, res)
            else:
                _grid_plain(rec, comp, ranges, tables, all_seeds, res)
        except FibsumError as exc:
            res.error = f"{type(exc).__name__}: {exc}"
            return res
    return res


def _record_failure(res, point, seeds, lhs, rhs):
    res.failed += 1
    if res.first_failure is None:
        res.first_failure = {
            "point": dict(point),
            "seeds": {k: str(v) for k, v in sorted(seeds.items())},
            "lhs": _fmt(lhs),
            "rhs": _fmt(rhs),
        }


def _check_point(rec, comp, tables, seeds, point, lhs, res):
    args = [point[p] for p in comp.params]
    if comp.constraint is not None:
        try:
            if comp.constraint(tables, *args) == 0:
                res.skipped += 1
                return
        except ZeroDivisionError:
            res.skipped += 1
            return
    try:
        rhs = comp.rhs(tables, *args)
    except ZeroDivisionError:
        res.skipped += 1
        return
    if lhs is None:
        lhs = comp.lhs(tables, *args)
    if lhs == rhs:
        res.passed += 1
    else:
        _record_failure(res, point, seeds, lhs, rhs)


def _grid_plain(rec, comp, ranges, tables, seeds, res):
    names = comp.params
    for values in itertools.product(*(ranges[p] for p in names)):
        _check_point(rec, comp, tables, seeds, dict(zip(names, values)), None, res)


def _grid_partial(rec, comp, ranges, tables, seeds, res):
    others = comp.others
    limit_range = ranges[comp.limit]
    top = max(limit_range)
    for values in itertools.product(*(ranges[p] for p in others)):
        acc = 0
        for k in range(0, top + 1):
            acc += comp.body(tables, k, *values)
            if k in limit_range:
                point = dict(zip(others, values))
                point[comp.limit] = k
                _check_point(rec, comp, tables, seeds, point, acc, res)


def catalog_verify(
    records: Iterable[IdentityRecord],
    grid_scale: int = 3,
    seeds: Sequence[Seed] = STANDARD_SEEDS,
    workers: int | None = None,
) -> VerifyReport:
    """Check LHS = RHS exactly on every in-domain grid point of every record."""
    records = sorted(records, key=lambda r: r.id)
    results = pmap(_verify_one, [(r, grid_scale, tuple(seeds)) for r in records], workers)
    return VerifyReport(grid_scale, results)


# --------------------------------------------------------------------------
# Second evaluation path through the summation engine
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SumShape:
    """``sum_{k=0}^n [C(n,k)] w^k k^m prod S(offset + slope k)``, offsets as expressions."""

    limit: str
    binomial: bool
    weight: Fraction
    m: int
    factors: tuple[tuple[str, E.Expr, int], ...]


class NotASumShape(ValueError):
    pass


def _split_linear(index: E.Expr, var: str) -> tuple[E.Expr, int]:
    """(index, slope) for index = offset + slope*var; the offset is the index at var = 0."""
    # slope from evaluating the difference at var = 1 and var = 0 with other symbols zero
    others = {s: 0 for s in E.free_symbols(index) if s != var}
    v0 = E.evaluate(index, **others, **{var: 0})
    v1 = E.evaluate(index, **others, **{var: 1})
    v2 = E.evaluate(index, **others, **{var: 2})
    slope = v1 - v0
    if v2 - v1 != slope or slope.denominator != 1:
        raise NotASumShape(f"index {E.to_text(index)} is not linear in {var}")
    return index, int(slope)


def sum_shape(rec: IdentityRecord) -> SumShape:
    """Recognize the record's LHS as a weighted product sum."""
    lhs = rec.lhs_ast
    if not (isinstance(lhs, E.Sum) and lhs.lo == E.Num(Fraction(0)) and isinstance(lhs.hi, E.Sym)):
        raise NotASumShape("LHS is not sum(k=0..n, ...)")
    k, n = lhs.var, lhs.hi.name
    factors_ast: list[E.Expr] = []

    def flatten(e):
        if isinstance(e, E.Bin) and e.op == "*":
            flatten(e.left)
            flatten(e.right)
        else:
            factors_ast.append(e)

    flatten(lhs.body)
    weight = Fraction(1)
    m = 0
    binomial = False
    factors = []
    for f in factors_ast:
        if isinstance(f, E.Num):
            raise NotASumShape(f"constant factor {f.value} in summand")
        if isinstance(f, E.Binom) and f.n == E.Sym(n) and f.k == E.Sym(k):
            binomial = True
            continue
        if isinstance(f, E.Pow):
            base, ex = f.base, f.exponent
            if isinstance(base, E.Seq):
                if not (isinstance(ex, E.Num) and ex.value.denominator == 1 and ex.value > 0):
                    raise NotASumShape("sequence power must be a positive integer")
                off, slope = _split_linear(base.index, k)
                factors.extend([(base.letter, off, slope)] * int(ex.value))
                continue
            if base == E.Sym(k) and isinstance(ex, E.Num):
                m += int(ex.value)
                continue
            if k not in E.free_symbols(base) and not E.free_symbols(base):
                c = E.evaluate(base)
                if ex == E.Sym(k):
                    weight *= c
                    continue
                if ex == E.Neg(E.Sym(k)):
                    weight /= c
                    continue
            raise NotASumShape(f"unsupported power {E.to_text(f)}")
        if f == E.Sym(k):
            m += 1
            continue
        if isinstance(f, E.Seq):
            off, slope = _split_linear(f.index, k)
            factors.append((f.letter, off, slope))
            continue
        raise NotASumShape(f"unsupported factor {E.to_text(f)}")
    return SumShape(n, binomial, weight, m, tuple(factors))


def brute_via_engine(rec: IdentityRecord, params: Mapping[str, int], seeds: Mapping[str, Seed]) -> Fraction:
    """LHS through the summation engine's term-by-term path."""
    shape = sum_shape(rec)
    all_seeds = dict(E.DEFAULT_SEEDS)
    all_seeds.update(rec.seeds)
    all_seeds.update(seeds)
    env = {k: Fraction(v) for k, v in params.items()}
    env[rec.lhs_ast.var] = Fraction(0)
    factors = []
    for letter, off, slope in shape.factors:
        factors.append((all_seeds[letter], int(E.evaluate(off, **env)), slope))
    return weighted_sum_brute(shape.weight, shape.m, params[shape.limit], factors, binomial=shape.binomial)


def two_path_check(rec: IdentityRecord, grid_scale: int = 1, seeds: Sequence[Seed] = STANDARD_SEEDS) -> list[dict]:
    """Points where AST evaluation of the LHS and the engine path disagree."""
    bad = []
    ranges = {p: var_range(*rec.vars[p], grid_scale) for p in rec.params}
    for assign in seed_assignments(rec.letters, seeds):
        for values in itertools.product(*(ranges[p] for p in rec.params)):
            point = dict(zip(rec.params, values))
            a = rec.eval_lhs(point, assign)
            b = brute_via_engine(rec, point, assign)
            if a != b:
                bad.append({"point": point, "seeds": {k: str(v) for k, v in assign.items()}, "ast": _fmt(a), "engine": _fmt(b)})
    return bad
