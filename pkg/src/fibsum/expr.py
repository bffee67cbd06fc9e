"""Expression grammar for identity catalogs.

Grammar (whitespace-insensitive, explicit ``*`` only)::

    expr     := term (('+' | '-') term)*
    term     := factor ('*' factor)*
    factor   := atom ('^' exponent)?
    exponent := atom ('^' exponent)?          # right-associative
    atom     := INT ('/' INT)? | symbol | seqRef | '(' expr ')' | '-' atom | call
    seqRef   := SEQ '[' expr ']'              # SEQ in F L G H K
    call     := 'sum' '(' NAME '=' expr '..' expr ',' expr ')'
              | 'binom' '(' expr ',' expr ')'
              | 'kronecker' '(' expr ',' expr ')'
              | 'floorpow' '(' expr ',' expr ',' expr ')'

``floorpow(b, u, v)`` is ``b^floor(u/v)``.  Note that unary minus binds
tighter than ``^``: ``-x^2`` is ``(-x)^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Union

from .arith import exact_pow, format_rat, to_int
from .errors import EvalError, ExprSyntaxError, UnboundSymbol
from .sequences import FIB, LUCAS, Seed, SeqTable, binom, seq_table

SEQ_LETTERS = ("F", "L", "G", "H", "K")
CALLS = ("sum", "binom", "kronecker", "floorpow")
RESERVED = frozenset(SEQ_LETTERS + CALLS)
DEFAULT_SEEDS = {"F": FIB, "L": LUCAS}

MAX_DEPTH = 200


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------


class Expr:
    __slots__ = ()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Num(Expr):
    value: Fraction

    def __post_init__(self):
        v = Fraction(self.value)
        if v < 0:
            raise ValueError("literals are non-negative; use Neg for signs")
        object.__setattr__(self, "value", v)


@dataclass(frozen=True)
class Sym(Expr):
    name: str


@dataclass(frozen=True)
class Seq(Expr):
    letter: str
    index: Expr


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class Bin(Expr):
    op: str  # one of + - *
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Expr


@dataclass(frozen=True)
class Sum(Expr):
    var: str
    lo: Expr
    hi: Expr
    body: Expr


@dataclass(frozen=True)
class Binom(Expr):
    n: Expr
    k: Expr


@dataclass(frozen=True)
class Kronecker(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class FloorPow(Expr):
    base: Expr
    num: Expr
    den: Expr


def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, (Num, Sym)):
        return ()
    if isinstance(e, Seq):
        return (e.index,)
    if isinstance(e, Neg):
        return (e.operand,)
    if isinstance(e, Bin):
        return (e.left, e.right)
    if isinstance(e, Pow):
        return (e.base, e.exponent)
    if isinstance(e, Sum):
        return (e.lo, e.hi, e.body)
    if isinstance(e, Binom):
        return (e.n, e.k)
    if isinstance(e, Kronecker):
        return (e.a, e.b)
    if isinstance(e, FloorPow):
        return (e.base, e.num, e.den)
    raise TypeError(f"not an expression node: {e!r}")


def free_symbols(e: Expr) -> set[str]:
    if isinstance(e, Sym):
        return {e.name}
    if isinstance(e, Sum):
        return free_symbols(e.lo) | free_symbols(e.hi) | (free_symbols(e.body) - {e.var})
    out: set[str] = set()
    for c in children(e):
        out |= free_symbols(c)
    return out


def seq_letters(e: Expr) -> set[str]:
    out = {e.letter} if isinstance(e, Seq) else set()
    for c in children(e):
        out |= seq_letters(c)
    return out


# --------------------------------------------------------------------------
# Lexer and parser
# --------------------------------------------------------------------------

_PUNCT = set("+-*^/()[],=")


@dataclass
class _Tok:
    kind: str  # INT, NAME, EOF or the punctuation itself
    text: str
    pos: int


def _lex(text: str) -> list[_Tok]:
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
        elif "0" <= ch <= "9":
            j = i
            while j < n and "0" <= text[j] <= "9":
                j += 1
            toks.append(_Tok("INT", text[i:j], i))
            i = j
        elif ch == "_" or ("a" <= ch <= "z") or ("A" <= ch <= "Z"):
            j = i
            while j < n and (text[j] == "_" or text[j].isascii() and text[j].isalnum()):
                j += 1
            toks.append(_Tok("NAME", text[i:j], i))
            i = j
        elif text.startswith("..", i):
            toks.append(_Tok("..", "..", i))
            i += 2
        elif ch in _PUNCT:
            toks.append(_Tok(ch, ch, i))
            i += 1
        else:
            raise ExprSyntaxError(f"unexpected character {ch!r}", i)
    toks.append(_Tok("EOF", "", n))
    return toks


_ATOM_START = {"INT", "NAME", "(", "-"}


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0
        self.depth = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self, kind: str) -> _Tok:
        t = self.tok
        if t.kind != kind:
            got = "end of input" if t.kind == "EOF" else repr(t.text)
            raise ExprSyntaxError(f"unexpected {got}", t.pos, {kind})
        self.i += 1
        return t

    def enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise ExprSyntaxError("expression nested too deeply", self.tok.pos)

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "EOF":
            raise ExprSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos, {"+", "-", "*", "^", "EOF"})
        return e

    def expr(self) -> Expr:
        self.enter()
        e = self.term()
        while self.tok.kind in ("+", "-"):
            op = self.take(self.tok.kind).kind
            e = Bin(op, e, self.term())
        self.depth -= 1
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.tok.kind == "*":
            self.i += 1
            e = Bin("*", e, self.factor())
        return e

    def factor(self) -> Expr:
        base = self.atom()
        if self.tok.kind == "^":
            self.i += 1
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> Expr:
        self.enter()
        base = self.atom()
        if self.tok.kind == "^":
            self.i += 1
            base = Pow(base, self.exponent())
        self.depth -= 1
        return base

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "INT":
            self.i += 1
            try:
                num = int(t.text)
                if self.tok.kind == "/":
                    self.i += 1
                    d = self.take("INT")
                    den = int(d.text)
                    if den == 0:
                        raise ExprSyntaxError("zero denominator in literal", d.pos)
                    return Num(Fraction(num, den))
            except ValueError:
                raise ExprSyntaxError("integer literal too long", t.pos) from None
            return Num(Fraction(num))
        if t.kind == "(":
            self.i += 1
            e = self.expr()
            self.take(")")
            return e
        if t.kind == "-":
            self.i += 1
            self.enter()
            e = Neg(self.atom())
            self.depth -= 1
            return e
        if t.kind == "NAME":
            self.i += 1
            name = t.text
            if name in SEQ_LETTERS:
                self.take("[")
                idx = self.expr()
                self.take("]")
                return Seq(name, idx)
            if name in CALLS:
                return self.call(name)
            return Sym(name)
        got = "end of input" if t.kind == "EOF" else repr(t.text)
        raise ExprSyntaxError(f"unexpected {got}", t.pos, _ATOM_START)

    def call(self, name: str) -> Expr:
        self.take("(")
        if name == "sum":
            var = self.take("NAME")
            if var.text in RESERVED:
                raise ExprSyntaxError(f"reserved name {var.text!r} as summation variable", var.pos)
            self.take("=")
            lo = self.expr()
            self.take("..")
            hi = self.expr()
            self.take(",")
            body = self.expr()
            node: Expr = Sum(var.text, lo, hi, body)
        elif name == "floorpow":
            a = self.expr()
            self.take(",")
            b = self.expr()
            self.take(",")
            node = FloorPow(a, b, self.expr())
        else:
            a = self.expr()
            self.take(",")
            b = self.expr()
            node = Binom(a, b) if name == "binom" else Kronecker(a, b)
        self.take(")")
        return node


def parse(text: str) -> Expr:
    """Parse ``text``; raises ExprSyntaxError carrying position and expected tokens."""
    if not isinstance(text, str):
        raise TypeError("parse expects a str")
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# Printer
# --------------------------------------------------------------------------

_EXPR, _TERM, _FACTOR, _ATOM = range(4)


def _level(e: Expr) -> int:
    if isinstance(e, Bin):
        return _TERM if e.op == "*" else _EXPR
    if isinstance(e, Pow):
        return _FACTOR
    return _ATOM


def _wrap(e: Expr, need: int) -> str:
    s = to_text(e)
    return f"({s})" if _level(e) < need else s


def _power_part(e: Expr) -> str:
    # fractional literals are legal atoms but read badly next to '^'
    if isinstance(e, Num) and e.value.denominator != 1:
        return f"({format_rat(e.value)})"
    return _wrap(e, _ATOM)


def to_text(e: Expr) -> str:
    """Canonical text form; ``parse(to_text(e)) == e``."""
    if isinstance(e, Num):
        return format_rat(e.value)
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Seq):
        return f"{e.letter}[{to_text(e.index)}]"
    if isinstance(e, Neg):
        return "-" + _wrap(e.operand, _ATOM)
    if isinstance(e, Bin):
        if e.op == "*":
            return f"{_wrap(e.left, _TERM)} * {_wrap(e.right, _FACTOR)}"
        return f"{_wrap(e.left, _EXPR)} {e.op} {_wrap(e.right, _TERM)}"
    if isinstance(e, Pow):
        exp = to_text(e.exponent) if isinstance(e.exponent, Pow) else _power_part(e.exponent)
        base = f"({to_text(e.base)})" if isinstance(e.base, Neg) else _power_part(e.base)
        return f"{base}^{exp}"
    if isinstance(e, Sum):
        return f"sum({e.var}={to_text(e.lo)}..{to_text(e.hi)}, {to_text(e.body)})"
    if isinstance(e, Binom):
        return f"binom({to_text(e.n)}, {to_text(e.k)})"
    if isinstance(e, Kronecker):
        return f"kronecker({to_text(e.a)}, {to_text(e.b)})"
    if isinstance(e, FloorPow):
        return f"floorpow({to_text(e.base)}, {to_text(e.num)}, {to_text(e.den)})"
    raise TypeError(f"not an expression node: {e!r}")


def canonical(text: str) -> str:
    return to_text(parse(text))


# --------------------------------------------------------------------------
# Evaluation
# --------------------------------------------------------------------------

Value = Union[int, Fraction]


@dataclass
class EvalContext:
    bindings: dict[str, Value] = field(default_factory=dict)
    seeds: dict[str, Seed] = field(default_factory=dict)
    x: Value | None = None

    def table(self, letter: str) -> SeqTable:
        seed = self.seeds.get(letter) or DEFAULT_SEEDS.get(letter)
        if seed is None:
            raise UnboundSymbol(letter)
        return seq_table(seed)


def _int_arg(v: Value, what: str) -> int:
    try:
        return to_int(v)
    except ValueError:
        raise EvalError(f"{what} must be an integer, got {v}") from None


def _floorpow(base: Value, num: Value, den: Value) -> Value:
    den_i = _int_arg(den, "floorpow divisor")
    if den_i == 0:
        raise EvalError("floorpow divisor is zero")
    return exact_pow(base, math.floor(Fraction(num) / den_i))


def _binom(n: Value, k: Value) -> int:
    n_i = _int_arg(n, "binom n")
    if n_i < 0:
        raise EvalError("binom requires n >= 0")
    return binom(n_i, _int_arg(k, "binom k"))


def _pow(base: Value, e: Value) -> Value:
    if type(e) is not int:
        e = _int_arg(e, "exponent")
    return exact_pow(base, e)


def _irange(lo: Value, hi: Value) -> range:
    return range(_int_arg(lo, "sum bound"), _int_arg(hi, "sum bound") + 1)


def _lookup(table: SeqTable, index: Value) -> int:
    if type(index) is not int:
        index = _int_arg(index, "sequence index")
    return table[index]


def _eval(e: Expr, env: dict[str, Value], ctx: EvalContext) -> Value:
    if isinstance(e, Num):
        v = e.value
        return v.numerator if v.denominator == 1 else v
    if isinstance(e, Sym):
        try:
            return env[e.name]
        except KeyError:
            raise UnboundSymbol(e.name) from None
    if isinstance(e, Seq):
        return _lookup(ctx.table(e.letter), _eval(e.index, env, ctx))
    if isinstance(e, Neg):
        return -_eval(e.operand, env, ctx)
    if isinstance(e, Bin):
        a = _eval(e.left, env, ctx)
        b = _eval(e.right, env, ctx)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        return a * b
    if isinstance(e, Pow):
        return _pow(_eval(e.base, env, ctx), _eval(e.exponent, env, ctx))
    if isinstance(e, Sum):
        total: Value = 0
        inner = dict(env)
        for k in _irange(_eval(e.lo, env, ctx), _eval(e.hi, env, ctx)):
            inner[e.var] = k
            total += _eval(e.body, inner, ctx)
        return total
    if isinstance(e, Binom):
        return _binom(_eval(e.n, env, ctx), _eval(e.k, env, ctx))
    if isinstance(e, Kronecker):
        return 1 if _eval(e.a, env, ctx) == _eval(e.b, env, ctx) else 0
    if isinstance(e, FloorPow):
        return _floorpow(_eval(e.base, env, ctx), _eval(e.num, env, ctx), _eval(e.den, env, ctx))
    raise TypeError(f"not an expression node: {e!r}")


def evaluate(e: Expr, ctx: EvalContext | None = None, **bindings: Value) -> Fraction:
    """Exact value of ``e``; keyword arguments add to the context bindings."""
    ctx = ctx or EvalContext()
    env = dict(ctx.bindings)
    if ctx.x is not None:
        env.setdefault("x", ctx.x)
    env.update(bindings)
    return Fraction(_eval(e, env, ctx))


# --------------------------------------------------------------------------
# Compilation to Python closures (fast path for grid runners)
# --------------------------------------------------------------------------


class _Codegen:
    def __init__(self):
        self.consts: dict[str, object] = {}

    def const(self, v: Fraction) -> str:
        if v.denominator == 1:
            return f"({v.numerator})"
        name = f"_c{len(self.consts)}"
        self.consts[name] = v
        return name

    def gen(self, e: Expr) -> str:
        if isinstance(e, Num):
            return self.const(e.value)
        if isinstance(e, Sym):
            return f"v_{e.name}"
        if isinstance(e, Seq):
            return f"_lookup(S_{e.letter}, {self.gen(e.index)})"
        if isinstance(e, Neg):
            return f"(-{self.gen(e.operand)})"
        if isinstance(e, Bin):
            return f"({self.gen(e.left)} {e.op} {self.gen(e.right)})"
        if isinstance(e, Pow):
            return f"_pow({self.gen(e.base)}, {self.gen(e.exponent)})"
        if isinstance(e, Sum):
            return (
                f"_sum(({self.gen(e.body)} for v_{e.var} in "
                f"_irange({self.gen(e.lo)}, {self.gen(e.hi)})), 0)"
            )
        if isinstance(e, Binom):
            return f"_binom({self.gen(e.n)}, {self.gen(e.k)})"
        if isinstance(e, Kronecker):
            return f"(1 if {self.gen(e.a)} == {self.gen(e.b)} else 0)"
        if isinstance(e, FloorPow):
            return f"_floorpow({self.gen(e.base)}, {self.gen(e.num)}, {self.gen(e.den)})"
        raise TypeError(f"not an expression node: {e!r}")


def _fast_lookup_ok(e: Expr) -> bool:
    # integer-only index arithmetic lets the generated code index the table directly
    if isinstance(e, Num):
        return e.value.denominator == 1
    if isinstance(e, Sym):
        return True
    if isinstance(e, Neg):
        return _fast_lookup_ok(e.operand)
    if isinstance(e, Bin):
        return _fast_lookup_ok(e.left) and _fast_lookup_ok(e.right)
    return False


class _FastCodegen(_Codegen):
    def gen(self, e: Expr) -> str:
        if isinstance(e, Seq) and _fast_lookup_ok(e.index):
            return f"S_{e.letter}[{self.gen(e.index)}]"
        return super().gen(e)


def compile_expr(e: Expr, params: tuple[str, ...]) -> Callable[..., Value]:
    """Compile ``e`` into ``f(tables, *values)``.

    ``tables`` maps sequence letters to SeqTable objects and ``values`` bind
    ``params`` positionally.  The result agrees exactly with ``evaluate``.
    """
    missing = free_symbols(e) - set(params)
    if missing:
        raise UnboundSymbol(sorted(missing)[0])
    for p in params:
        if not p.isidentifier():
            raise ValueError(f"bad parameter name {p!r}")
    cg = _FastCodegen()
    body = cg.gen(e)
    letters = sorted(seq_letters(e))
    unpack = "".join(f"    S_{c} = tables[{c!r}]\n" for c in letters)
    args = "".join(f", v_{p}" for p in params)
    src = f"def _f(tables{args}):\n{unpack}    return {body}\n"
    ns = dict(
        cg.consts,
        _lookup=_lookup,
        _pow=_pow,
        _sum=sum,
        _irange=_irange,
        _binom=_binom,
        _floorpow=_floorpow,
    )
    exec(compile(src, "<fibsum-expr>", "exec"), ns)
    return ns["_f"]


def tables_for(seeds: Mapping[str, Seed]) -> dict[str, SeqTable]:
    out = {c: seq_table(s) for c, s in DEFAULT_SEEDS.items()}
    out.update({c: seq_table(s) for c, s in seeds.items()})
    return out
