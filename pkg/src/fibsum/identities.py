"""Executable library of generalized Fibonacci identities.

Each identity is a pair of exact evaluators over integer parameters and
seed slots.  A slot letter (G, H) is bound to a seed at check time; F and L
are always the Fibonacci and Lucas numbers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .errors import GuardViolated
from .runner import pmap
from .sequences import FIB, LUCAS, STANDARD_SEEDS, Seed, gen_at, seq_table


def _sgn(e: int) -> int:
    return -1 if e & 1 else 1


def _det(G) -> int:
    """G_0 G_2 - G_1^2; nonzero for every seed except (0, 0)."""
    return G[0] * G[2] - G[1] * G[1]


class Tables:
    """Sequence tables visible to an identity: F, L and the bound slots."""

    __slots__ = ("F", "L", "G", "H", "K")

    def __init__(self, seeds: Mapping[str, Seed]):
        self.F = seq_table(FIB)
        self.L = seq_table(LUCAS)
        self.G = seq_table(seeds["G"]) if "G" in seeds else None
        self.H = seq_table(seeds["H"]) if "H" in seeds else None
        self.K = seq_table(seeds["K"]) if "K" in seeds else None


Side = Callable[..., "int | Fraction"]


@dataclass(frozen=True)
class CoreIdentity:
    name: str
    params: tuple[str, ...]
    slots: tuple[str, ...]
    lhs: tuple[Side, ...]  # every form must agree with rhs
    rhs: Side
    guarded: bool = False  # divides by G_0 G_2 - G_1^2


@dataclass(frozen=True)
class Verdict:
    name: str
    equal: bool
    lhs: tuple[Fraction, ...]
    rhs: Fraction


def _gfl(s, n):
    G = s.G
    return Fraction((2 * G[1] - G[0]) * s.F[n] + G[0] * s.L[n], 2)


def _gmin(s, n):
    G = s.G
    return _sgn(n + 1) * Fraction((2 * G[1] - G[0]) * s.F[n] - G[0] * s.L[n], 2)


def _ghprod(s, n, m):
    G, H = s.G, s.H
    return Fraction(
        (3 * G[0] - G[1]) * H[m + n]
        + (2 * G[1] - G[0]) * H[m + n + 1]
        + _sgn(n) * ((2 * G[0] + G[1]) * H[m - n] - (2 * G[1] - G[0]) * H[m - n + 1]),
        5,
    )


def _prod3_rhs(s, n, m):
    G, H = s.G, s.H
    return (3 * G[0] - G[1]) * H[m + n] + (2 * G[1] - G[0]) * H[m + n + 1]


def _prod4_rhs(s, n, m):
    G, H = s.G, s.H
    return _sgn(n) * ((2 * G[0] + G[1]) * H[m - n] - (2 * G[1] - G[0]) * H[m - n + 1])


CORE_IDENTITIES: dict[str, CoreIdentity] = {
    i.name: i
    for i in [
        CoreIdentity("gfl", ("n",), ("G",), (lambda s, n: s.G[n],), _gfl),
        CoreIdentity("gmin", ("n",), ("G",), (lambda s, n: s.G[-n],), _gmin),
        CoreIdentity(
            "gfromf", ("n",), ("G",), (lambda s, n: s.G[n],),
            lambda s, n: (s.G[1] - s.G[0]) * s.F[n] + s.G[0] * s.F[n + 1],
        ),
        CoreIdentity(
            "gfroml", ("n",), ("G",), (lambda s, n: s.G[n],),
            lambda s, n: Fraction((3 * s.G[0] - s.G[1]) * s.L[n] + (2 * s.G[1] - s.G[0]) * s.L[n + 1], 5),
        ),
        CoreIdentity(
            "ffromg", ("n",), ("G",), (lambda s, n: s.F[n],),
            lambda s, n: Fraction(-s.G[1] * s.G[n] + s.G[0] * s.G[n + 1], _det(s.G)),
            guarded=True,
        ),
        CoreIdentity(
            "lfromg", ("n",), ("G",), (lambda s, n: s.L[n],),
            lambda s, n: Fraction(
                (2 * s.G[0] + s.G[1]) * s.G[n] + (s.G[0] - 2 * s.G[1]) * s.G[n + 1], _det(s.G)
            ),
            guarded=True,
        ),
        CoreIdentity(
            "gminus", ("n",), ("G",), (lambda s, n: s.G[-n],),
            lambda s, n: _sgn(n) * Fraction(
                (s.G[0] ** 2 + s.G[1] ** 2) * s.G[n] + (s.G[-1] ** 2 - s.G[1] ** 2) * s.G[n + 1],
                _det(s.G),
            ),
            guarded=True,
        ),
        CoreIdentity(
            "hfromg", ("n",), ("G", "H"), (lambda s, n: s.H[n],),
            lambda s, n: Fraction(
                (s.H[0] * s.G[2] - s.H[1] * s.G[1]) * s.G[n] + (s.G[0] * s.H[1] - s.G[1] * s.H[0]) * s.G[n + 1],
                _det(s.G),
            ),
            guarded=True,
        ),
        CoreIdentity("ghprod", ("n", "m"), ("G", "H"), (lambda s, n, m: s.G[n] * s.H[m],), _ghprod),
        CoreIdentity(
            "gsquare", ("n",), ("G",), (lambda s, n: s.G[n] ** 2,),
            lambda s, n: Fraction(
                (3 * s.G[0] - s.G[1]) * s.G[2 * n] + (2 * s.G[1] - s.G[0]) * s.G[2 * n + 1] + 2 * _sgn(n) * _det(s.G),
                5,
            ),
        ),
        CoreIdentity(
            "comm", ("n", "m"), ("G", "H"), (lambda s, n, m: s.G[n] * s.H[m] - s.G[m] * s.H[n],),
            lambda s, n, m: _sgn(n) * (s.G[0] * s.H[1] - s.G[1] * s.H[0]) * s.F[m - n],
        ),
        CoreIdentity(
            "general", ("n", "r", "p", "m", "q"), ("G", "H"),
            (lambda s, n, r, p, m, q: s.G[n + r + p] * s.H[m + r + q] - s.G[n + r] * s.H[m + r + p + q],),
            lambda s, n, r, p, m, q: _sgn(n + r) * (s.G[p] * s.H[m - n + q] - s.G[0] * s.H[m - n + p + q]),
        ),
        CoreIdentity(
            "plusplus", ("n", "p", "m"), ("G", "H"),
            (lambda s, n, p, m: s.G[n - p] * s.H[m + p] + s.G[n - p + 1] * s.H[m + p + 1],),
            lambda s, n, p, m: s.G[0] * s.H[m + n] + s.G[1] * s.H[m + n + 1],
        ),
        CoreIdentity(
            "cassini", ("n", "p", "m"), ("G", "H"),
            (lambda s, n, p, m: s.G[n + p] * s.H[m + p] - s.G[n + p - 1] * s.H[m + p + 1],),
            lambda s, n, p, m: _sgn(n + p) * (s.G[0] * s.H[m - n] - s.G[-1] * s.H[m - n + 1]),
        ),
        CoreIdentity(
            "prod1", ("n", "m"), ("G", "H"),
            (lambda s, n, m: s.G[n] * s.H[m] + s.G[n + 1] * s.H[m + 1],),
            lambda s, n, m: Fraction(
                (3 * s.G[0] - s.G[1]) * (s.H[m + n] + s.H[m + n + 2])
                + (2 * s.G[1] - s.G[0]) * (s.H[m + n + 1] + s.H[m + n + 3]),
                5,
            ),
        ),
        CoreIdentity(
            "prod2", ("n", "m"), ("G", "H"),
            (lambda s, n, m: s.G[n] * s.H[m] - s.G[n - 1] * s.H[m + 1],),
            lambda s, n, m: _sgn(n) * Fraction(
                (2 * s.G[0] + s.G[1]) * (s.H[m - n] + s.H[m - n + 2])
                - (2 * s.G[1] - s.G[0]) * (s.H[m - n + 1] + s.H[m - n + 3]),
                5,
            ),
        ),
        CoreIdentity(
            "prod3", ("n", "m"), ("G", "H"),
            (
                lambda s, n, m: 2 * s.G[n] * s.H[m] + s.G[n - 1] * s.H[m - 1] + s.G[n + 1] * s.H[m + 1],
                lambda s, n, m: 3 * s.G[n] * s.H[m] + s.G[n - 1] * s.H[m + 1] + s.G[n + 1] * s.H[m - 1],
            ),
            _prod3_rhs,
        ),
        CoreIdentity(
            "prod4", ("n", "m"), ("G", "H"),
            (
                lambda s, n, m: 3 * s.G[n] * s.H[m] - s.G[n - 1] * s.H[m - 1] - s.G[n + 1] * s.H[m + 1],
                lambda s, n, m: 2 * s.G[n] * s.H[m] - s.G[n - 1] * s.H[m + 1] - s.G[n + 1] * s.H[m - 1],
            ),
            _prod4_rhs,
        ),
    ]
}

# Product-to-sum expansions with F and L only.
SUMMAND_RHS: dict[str, Callable[..., Fraction]] = {
    "summand1": lambda F, L, k, p, q: Fraction(L[p + q + 2 * k] - L[p - q] * _sgn(q + k), 5),
    "summand2": lambda F, L, k, p, q, r: Fraction(
        F[p + q + r + 3 * k] - _sgn(r + k) * F[p + q - r + k] - L[p - q] * _sgn(q + k) * F[r + k], 5
    ),
    "summand3": lambda F, L, k, p, q: L[p + q + 2 * k] + L[p - q] * _sgn(q + k),
    "summand4": lambda F, L, k, p, q, r: (
        L[p + q + r + 3 * k] + _sgn(r + k) * L[p + q - r + k] + L[p - q] * _sgn(q + k) * L[r + k]
    ),
    "summand5": lambda F, L, k, p, q, r, s: Fraction(
        L[p + q + r + s + 4 * k]
        - _sgn(s + k) * L[p + q + r - s + 2 * k]
        - _sgn(r + k) * L[p + q - r + s + 2 * k]
        - L[p - q] * _sgn(q + k) * L[r + s + 2 * k]
        + _sgn(r + s) * L[p + q - r - s]
        + _sgn(q + s) * L[p - q] * L[r - s],
        25,
    ),
    "summand6": lambda F, L, k, p, q, r, s: (
        L[p + q + r + s + 4 * k]
        + _sgn(s + k) * L[p + q + r - s + 2 * k]
        + _sgn(r + k) * L[p + q - r + s + 2 * k]
        + L[p - q] * _sgn(q + k) * L[r + s + 2 * k]
        + _sgn(r + s) * L[p + q - r - s]
        + _sgn(q + s) * L[p - q] * L[r - s]
    ),
}

_SUMMAND_LHS: dict[str, tuple[str, tuple[str, ...]]] = {
    "summand1": ("F", ("p", "q")),
    "summand2": ("F", ("p", "q", "r")),
    "summand3": ("L", ("p", "q")),
    "summand4": ("L", ("p", "q", "r")),
    "summand5": ("F", ("p", "q", "r", "s")),
    "summand6": ("L", ("p", "q", "r", "s")),
}


def _summand_identity(name: str) -> CoreIdentity:
    letter, offs = _SUMMAND_LHS[name]
    rhs = SUMMAND_RHS[name]

    # the tables argument is positional-only: "s" is also an offset name here
    def lhs(tb, /, k, **params):
        seq = getattr(tb, letter)
        out = 1
        for o in offs:
            out *= seq[params[o] + k]
        return out

    return CoreIdentity(name, ("k",) + offs, (), (lhs,), lambda tb, /, k, **params: rhs(tb.F, tb.L, k, **params))


for _name in _SUMMAND_LHS:
    CORE_IDENTITIES[_name] = _summand_identity(_name)

CORE_IDENTITIES.update(
    {
        "fcube": CoreIdentity(
            "fcube", ("k",), (), (lambda s, k: s.F[k] ** 3,),
            lambda s, k: Fraction(s.F[3 * k] - 3 * _sgn(k) * s.F[k], 5),
        ),
        "lcube-expand": CoreIdentity(
            "lcube-expand", ("k",), (), (lambda s, k: s.L[k] ** 3,),
            lambda s, k: s.L[3 * k] + 3 * _sgn(k) * s.L[k],
        ),
        "fquartic-expand": CoreIdentity(
            "fquartic-expand", ("k",), (), (lambda s, k: s.F[k] ** 4,),
            lambda s, k: Fraction(s.L[4 * k] - 4 * _sgn(k) * s.L[2 * k] + 6, 25),
        ),
        "lquartic-expand": CoreIdentity(
            "lquartic-expand", ("k",), (), (lambda s, k: s.L[k] ** 4,),
            lambda s, k: s.L[4 * k] + 4 * _sgn(k) * s.L[2 * k] + 6,
        ),
    }
)

IDENTITY_NAMES: tuple[str, ...] = tuple(CORE_IDENTITIES)


def get_identity(name: str) -> CoreIdentity:
    try:
        return CORE_IDENTITIES[name]
    except KeyError:
        from .errors import UnknownRecord

        raise UnknownRecord(f"unknown identity {name!r}") from None


def check_core_identity(identity: CoreIdentity | str, params: Mapping[str, int], seeds: Mapping[str, Seed] | None = None) -> Verdict:
    """Evaluate every left-hand form and the right-hand side exactly."""
    if isinstance(identity, str):
        identity = get_identity(identity)
    seeds = dict(seeds or {})
    for slot in identity.slots:
        seeds.setdefault(slot, FIB)
    tables = Tables(seeds)
    if identity.guarded and _det(tables.G) == 0:
        raise GuardViolated(f"{identity.name}: G_0 G_2 - G_1^2 = 0 for seed {seeds['G']}")
    kwargs = {p: params[p] for p in identity.params}
    lhs = tuple(Fraction(f(tables, **kwargs)) for f in identity.lhs)
    rhs = Fraction(identity.rhs(tables, **kwargs))
    return Verdict(identity.name, all(v == rhs for v in lhs), lhs, rhs)


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AlphaBeta:
    """G_n = alpha F_n + beta L_n."""

    alpha: Fraction
    beta: Fraction


def decompose(seed: Seed) -> AlphaBeta:
    g_minus1 = seed.g1 - seed.g0
    return AlphaBeta(Fraction(g_minus1 + seed.g1, 2), Fraction(seed.g0, 2))


def product_expand(gseed: Seed, hseed: Seed, m: int, n: int) -> Fraction:
    """G_m H_n rewritten as a combination of single G terms."""
    G = seq_table(gseed)
    h0, h1 = hseed.g0, hseed.g1
    return Fraction(
        (3 * h0 - h1) * G[m + n]
        + (2 * h1 - h0) * G[m + n + 1]
        + _sgn(n) * ((2 * h0 + h1) * G[m - n] - (2 * h1 - h0) * G[m - n + 1]),
        5,
    )


def summand_expand(which: str, params: Mapping[str, int], k: int) -> Fraction:
    """Right-hand side of a product-to-sum expansion at step k."""
    if which not in SUMMAND_RHS:
        raise ValueError(f"unknown expansion {which!r}")
    _, offs = _SUMMAND_LHS[which]
    return Fraction(SUMMAND_RHS[which](seq_table(FIB), seq_table(LUCAS), k, **{o: params[o] for o in offs}))


# --------------------------------------------------------------------------
# Grid verification
# --------------------------------------------------------------------------


@dataclass
class GridReport:
    name: str
    points: int = 0
    skipped: int = 0  # points outside the guard
    failures: list[tuple[dict, dict, Verdict]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _grid_one(args) -> GridReport:
    name, radius, seeds = args
    ident = CORE_IDENTITIES[name]
    report = GridReport(name)
    rng = range(-radius, radius + 1)
    for combo in itertools.product(seeds, repeat=len(ident.slots)):
        slot_seeds = dict(zip(ident.slots, combo))
        tables = Tables(slot_seeds)
        if ident.guarded and _det(tables.G) == 0:
            report.skipped += len(rng) ** len(ident.params)
            continue
        for point in itertools.product(rng, repeat=len(ident.params)):
            kwargs = dict(zip(ident.params, point))
            rhs = ident.rhs(tables, **kwargs)
            report.points += 1
            for f in ident.lhs:
                if f(tables, **kwargs) != rhs:
                    report.failures.append((kwargs, slot_seeds, check_core_identity(ident, kwargs, slot_seeds)))
                    break
    return report


def run_identity_grid(
    names: Iterable[str] | None = None,
    radius: int = 4,
    seeds: Sequence[Seed] = STANDARD_SEEDS,
    workers: int | None = None,
) -> list[GridReport]:
    """Check identities on every parameter point of [-radius, radius] and every seed combination."""
    names = list(names) if names is not None else list(IDENTITY_NAMES)
    for n in names:
        get_identity(n)
    return pmap(_grid_one, [(n, radius, tuple(seeds)) for n in names], workers)


def product_expand_grid(radius: int = 4, seeds: Sequence[Seed] = STANDARD_SEEDS) -> list[tuple]:
    """Points where product_expand differs from the direct product (empty when all agree)."""
    bad = []
    rng = range(-radius, radius + 1)
    for g, h in itertools.product(seeds, repeat=2):
        for m, n in itertools.product(rng, rng):
            if product_expand(g, h, m, n) != gen_at(g, m) * gen_at(h, n):
                bad.append((g, h, m, n))
    return bad
