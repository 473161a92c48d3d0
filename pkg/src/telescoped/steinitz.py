"""Prime-exponent sequences (types of rank-1 torsion-free groups)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union

from sympy import factorint, isprime, nextprime

INF = math.inf
Exponent = Union[int, float]


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def prime_factors(n: int) -> dict[int, int]:
    if n == 0:
        raise ValueError("zero has no factorization")
    return {int(p): int(e) for p, e in factorint(abs(n)).items()}


def primes_skipping(skip: Iterable[int]) -> Iterator[int]:
    """Primes in increasing order, omitting those in ``skip``."""
    skip = set(skip)
    p = 2
    while True:
        if p not in skip:
            yield p
        p = int(nextprime(p))


def _exp_str(e: Exponent) -> str:
    return "inf" if e == INF else str(e)


@dataclass(frozen=True)
class PrimeExponentSeq:
    """A map from primes to N + {inf}, equal to ``default`` off a finite set.

    ``exceptional`` is stored sorted and never repeats the default, so equal
    sequences have equal representations.
    """

    exceptional: tuple[tuple[int, Exponent], ...] = ()
    default: int = 0

    def __post_init__(self):
        if isinstance(self.exceptional, Mapping):
            items = self.exceptional.items()
        else:
            items = self.exceptional
        if not isinstance(self.default, int) or self.default < 0:
            raise ValueError("default exponent must be a nonnegative integer")
        clean = {}
        for p, e in items:
            p = int(p)
            if not isprime(p):
                raise ValueError(f"{p} is not prime")
            if e != INF:
                if int(e) != e or e < 0:
                    raise ValueError(f"bad exponent {e!r} at {p}")
                e = int(e)
            if e != self.default:
                clean[p] = e
        object.__setattr__(self, "exceptional", tuple(sorted(clean.items())))

    @classmethod
    def of(cls, mapping: Mapping[int, Exponent] = None, default: int = 0) -> "PrimeExponentSeq":
        return cls(tuple((mapping or {}).items()), default)

    def __getitem__(self, p: int) -> Exponent:
        return dict(self.exceptional).get(p, self.default)

    @property
    def infinite_primes(self) -> frozenset[int]:
        return frozenset(p for p, e in self.exceptional if e == INF)

    def finite_support(self) -> bool:
        """Finitely many nonzero entries, all finite: the type of Z."""
        return self.default == 0 and not self.infinite_primes

    def star_class(self) -> "PrimeExponentSeq":
        """Canonical representative up to finitely many finite changes."""
        return PrimeExponentSeq(tuple((p, INF) for p in sorted(self.infinite_primes)), self.default)

    def __add__(self, other: "PrimeExponentSeq") -> "PrimeExponentSeq":
        keys = {p for p, _ in self.exceptional} | {p for p, _ in other.exceptional}
        return PrimeExponentSeq(tuple((p, self[p] + other[p]) for p in keys), self.default + other.default)

    def __str__(self):
        body = ", ".join(f"{p}:{_exp_str(e)}" for p, e in self.exceptional)
        return f"{{{body}}} default {self.default}"

    def to_json(self) -> dict:
        return {"default": self.default,
                "exceptional": {str(p): ("inf" if e == INF else e) for p, e in self.exceptional}}

    @classmethod
    def from_json(cls, obj: Mapping) -> "PrimeExponentSeq":
        exc = {}
        for k, v in obj.get("exceptional", {}).items():
            exc[int(k)] = INF if v in ("inf", "∞") else int(v)
        return cls(tuple(exc.items()), int(obj.get("default", 0)))


def type_of_multipliers(prefix: Iterable[int], block: Iterable[int] = (1,)) -> PrimeExponentSeq:
    """Sum of p-adic valuations over the multipliers; inf where the repeating block has p."""
    acc: dict[int, Exponent] = {}
    for k in prefix:
        for p, e in prime_factors(k).items():
            acc[p] = acc.get(p, 0) + e
    for k in block:
        for p in prime_factors(k):
            acc[p] = INF
    return PrimeExponentSeq(tuple(acc.items()), 0)
