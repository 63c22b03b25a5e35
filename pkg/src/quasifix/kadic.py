"""Rational points of the k-adic integers and their digit expansions.

A rational p/q with gcd(q, k) = 1 is a k-adic integer; its base-k expansion
z = c0 + c1*k + c2*k^2 + ... is ultimately periodic and is computed by exact
long division: c = p * q^{-1} mod k, then z -> (z - c) / k.  Digit streams are
always least-significant-digit first.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd


@dataclass(frozen=True)
class DigitExpansion:
    """Ultimately periodic digit stream: preperiod then repeating cycle."""

    base: int
    preperiod: tuple
    cycle: tuple

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        if not self.cycle:
            raise ValueError("cycle must be non-empty")
        for d in self.preperiod + self.cycle:
            if not 0 <= d < self.base:
                raise ValueError("digit %r out of range for base %d" % (d, self.base))

    @staticmethod
    def canonical(base: int, preperiod, cycle) -> "DigitExpansion":
        pre = list(preperiod)
        cyc = list(cycle)
        cyc = cyc[: _least_rotation_period(cyc)]
        while pre and pre[-1] == cyc[-1]:
            pre.pop()
            cyc = [cyc[-1]] + cyc[:-1]
        cyc = cyc[: _least_rotation_period(cyc)]
        return DigitExpansion(base, tuple(pre), tuple(cyc))

    def digit(self, i: int) -> int:
        if i < len(self.preperiod):
            return self.preperiod[i]
        return self.cycle[(i - len(self.preperiod)) % len(self.cycle)]

    def prefix(self, n: int) -> tuple:
        return tuple(self.digit(i) for i in range(n))

    def partial_sum(self, n: int) -> int:
        """s_n = sum_{i<n} c_i k^i, the value of the first n digits."""
        total = 0
        power = 1
        for i in range(n):
            total += self.digit(i) * power
            power *= self.base
        return total

    def __str__(self) -> str:
        join = "" if self.base <= 10 else ","
        return "pre=%s cyc=%s" % (
            join.join(str(d) for d in self.preperiod),
            join.join(str(d) for d in self.cycle),
        )


def _least_rotation_period(cycle: list) -> int:
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle == cycle[d:] + cycle[:d]:
            return d
    return n


@dataclass(frozen=True)
class KAdicRational:
    """Reduced fraction with denominator coprime to the base."""

    value: Fraction
    base: int

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        if gcd(self.value.denominator, self.base) != 1:
            raise ValueError(
                "denominator %d shares a factor with base %d"
                % (self.value.denominator, self.base)
            )

    @staticmethod
    def from_relation(c: int, m: int, k: int) -> "KAdicRational":
        """Address of a point satisfying z = T^c(phi^m(z)): c / (1 - k^m)."""
        if m < 1:
            raise ValueError("m must be >= 1")
        return KAdicRational(Fraction(c, 1 - k**m), k)

    @staticmethod
    def from_expansion(expansion: DigitExpansion) -> "KAdicRational":
        k = expansion.base
        pre_val = 0
        power = 1
        for d in expansion.preperiod:
            pre_val += d * power
            power *= k
        cyc_val = 0
        cpower = 1
        for d in expansion.cycle:
            cyc_val += d * cpower
            cpower *= k
        value = pre_val + power * Fraction(cyc_val, 1 - k ** len(expansion.cycle))
        return KAdicRational(value, k)

    def expansion(self) -> DigitExpansion:
        k = self.base
        seen: dict[Fraction, int] = {}
        digits: list[int] = []
        state = self.value
        while state not in seen:
            seen[state] = len(digits)
            p, q = state.numerator, state.denominator
            digit = (p * pow(q, -1, k)) % k
            digits.append(digit)
            state = (state - digit) / k
        start = seen[state]
        return DigitExpansion.canonical(k, digits[:start], digits[start:])

    # -- arithmetic (T acts as +1, phi as *k) --------------------------------

    def add(self, other: "KAdicRational") -> "KAdicRational":
        if other.base != self.base:
            raise ValueError("mixed bases")
        return KAdicRational(self.value + other.value, self.base)

    def add_int(self, n: int) -> "KAdicRational":
        return KAdicRational(self.value + n, self.base)

    def add_one(self) -> "KAdicRational":
        return self.add_int(1)

    def negate(self) -> "KAdicRational":
        return KAdicRational(-self.value, self.base)

    def times_k(self, times: int = 1) -> "KAdicRational":
        return KAdicRational(self.value * self.base**times, self.base)

    def __str__(self) -> str:
        v = self.value
        return "%d/%d (base %d)" % (v.numerator, v.denominator, self.base)


def kappa(qfp) -> KAdicRational:
    """k-adic address of a quasi-fixed point: c / (1 - k^m) for its relation."""
    k = qfp.substitution.constant_length
    if k is None:
        raise ValueError("kappa needs a constant-length substitution")
    m, c = qfp.relation()
    return KAdicRational.from_relation(c, m, k)
