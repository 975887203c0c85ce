"""Exact rational arithmetic for boundary coefficient sets.

Implements Weil indices, the hyperstandard-type sets D_Lambda(r) with
membership certificates, a degree-2 solver for boundaries on the
projective line, the divisibility audit that replays the adjunction
index bound, and the classification of coefficient sets inside
[1/2, 1].  Everything is Fraction-exact; no floats.

A membership certificate records value = 1 - 1/m + (m0*r + sum m_i*l_i)/m
with m >= 1, the l_i positive elements of Lambda together with 1, and
all multiplicities positive integers.  By default the r-term is
mandatory (m0 >= 1) whenever r > 0; pass require_r_term=False for the
variant where it is optional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

__all__ = [
    "MembershipCertificate",
    "P1Entry",
    "P1Boundary",
    "NoSolutionFoundError",
    "BoundTooSmallError",
    "parse_rational",
    "weil_index",
    "adjunction_bound",
    "dlambda_member",
    "dlambda_enumerate",
    "p1_solutions",
    "adjunction_divisibility_audit",
    "geq_half_classification",
]

RationalLike = Union[Fraction, int, str]


class NoSolutionFoundError(ValueError):
    """The audited candidate admits no realization at the given bound."""


class BoundTooSmallError(ValueError):
    """An input rational's denominator exceeds the enumeration bound."""


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" or "p" into an exact Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"not a rational number: {text!r} ({e})") from None


def _as_fraction(v: RationalLike) -> Fraction:
    return parse_rational(v) if isinstance(v, str) else Fraction(v)


def _coeff_set(values: Iterable[RationalLike]) -> tuple[Fraction, ...]:
    out = sorted({_as_fraction(v) for v in values})
    for v in out:
        if not 0 <= v <= 1:
            raise ValueError(f"coefficient {v} outside [0, 1]")
    return tuple(out)


def weil_index(coeffs: Iterable[RationalLike], moduli_index: int = 1) -> int:
    """Least positive integer clearing all denominators.

    ``moduli_index`` folds in the index of a user-supplied moduli part;
    it defaults to 1 (no moduli contribution).
    """
    values = _coeff_set(coeffs)
    if not values:
        raise ValueError("need at least one coefficient")
    if moduli_index < 1:
        raise ValueError("moduli index must be a positive integer")
    return math.lcm(moduli_index, *(v.denominator for v in values))


def adjunction_bound(lam: int) -> int:
    """Index bound for adjunction: lcm(lam, 2)."""
    if lam < 1:
        raise ValueError("need a positive integer")
    return math.lcm(lam, 2)


@dataclass(frozen=True)
class MembershipCertificate:
    """Exact witness that value = 1 - 1/m + (m0*r + sum m_i*l_i)/m."""

    value: Fraction
    m: int
    m0: int
    terms: tuple[tuple[Fraction, int], ...]
    r: Fraction

    def evaluate(self) -> Fraction:
        s = self.m0 * self.r + sum(l * k for l, k in self.terms)
        return 1 - Fraction(1, self.m) + s / self.m

    def to_dict(self) -> dict:
        return {
            "value": str(self.value),
            "m": self.m,
            "m0": self.m0,
            "r": str(self.r),
            "terms": [[str(l), k] for l, k in self.terms],
        }


def _fill(target: Fraction, pool: Sequence[Fraction], idx: int, acc: list) -> Optional[list]:
    # bounded knapsack over a descending pool, largest multiplicities first
    if target == 0:
        return list(acc)
    if idx == len(pool):
        return None
    lam = pool[idx]
    for mult in range(int(target / lam), -1, -1):
        if mult:
            acc.append((lam, mult))
        found = _fill(target - mult * lam, pool, idx + 1, acc)
        if mult:
            acc.pop()
        if found is not None:
            return found
    return None


def dlambda_member(
    x: RationalLike,
    lam_set: Iterable[RationalLike],
    r: RationalLike = 0,
    *,
    require_r_term: bool = True,
) -> Optional[MembershipCertificate]:
    """Certificate for x in D_Lambda(r), or None (exact non-membership).

    For x < 1 the multiplier m is bounded by 1/(1-x) because the bracket
    is non-negative; for x = 1 every m poses the same subproblem, so
    m = 1 is enough.  The bracket target m*x - m + 1 is then solved as a
    bounded combination over the positive pool; when r > 0 the r-term is
    required with m0 >= 1 unless ``require_r_term`` is off.
    """
    x = _as_fraction(x)
    r = _as_fraction(r)
    if not 0 <= x <= 1:
        raise ValueError(f"value {x} outside [0, 1]")
    if r < 0:
        raise ValueError("r must be non-negative")
    pool = sorted((v for v in _coeff_set(lam_set) if v > 0), reverse=True)
    if not pool or pool[0] != 1:
        pool.insert(0, Fraction(1))
    m_max = 1 if x == 1 else int(Fraction(1) / (1 - x))
    for m in range(1, m_max + 1):
        target = m * x - m + 1
        if r > 0:
            m0_min = 1 if require_r_term else 0
            m0_max = int(target / r)
        else:
            m0_min = m0_max = 0
        for m0 in range(m0_min, m0_max + 1):
            terms = _fill(target - m0 * r, pool, 0, [])
            if terms is not None:
                return MembershipCertificate(x, m, m0, tuple(terms), r)
    return None


def _farey(bound: int) -> list[Fraction]:
    # all rationals in [0, 1] with reduced denominator <= bound, ascending
    return sorted({Fraction(p, q) for q in range(1, bound + 1) for p in range(q + 1)})


def dlambda_enumerate(
    lam_set: Iterable[RationalLike],
    r: RationalLike = 0,
    denom_bound: int = 12,
    *,
    require_r_term: bool = True,
) -> list[Fraction]:
    """All members of D_Lambda(r) with denominator at most the bound, ascending."""
    if denom_bound < 1:
        raise ValueError("need a positive denominator bound")
    lam = _coeff_set(lam_set)
    return [
        x
        for x in _farey(denom_bound)
        if dlambda_member(x, lam, r, require_r_term=require_r_term) is not None
    ]


@dataclass(frozen=True)
class P1Entry:
    """One boundary point: its coefficient, role, and certificate.

    Roles: "q" is the mandatory coefficient-1 point, "p" the designated
    point certified against D_Lambda(r), "s" the remaining points
    certified against D_Lambda.
    """

    value: Fraction
    role: str
    certificate: MembershipCertificate


@dataclass(frozen=True)
class P1Boundary:
    """A degree-2 boundary on the projective line."""

    entries: tuple[P1Entry, ...]

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        return tuple(e.value for e in self.entries)

    @property
    def degree(self) -> Fraction:
        return sum((e.value for e in self.entries), Fraction(0))


def _check_bound(values: Iterable[Fraction], denom_bound: int) -> None:
    for v in values:
        if v.denominator > denom_bound:
            raise BoundTooSmallError(
                f"denominator of {v} exceeds the enumeration bound {denom_bound}"
            )


def _rest_fills(budget: Fraction, pool: Sequence[Fraction], idx: int, acc: list, out: list) -> None:
    # all multisets from the descending pool summing exactly to budget
    if budget == 0:
        out.append(tuple(acc))
        return
    for i in range(idx, len(pool)):
        v = pool[i]
        if v <= budget:
            acc.append(v)
            _rest_fills(budget - v, pool, i, acc, out)
            acc.pop()


def p1_solutions(
    lam_set: Iterable[RationalLike],
    r: RationalLike,
    denom_bound: int,
    *,
    require_r_term: bool = True,
) -> list[P1Boundary]:
    """All degree-2 boundaries {1, p-point, rest...} at the given bound.

    Coefficients are positive rationals with denominator <= the bound;
    the multiset must contain a coefficient 1, a designated coefficient
    in D_Lambda(r), and the rest in D_Lambda.  Output is deduplicated by
    coefficient multiset (the largest eligible p-point wins the
    designation) and deterministically ordered.
    """
    lam = _coeff_set(lam_set)
    r = _as_fraction(r)
    if not 0 <= r <= 1:
        raise ValueError(f"r = {r} outside [0, 1]")
    if denom_bound < 1:
        raise ValueError("need a positive denominator bound")
    _check_bound(lam, denom_bound)
    _check_bound([r], denom_bound)

    positive = [v for v in _farey(denom_bound) if v > 0]
    d0 = {}
    for v in positive:
        cert = dlambda_member(v, lam, 0)
        if cert is not None:
            d0[v] = cert
    pool = sorted(d0, reverse=True)
    one = Fraction(1)
    assert one in d0, "1 is always a member"

    solutions = []
    seen = set()
    for v_p in sorted(positive, reverse=True):
        cert_p = dlambda_member(v_p, lam, r, require_r_term=require_r_term)
        if cert_p is None:
            continue
        budget = 1 - v_p
        fills: list[tuple[Fraction, ...]] = []
        _rest_fills(budget, pool, 0, [], fills)
        for rest in fills:
            key = tuple(sorted((one, v_p) + rest, reverse=True))
            if key in seen:
                continue
            seen.add(key)
            entries = [P1Entry(one, "q", d0[one]), P1Entry(v_p, "p", cert_p)]
            entries.extend(P1Entry(v, "s", d0[v]) for v in rest)
            solutions.append(P1Boundary(tuple(entries)))
    solutions.sort(key=lambda s: (len(s.entries), tuple(-c for c in s.coefficients)))
    return solutions


def adjunction_divisibility_audit(lam: int, candidate: RationalLike, denom_bound: int) -> bool:
    """Replay the degree-2 index-bound arithmetic for one coefficient.

    ``candidate`` = p0/q0 in [1/2, 1] is a coefficient produced by
    adjunction from a boundary of Weil index ``lam``.  The value 1/2
    always divides lcm(lam, 2) and is confirmed outright.  Otherwise
    every degree-2 realization {1} + {p-point} + rest with the p-point
    bracket containing the candidate once (m0 = 1), generator pool the
    positive multiples of 1/lam, and rest points plain generator sums
    (multiplier 1) satisfies

        candidate = (lam - A - m_p * C) / lam

    with A the p-bracket generator weight and C*(1/lam) the rest total,
    forcing q0 to divide lam.  Returns True when at least one
    realization exists and all of them confirm the division; raises
    NoSolutionFoundError when there is none at this bound.
    """
    if lam < 1:
        raise ValueError("need a positive Weil index")
    candidate = _as_fraction(candidate)
    if not Fraction(1, 2) <= candidate <= 1:
        raise ValueError(f"candidate {candidate} outside [1/2, 1]")
    if candidate == Fraction(1, 2):
        return True
    _check_bound([candidate], denom_bound)
    _check_bound([Fraction(1, lam)], denom_bound)

    q0 = candidate.denominator
    budget = lam * (1 - candidate)  # = A + m_p * C, must be hit exactly
    realizations = []
    a_max = int(budget)
    for m_p in range(1, max(a_max, 1) + 1):
        for a in range(a_max + 1):
            c, rem = divmod(budget - a, m_p)
            if rem != 0 or c < 0:
                continue
            c = int(c)
            coeff_p = 1 - Fraction(c, lam)
            if not 0 < coeff_p <= 1:
                continue
            realizations.append((m_p, a, c))
    if not realizations:
        raise NoSolutionFoundError(
            f"no degree-2 realization of {candidate} over multiples of 1/{lam} at bound {denom_bound}"
        )
    for m_p, a, c in realizations:
        extracted = Fraction(lam - a - m_p * c, lam)
        if extracted != candidate or lam % q0 != 0:
            return False
    return True


def geq_half_classification(lam_set: Iterable[RationalLike], denom_bound: int) -> set[Fraction]:
    """Elements of a coefficient set in [1/2, 1] realizable on a degree-2 line.

    Keeps r when some degree-2 boundary {1, p-point in D_Lambda(r),
    rest in D_Lambda} has every coefficient >= 1/2.  The result is
    provably inside {1/2, 1}; that inclusion is asserted.
    """
    lam = _coeff_set(lam_set)
    for v in lam:
        if v < Fraction(1, 2):
            raise ValueError(f"element {v} below 1/2")
    _check_bound(lam, denom_bound)
    half = Fraction(1, 2)
    out = set()
    for r in lam:
        for sol in p1_solutions(lam, r, denom_bound):
            if all(c >= half for c in sol.coefficients):
                out.add(r)
                break
    assert out <= {half, Fraction(1)}, f"classification outside {{1/2, 1}}: {sorted(out)}"
    return out
