"""Exact arithmetic kernels: dense polynomials over Q, rational functions in t,
and integer linear algebra via Hermite normal form.

Polynomials are tuples of coefficients indexed by degree, with no trailing
zeros; the zero polynomial is the empty tuple.  Coefficients are ints or
Fractions; operations never touch floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Optional, Sequence

from .errors import DegenerateCone, NotCoprime

Poly = tuple  # coefficient tuple, lowest degree first


# ---------------------------------------------------------------------------
# polynomial arithmetic


def poly(coeffs: Iterable) -> Poly:
    """Normalize a coefficient sequence: strip trailing zeros."""
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_add(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return poly(out)


def poly_neg(a: Poly) -> Poly:
    return tuple(-x for x in a)


def poly_sub(a: Poly, b: Poly) -> Poly:
    return poly_add(a, poly_neg(b))


def poly_mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return poly(out)


def poly_scale(a: Poly, s) -> Poly:
    if s == 0:
        return ()
    return tuple(x * s for x in a)


def poly_pow(a: Poly, n: int) -> Poly:
    out: Poly = (1,)
    base = a
    while n:
        if n & 1:
            out = poly_mul(out, base)
        base = poly_mul(base, base)
        n >>= 1
    return out


def poly_divmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    """Quotient and remainder over Q; b must be nonzero."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = [Fraction(x) for x in a]
    quo = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    lead = Fraction(b[-1])
    db = len(b) - 1
    for i in range(len(rem) - 1, db - 1, -1):
        if rem[i]:
            c = rem[i] / lead
            quo[i - db] = c
            for j, y in enumerate(b):
                rem[i - db + j] -= c * y
    return poly(quo), poly(rem)


def poly_div_exact(a: Poly, b: Poly) -> Poly:
    q, r = poly_divmod(a, b)
    if r:
        raise ValueError("division is not exact")
    return q


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over Q."""
    while b:
        a, b = b, poly_divmod(a, b)[1]
    if not a:
        return ()
    return poly_scale(a, Fraction(1, 1) / Fraction(a[-1]))


def poly_eval(a: Poly, x):
    out = 0
    for c in reversed(a):
        out = out * x + c
    return out


def poly_content(a: Poly) -> int:
    """Positive gcd of integer coefficients (0 for the zero polynomial)."""
    g = 0
    for x in a:
        g = gcd(g, x)
    return g


def poly_to_int(a: Poly) -> tuple[Poly, int]:
    """Clear denominators: return (integer polynomial, lcm of denominators)."""
    denom = 1
    for x in a:
        if isinstance(x, Fraction):
            denom = denom * x.denominator // gcd(denom, x.denominator)
    return tuple(int(x * denom) for x in a), denom


def poly_inverse_mod(f: Poly, h: Poly) -> Poly:
    """u with f*u = 1 (mod h), deg u < deg h, over Q.

    Raises NotCoprime when gcd(f, h) != 1.
    """
    if len(h) < 2:
        raise ValueError("modulus must have degree >= 1")
    # extended Euclid over Q[x]
    r0, r1 = h, f
    s0, s1 = (), (1,)
    while r1:
        q, r = poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, poly_sub(s0, poly_mul(q, s1))
    if len(r0) != 1:
        raise NotCoprime("polynomials are not coprime")
    inv = poly_scale(s0, Fraction(1, 1) / Fraction(r0[0]))
    return poly_divmod(inv, h)[1]


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> Poly:
    """The n-th cyclotomic polynomial, by exact division."""
    num = poly_sub(poly([0] * n + [1]), (1,))  # t^n - 1
    for d in range(1, n):
        if n % d == 0:
            num = poly_div_exact(num, cyclotomic(d))
    ints, _ = poly_to_int(num)
    return ints


# ---------------------------------------------------------------------------
# rational functions of t


@dataclass(frozen=True)
class RationalFunction:
    """num/den with integer-polynomial parts in canonical form.

    Canonical: gcd(num, den) = 1 over Q, gcd of the two integer contents
    is 1, and the lowest-order nonzero coefficient of den is positive.
    """

    num: Poly
    den: Poly

    @staticmethod
    def make(num: Iterable, den: Iterable = (1,)) -> "RationalFunction":
        n, d = poly(num), poly(den)
        if not d:
            raise ZeroDivisionError("zero denominator")
        if not n:
            return RationalFunction((), (1,))
        g = poly_gcd(n, d)
        if len(g) > 1:
            n = poly_div_exact(n, g)
            d = poly_div_exact(d, g)
        n, dn = poly_to_int(n)
        d, dd = poly_to_int(d)
        n = poly_scale(n, dd)
        d = poly_scale(d, dn)
        cn, cd = poly_content(n), poly_content(d)
        g = gcd(cn, cd)
        if g > 1:
            n = tuple(x // g for x in n)
            d = tuple(x // g for x in d)
        low = next(x for x in d if x)
        if low < 0:
            n, d = poly_neg(n), poly_neg(d)
        return RationalFunction(n, d)

    @staticmethod
    def from_fraction(q) -> "RationalFunction":
        q = Fraction(q)
        return RationalFunction.make((q.numerator,), (q.denominator,))

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction.make(
            poly_add(poly_mul(self.num, other.den), poly_mul(other.num, self.den)),
            poly_mul(self.den, other.den),
        )

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return self + (-other)

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(poly_neg(self.num), self.den)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction.make(
            poly_mul(self.num, other.num), poly_mul(self.den, other.den)
        )

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction.make(
            poly_mul(self.num, other.den), poly_mul(self.den, other.num)
        )

    def is_zero(self) -> bool:
        return not self.num

    def eval(self, x) -> Fraction:
        d = poly_eval(self.den, x)
        if d == 0:
            raise ZeroDivisionError("pole at evaluation point")
        return Fraction(poly_eval(self.num, x)) / d

    def pole_order_at_one(self) -> int:
        """Order of the pole at t=1 (negative for a zero)."""
        one_minus_t = (1, -1)
        order = 0
        d = self.den
        while d and poly_eval(d, 1) == 0:
            d = poly_div_exact(d, one_minus_t)
            order += 1
        n = self.num
        while n and poly_eval(n, 1) == 0:
            n = poly_div_exact(n, one_minus_t)
            order -= 1
        return order

    def series_coefficients(self, count: int) -> list[Fraction]:
        """First `count` coefficients of the power-series expansion at 0."""
        if not self.den or self.den[0] == 0:
            raise ZeroDivisionError("denominator vanishes at 0")
        d0 = Fraction(self.den[0])
        out: list[Fraction] = []
        for k in range(count):
            acc = Fraction(self.num[k]) if k < len(self.num) else Fraction(0)
            for j in range(1, min(k, len(self.den) - 1) + 1):
                acc -= self.den[j] * out[k - j]
            out.append(acc / d0)
        return out


# ---------------------------------------------------------------------------
# integer linear algebra


@dataclass(frozen=True)
class IntMatrix:
    """Row-major integer matrix."""

    rows: int
    cols: int
    entries: tuple

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]]) -> "IntMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        flat = []
        for row in rows:
            if len(row) != c:
                raise ValueError("ragged rows")
            flat.extend(int(x) for x in row)
        return IntMatrix(r, c, tuple(flat))

    @staticmethod
    def from_columns(cols: Sequence[Sequence[int]]) -> "IntMatrix":
        if not cols:
            return IntMatrix(0, 0, ())
        return IntMatrix.from_rows(list(zip(*cols)))

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def apply(self, x: Sequence[int]) -> tuple:
        if len(x) != self.cols:
            raise ValueError("dimension mismatch")
        return tuple(
            sum(self.entries[i * self.cols + j] * x[j] for j in range(self.cols))
            for i in range(self.rows)
        )


def _column_echelon(M: IntMatrix) -> tuple[list[list[int]], list[list[int]], list[tuple[int, int]]]:
    """Integer column echelon form via unimodular column operations.

    Returns (A, U, pivots) with A = M @ U, U unimodular, and pivots a list of
    (row, col) positions of the echelon pivots.
    """
    A = [list(M.row(i)) for i in range(M.rows)]
    n = M.cols
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def col_addmul(dst: int, src: int, s: int) -> None:
        for i in range(M.rows):
            A[i][dst] += s * A[i][src]
        for i in range(n):
            U[i][dst] += s * U[i][src]

    def col_swap(a: int, b: int) -> None:
        for i in range(M.rows):
            A[i][a], A[i][b] = A[i][b], A[i][a]
        for i in range(n):
            U[i][a], U[i][b] = U[i][b], U[i][a]

    def col_negate(c: int) -> None:
        for i in range(M.rows):
            A[i][c] = -A[i][c]
        for i in range(n):
            U[i][c] = -U[i][c]

    pivots: list[tuple[int, int]] = []
    pc = 0
    for r in range(M.rows):
        if pc >= n:
            break
        # reduce columns pc..n-1 so only column pc has a nonzero entry in row r
        while True:
            nz = [j for j in range(pc, n) if A[r][j] != 0]
            if not nz:
                break
            if len(nz) == 1:
                if nz[0] != pc:
                    col_swap(pc, nz[0])
                break
            nz.sort(key=lambda j: abs(A[r][j]))
            small = nz[0]
            for j in nz[1:]:
                col_addmul(j, small, -(A[r][j] // A[r][small]))
        if A[r][pc] != 0:
            if A[r][pc] < 0:
                col_negate(pc)
            pivots.append((r, pc))
            pc += 1
    return A, U, pivots


def int_kernel(M: IntMatrix) -> list[tuple]:
    """Basis of the integer kernel lattice {x : Mx = 0}; [] when trivial."""
    _, U, pivots = _column_echelon(M)
    n = M.cols
    free = range(len(pivots), n)
    return [tuple(U[i][j] for i in range(n)) for j in free]


def int_solve(M: IntMatrix, b: Sequence[int]) -> Optional[tuple]:
    """Some integer x with Mx = b, or None when no integer solution exists."""
    if len(b) != M.rows:
        raise ValueError("dimension mismatch")
    A, U, pivots = _column_echelon(M)
    n = M.cols
    y = [0] * n
    resid = [int(v) for v in b]
    pos = {r: c for r, c in pivots}
    for r in range(M.rows):
        if r in pos:
            c = pos[r]
            if resid[r] % A[r][c] != 0:
                return None
            t = resid[r] // A[r][c]
            y[c] = t
            if t:
                for i in range(M.rows):
                    resid[i] -= t * A[i][c]
        elif resid[r] != 0:
            return None
    return tuple(
        sum(U[i][j] * y[j] for j in range(n)) for i in range(n)
    )


def int_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix, exactly."""
    if not rows:
        return 0
    work = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    cols = len(work[0])
    for c in range(cols):
        piv = next((i for i in range(rank, len(work)) if work[i][c]), None)
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        inv = 1 / work[rank][c]
        work[rank] = [x * inv for x in work[rank]]
        for i in range(len(work)):
            if i != rank and work[i][c]:
                f = work[i][c]
                work[i] = [x - f * y for x, y in zip(work[i], work[rank])]
        rank += 1
        if rank == len(work):
            break
    return rank


def cone_determinant(u: Sequence[int], v: Sequence[int]) -> int:
    """Oriented determinant under the clockwise ray convention.

    Positive exactly for clockwise-ordered cones such as
    (e2, r*e1 - a*e2); zero is rejected.
    """
    d = u[1] * v[0] - u[0] * v[1]
    if d == 0:
        raise DegenerateCone(f"rays {tuple(u)} and {tuple(v)} are dependent")
    return d
