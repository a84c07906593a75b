"""Cyclic quotient surface singularities 1/r(1,a) and their cone calculus.

The oriented normal form keeps (r, a) and (r, a-bar) distinct; isomorphism
classes identify the two.  Cones are pairs of primitive integer 2-vectors in
clockwise order, with det(u, v) := u_y*v_x - u_x*v_y > 0 so that the
reference cone (e2, r*e1 - a*e2) has determinant r.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from math import gcd
from typing import Optional, Sequence

from .errors import (
    DegenerateCone,
    LocalIndexMismatch,
    NotResidual,
    ParseError,
)
from .exactalg import cone_determinant

Vec = tuple[int, int]


@dataclass(frozen=True)
class IntCone:
    """Clockwise-ordered pair of primitive rays with positive determinant."""

    u: Vec
    v: Vec

    def __post_init__(self) -> None:
        for ray in (self.u, self.v):
            if gcd(ray[0], ray[1]) != 1:
                raise DegenerateCone(f"ray {ray} is not primitive")
        if cone_determinant(self.u, self.v) <= 0:
            raise DegenerateCone("rays are not in clockwise order")


class Kind(Enum):
    SMOOTH = "smooth"
    T_SINGULARITY = "T"
    RESIDUAL = "residual"
    RESIDUAL_INDECOMPOSABLE = "residual-indecomposable"
    # width exceeds the local index without being a multiple of it: the
    # singularity carries both T-parts and a nontrivial residue.  Not named
    # by the classification taxonomy upstream, but needed for totality.
    GENERAL = "general"


@dataclass(frozen=True)
class Classification:
    kind: Kind
    d: int = 0
    n: int = 0
    c: int = 0


@dataclass(frozen=True)
class Singularity:
    """The isolated cyclic quotient 1/r(1,a), in oriented normal form."""

    r: int
    a: int

    def __post_init__(self) -> None:
        if self.r < 1:
            raise ValueError("group order must be positive")
        if self.r == 1:
            if self.a != 0:
                raise ValueError("the smooth case is 1/1(1,0)")
            return
        if not 1 <= self.a < self.r:
            raise ValueError(f"weight must satisfy 1 <= a < r, got {self.a}")
        if gcd(self.r, self.a) != 1:
            raise ValueError(f"1/{self.r}(1,{self.a}) is not isolated")

    # -- derived invariants ------------------------------------------------

    @property
    def width(self) -> int:
        """k = hcf(r, a+1); lattice segments along the cone edge."""
        return gcd(self.r, self.a + 1)

    @property
    def local_index(self) -> int:
        return self.r // self.width

    @property
    def slope(self) -> int:
        """c with a+1 = k*c, reduced mod the local index."""
        return ((self.a + 1) // self.width) % self.local_index

    def invariants(self) -> tuple[int, int, int]:
        return self.local_index, self.width, self.slope

    @property
    def is_smooth(self) -> bool:
        return self.r == 1

    # -- text form ---------------------------------------------------------

    def __str__(self) -> str:
        return f"1/{self.r}(1,{self.a})"

    @staticmethod
    def parse(text: str) -> "Singularity":
        m = re.fullmatch(
            r"\s*1\s*/\s*(\d+)\s*\(\s*1\s*,\s*(\d+)\s*\)\s*", text
        )
        if not m:
            raise ParseError(f"cannot parse singularity {text!r}")
        r, a = int(m.group(1)), int(m.group(2))
        if r >= 2 and gcd(r, a) != 1:
            raise ParseError(
                f"1/{r}(1,{a}) is not isolated: hcf({r},{a}) = {gcd(r, a)}"
            )
        try:
            return Singularity(r, a)
        except ValueError as exc:
            raise ParseError(str(exc)) from exc

    # -- duality and isomorphism ------------------------------------------

    def dual(self) -> "Singularity":
        """1/r(1,a-bar) with a*a-bar = 1 mod r; an involution."""
        if self.r == 1:
            return self
        return Singularity(self.r, pow(self.a, -1, self.r))

    def iso_key(self) -> tuple[int, int]:
        """Canonical key of the isomorphism class {(r,a), (r,a-bar)}."""
        if self.r == 1:
            return (1, 0)
        return (self.r, min(self.a, pow(self.a, -1, self.r)))

    def is_isomorphic(self, other: "Singularity") -> bool:
        return self.iso_key() == other.iso_key()

    # -- cone realization --------------------------------------------------

    def cone(self) -> IntCone:
        """The reference cone (e2, r*e1 - a*e2)."""
        return IntCone((0, 1), (self.r, -self.a))

    def edge_points(self) -> list[Vec]:
        """Lattice points e2 + j*(l, -c) along the edge, j = 0..k."""
        ell, k, c = self.invariants()
        return [(j * ell, 1 - j * c) for j in range(k + 1)]


SMOOTH = Singularity(1, 0)


# ---------------------------------------------------------------------------
# normal form


def normalize_cone(cone: IntCone) -> Singularity:
    """Oriented normal form of a cone via an SL2(Z) change of basis.

    Invariant under orientation-preserving unimodular maps; r = det(u, v).
    """
    u, v = cone.u, cone.v
    r = cone_determinant(u, v)
    # M in SL2(Z) with M u = e2: rows (u2, -u1) and (x, y), x*u1 + y*u2 = 1
    x, y = _bezout(u[0], u[1])
    w2 = x * v[0] + y * v[1]
    a = (-w2) % r
    if r == 1:
        return SMOOTH
    if gcd(r, a) != 1:
        raise DegenerateCone(
            f"cone normalizes to non-isolated 1/{r}(1,{a})"
        )
    return Singularity(r, a)


def _bezout(p: int, q: int) -> tuple[int, int]:
    """x, y with x*p + y*q = gcd(p, q) = 1 for primitive (p, q)."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    a, b = p, q
    while b:
        t = a // b
        a, b = b, a - t * b
        x0, x1 = x1, x0 - t * x1
        y0, y1 = y1, y0 - t * y1
    if a == -1:
        x0, y0 = -x0, -y0
    return x0, y0


def _normalize_pair(start: Vec, end: Vec) -> Singularity:
    """Normal form of Cone(start, end); raises DegenerateCone on bad rays."""
    return normalize_cone(IntCone(start, end))


# ---------------------------------------------------------------------------
# classification, residue


def classify(s: Singularity) -> Classification:
    if s.is_smooth:
        return Classification(Kind.SMOOTH)
    ell, k, c = s.invariants()
    if k % ell == 0:
        return Classification(Kind.T_SINGULARITY, d=k // ell, n=ell, c=c)
    if k > ell:
        return Classification(Kind.GENERAL)
    if not _interior_primitive_indices(s):
        return Classification(Kind.RESIDUAL_INDECOMPOSABLE)
    return Classification(Kind.RESIDUAL)


def is_residual(s: Singularity) -> bool:
    return not s.is_smooth and s.width < s.local_index


def _interior_primitive_indices(s: Singularity) -> list[int]:
    """Edge parameters 0 < j < k whose lattice point is primitive."""
    ell, k, c = s.invariants()
    return [j for j in range(1, k) if gcd(j * ell, j * c - 1) == 1]


def residue(s: Singularity) -> tuple[Optional[Singularity], list[Classification]]:
    """Strip all T-parts: (residual remainder or None, stripped T data)."""
    if s.is_smooth:
        return None, []
    ell, k, c = s.invariants()
    d, k0 = divmod(k, ell)
    t_parts = [Classification(Kind.T_SINGULARITY, d=d, n=ell, c=c)] if d else []
    if k0 == 0:
        return None, t_parts
    return Singularity(k0 * ell, k0 * c - 1), t_parts


# ---------------------------------------------------------------------------
# hyperplane sum and friends


def hyperplane_sum(s1: Singularity, s2: Singularity) -> Optional[Singularity]:
    """The gluing s1 * s2, or None when undefined.

    Realize s1 as Cone(e2, e2 + k1*(l,-c1)); the sum is defined when the
    continuation cone of width k2 along the same edge line normalizes to s2
    and all ray endpoints are primitive.  Noncommutative.
    """
    if s1.is_smooth or s2.is_smooth:
        return None
    ell, k1, c1 = s1.invariants()
    ell2, k2, _ = s2.invariants()
    if ell != ell2 or ell < 2:
        return None
    mid = (k1 * ell, 1 - k1 * c1)
    end = ((k1 + k2) * ell, 1 - (k1 + k2) * c1)
    if gcd(end[0], end[1]) != 1:
        return None
    try:
        continuation = _normalize_pair(mid, end)
    except DegenerateCone:
        return None
    if continuation != s2:
        return None
    return _normalize_pair((0, 1), end)


def hyperplane_sum_chain(parts: Sequence[Singularity]) -> Optional[Singularity]:
    """Left-to-right hyperplane sum of a sequence; None if any step fails."""
    if not parts:
        return None
    acc = parts[0]
    for nxt in parts[1:]:
        summed = hyperplane_sum(acc, nxt)
        if summed is None:
            return None
        acc = summed
    return acc


def hyperplane_inverse(s: Singularity) -> Singularity:
    """The residual completing s to an elementary T-singularity."""
    if not is_residual(s):
        raise NotResidual(f"{s} is not residual")
    ell, k, c = s.invariants()
    mid = (k * ell, 1 - k * c)
    end = (ell * ell, 1 - ell * c)
    return _normalize_pair(mid, end)


def shatterings(s: Singularity) -> list[list[Singularity]]:
    """All crepant subdivisions of s at primitive interior edge points.

    Each returned list hyperplane-sums back to s; the first entry is the
    trivial shattering [s].
    """
    ell, k, c = s.invariants()
    points = _interior_primitive_indices(s)
    out: list[list[Singularity]] = []
    for mask in range(1 << len(points)):
        chosen = [points[i] for i in range(len(points)) if mask >> i & 1]
        cuts = [0] + chosen + [k]
        shards = [
            _normalize_pair(
                (cuts[i] * ell, 1 - cuts[i] * c),
                (cuts[i + 1] * ell, 1 - cuts[i + 1] * c),
            )
            for i in range(len(cuts) - 1)
        ]
        out.append(shards)
    out.sort(key=len)
    return out


def maximal_shatter(s: Singularity) -> list[Singularity]:
    """Shards of s cut at every primitive interior edge point."""
    ell, k, c = s.invariants()
    cuts = [0] + _interior_primitive_indices(s) + [k]
    return [
        _normalize_pair(
            (cuts[i] * ell, 1 - cuts[i] * c),
            (cuts[i + 1] * ell, 1 - cuts[i + 1] * c),
        )
        for i in range(len(cuts) - 1)
    ]


class EmptyGlue:
    """Marker: the two singularities are directly hyperplane summable."""

    _instance: Optional["EmptyGlue"] = None

    def __new__(cls) -> "EmptyGlue":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "EmptyGlue()"


EMPTY_GLUE = EmptyGlue()


def gluing_cone(s1: Singularity, s2: Singularity, max_width: int = 0):
    """Minimal-width cone g with s1*g and g*s2 defined.

    Returns EMPTY_GLUE when s1*s2 is already defined.  The scan is capped at
    max_width (default 4*l) and asserts on overflow, which the cycle
    structure of the residual quiver rules out for valid inputs.
    """
    ell, k1, c1 = s1.invariants()
    if ell != s2.local_index:
        raise LocalIndexMismatch(
            f"local indices differ: {ell} vs {s2.local_index}"
        )
    if hyperplane_sum(s1, s2) is not None:
        return EMPTY_GLUE
    k2 = s2.width
    cap = max_width or 4 * ell
    for w in range(1, cap + 1):
        mid = (k1 * ell, 1 - k1 * c1)
        glue_end = ((k1 + w) * ell, 1 - (k1 + w) * c1)
        if gcd(glue_end[0], glue_end[1]) != 1:
            continue
        glue = _normalize_pair(mid, glue_end)
        total_end = ((k1 + w + k2) * ell, 1 - (k1 + w + k2) * c1)
        if gcd(total_end[0], total_end[1]) != 1:
            continue
        try:
            tail = _normalize_pair(glue_end, total_end)
        except DegenerateCone:
            continue
        if tail == s2:
            return glue
    raise AssertionError(f"no gluing cone of width <= {cap} for {s1}, {s2}")


# ---------------------------------------------------------------------------
# baskets as multisets of isomorphism classes

Basket = tuple[Singularity, ...]


def basket(items) -> Basket:
    """Canonical basket: isomorphism-class representatives, sorted."""
    reps = [Singularity(*s.iso_key()) for s in items]
    reps.sort(key=lambda s: (s.r, s.a))
    return tuple(reps)


def basket_pieces(b: Sequence[Singularity]) -> dict[int, Basket]:
    """Split a basket by local index."""
    out: dict[int, list[Singularity]] = {}
    for s in b:
        out.setdefault(s.local_index, []).append(s)
    return {ell: basket(part) for ell, part in sorted(out.items())}


@lru_cache(maxsize=None)
def residuals_of_index(ell: int) -> tuple[Singularity, ...]:
    """All residual isomorphism classes of local index ell (canonical reps)."""
    if ell < 3:
        return ()
    seen: dict[tuple[int, int], Singularity] = {}
    for k in range(1, ell):
        for c in range(1, ell):
            if gcd(ell, c) != 1 or gcd(ell, k * c - 1) != 1:
                continue
            s = Singularity(k * ell, k * c - 1)
            seen.setdefault(s.iso_key(), Singularity(*s.iso_key()))
    return tuple(sorted(seen.values(), key=lambda s: (s.r, s.a)))
