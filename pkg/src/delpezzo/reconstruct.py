"""Reconstructing reduced baskets from Hilbert-series data: the reduced body,
feasibility verdicts, degree bounds, and singularity-count bounds.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .errors import (
    CapacityExceeded,
    Infeasible,
    LengthMismatch,
    MixedIndex,
    NotRealizable,
)
from .exactalg import (
    IntMatrix,
    RationalFunction,
    _column_echelon,
    int_kernel,
    int_solve,
)
from .hilbert import DeltaVector, degree_contribution, orbifold_contribution, split_series
from .quiver import (
    IndecMultiset,
    contains_cancelling_tuple,
    delta_lattice,
    maximal_shattering,
    residual_quiver,
)
from .singularity import Basket, Singularity, basket, hyperplane_inverse, residuals_of_index


def _canonical(s: Singularity) -> Singularity:
    r, a = s.iso_key()
    return Singularity(r, a)


@lru_cache(maxsize=None)
def res_plus(ell: int) -> tuple[Singularity, ...]:
    """One representative per hyperplane-inverse pair of residual classes.

    Pairs are sorted by their lexicographically smallest member; the
    representative is the member whose leading delta entry is positive.
    """
    classes = {s.iso_key() for s in residuals_of_index(ell)}
    pairs = set()
    for key in classes:
        inv = _canonical(hyperplane_inverse(Singularity(*key))).iso_key()
        assert inv in classes
        pairs.add(frozenset((key, inv)))
    reps = []
    for pair in sorted(pairs, key=min):
        members = [Singularity(*k) for k in sorted(pair)]
        positive = [
            m
            for m in members
            if next(x for x in orbifold_contribution(m).entries if x) > 0
        ]
        assert len(positive) == 1, f"ambiguous representative in {pair}"
        reps.append(positive[0])
    return tuple(reps)


@lru_cache(maxsize=None)
def _inverse_keys(ell: int) -> tuple[tuple, ...]:
    return tuple(
        _canonical(hyperplane_inverse(s)).iso_key() for s in res_plus(ell)
    )


@dataclass(frozen=True)
class SignedBasketVector:
    """Integer coordinates over Res+(l); negatives select the inverse class."""

    local_index: int
    coords: tuple

    def basket(self) -> Basket:
        reps = res_plus(self.local_index)
        inverses = _inverse_keys(self.local_index)
        out = []
        for i, v in enumerate(self.coords):
            if v > 0:
                out.extend([reps[i]] * v)
            elif v < 0:
                out.extend([Singularity(*inverses[i])] * (-v))
        return basket(out)

    @classmethod
    def from_basket(cls, ell: int, b: Basket) -> "SignedBasketVector":
        reps = res_plus(ell)
        forward = {s.iso_key(): i for i, s in enumerate(reps)}
        backward = {k: i for i, k in enumerate(_inverse_keys(ell))}
        coords = [0] * len(reps)
        for s in b:
            key = s.iso_key()
            if key in forward:
                coords[forward[key]] += 1
            elif key in backward:
                coords[backward[key]] -= 1
            else:
                raise MixedIndex(f"{s} is not residual of local index {ell}")
        return cls(ell, tuple(coords))


def features_in(u: Sequence[int], v: Sequence[int]) -> bool:
    """Whether u lies in the signature cone v + L_v of v."""
    if len(u) != len(v):
        raise LengthMismatch(f"lengths {len(u)} and {len(v)} differ")
    for ui, vi in zip(u, v):
        if vi > 0 and ui < vi:
            return False
        if vi < 0 and ui > vi:
            return False
    return True


@dataclass(frozen=True)
class ReducedBodyResult:
    local_index: int
    delta: DeltaVector
    realizable: bool
    particular: Optional[SignedBasketVector]
    kernel_basis: tuple
    baskets: tuple  # of Basket
    per_basket_rk2: tuple  # of Fraction

    @property
    def vectors(self) -> tuple:
        return tuple(
            SignedBasketVector.from_basket(self.local_index, b).coords
            for b in self.baskets
        )


def _phi_matrix(ell: int) -> IntMatrix:
    return IntMatrix.from_columns(
        [orbifold_contribution(s).entries for s in res_plus(ell)]
    )


@lru_cache(maxsize=None)
def _footprints(ell: int) -> tuple:
    """Shattering pair counts for each Res+ class and its inverse class.

    Pair counts are isomorphism invariants (dualizing mirrors the quiver,
    fixing each dual pair of vertices), so the canonical representatives
    stand in for their classes.
    """
    out = []
    for s, inv in zip(res_plus(ell), _inverse_keys(ell)):
        out.append(
            (
                maximal_shattering([_canonical(s)]).pair_counts(),
                maximal_shattering([Singularity(*inv)]).pair_counts(),
            )
        )
    return tuple(out)


def _lattice_points(x0, gens, lows, highs, budget):
    """Integer points of the affine lattice x0 + Z<gens> inside a box.

    Walks an echelonized generator basis so each coefficient is pinned by
    one pivot row; the box bounds on pivot rows keep every range finite.
    """
    dim = len(x0)
    if not gens:
        if all(l <= x <= h for x, l, h in zip(x0, lows, highs)):
            yield tuple(x0)
        return
    echelon, _, pivots = _column_echelon(IntMatrix.from_columns(list(gens)))
    cols = [
        tuple(echelon[i][c] for i in range(dim)) for _, c in pivots
    ]

    def rec(j, current):
        budget[0] -= 1
        if budget[0] < 0:
            raise CapacityExceeded("lattice scan exceeded node cap")
        if j == len(cols):
            if all(l <= x <= h for x, l, h in zip(current, lows, highs)):
                yield tuple(current)
            return
        row = pivots[j][0]
        step = cols[j][row]
        assert step != 0
        # later columns vanish on this pivot row, so it pins lambda_j
        ends = sorted(
            (
                Fraction(lows[row] - current[row], step),
                Fraction(highs[row] - current[row], step),
            )
        )
        lam_lo, lam_hi = math.ceil(ends[0]), math.floor(ends[1])
        for lam in range(lam_lo, lam_hi + 1):
            nxt = [x + lam * c for x, c in zip(current, cols[j])]
            yield from rec(j + 1, nxt)

    yield from rec(0, list(x0))


@lru_cache(maxsize=None)
def _kernel_echelon(ell: int):
    gens = int_kernel(_phi_matrix(ell))
    return tuple(tuple(g) for g in gens)


def _has_cancelling_vector(ell: int, v: tuple, budget) -> bool:
    """Whether some nonzero kernel element of Phi+ sits inside v
    (sign-compatibly, coordinate-wise); equivalently, whether the basket
    phi(v) contains a cancelling tuple."""
    gens = _kernel_echelon(ell)
    lows = tuple(min(0, x) for x in v)
    highs = tuple(max(0, x) for x in v)
    zero = (0,) * len(v)
    for w in _lattice_points(zero, gens, lows, highs, budget):
        if w != zero:
            return True
    return False


def _groupings_for_pool(ell: int, pool: tuple, node_cap: int) -> list[Basket]:
    """Cancelling-tuple-free baskets of residuals whose maximal shattering
    has the given pair counts.

    A basket is encoded by its signed Res+ vector v; the pair counts of its
    shattering are sum |v_i| * footprint(class chosen by sign(v_i)).  Per
    sign pattern this is a linear system over nonnegative integers, solved
    exactly through the integer kernel.
    """
    reps = res_plus(ell)
    m = len(reps)
    if m > 14:
        raise CapacityExceeded(f"|Res+({ell})| = {m} sign patterns too many")
    fps = _footprints(ell)
    budget = [node_cap]
    vectors = set()
    for pattern in itertools.product((1, -1), repeat=m):
        cols = [fps[i][0] if pattern[i] == 1 else fps[i][1] for i in range(m)]
        matrix = IntMatrix.from_columns([list(c) for c in cols])
        x0 = int_solve(matrix, list(pool))
        if x0 is None:
            continue
        gens = int_kernel(matrix)
        highs = [
            min(pj // cij for pj, cij in zip(pool, col) if cij)
            for col in cols
        ]
        for x in _lattice_points(list(x0), gens, [0] * m, highs, budget):
            vectors.add(tuple(p * xi for p, xi in zip(pattern, x)))
    out = []
    for v in sorted(vectors):
        if not _has_cancelling_vector(ell, v, budget):
            out.append(SignedBasketVector(ell, v).basket())
    return out


def enumerate_reduced_baskets(
    ell: int,
    delta: DeltaVector,
    max_mu: Optional[int] = None,
    node_cap: int = 5_000_000,
    jobs: int = 1,
) -> ReducedBodyResult:
    """All cancelling-tuple-free baskets of residuals at local index l whose
    total orbifold contribution is delta.

    Sweeps the shattering fiber T0 + mu*cycle for mu up to a derived bound;
    a user cap below that bound raises CapacityExceeded rather than
    returning a silently truncated list.
    """
    if delta.local_index != ell:
        raise MixedIndex("delta has wrong local index")
    if not delta.is_palindromic():
        raise NotRealizable("delta-vector must be palindromic")
    lattice = delta_lattice(ell)
    if not lattice.contains(delta.entries):
        return ReducedBodyResult(ell, delta, False, None, (), (), ())

    phi = _phi_matrix(ell)
    particular = int_solve(phi, list(delta.entries))
    assert particular is not None
    kernel = tuple(tuple(v) for v in int_kernel(phi))
    vec = SignedBasketVector(ell, tuple(particular))

    if delta.is_zero:
        # the empty basket is the only cancelling-tuple-free zero-sum basket
        return ReducedBodyResult(
            ell, delta, True, SignedBasketVector(ell, (0,) * len(res_plus(ell))),
            kernel, ((),), (Fraction(0),),
        )

    base = vec.basket()
    t0 = maximal_shattering(base)
    pairs = list(t0.pair_counts())
    cycle = [1] + [2] * (len(pairs) - 2) + [1]
    reductions = 0
    while all(p >= c for p, c in zip(pairs, cycle)):
        pairs = [p - c for p, c in zip(pairs, cycle)]
        reductions += 1
    mu_required = reductions + (1 + t0.size) * (ell + 1)
    if max_mu is not None and max_mu < mu_required:
        raise CapacityExceeded(
            f"sweep cap mu={max_mu} is below the completeness bound "
            f"mu={mu_required}"
        )

    pools = [
        tuple(p + mu * c for p, c in zip(pairs, cycle))
        for mu in range(mu_required + 1)
    ]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            chunks = ex.map(
                _groupings_for_pool,
                itertools.repeat(ell),
                pools,
                itertools.repeat(node_cap),
            )
            chunks = list(chunks)
    else:
        chunks = [_groupings_for_pool(ell, pool, node_cap) for pool in pools]

    found = {}
    for chunk in chunks:
        for b in chunk:
            found.setdefault(tuple(s.iso_key() for s in b), b)
    baskets = [found[k] for k in sorted(found)]
    # soundness: re-verify the exact Q-sum and cancelling-freeness
    for b in baskets:
        total = [0] * (ell - 2)
        for s in b:
            for i, x in enumerate(orbifold_contribution(s).entries):
                total[i] += x
        assert tuple(total) == delta.entries
        assert contains_cancelling_tuple(b) is None
    rk2 = tuple(sum((degree_contribution(s) for s in b), Fraction(0)) for b in baskets)
    assert len({x - int(x) for x in map(Fraction, rk2)}) <= 1
    return ReducedBodyResult(ell, delta, True, vec, kernel, tuple(baskets), rk2)


# ---------------------------------------------------------------------------
# feasibility, degree bounds, count bound


@dataclass(frozen=True)
class FeasibilityChoice:
    selection: tuple  # of (local index, Basket)
    rk_squared: Fraction
    invisible_budget: Fraction
    verdict: str  # "Feasible" | "Infeasible"


@dataclass(frozen=True)
class FeasibilityReport:
    k_squared: Fraction
    per_choice: tuple
    verdict: str  # "Feasible" | "NoSurface"
    toric_impossible: bool
    bodies: dict = field(hash=False, default_factory=dict)


def analyze_series(
    h: RationalFunction, max_mu: Optional[int] = None, jobs: int = 1
) -> FeasibilityReport:
    """Assess every combination of per-index reduced baskets against the
    invisible-basket degree budget IK^2 = 12 - K^2 - RK^2."""
    k2, parts = split_series(h)
    bodies = {
        ell: enumerate_reduced_baskets(ell, dv, max_mu=max_mu, jobs=jobs)
        for ell, dv in sorted(parts.items())
    }
    for ell, body in bodies.items():
        if not body.realizable:
            raise NotRealizable(
                f"delta-vector at local index {ell} is outside the delta-lattice"
            )
    indices = sorted(bodies)
    choices = []
    for combo in itertools.product(*(bodies[ell].baskets for ell in indices)):
        rk2 = Fraction(0)
        for ell, b in zip(indices, combo):
            i = bodies[ell].baskets.index(b)
            rk2 += bodies[ell].per_basket_rk2[i]
        ik2 = 12 - k2 - rk2
        feasible = ik2 >= 0 and ik2.denominator == 1
        choices.append(
            FeasibilityChoice(
                tuple(zip(indices, combo)),
                rk2,
                ik2,
                "Feasible" if feasible else "Infeasible",
            )
        )
    feasible = [c for c in choices if c.verdict == "Feasible"]
    verdict = "Feasible" if feasible else "NoSurface"
    toric_impossible = bool(feasible) and all(
        c.invisible_budget == 0 for c in feasible
    )
    return FeasibilityReport(k2, tuple(choices), verdict, toric_impossible, bodies)


@dataclass(frozen=True)
class DegreeBoundsConfig:
    n_min: int = 0

    def __post_init__(self) -> None:
        if self.n_min < 0:
            raise ValueError("n_min must be nonnegative")


def degree_bounds(
    b: Basket, cfg: DegreeBoundsConfig = DegreeBoundsConfig()
) -> tuple[Fraction, Fraction]:
    """(m, M) with m <= K^2 <= M for any surface carrying this basket of
    residues, from K^2 = 12 - n - sum(A) and the Fano condition K^2 > 0."""
    for s in b:
        if not (0 < s.width < s.local_index):
            raise MixedIndex(f"{s} is not residual")
    a_total = sum((degree_contribution(s) for s in b), Fraction(0))
    big = 12 - a_total - cfg.n_min
    if big <= 0:
        raise Infeasible(f"maximum degree {big} is not positive")
    slack = big - 1 if big.denominator == 1 else big.numerator // big.denominator
    return big - slack, big


def count_bound(q: dict, ell_star: int) -> int:
    """N(Q, l*): a bound on the number of singular points of any del Pezzo
    orbifold with local indices up to l* and total contributions Q."""
    assert ell_star >= 1
    bodies = {}
    for ell, dv in sorted(q.items()):
        body = enumerate_reduced_baskets(ell, dv)
        if not body.realizable:
            raise NotRealizable(
                f"delta-vector at local index {ell} is outside the delta-lattice"
            )
        bodies[ell] = body
    indices = sorted(bodies)
    s_max = 0
    b_best = None
    for combo in itertools.product(*(bodies[ell].baskets for ell in indices)):
        size = sum(s.width for b in combo for s in b)
        s_max = max(s_max, size)
        rk2 = sum(
            (
                bodies[ell].per_basket_rk2[bodies[ell].baskets.index(b)]
                for ell, b in zip(indices, combo)
            ),
            Fraction(0),
        )
        b_best = rk2 if b_best is None else min(b_best, rk2)
    budget = 12 - (b_best if b_best is not None else Fraction(0))
    cap = budget - 1 if budget.denominator == 1 else budget.numerator // budget.denominator
    return s_max + int(cap) * (ell_star + 1)


def psi_invariants(
    extended_basket: Basket, ell: int
) -> tuple[IndecMultiset, IndecMultiset]:
    """(Psi, Psi~): shattering counts of the residues of the l-piece, and of
    the full l-piece; they differ by a multiple of the quiver cycle."""
    from .singularity import residue

    piece = [s for s in extended_basket if s.local_index == ell]
    q = residual_quiver(ell)
    n = len(q.vertices)
    residues = [res for s in piece for res in [residue(s)[0]] if res is not None]
    if residues:
        psi = maximal_shattering(residues)
    else:
        psi = IndecMultiset(ell, (0,) * n)
    if piece:
        psi_tilde = maximal_shattering(piece, extended=True)
    else:
        psi_tilde = IndecMultiset(ell, (0,) * n)
    diff = [a - b for a, b in zip(psi_tilde.counts, psi.counts)]
    assert len(set(diff)) <= 1 and (not diff or diff[0] >= 0)
    return psi, psi_tilde
