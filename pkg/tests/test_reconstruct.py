"""Reduced-basket enumeration, feasibility analysis, degree and count
bounds.

The central independent oracle is a brute-force coordinate-box search in
Z<Res+(ell)>: every signed coordinate vector with |v_i| <= 8 is tested
directly for the right delta-sum and for cancelling-vector freeness, and
the resulting basket sets are compared with the production enumerator.
"""

import itertools
import random
from fractions import Fraction
from math import gcd

import pytest

from delpezzo import (
    DegreeBoundsConfig,
    DeltaVector,
    SignedBasketVector,
    Singularity,
    analyze_series,
    assemble_series,
    basket,
    contains_cancelling_tuple,
    count_bound,
    degree_bounds,
    degree_contribution,
    enumerate_reduced_baskets,
    features_in,
    hyperplane_inverse,
    orbifold_contribution,
    parse_rational_function,
    psi_invariants,
    res_plus,
)
from delpezzo.errors import (
    CapacityExceeded,
    Infeasible,
    LengthMismatch,
    MixedIndex,
    NotRealizable,
)
from delpezzo.hilbert import zero_delta

rng = random.Random(20260824)

RES_PLUS_5 = (
    Singularity(5, 1),
    Singularity(20, 3),
    Singularity(10, 1),
    Singularity(15, 2),
)


def brute_force_vectors(ell, delta, box=8):
    """Independent enumerator: scan the full coordinate box, keep vectors
    with the right delta-sum, drop those featuring a nonzero kernel vector."""
    reps = res_plus(ell)
    qs = [orbifold_contribution(s).entries for s in reps]
    m = len(reps)
    rng_box = range(-box, box + 1)
    kernel = []
    hits = []
    for v in itertools.product(rng_box, repeat=m):
        total = tuple(
            sum(c * q[i] for c, q in zip(v, qs)) for i in range(len(qs[0]))
        )
        if total == tuple(delta.entries) and any(v):
            hits.append(v)
        if total == tuple(0 for _ in qs[0]) and any(v):
            kernel.append(v)
    if all(x == 0 for x in delta.entries):
        hits.append((0,) * m)
    return sorted(
        v for v in hits if not any(features_in(v, w) for w in kernel)
    )


def basket_key(b):
    return tuple(sorted(s.iso_key() for s in b))


class TestEnumeratePinned:
    def test_pinned_example_four_baskets(self):
        res = enumerate_reduced_baskets(5, DeltaVector(5, (2, 1, 2)))
        assert res.realizable
        assert len(res.baskets) == 4
        assert set(res.vectors) == {
            (1, 0, 0, 1),
            (1, -1, 1, 0),
            (0, 0, 1, -1),
            (0, 1, 0, 0),
        }
        assert all(rk == Fraction(-8, 5) for rk in res.per_basket_rk2)

    def test_large_fiber_count_frozen(self):
        res = enumerate_reduced_baskets(5, DeltaVector(5, (8, -1, 8)))
        assert len(res.baskets) == 25
        # fiber structure: all representative vectors differ by kernel elements
        particular = res.vectors[0]
        kgens = res.kernel_basis
        for v in res.vectors[1:]:
            diff = tuple(a - b for a, b in zip(v, particular))
            # solvable in the kernel lattice (rank 2 at ell=5)
            found = False
            for x in range(-20, 21):
                for y in range(-20, 21):
                    if all(
                        d == x * g1 + y * g2
                        for d, g1, g2 in zip(diff, kgens[0], kgens[1])
                    ):
                        found = True
            assert found, v

    def test_zero_delta_gives_empty_basket_only(self):
        res = enumerate_reduced_baskets(5, zero_delta(5))
        assert res.baskets == ((),)

    def test_unrealizable_delta(self):
        res = enumerate_reduced_baskets(5, DeltaVector(5, (1, 1, 1)))
        assert not res.realizable and res.baskets == ()

    def test_non_palindromic_rejected(self):
        with pytest.raises(NotRealizable):
            enumerate_reduced_baskets(5, DeltaVector(5, (1, 0, 0)))

    def test_wrong_local_index_rejected(self):
        with pytest.raises(MixedIndex):
            enumerate_reduced_baskets(5, DeltaVector(3, (1,)))

    def test_capacity_ceiling_is_explicit(self):
        with pytest.raises(CapacityExceeded):
            enumerate_reduced_baskets(5, DeltaVector(5, (2, 1, 2)), max_mu=0)

    def test_parallel_run_is_deterministic(self):
        a = enumerate_reduced_baskets(5, DeltaVector(5, (2, 1, 2)), jobs=1)
        b = enumerate_reduced_baskets(5, DeltaVector(5, (2, 1, 2)), jobs=2)
        assert a.baskets == b.baskets and a.vectors == b.vectors


class TestEnumerateOracle:
    @pytest.mark.parametrize("entries", [(2, 1, 2), (1, -2, 1), (1, 3, 1)])
    def test_agrees_with_coordinate_box_enumerator(self, entries):
        delta = DeltaVector(5, entries)
        expected = {
            basket_key(SignedBasketVector(5, v).basket())
            for v in brute_force_vectors(5, delta)
        }
        res = enumerate_reduced_baskets(5, delta)
        got = {basket_key(b) for b in res.baskets}
        assert got == expected

    def test_soundness_exact_q_sum_and_no_cancelling(self):
        for entries in [(2, 1, 2), (1, -2, 1), (1, 3, 1), (8, -1, 8)]:
            delta = DeltaVector(5, entries)
            res = enumerate_reduced_baskets(5, delta)
            for b in res.baskets:
                total = zero_delta(5)
                for s in b:
                    total = total + orbifold_contribution(s)
                assert total == delta
                assert contains_cancelling_tuple(b) is None

    def test_rk2_congruent_mod_one(self):
        res = enumerate_reduced_baskets(5, DeltaVector(5, (8, -1, 8)))
        fracs = {rk - int(rk) for rk in res.per_basket_rk2}
        assert len(fracs) == 1


class TestSignedBasketVector:
    def test_roundtrip(self):
        for _ in range(100):
            coords = tuple(rng.randint(-3, 3) for _ in range(4))
            v = SignedBasketVector(5, coords)
            assert SignedBasketVector.from_basket(5, v.basket()).coords == coords

    def test_negative_coordinates_mean_inverses(self):
        v = SignedBasketVector(5, (0, -2, 0, 0))
        inv = hyperplane_inverse(Singularity(20, 3))
        assert v.basket() == (inv, inv)


class TestFeaturesIn:
    def test_pinned(self):
        assert features_in((1, 2), (1, 0))
        assert not features_in((0, 0), (1, 0))
        assert features_in((3, -1), (3, -1))

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            features_in((1,), (1, 2))

    def test_matches_cone_membership_exhaustively(self):
        """u features in v iff u lies in v + L_v, where L_v is spanned by
        sign(v_i) e_i on the support of v and +/- e_j off it."""
        for dim in (1, 2, 3):
            vals = range(-2, 3)
            for v in itertools.product(vals, repeat=dim):
                for u in itertools.product(vals, repeat=dim):
                    member = all(
                        (u[i] - v[i]) * (1 if v[i] > 0 else -1) >= 0
                        for i in range(dim)
                        if v[i] != 0
                    )
                    assert features_in(u, v) == member


class TestDegreeBounds:
    def test_empty_basket(self):
        assert degree_bounds(basket([])) == (Fraction(1), Fraction(12))

    def test_pinned_example_baskets(self):
        b1 = basket([Singularity(5, 1), Singularity(15, 2)])
        b2 = basket([Singularity(20, 3)])
        assert degree_bounds(b1) == (Fraction(3, 5), Fraction(68, 5))
        assert degree_bounds(b1) == degree_bounds(b2)

    def test_infeasible_when_budget_nonpositive(self):
        with pytest.raises(Infeasible):
            degree_bounds(basket([]), DegreeBoundsConfig(n_min=12))

    def test_m_is_least_positive_value_congruent_to_M(self):
        for _ in range(50):
            b = basket(
                [rng.choice(RES_PLUS_5) for _ in range(rng.randint(0, 3))]
            )
            try:
                m, M = degree_bounds(b)
            except Infeasible:
                continue
            assert 0 < m <= 1 or (m == M and M < 1)
            assert (M - m).denominator == 1  # congruent mod Z


class TestCountBound:
    def test_pinned_example_values(self):
        q = {5: DeltaVector(5, (2, 1, 2))}
        assert count_bound(q, 5) == 82
        assert count_bound(q, 10) == 147
        assert count_bound(q, 15) == 212
        assert count_bound(q, 25) == 342

    def test_closed_form_65l_plus_17(self):
        q = {5: DeltaVector(5, (2, 1, 2))}
        for ell in (1, 2, 3, 5):
            assert count_bound(q, 5 * ell) == 65 * ell + 17

    def test_monotone_in_ell_star(self):
        q = {5: DeltaVector(5, (1, -2, 1))}
        values = [count_bound(q, ls) for ls in range(5, 40, 5)]
        assert values == sorted(values)

    def test_unrealizable_rejected(self):
        with pytest.raises(NotRealizable):
            count_bound({5: DeltaVector(5, (1, 1, 1))}, 5)


class TestAnalyzeSeries:
    def test_no_surface_for_large_linear_term(self):
        for m in range(11, 16):
            h = parse_rational_function(f"(1+{m}*t+t^2)/(1-t)^3")
            report = analyze_series(h)
            assert report.verdict == "NoSurface"

    def test_degree_ten_is_toric_impossible(self):
        h = parse_rational_function("(1+10*t+t^2)/(1-t)^3")
        report = analyze_series(h)
        assert report.verdict == "Feasible"
        feasible = [c for c in report.per_choice if c.verdict == "Feasible"]
        assert feasible and all(c.invisible_budget == 0 for c in feasible)
        assert all(
            all(not bk for _, bk in c.selection) for c in feasible
        )
        assert report.toric_impossible

    def test_projective_plane_budget(self):
        h = parse_rational_function("(1+7*t+t^2)/(1-t)^3")
        report = analyze_series(h)
        assert report.verdict == "Feasible"
        assert report.k_squared == 9
        assert any(c.invisible_budget == 3 for c in report.per_choice)
        assert not report.toric_impossible

    def test_roundtrip_reduced_basket_is_feasible_choice(self):
        pool = RES_PLUS_5 + tuple(hyperplane_inverse(s) for s in RES_PLUS_5)
        tried = 0
        while tried < 10:
            b = basket([rng.choice(pool) for _ in range(rng.randint(1, 2))])
            if contains_cancelling_tuple(b) is not None:
                continue
            rk2 = sum((degree_contribution(s) for s in b), Fraction(0))
            # choose K^2 so that IK^2 = 12 - K^2 - RK^2 is a small nonneg integer
            k2 = 12 - rk2 - 2
            if k2 <= 0:
                continue
            tried += 1
            hs = assemble_series(b, k2)
            report = analyze_series(hs.series)
            assert report.verdict == "Feasible"
            keys = {
                tuple(sorted(basket_key(bk) for _, bk in c.selection))
                for c in report.per_choice
                if c.verdict == "Feasible"
            }
            assert (basket_key(b),) in keys


class TestPsiInvariants:
    def test_residue_strips_one_cycle(self):
        psi, psi_ext = psi_invariants(basket([Singularity(12, 7)]), 3)
        assert psi.counts == (1, 0)
        assert psi_ext.counts == (2, 1)

    def test_t_only_basket(self):
        psi, psi_ext = psi_invariants(basket([Singularity(9, 2)]), 3)
        assert all(c == 0 for c in psi.counts)
        assert psi_ext.counts == (1, 1)  # one full quiver cycle

    def test_difference_is_multiple_of_cycle(self):
        for _ in range(50):
            ell = rng.choice((3, 5))
            pool = res_plus(ell)
            b = list(rng.choice(pool) for _ in range(rng.randint(0, 2)))
            # add some T-singularities of the same local index
            for _ in range(rng.randint(0, 2)):
                c = rng.choice([x for x in range(1, ell) if gcd(x, ell) == 1])
                b.append(Singularity(ell * ell, ell * c - 1))
            psi, psi_ext = psi_invariants(basket(b), ell)
            diff = [a - c for a, c in zip(psi_ext.counts, psi.counts)]
            assert len(set(diff)) <= 1 and (not diff or diff[0] >= 0)
