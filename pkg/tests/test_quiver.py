"""Residual quivers, indecomposables, self-dual singularities, the
delta-vector lattice, and cancelling tuples."""

import itertools
import random
from math import gcd

import pytest

from delpezzo import (
    DeltaVector,
    Singularity,
    basket,
    classify,
    contains_cancelling_tuple,
    delta_lattice,
    hyperplane_sum,
    indecomposables,
    maximal_shatter,
    maximal_shattering,
    orbifold_contribution,
    regroupings,
    residual_quiver,
    self_duals,
)
from delpezzo.errors import MixedIndex
from delpezzo.hilbert import zero_delta
from delpezzo.quiver import elementary_t, hyperplane_sum_chain

rng = random.Random(20260824)


def totient(n):
    return sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)


class TestIndecomposables:
    def test_pinned_at_five(self):
        assert set(indecomposables(5)) == {
            Singularity(5, 1),
            Singularity(5, 2),
            Singularity(5, 3),
            Singularity(10, 1),
        }

    def test_counts_match_phi(self):
        for ell in range(3, 21):
            assert len(indecomposables(ell)) == totient(ell)

    def test_trivial_below_three(self):
        assert indecomposables(1) == () and indecomposables(2) == ()

    def test_all_are_indecomposable_residuals(self):
        for ell in range(3, 15):
            for s in indecomposables(ell):
                assert s.local_index == ell
                assert maximal_shatter(s) == [s]


class TestResidualQuiver:
    def test_pinned_cycle_at_five(self):
        q = residual_quiver(5)
        assert q.vertices == (
            Singularity(5, 1),
            Singularity(5, 2),
            Singularity(10, 1),
            Singularity(5, 3),
        )
        for i, v in enumerate(q.vertices):
            assert q.successor(v) == q.vertices[(i + 1) % 4]

    def test_widths_sum_to_local_index(self):
        for ell in range(3, 21):
            q = residual_quiver(ell)
            assert sum(v.width for v in q.vertices) == ell

    def test_vertex_count_is_phi(self):
        for ell in range(3, 21):
            assert len(residual_quiver(ell).vertices) == totient(ell)

    def test_successor_sums_are_defined(self):
        for ell in range(3, 15):
            q = residual_quiver(ell)
            for v in q.vertices:
                assert hyperplane_sum(v, q.successor(v)) is not None

    def test_dual_reverses_the_cycle(self):
        for ell in range(3, 15):
            q = residual_quiver(ell)
            n = len(q.vertices)
            for i, v in enumerate(q.vertices):
                assert q.vertices[(-i) % n] == v.dual()

    def test_full_cycle_recomposes_elementary_t(self):
        for ell in range(3, 12):
            q = residual_quiver(ell)
            total = hyperplane_sum_chain(list(q.vertices))
            assert total is not None
            c = classify(total)
            assert c.kind.name == "T_SINGULARITY" and c.d == 1

    def test_elementary_t_from_start(self):
        assert elementary_t(3, Singularity(3, 1)) == Singularity(9, 5)


class TestSelfDuals:
    def test_pinned_table_mod_eight(self):
        for ell in range(3, 35):
            got = set(self_duals(ell))
            if ell % 2 == 1:
                want = {Singularity(ell, 1), Singularity(2 * ell, 1)}
            elif ell % 8 in (0, 4):
                want = {Singularity(2 * ell, 1), Singularity(2 * ell, ell + 1)}
            elif ell % 8 == 2:
                want = {Singularity(2 * ell, 1), Singularity(4 * ell, ell + 1)}
            else:  # ell % 8 == 6
                want = {Singularity(2 * ell, 1), Singularity(4 * ell, 3 * ell + 1)}
            assert got == want, ell

    def test_exactly_the_fixed_points_of_dual(self):
        for ell in range(3, 21):
            fixed = {
                v for v in residual_quiver(ell).vertices if v.dual() == v
            }
            assert fixed == set(self_duals(ell))


class TestDeltaLattice:
    def test_rank_two_at_five(self):
        assert delta_lattice(5).rank == 2

    def test_pinned_relations_at_five(self):
        q1 = orbifold_contribution(Singularity(5, 1))
        q2 = orbifold_contribution(Singularity(20, 3))
        q3 = orbifold_contribution(Singularity(10, 1))
        q4 = orbifold_contribution(Singularity(15, 2))
        assert q1 + q4 == q2
        assert q1 + q4 + q4 == q3

    def test_rank_is_half_phi(self):
        for ell in range(3, 21):
            assert delta_lattice(ell).rank == totient(ell) // 2

    def test_membership(self):
        L = delta_lattice(5)
        assert L.contains((2, 1, 2)) and L.contains((1, -2, 1))
        assert L.contains((8, -1, 8))
        assert not L.contains((1, 1, 1))
        assert not L.contains((1, 0, 1))

    def test_generators_lie_in_lattice(self):
        for ell in range(3, 15):
            L = delta_lattice(ell)
            for s in indecomposables(ell):
                assert L.contains(orbifold_contribution(s).entries)


class TestShatteringMultisets:
    def test_pair_counts_at_five(self):
        m = maximal_shattering([Singularity(5, 2)])
        assert m.counts == (0, 1, 0, 0)
        assert m.pair_counts() == (0, 1, 0)

    def test_mixed_index_rejected(self):
        with pytest.raises(MixedIndex):
            maximal_shattering([Singularity(5, 1), Singularity(3, 1)])

    def test_regroupings_contain_original(self):
        for _ in range(40):
            ell = rng.randint(3, 6)
            picks = [
                rng.choice(indecomposables(ell))
                for _ in range(rng.randint(1, 3))
            ]
            m = maximal_shattering(picks, extended=True)
            groups = regroupings(m)
            # every regrouping shatters back to the input multiset; baskets
            # are isomorphism classes, so compare dual-pair counts
            for g in groups:
                back = maximal_shattering(g, extended=True)
                assert back.pair_counts() == m.pair_counts()
            key = tuple(sorted(s.iso_key() for s in picks))
            assert key in {tuple(sorted(s.iso_key() for s in g)) for g in groups}


class TestCancellingTuples:
    def test_inverse_pairs_cancel(self):
        found = contains_cancelling_tuple(
            [Singularity(5, 1), Singularity(20, 11)]
        )
        assert found is not None
        total = zero_delta(5)
        for s in found:
            total = total + orbifold_contribution(s)
        assert total.is_zero

    def test_shattered_t_cones_cancel(self):
        for ell in (3, 5, 7):
            t = elementary_t(ell, residual_quiver(ell).vertices[0])
            shards = maximal_shatter(t)
            assert contains_cancelling_tuple(shards) is not None

    def test_single_residuals_do_not_cancel(self):
        for ell in range(3, 10):
            for s in indecomposables(ell):
                assert contains_cancelling_tuple([s]) is None

    def test_reduced_example_baskets_are_cancelling_free(self):
        assert (
            contains_cancelling_tuple([Singularity(5, 1), Singularity(15, 2)])
            is None
        )
        assert contains_cancelling_tuple([Singularity(20, 3)]) is None
