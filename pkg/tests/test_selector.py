import csv

import numpy as np
import pytest

from submc import errors
from submc.sampling import is_monotone, make_block_P, make_rank_one_P, RankOneFactors, \
    sample_beta_mixture_factors, validate_probability_matrix
from submc.selector import (
    FLOOR_TARGET,
    PLAIN,
    istar,
    kstar,
    plan_all,
    plans_to_csv,
    verify_core_lemma,
)
from test_sampling import random_monotone_p


def brute_force_objective(p, i, j):
    """Independent exhaustive scan of the selection objective (pure python)."""
    n, m = len(p), len(p[0])
    best = 0.0
    best_k = 0
    for k in range(1, min(n, m) + 1):
        a = p[max(i, k) - 1][k - 1]
        b = p[k - 1][max(j, k) - 1]
        val = k * min(a, b)
        if val >= best:
            best = val
            best_k = k
    return best, best_k


BLOCK = make_block_P(50, 50, 0.3, 0.3, 0.3, 0.05)


class TestKstar:
    def test_constant_p(self):
        P = validate_probability_matrix(np.full((8, 8), 0.4))
        is_monotone(P)
        for i, j in [(1, 1), (3, 7), (8, 8)]:
            plan = kstar(P, i, j)
            assert plan.k_star == 8
            assert plan.p_star == 0.4
            assert plan.rescale_mode == PLAIN

    def test_block_floor_target(self):
        plan = kstar(BLOCK, 60, 60)
        assert plan.k_star == 50
        assert plan.p_star == 0.3
        assert plan.rescale_mode == FLOOR_TARGET
        assert plan.row_set == tuple(range(1, 51)) + (60,)
        assert plan.target_pos == (51, 51)

    def test_block_plain(self):
        plan = kstar(BLOCK, 10, 20)
        assert plan.k_star == 50
        assert plan.p_star == 0.3
        assert plan.rescale_mode == PLAIN
        assert plan.row_set == tuple(range(1, 51))
        assert plan.target_pos == (10, 20)

    def test_matches_brute_force_on_block(self):
        p = BLOCK.p.tolist()
        for i, j in [(1, 1), (60, 60), (10, 20), (100, 100), (50, 51)]:
            plan = kstar(BLOCK, i, j)
            best, best_k = brute_force_objective(p, i, j)
            assert plan.k_star * plan.p_star == pytest.approx(best)
            assert plan.k_star == best_k

    def test_requires_certificate(self):
        P = validate_probability_matrix(np.full((4, 4), 0.5))
        with pytest.raises(errors.NotMonotone):
            kstar(P, 1, 1)

    def test_all_zero(self):
        P = validate_probability_matrix(np.zeros((4, 4)))
        is_monotone(P)
        with pytest.raises(errors.AllZero):
            kstar(P, 2, 2)

    def test_p_star_dominates_target(self):
        # p_star >= P[i,j] whenever both target indices exceed k_star
        rng = np.random.default_rng(1)
        for _ in range(30):
            P = random_monotone_p(rng, 12, 12)
            i, j = rng.integers(1, 13, size=2)
            plan = kstar(P, int(i), int(j))
            if plan.rescale_mode == FLOOR_TARGET:
                assert plan.p_star >= P.p[i - 1, j - 1]


class TestIstar:
    def test_block(self):
        core = istar(BLOCK)
        assert core.i_star == 50
        assert core.objective_value == pytest.approx(15.0)

    def test_constant(self):
        P = validate_probability_matrix(np.full((7, 9), 0.2))
        assert istar(P).i_star == 7

    def test_all_zero_diagonal(self):
        P = validate_probability_matrix(np.zeros((3, 3)))
        with pytest.raises(errors.AllZero):
            istar(P)

    def test_beta_mixture_realizations(self):
        # i_star lands near the factor drop at index 80 for >= 90% of seeds
        hits = 0
        for seed in range(50):
            a = sample_beta_mixture_factors(100, 80, seed=seed)
            b = sample_beta_mixture_factors(100, 80, seed=seed + 500)
            P = make_rank_one_P(RankOneFactors(a, b))
            if 65 <= istar(P).i_star <= 85:
                hits += 1
        assert hits >= 45


class TestCoreLemma:
    def test_block(self):
        assert verify_core_lemma(BLOCK)

    def test_constant(self):
        P = validate_probability_matrix(np.full((6, 6), 0.3))
        is_monotone(P)
        assert verify_core_lemma(P)

    def test_random_monotone_sweep(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            n, m = rng.integers(5, 31, size=2)
            P = random_monotone_p(rng, int(n), int(m))
            is_monotone(P)
            assert verify_core_lemma(P)


class TestPlanAll:
    def test_block_census(self):
        groups = plan_all(BLOCK)
        sizes = sorted(len(g.members) for g in groups)
        assert sizes[-1] == 2500  # core group (entries i,j <= i*)
        assert sum(sizes) == 100 * 100
        # floor-target groups are singletons
        for g in groups:
            if g.rescale_mode == FLOOR_TARGET:
                assert len(g.members) == 1

    def test_constant_single_group(self):
        P = validate_probability_matrix(np.full((6, 6), 0.3))
        is_monotone(P)
        groups = plan_all(P)
        assert len(groups) == 1
        assert len(groups[0].members) == 36

    def test_group_consistency(self):
        # every member's own kstar matches its group's key
        rng = np.random.default_rng(4)
        P = random_monotone_p(rng, 10, 10)
        is_monotone(P)
        for g in plan_all(P):
            for plan in g.members:
                solo = kstar(P, *plan.target)
                assert solo.k_star == g.k_star
                assert solo.row_set == g.row_set
                assert solo.col_set == g.col_set
                assert solo.p_star == pytest.approx(g.p_star)

    def test_csv_export(self, tmp_path):
        P = validate_probability_matrix(np.full((4, 4), 0.5))
        is_monotone(P)
        path = tmp_path / "plans.csv"
        plans_to_csv(plan_all(P), path)
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 16
        assert rows[0]["i"] == "1" and rows[0]["j"] == "1"
        assert rows[0]["k_star"] == "4"
        assert rows[0]["mode"] == PLAIN


class TestOracleEquivalence:
    def test_200_random_monotone_matrices(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            n, m = rng.integers(5, 31, size=2)
            P = random_monotone_p(rng, int(n), int(m))
            is_monotone(P)
            p_list = P.p.tolist()
            for _ in range(50):
                i = int(rng.integers(1, n + 1))
                j = int(rng.integers(1, m + 1))
                plan = kstar(P, i, j)
                best, best_k = brute_force_objective(p_list, i, j)
                assert plan.k_star * plan.p_star == best
                assert plan.k_star == best_k

    def test_tie_break_largest_and_deterministic(self):
        P = validate_probability_matrix(np.full((9, 9), 0.5))
        is_monotone(P)
        assert kstar(P, 1, 1).k_star == 9
        assert istar(P).i_star == 9
        plans = [kstar(P, 4, 5) for _ in range(3)]
        assert len({p.k_star for p in plans}) == 1
