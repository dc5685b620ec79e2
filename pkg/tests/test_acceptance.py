"""End-to-end acceptance gates for the submatrix-completion package.

Each test prints a single PASS/FAIL line for its criterion (run with
``pytest tests/test_acceptance.py -s`` to see them as they complete) and
then asserts, so a failed gate is visible both in the printed line and in
the pytest report. The two 100-trial benchmark reproductions and the
n=200 error-ordering sweep dominate the runtime (several minutes total).
"""
import hashlib
import json
import time

import numpy as np
import pytest

from submc.estimator import estimate_all, rank_r_approx, rescale, svt_whole
from submc.harness import ExperimentConfig, build_probability, render_outputs, \
    run_experiment
from submc.sampling import is_monotone, make_block_P, make_rank_one_P, \
    sample_beta_mixture_factors, sample_mask, validate_probability_matrix, \
    RankOneFactors
from submc.selector import istar, kstar, plan_all, verify_core_lemma
from submc.signal import check_signal_bounded, make_signal_instance, observe, \
    spectral_diagnostics
from test_sampling import random_monotone_p
from test_selector import brute_force_objective


def report(num, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    pad = "." * max(1, 52 - len(name))
    print(f"\n[{num:2d}] {name} {pad} {status}  {detail}".rstrip())
    return ok


# ---------------------------------------------------------------------------
# 1. Block-constant benchmark: submatrix SVT vs whole-matrix SVT at 100x100.


@pytest.fixture(scope="module")
def block_benchmark():
    config = ExperimentConfig(
        probability={"kind": "block", "n1": 50, "n2": 50,
                     "q11": 0.3, "q12": 0.3, "q21": 0.3, "q22": 0.05},
        n=100, m=100, r=2, sigma=0.1, trials=100, seed=1,
    )
    start = time.time()
    rep = run_experiment(config)
    return config, rep, time.time() - start


def test_01_block_constant_benchmark(block_benchmark):
    _, rep, elapsed = block_benchmark
    bm = rep.block_means
    rel = rep.rel_improvement
    pos = float(np.mean(rel[np.isfinite(rel)] > 0))
    gates = {
        "top_left": (bm["top_left"], 0.127),
        "off_diagonal": (bm["off_diagonal"], 0.213),
        "bottom_right": (bm["bottom_right"], 0.145),
    }
    checks = {k: abs(v - target) <= 0.06 for k, (v, target) in gates.items()}
    checks["positive_share"] = pos >= 0.75
    detail = " ".join(f"{k}={v:.1%}(ref {t:.1%})" for k, (v, t) in gates.items())
    detail += f" pos={pos:.1%} [{elapsed:.0f}s]"
    ok = report(1, "block-constant benchmark (100 trials)", all(checks.values()),
                detail)
    assert elapsed < 600
    assert ok, {k: v for k, v in checks.items() if not v}


# ---------------------------------------------------------------------------
# 2. Rank-one Beta-mixture benchmark, plus stability of the core extent.


def test_02_rank_one_benchmark():
    config = ExperimentConfig(
        probability={"kind": "rank_one_beta", "split_index": 80},
        n=100, m=100, r=2, sigma=0.1, trials=100, seed=7,
    )
    rep = run_experiment(config)
    overall = rep.block_means["overall"]
    hits = 0
    seeds = 50
    for s in range(seeds):
        a = sample_beta_mixture_factors(100, 80, seed=s)
        b = sample_beta_mixture_factors(100, 80, seed=s + 500)
        P = make_rank_one_P(RankOneFactors(a, b))
        if 65 <= istar(P).i_star <= 85:
            hits += 1
    ok_overall = abs(overall - 0.177) <= 0.06
    ok_istar = hits >= 0.9 * seeds
    ok = report(2, "rank-one Beta benchmark (100 trials)",
                ok_overall and ok_istar,
                f"overall={overall:.1%}(ref 17.7%) i*-in-[65,85]={hits}/{seeds}")
    assert ok


# ---------------------------------------------------------------------------
# 3. Selector equals an exhaustive-scan oracle; core sharing always holds.


def test_03_selector_oracle_equivalence():
    rng = np.random.default_rng(11)
    mismatches = 0
    lemma_failures = 0
    for _ in range(200):
        n, m = rng.integers(5, 31, size=2)
        P = random_monotone_p(rng, int(n), int(m))
        is_monotone(P)
        if not verify_core_lemma(P):
            lemma_failures += 1
        p_list = P.p.tolist()
        for _ in range(50):
            i = int(rng.integers(1, n + 1))
            j = int(rng.integers(1, m + 1))
            plan = kstar(P, i, j)
            best, best_k = brute_force_objective(p_list, i, j)
            if plan.k_star * plan.p_star != best or plan.k_star != best_k:
                mismatches += 1
    ok = report(3, "selector oracle equivalence (200 x 50)",
                mismatches == 0 and lemma_failures == 0,
                f"mismatches={mismatches} core-sharing-failures={lemma_failures}")
    assert ok


# ---------------------------------------------------------------------------
# 4. Constant P collapses the submatrix estimator to whole-matrix SVT.


def test_04_reduction_to_whole_matrix():
    P = validate_probability_matrix(np.full((60, 60), 0.5))
    is_monotone(P)
    inst = make_signal_instance(60, 60, 3, seed=40)
    mask = sample_mask(P, seed=41)
    obs = observe(inst.M_star, mask, 0.1, seed=42)
    sub = estimate_all(obs.y, mask, P, 3).m_hat
    whole = svt_whole(obs.y, mask, P, 3).m_hat
    gap = float(np.max(np.abs(sub - whole)))
    ok = report(4, "constant-P reduction to whole-matrix SVT", gap <= 1e-9,
                f"max gap={gap:.2e}")
    assert ok


# ---------------------------------------------------------------------------
# 5. No noise and a full mask: both estimators recover the signal.


def test_05_noiseless_exactness():
    P = validate_probability_matrix(np.ones((80, 80)))
    is_monotone(P)
    inst = make_signal_instance(80, 80, 4, seed=50)
    mask = sample_mask(P, seed=51)
    obs = observe(inst.M_star, mask, 0.0, seed=52)
    ref = float(np.linalg.norm(inst.M_star))
    errs = [
        float(np.linalg.norm(estimate_all(obs.y, mask, P, 4).m_hat
                             - inst.M_star)) / ref,
        float(np.linalg.norm(svt_whole(obs.y, mask, P, 4).m_hat
                             - inst.M_star)) / ref,
    ]
    ok = report(5, "noiseless full-mask exactness", max(errs) <= 1e-7,
                f"rel Frobenius errors={errs[0]:.2e}/{errs[1]:.2e}")
    assert ok


# ---------------------------------------------------------------------------
# 6. Truncated SVD is the optimal rank-r approximation.


def test_06_best_rank_r_approximation():
    rng = np.random.default_rng(60)
    worst_rel = 0.0
    beaten = 0
    for _ in range(100):
        n = int(rng.integers(8, 65))
        m = int(rng.integers(8, 49))
        r = int(rng.integers(1, 6))
        Y = rng.standard_normal((n, m))
        approx = rank_r_approx(Y, r)
        resid = float(np.linalg.norm(Y - approx) ** 2)
        s = np.linalg.svd(Y, compute_uv=False)
        tail = float(np.sum(s[r:] ** 2))
        worst_rel = max(worst_rel, abs(resid - tail) / tail)
        for _ in range(100):
            A = rng.standard_normal((n, r))
            B = rng.standard_normal((r, m))
            scale = np.sum(Y * (A @ B)) / max(np.linalg.norm(A @ B) ** 2, 1e-300)
            if np.linalg.norm(Y - scale * (A @ B)) ** 2 < resid:
                beaten += 1
    ok = report(6, "optimal rank-r approximation (100 matrices)",
                worst_rel <= 1e-8 and beaten == 0,
                f"worst residual mismatch={worst_rel:.2e} beaten={beaten}")
    assert ok


# ---------------------------------------------------------------------------
# 7. Entry errors grow as sampling thins: core < off-diagonal < bottom-right.


def test_07_error_ordering_across_blocks():
    n = 200
    q_off = n ** -0.5
    q_br = max(n ** -2.0, 2.0 / n)
    P = make_block_P(100, 100, 0.9, q_off, q_off, q_br)
    plans = plan_all(P)
    ordered = 0
    seeds = 20
    for s in range(seeds):
        inst = make_signal_instance(n, n, 2, seed=1000 + s)
        mask = sample_mask(P, seed=2000 + s)
        obs = observe(inst.M_star, mask, 0.1, seed=3000 + s)
        err = np.abs(estimate_all(obs.y, mask, P, 2, plans=plans).m_hat
                     - inst.M_star)
        core = float(err[:100, :100].mean())
        off = float((err[:100, 100:].sum() + err[100:, :100].sum()) / 20000)
        br = float(err[100:, 100:].mean())
        if core < off < br:
            ordered += 1
    ok = report(7, "error ordering across sampling levels (n=200)",
                ordered >= 0.9 * seeds, f"ordered in {ordered}/{seeds} seeds")
    assert ok


# ---------------------------------------------------------------------------
# 8. Gaussian-factor signal diagnostics: rank, boundedness, incoherence.


def test_08_signal_diagnostics():
    full_rank = 0
    bounded = 0
    for s in range(500):
        inst = make_signal_instance(100, 100, 2, seed=s)
        if np.linalg.matrix_rank(inst.M_star) == 2:
            full_rank += 1
        if check_signal_bounded(inst.M_star, 2, delta=0.01):
            bounded += 1
    coherent = 0
    well_conditioned = 0
    for s in range(100):
        inst = make_signal_instance(200, 200, 2, seed=10_000 + s)
        diag = spectral_diagnostics(inst.M_star, 2)
        if diag.eta <= 5.0 * np.sqrt(2.0 / 200.0):
            coherent += 1
        if diag.kappa <= 1.5:
            well_conditioned += 1
    checks = [full_rank == 500, bounded >= 495, coherent >= 95,
              well_conditioned >= 95]
    ok = report(8, "signal diagnostics suite", all(checks),
                f"rank={full_rank}/500 bounded={bounded}/500 "
                f"eta={coherent}/100 kappa={well_conditioned}/100")
    assert ok


# ---------------------------------------------------------------------------
# 9. Inverse-probability rescaling is unbiased over mask and noise draws.


def test_09_unbiased_rescaling():
    n = m = 10
    p = 0.3
    sigma = 0.5
    draws = 100_000
    P = validate_probability_matrix(np.full((n, m), p))
    inst = make_signal_instance(n, m, 2, seed=90)
    rng = np.random.default_rng(91)
    total = np.zeros((n, m))
    total_sq = np.zeros((n, m))
    chunk = 10_000
    for _ in range(draws // chunk):
        omega = rng.random((chunk, n, m)) < p
        noise = sigma * rng.standard_normal((chunk, n, m))
        ybar = omega * (inst.M_star + noise) / p
        total += ybar.sum(axis=0)
        total_sq += (ybar ** 2).sum(axis=0)
    mean = total / draws
    se = np.sqrt((total_sq / draws - mean ** 2) / draws)
    within = int(np.sum(np.abs(mean - inst.M_star) <= 4.0 * se))
    ok = report(9, "unbiasedness of rescaling (1e5 draws)", within >= 95,
                f"within 4 SE: {within}/100 entries")
    assert ok


# ---------------------------------------------------------------------------
# 10. Deterministic artifacts: identical bytes, summaries match the grids.


def test_10_determinism_and_serialization(tmp_path):
    config = dict(
        probability={"kind": "block", "n1": 15, "n2": 15,
                     "q11": 0.8, "q12": 0.8, "q21": 0.8, "q22": 0.2},
        n=30, m=30, r=2, sigma=0.1, trials=5, seed=101,
    )
    digests = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        render_outputs(run_experiment(ExperimentConfig(**config)), str(out))
        digests.append({
            name: hashlib.sha256((out / name).read_bytes()).hexdigest()
            for name in ("e_sub.csv", "e_whole.csv", "rel_improvement.csv")
        })
    identical = digests[0] == digests[1]

    rel = np.loadtxt(tmp_path / "a" / "rel_improvement.csv", delimiter=",")
    with open(tmp_path / "a" / "summary.json") as fh:
        summary = json.load(fh)
    finite = np.isfinite(rel)
    gap = abs(float(rel[finite].mean()) - summary["block_means"]["overall"])
    ok = report(10, "determinism and serialization",
                identical and gap < 1e-12,
                f"byte-identical={identical} summary gap={gap:.1e}")
    assert ok
