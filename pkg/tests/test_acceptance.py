"""End-to-end gate: seven checks, one verdict line each on real stdout.

Each test prints "[criterion N] name: PASS/FAIL (detail)" with capture
suspended so the verdict shows up in piped pytest output, then asserts.
Budgeted runtimes are asserted alongside the numerics.
"""

import time

import numpy as np

from focus.detect import auc_score, knn_scores
from focus.errors import FocusError
from focus.geneig import partition, relative_epsilon, solve
from focus.projection import apply as project
from focus.projection import build_mapping, load, save
from focus.scatter import SufficientStats, WeightingScheme, summarize
from focus.synth import (
    AnalyticSpec,
    IlluminationSpec,
    gen_analytic,
    gen_images,
    illumination_plane_basis,
)
from focus.cli import run as cli_run
from tests.conftest import pairwise_scatter_fast, pencil_roots, random_collection, random_psd_pair

UNIFORM = WeightingScheme.uniform()
PROPORTIONAL = WeightingScheme.proportional()


def _verdict(capsys, num: int, name: str, ok: bool, detail: str = "") -> None:
    line = f"[criterion {num}] {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    with capsys.disabled():
        print(line, flush=True)


def test_criterion_1_identity_suite(capsys):
    started = time.perf_counter()
    rng = np.random.default_rng(20260823)
    worst_identity = 0.0
    worst_pairwise = 0.0
    rank_ok = True
    for trial in range(200):
        coll = random_collection(rng, max_sets=12, max_n=200, max_d=32)
        stats = SufficientStats.from_sets(coll)
        for scheme in (UNIFORM, PROPORTIONAL):
            s = summarize(stats, scheme)
            scale = max(np.linalg.norm(s.c_all), 1e-30)
            worst_identity = max(worst_identity, s.identity_residual() / scale)
            if np.linalg.matrix_rank(s.q, tol=1e-8 * scale) > coll.num_sets - 1:
                rank_ok = False
        # pairwise-sum route must agree with the moment route per set
        first = coll.sets[0]
        oracle = pairwise_scatter_fast(first)
        direct = stats.centered_second_moment(0, stats.set_mean(0)) / first.shape[0]
        rel = np.linalg.norm(oracle - direct) / max(np.linalg.norm(direct), 1e-30)
        worst_pairwise = max(worst_pairwise, rel)
    elapsed = time.perf_counter() - started
    ok = worst_identity <= 1e-10 and rank_ok and worst_pairwise <= 1e-10 and elapsed < 30
    _verdict(
        capsys, 1, "identity and rank over 200 random collections", ok,
        f"identity {worst_identity:.2e}, pairwise {worst_pairwise:.2e}, {elapsed:.1f}s",
    )
    assert worst_identity <= 1e-10
    assert rank_ok
    assert worst_pairwise <= 1e-10
    assert elapsed < 30


def test_criterion_2_analytic_spectrum(capsys):
    started = time.perf_counter()
    mean_var = float(np.var(3.0 * np.arange(1, 11)))
    expected_mid = 2.0 / (2.0 + mean_var)
    passes = 0
    for seed in range(50):
        coll = gen_analytic(AnalyticSpec(m_sets=10, n_per_set=100, seed=seed))
        s = summarize(SufficientStats.from_sets(coll), UNIFORM)
        spec = solve(s.c_within, s.c_all, epsilon=relative_epsilon(s.c_all))
        top_ok = abs(spec.vectors[1, 0]) >= 0.95 and spec.values[0] >= 0.9
        null_ok = spec.values[-1] <= 1e-6 and abs(spec.vectors[2, -1]) >= 0.95
        mid_ok = 0.5 * expected_mid <= spec.values[1] <= 1.5 * expected_mid
        passes += top_ok and null_ok and mid_ok
    elapsed = time.perf_counter() - started
    ok = passes >= 48 and elapsed < 10
    _verdict(
        capsys, 2, "analytic scenario spectrum over 50 seeds", ok,
        f"{passes}/50 seeds, {elapsed:.1f}s",
    )
    assert passes >= 48
    assert elapsed < 10


def test_criterion_3_pca_contrast(capsys):
    coll = gen_analytic(AnalyticSpec(m_sets=10, n_per_set=100, seed=0))
    s = summarize(SufficientStats.from_sets(coll), UNIFORM)
    within_eigs = np.sort(np.linalg.eigvalsh(s.c_within))[::-1]
    all_eigs = np.sort(np.linalg.eigvalsh(s.c_all))[::-1]
    within_ok = (
        abs(within_eigs[0] - 2.0) <= 0.4
        and abs(within_eigs[1] - 1.0) <= 0.2
        and abs(within_eigs[2]) <= 1e-10
    )
    all_ok = (
        abs(all_eigs[0] - 76.25) <= 0.2 * 76.25
        and abs(all_eigs[1] - 1.0) <= 0.2
        and abs(all_eigs[2]) <= 1e-10
    )
    # variance ranking vs ratio ranking disagree on purpose
    _, vecs = np.linalg.eigh(s.c_within)
    pca_axis = int(np.argmax(np.abs(vecs[:, -1])))
    spec = solve(s.c_within, s.c_all, epsilon=relative_epsilon(s.c_all))
    ratio_axis = int(np.argmax(np.abs(spec.vectors[:, 0])))
    contrast_ok = pca_axis == 0 and ratio_axis == 1
    ok = within_ok and all_ok and contrast_ok
    _verdict(
        capsys, 3, "variance ranking vs ratio ranking contrast", ok,
        f"within eigs {within_eigs.round(3)}, all eigs {all_eigs.round(2)}, "
        f"pca axis {pca_axis}, ratio axis {ratio_axis}",
    )
    assert within_ok
    assert all_ok
    assert contrast_ok


def test_criterion_4_illumination_pipeline(capsys):
    started = time.perf_counter()
    basis = illumination_plane_basis(14)
    margins = []
    alignments = []
    for seed in range(20):
        spec = IlluminationSpec(
            side=14, m_sets=40, n_per_set=2500, n_test_normal=190,
            n_test_anomalies=10, fraction_lit=0.5, amp_sigma=0.5, seed=seed,
        )
        corpus = gen_images(spec)
        s = summarize(SufficientStats.from_sets(corpus.train), UNIFORM)
        spect = solve(s.c_within, s.c_all, epsilon=relative_epsilon(s.c_all))
        part = partition(spect)
        model = build_mapping(spect, part)

        before = auc_score(knn_scores(corpus.test, k=3), corpus.test_labels)
        after = auc_score(
            knn_scores(project(model, corpus.test), k=3), corpus.test_labels
        )
        margins.append(after - before)
        best = 0.0
        for i in part.remove_distractor:
            best = max(best, float(np.linalg.norm(basis.T @ spect.vectors[:, i])))
        alignments.append(best)
    elapsed = time.perf_counter() - started
    med_margin = float(np.median(margins))
    med_align = float(np.median(alignments))
    ok = med_margin >= 0.1 and med_align >= 0.9 and elapsed < 120
    _verdict(
        capsys, 4, "illumination removal lifts detection", ok,
        f"median AUC gain {med_margin:+.3f}, median plane alignment {med_align:.3f}, "
        f"{elapsed:.0f}s for 20 seeds",
    )
    assert med_margin >= 0.1
    assert med_align >= 0.9
    assert elapsed < 120


def test_criterion_5_solver_against_root_oracle(capsys):
    rng = np.random.default_rng(55)
    worst_gap = 0.0
    worst_resid = 0.0
    bounds_ok = True
    for d in range(2, 9):
        for _ in range(5):
            c_w, c_a = random_psd_pair(rng, d)
            eps = relative_epsilon(c_a)
            spec = solve(c_w, c_a, epsilon=eps)
            scale = np.linalg.norm(c_w) + np.linalg.norm(c_a)
            worst_resid = max(worst_resid, spec.residual(c_w, c_a) / scale)
            if spec.values.min() < 0.0 or spec.values.max() >= 1.0:
                bounds_ok = False
            roots = pencil_roots(c_w, c_a + eps * np.eye(d))
            if roots.size != d:
                bounds_ok = False
                continue
            worst_gap = max(worst_gap, float(np.max(np.abs(np.sort(spec.values) - roots))))
    ok = worst_gap <= 1e-6 and worst_resid <= 1e-8 and bounds_ok
    _verdict(
        capsys, 5, "pencil solver matches determinant-root oracle", ok,
        f"max root gap {worst_gap:.2e}, max residual {worst_resid:.2e}",
    )
    assert worst_gap <= 1e-6
    assert worst_resid <= 1e-8
    assert bounds_ok


def test_criterion_6_streaming_and_serialization(tmp_path, capsys):
    # merge-order independence
    rng = np.random.default_rng(66)
    coll = random_collection(rng, max_sets=6, max_n=80, dim=7)
    shard_a = SufficientStats(dim=7)
    shard_b = SufficientStats(dim=7)
    for m, pts in enumerate(coll.sets):
        for j, x in enumerate(pts):
            (shard_a if j % 2 == 0 else shard_b).accumulate(m, x)
    ab = summarize(shard_a.merge(shard_b), UNIFORM)
    ba = summarize(shard_b.merge(shard_a), UNIFORM)
    batch = summarize(SufficientStats.from_sets(coll), UNIFORM)
    scale = max(np.linalg.norm(batch.c_all), 1.0)
    order_gap = max(
        np.linalg.norm(ab.c_all - ba.c_all),
        np.linalg.norm(ab.c_within - ba.c_within),
    ) / scale
    batch_gap = np.linalg.norm(ab.c_all - batch.c_all) / scale
    stream_ok = order_gap <= 1e-12 and batch_gap <= 1e-10

    # model round trip: save -> load -> save produces identical bytes
    c_w, c_a = random_psd_pair(np.random.default_rng(9), 6, null_within=1)
    spec = solve(c_w, c_a, epsilon=relative_epsilon(c_a))
    model = build_mapping(spec, partition(spec, cutoff=0.6))
    p1, p2 = tmp_path / "m1.focus", tmp_path / "m2.focus"
    save(model, p1, timestamp=False)
    save(load(p1), p2, timestamp=False)
    roundtrip_ok = p1.read_bytes() == p2.read_bytes()

    # CLI determinism end to end
    argv = lambda out: [
        "synth", "--scenario", "analytic", "--out", str(out),
        "--sets", "5", "--n", "300", "--seed", "13",
    ]
    assert cli_run(argv(tmp_path / "da")) == 0
    assert cli_run(argv(tmp_path / "db")) == 0
    data_ok = all(
        (tmp_path / "da" / f.name).read_bytes() == f.read_bytes()
        for f in sorted((tmp_path / "db").iterdir())
    )
    for name in ("ra.focus", "rb.focus"):
        assert cli_run([
            "train", "--sets", str(tmp_path / "da"), "--out", str(tmp_path / name),
            "--reproducible", "--cutoff", "0.99",
        ]) == 0
    cli_ok = (tmp_path / "ra.focus").read_bytes() == (tmp_path / "rb.focus").read_bytes()

    ok = stream_ok and roundtrip_ok and data_ok and cli_ok
    _verdict(
        capsys, 6, "streaming merge order, model round trip, reproducible CLI", ok,
        f"merge gap {order_gap:.1e}, round trip {roundtrip_ok}, cli {cli_ok}",
    )
    assert stream_ok
    assert roundtrip_ok
    assert data_ok
    assert cli_ok


def test_criterion_7_accumulation_scaling(capsys):
    rng = np.random.default_rng(77)
    m_sets, n_per = 8, 512
    timings = {}
    for d in (64, 128, 256):
        sets = [rng.normal(size=(n_per, d)) for _ in range(m_sets)]
        SufficientStats.from_sets(sets)  # warm the BLAS path
        best = np.inf
        for _ in range(5):
            t0 = time.perf_counter()
            SufficientStats.from_sets(sets)
            best = min(best, time.perf_counter() - t0)
        timings[d] = best
    r1 = timings[128] / timings[64]
    r2 = timings[256] / timings[128]
    ok = r1 <= 4.8 and r2 <= 4.8
    _verdict(
        capsys, 7, "quadratic-in-d accumulation cost", ok,
        f"64->128 x{r1:.2f}, 128->256 x{r2:.2f}",
    )
    assert r1 <= 4.8
    assert r2 <= 4.8
