import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isoclust import (
    NOISE,
    Dataset,
    ParamGrid,
    dbscan,
    default_grid,
    detectability_diagnostic,
    dissimilarity_matrix,
    f1_score,
    grid_search,
)
from isoclust.evaluation import save_detectability_csv, save_sweep_csv


class TestF1Score:
    def test_perfect_prediction(self):
        truth = np.array([0, 0, 1, 1, 2, 2])
        report = f1_score(truth.copy(), truth)
        assert report.macro_f1 == 1.0
        assert all(f == 1.0 for _, _, f in report.per_cluster)

    def test_all_noise_scores_zero(self):
        truth = np.array([0, 0, 1, 1])
        report = f1_score(np.full(4, NOISE), truth)
        assert report.macro_f1 == 0.0
        assert report.per_cluster == ()

    def test_hand_computed_six_points(self):
        # truth [0,0,0,1,1,1], predicted [A,A,B,B,B,noise]
        # matching A->0, B->1: (0.8 + 2/3)/2 = 11/15; the swapped matching
        # gives (0 + 1/3)/2 = 1/6, so the optimum must pick the first
        truth = np.array([0, 0, 0, 1, 1, 1])
        predicted = np.array([0, 0, 1, 1, 1, NOISE])
        report = f1_score(predicted, truth)
        assert report.macro_f1 == pytest.approx(11 / 15, abs=1e-12)
        assert report.matching == {0: 0, 1: 1}
        p, r, f = report.per_cluster[0]
        assert (p, r) == (1.0, pytest.approx(2 / 3))
        p, r, f = report.per_cluster[1]
        assert (p, r) == (pytest.approx(2 / 3), pytest.approx(2 / 3))

    def test_surplus_clusters_do_not_inflate_the_average(self):
        truth = np.zeros(4, dtype=int)
        predicted = np.array([0, 0, 1, 1])
        report = f1_score(predicted, truth)
        # one cluster matches the single class, the other goes unmatched
        assert report.n_classes == 1
        assert report.macro_f1 == pytest.approx(2 * 0.5 * 1.0 / 1.5)

    def test_length_mismatch_and_empty_truth(self):
        with pytest.raises(ValueError, match="mismatch"):
            f1_score(np.array([0, 0]), np.array([0, 0, 1]))
        with pytest.raises(ValueError, match="empty"):
            f1_score(np.array([]), np.array([]))

    @given(st.integers(0, 10_000))
    @settings(max_examples=30, deadline=None)
    def test_invariant_under_relabelling(self, seed):
        rng = np.random.default_rng(seed)
        truth = rng.integers(0, 4, 30)
        predicted = rng.integers(-1, 4, 30)
        base = f1_score(predicted, truth).macro_f1
        cluster_perm = rng.permutation(4)
        class_perm = rng.permutation(4)
        shuffled_pred = np.where(predicted == NOISE, NOISE, cluster_perm[predicted])
        shuffled_truth = class_perm[truth]
        assert f1_score(shuffled_pred, shuffled_truth).macro_f1 == pytest.approx(base, abs=1e-12)


class TestGridSearch:
    def test_single_grid_point_equals_direct_evaluation(self, two_blobs):
        grid = ParamGrid(cutoffs=(0.12,), min_points=(3,))
        report = grid_search(two_blobs, "dbscan", grid=grid, repeats=1, seed=0)
        assert len(report.rows) == 1
        m = dissimilarity_matrix(two_blobs, "euclidean")
        direct = f1_score(dbscan(m, 0.12, 3), two_blobs.labels).macro_f1
        assert report.rows[0].mean_f1 == direct
        assert report.best.mean_f1 == direct

    def test_best_is_the_argmax(self, two_blobs):
        grid = ParamGrid(cutoffs=(0.01, 0.12, 0.5), min_points=(2, 3, 9))
        report = grid_search(two_blobs, "dbscan", grid=grid, repeats=1, seed=0)
        assert report.best.mean_f1 == max(r.mean_f1 for r in report.rows)

    def test_isolation_sweep_reproducible(self, two_blobs):
        grid = ParamGrid(cutoffs=(0.3, 0.6), min_points=(2, 3), psi_values=(2, 5), t=40)
        a = grid_search(two_blobs, "mbscan-anne", grid=grid, repeats=3, seed=5)
        b = grid_search(two_blobs, "mbscan-anne", grid=grid, repeats=3, seed=5)
        assert [r.mean_f1 for r in a.rows] == [r.mean_f1 for r in b.rows]
        assert [r.std_f1 for r in a.rows] == [r.std_f1 for r in b.rows]
        assert a.best.params == b.best.params

    def test_dp_sweep_runs(self, two_blobs):
        grid = ParamGrid(cutoffs=(0.1, 0.2), k_values=(2, 3))
        report = grid_search(two_blobs, "dp", grid=grid, seed=0)
        assert report.best.mean_f1 == 1.0
        assert report.best.params["k"] == 2

    def test_unknown_algorithm_rejected(self, two_blobs):
        with pytest.raises(ValueError, match="unknown algorithm"):
            grid_search(two_blobs, "optics")

    def test_needs_labels(self):
        data = Dataset(points=np.random.default_rng(0).random((10, 2)))
        with pytest.raises(ValueError, match="labels"):
            grid_search(data, "dbscan")

    def test_default_grid_shapes(self, iris):
        grid = default_grid(iris, "mbscan-anne")
        assert len(grid.cutoffs) == 101
        assert grid.cutoffs[0] == pytest.approx(0.001)
        assert grid.cutoffs[-1] == pytest.approx(0.999)
        assert grid.min_points == tuple(range(2, 41))
        assert len(grid.psi_values) == 10
        assert grid.psi_values[0] == 2
        assert grid.psi_values[-1] == 75
        assert grid.t == 200

    def test_sweep_csv_export(self, two_blobs, tmp_path):
        grid = ParamGrid(cutoffs=(0.12,), min_points=(3,))
        report = grid_search(two_blobs, "dbscan", grid=grid, repeats=1, seed=0)
        path = tmp_path / "sweep.csv"
        save_sweep_csv(report, path, header_lines=("run",))
        lines = path.read_text().splitlines()
        assert lines[0] == "# run"
        assert lines[1].startswith("# best:")
        assert lines[2] == "cutoff,min_points,mean_f1,std_f1"
        assert len(lines) == 4


class TestDetectability:
    def test_single_tight_blob_fails_everywhere(self):
        rng = np.random.default_rng(0)
        data = Dataset(points=rng.normal(0.5, 0.03, size=(60, 2)))
        m = dissimilarity_matrix(data, "euclidean")
        reports = detectability_diagnostic(m, [0, 1], np.linspace(0.001, 0.999, 25))
        assert not any(r.satisfied for r in reports)

    def test_disconnected_modes_report_zero_valley(self, two_blobs):
        m = dissimilarity_matrix(two_blobs, "euclidean")
        reports = detectability_diagnostic(m, [0, 7], [0.05])
        (report,) = reports
        assert report.valleys[(0, 7)] == 0
        assert not report.satisfied

    def test_mode_masses_never_decrease_with_cutoff(self, two_blobs):
        m = dissimilarity_matrix(two_blobs, "euclidean")
        reports = detectability_diagnostic(m, [0, 7], np.linspace(0.01, 1.0, 20))
        for mode in (0, 7):
            masses = [r.mode_masses[mode] for r in reports]
            assert masses == sorted(masses)

    def test_valley_values_match_threshold_connectivity(self, two_blobs):
        # brute check of the minimax value: try every mass level directly
        m = dissimilarity_matrix(two_blobs, "euclidean")
        cutoff = 0.9
        reports = detectability_diagnostic(m, [0, 7], [cutoff])
        valley = reports[0].valleys[(0, 7)]
        adj = m.values <= cutoff
        np.fill_diagonal(adj, False)
        masses = adj.sum(axis=1) + 1

        def connected_at(level):
            import scipy.sparse as sp
            import scipy.sparse.csgraph as csg

            keep = np.nonzero(masses >= level)[0]
            if 0 not in keep or 7 not in keep:
                return False
            _, comp = csg.connected_components(sp.csr_matrix(adj[np.ix_(keep, keep)]))
            return comp[list(keep).index(0)] == comp[list(keep).index(7)]

        feasible = [lvl for lvl in np.unique(masses) if connected_at(lvl)]
        assert valley == max(feasible)

    def test_needs_two_distinct_modes(self, two_blobs):
        m = dissimilarity_matrix(two_blobs, "euclidean")
        with pytest.raises(ValueError, match="two distinct"):
            detectability_diagnostic(m, [3, 3], [0.5])

    def test_detectability_csv(self, two_blobs, tmp_path):
        m = dissimilarity_matrix(two_blobs, "euclidean")
        reports = detectability_diagnostic(m, [0, 7], [0.1, 0.9])
        path = tmp_path / "detect.csv"
        save_detectability_csv(reports, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "cutoff,mass_0,mass_7,valley_0_7,satisfied"
        assert len(lines) == 3


def test_isolation_grid_recovers_two_blobs(two_blobs):
    # sanity: a grid containing good parameters finds the exact partition
    grid = ParamGrid(cutoffs=(0.5, 0.65, 0.8), min_points=(2, 3), psi_values=(2, 4), t=100)
    report = grid_search(two_blobs, "mbscan-anne", grid=grid, repeats=2, seed=0)
    assert report.best.mean_f1 == 1.0
