import math

import numpy as np
import pytest

from btlrank.model import Ranking, validate_profile
from btlrank.simulate import (
    ComparisonDataset,
    ComparisonGraph,
    RngSeed,
    design_four_piece_rho,
    design_four_piece_tau,
    design_random_uniform,
    design_two_piece,
    read_dataset,
    sample_comparisons,
    sample_graph,
    write_dataset,
)


class TestSampleGraph:
    def test_complete_graph_at_p_one(self):
        g = sample_graph(4, 1.0, RngSeed(0))
        assert g.num_edges == 6
        assert g.is_connected()

    def test_determinism(self):
        a = sample_graph(50, 0.3, RngSeed(123, 5))
        b = sample_graph(50, 0.3, RngSeed(123, 5))
        assert a == b

    def test_different_streams_differ(self):
        a = sample_graph(50, 0.3, RngSeed(123, 5))
        b = sample_graph(50, 0.3, RngSeed(123, 6))
        assert a != b

    def test_edge_count_matches_binomial_moments(self):
        # mean edge count over 1000 streams vs Binomial(19900, 0.25):
        # the standard error of the mean is sqrt(npq)/sqrt(1000)
        n, p, streams = 200, 0.25, 1000
        pairs = n * (n - 1) // 2
        counts = [sample_graph(n, p, RngSeed(42, s)).num_edges for s in range(streams)]
        se_mean = math.sqrt(pairs * p * (1 - p) / streams)
        assert abs(np.mean(counts) - pairs * p) <= 3 * se_mean

    def test_invalid_args(self):
        with pytest.raises(ValueError):
            sample_graph(1, 0.5, RngSeed(0))
        with pytest.raises(ValueError):
            sample_graph(5, 0.0, RngSeed(0))
        with pytest.raises(ValueError):
            sample_graph(5, 1.5, RngSeed(0))


class TestSampleComparisons:
    def test_equal_skills_give_fair_games(self):
        prof = design_two_piece(0.0, n=60, k=10)
        g = sample_graph(60, 1.0, RngSeed(1))
        ds = sample_comparisons(g, prof, Ranking.identity(60), 200, RngSeed(1, 1))
        # 1770 edges x 200 games of a fair coin
        assert abs(float(np.mean(ds.ybar)) - 0.5) < 0.005

    def test_log3_gap_wins_three_quarters(self):
        # one edge, 10^5 games at success probability psi(log 3) = 0.75
        prof = design_two_piece(math.log(3.0), n=2, k=1)
        g = sample_graph(2, 1.0, RngSeed(2))
        ds = sample_comparisons(g, prof, Ranking.identity(2), 100_000, RngSeed(2, 1))
        assert abs(ds.ybar_of(0, 1) - 0.75) < 0.005

    def test_single_game_fractions_are_zero_or_one(self):
        prof = design_two_piece(1.0, n=20, k=5)
        g = sample_graph(20, 0.5, RngSeed(3))
        ds = sample_comparisons(g, prof, Ranking.identity(20), 1, RngSeed(3, 1))
        assert set(np.unique(ds.ybar)) <= {0.0, 1.0}

    def test_determinism(self):
        prof = design_two_piece(1.0, n=20, k=5)
        g = sample_graph(20, 0.5, RngSeed(4))
        a = sample_comparisons(g, prof, Ranking.identity(20), 7, RngSeed(4, 1))
        b = sample_comparisons(g, prof, Ranking.identity(20), 7, RngSeed(4, 1))
        assert a == b

    def test_dimension_mismatch(self):
        prof = design_two_piece(1.0, n=10, k=2)
        g = sample_graph(20, 0.5, RngSeed(5))
        with pytest.raises(ValueError):
            sample_comparisons(g, prof, Ranking.identity(20), 5, RngSeed(5))

    def test_ybar_symmetry_convention(self):
        prof = design_two_piece(1.0, n=12, k=3)
        g = sample_graph(12, 0.8, RngSeed(6))
        ds = sample_comparisons(g, prof, Ranking.identity(12), 9, RngSeed(6, 1))
        for i, j in g.edges[:20]:
            assert ds.wins_of(i, j) + ds.wins_of(j, i) == ds.L
            assert ds.ybar_of(j, i) == pytest.approx(1.0 - ds.ybar_of(i, j), abs=1e-15)

    def test_stream_summaries_uncorrelated(self):
        # lag-1 autocorrelation of total wins across consecutive streams
        prof = design_two_piece(0.5, n=30, k=8)
        rank = Ranking.identity(30)
        totals = []
        for s in range(200):
            g = sample_graph(30, 0.5, RngSeed(99, 2 * s))
            ds = sample_comparisons(g, prof, rank, 10, RngSeed(99, 2 * s + 1))
            totals.append(int(ds.wins.sum()))
        x = np.asarray(totals, dtype=float)
        x = x - x.mean()
        r1 = float(np.dot(x[:-1], x[1:]) / np.dot(x, x))
        assert abs(r1) < 0.15


class TestDesigns:
    def test_four_piece_tau_shape(self):
        prof = design_four_piece_tau(1.0, 0.5)
        v = prof.values
        assert np.array_equal(np.unique(v)[::-1], [10.0, 9.0, 8.5, 0.0])
        assert [int(np.sum(v == x)) for x in (10.0, 9.0, 8.5, 0.0)] == [25, 25, 75, 75]
        assert v[49] - v[50] == 0.5
        assert validate_profile(prof) is None
        assert prof.k == 50 and prof.kappa == 10.0

    def test_four_piece_tau_degenerate_collapse(self):
        prof = design_four_piece_tau(0.0, 10.0)
        assert set(np.unique(prof.values)) == {10.0, 0.0}

    def test_four_piece_tau_infeasible(self):
        with pytest.raises(ValueError):
            design_four_piece_tau(6.0, 5.0)
        with pytest.raises(ValueError):
            design_four_piece_tau(-1.0, 0.5)

    @pytest.mark.parametrize("tau,delta", [(1.0, 0.1), (4.0, 3.0), (0.0, 0.0), (2.5, 7.5)])
    def test_four_piece_tau_validates(self, tau, delta):
        assert validate_profile(design_four_piece_tau(tau, delta)) is None

    def test_four_piece_rho_half(self):
        prof = design_four_piece_rho(0.5, 1.0)
        v = prof.values
        assert [int(np.sum(v == x)) for x in (10.0, 6.0, 5.0, 0.0)] == [25, 25, 75, 75]
        assert validate_profile(prof) is None

    def test_four_piece_rho_point_one_no_gap(self):
        prof = design_four_piece_rho(0.1, 0.0)
        assert prof.values[49] - prof.values[50] == 0.0
        # change points 45, 50, 65
        assert int(np.sum(prof.values == 10.0)) == 45
        assert int(np.sum(prof.values == 6.0)) == 20  # pieces 2 and 3 merge at delta=0
        assert int(np.sum(prof.values == 0.0)) == 135

    def test_four_piece_rho_sorted(self):
        for rho in (0.1, 0.5, 0.9):
            v = design_four_piece_rho(rho, 2.0).values
            assert np.all(v[:-1] >= v[1:])

    def test_four_piece_rho_rejects_fractional_sizes(self):
        with pytest.raises(ValueError):
            design_four_piece_rho(1 / 3, 1.0)

    def test_random_uniform_blocks(self):
        prof = design_random_uniform(2.0, RngSeed(11))
        assert prof.values[0] == 10.0 and prof.values[-1] == 0.0
        assert prof.values[49] >= 6.0
        assert prof.values[50] <= 4.0
        assert validate_profile(prof) is None

    def test_random_uniform_deterministic(self):
        a = design_random_uniform(1.0, RngSeed(12, 3))
        b = design_random_uniform(1.0, RngSeed(12, 3))
        assert a == b

    def test_random_uniform_infeasible(self):
        with pytest.raises(ValueError):
            design_random_uniform(6.0, RngSeed(0))

    def test_two_piece(self):
        prof = design_two_piece(0.3)
        assert int(np.sum(prof.values == 0.3)) == 50
        assert int(np.sum(prof.values == 0.0)) == 150
        assert prof.kappa == prof.delta == 0.3
        assert validate_profile(prof) is None

    def test_two_piece_zero(self):
        prof = design_two_piece(0.0)
        assert np.all(prof.values == 0.0)
        assert validate_profile(prof) is None


class TestGraphType:
    def test_canonicalizes_edges(self):
        g = ComparisonGraph(4, np.array([[2, 1], [0, 3]]), p=0.5)
        assert g.edges.tolist() == [[0, 3], [1, 2]]

    def test_rejects_duplicates_and_loops(self):
        with pytest.raises(ValueError):
            ComparisonGraph(4, np.array([[0, 1], [1, 0]]))
        with pytest.raises(ValueError):
            ComparisonGraph(4, np.array([[2, 2]]))

    def test_connectivity(self):
        g = ComparisonGraph(4, np.array([[0, 1], [2, 3]]))
        assert not g.is_connected()
        g2 = ComparisonGraph(4, np.array([[0, 1], [1, 2], [2, 3]]))
        assert g2.is_connected()

    def test_isolated_vertex_disconnects(self):
        g = ComparisonGraph(3, np.array([[0, 1]]))
        assert not g.is_connected()


class TestDatasetFile:
    def _dataset(self):
        prof = design_two_piece(1.0, n=15, k=4)
        g = sample_graph(15, 0.6, RngSeed(21, 0))
        return sample_comparisons(g, prof, Ranking.identity(15), 13, RngSeed(21, 1))

    def test_round_trip_equality(self, tmp_path):
        ds = self._dataset()
        path = tmp_path / "data.txt"
        write_dataset(ds, path)
        assert read_dataset(path) == ds

    def test_round_trip_bytes_stable(self, tmp_path):
        ds = self._dataset()
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        write_dataset(ds, p1)
        write_dataset(read_dataset(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_file_shape(self, tmp_path):
        ds = self._dataset()
        path = tmp_path / "data.txt"
        write_dataset(ds, path, comment="hello")
        lines = path.read_text().splitlines()
        assert lines[0] == "# hello"
        n, p, L, seed, stream = lines[1].split()
        assert (int(n), int(L)) == (15, 13)
        assert float(p) == 0.6
        assert (int(seed), int(stream)) == (21, 1)
        i, j, w = lines[2].split()
        assert int(i) >= 1 and int(j) >= 1  # 1-based endpoints
        assert 0 <= int(w) <= 13

    def test_reader_normalizes_reversed_edges(self, tmp_path):
        path = tmp_path / "rev.txt"
        path.write_text("3 nan 10 0 0\n2 1 7\n3 1 2\n")
        ds = read_dataset(path)
        assert ds.graph.p is None
        assert ds.wins_of(1, 0) == 7
        assert ds.wins_of(0, 1) == 3
        assert ds.wins_of(2, 0) == 2

    def test_reader_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("3 0.5 10 0 0\n1 1 5\n")
        with pytest.raises(ValueError):
            read_dataset(path)


class TestRngSeed:
    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            RngSeed(-1, 0)
        with pytest.raises(ValueError):
            RngSeed(0, 2**64)

    def test_stream_helper(self):
        assert RngSeed(5, 0).stream(9) == RngSeed(5, 9)
