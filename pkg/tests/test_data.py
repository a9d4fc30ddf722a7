import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from schirn.data import (
    Dataset,
    MatrixFormatError,
    NoiseSpec,
    describe,
    drop_empty_truth,
    inject_noise,
    kfold_split,
    load_dataset,
    load_matrix,
    save_matrix,
    standardize,
)


class TestLoadMatrix:
    def test_basic_binary(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_text("2 3\n1 0 1\n0 1 0\n")
        M = load_matrix(p, binary=True)
        assert M.shape == (2, 3)
        assert np.array_equal(M, [[1, 0, 1], [0, 1, 0]])

    def test_label_file_rejects_fraction(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_text("1 1\n0.5\n")
        with pytest.raises(MatrixFormatError) as exc:
            load_matrix(p, binary=True)
        assert exc.value.line_no == 2

    def test_row_count_mismatch(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_text("2 2\n1 0\n")
        with pytest.raises(MatrixFormatError, match="row count mismatch"):
            load_matrix(p, binary=True)

    def test_column_count_mismatch(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_text("1 3\n1 0\n")
        with pytest.raises(MatrixFormatError, match="expected 3 values"):
            load_matrix(p)

    def test_non_numeric_token(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_text("1 2\n1.0 abc\n")
        with pytest.raises(MatrixFormatError, match="non-numeric token 'abc'"):
            load_matrix(p)

    def test_rejects_nan_and_inf_tokens(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_text("1 2\nnan 1.0\n")
        with pytest.raises(MatrixFormatError, match="non-finite"):
            load_matrix(p)
        p.write_text("1 2\n1.0 inf\n")
        with pytest.raises(MatrixFormatError, match="non-finite"):
            load_matrix(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="file not found"):
            load_matrix(tmp_path / "absent.txt")

    def test_crlf_and_no_trailing_newline(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_bytes(b"2 2\r\n1.5 2.5\r\n-3.0 4e-2")
        M = load_matrix(p)
        assert np.allclose(M, [[1.5, 2.5], [-3.0, 0.04]])

    def test_scientific_notation(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_text("1 3\n1e3 -2.5E-4 0.125\n")
        assert np.allclose(load_matrix(p), [[1000.0, -0.00025, 0.125]])

    def test_malformed_header(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_text("two 3\n1 2 3\n")
        with pytest.raises(MatrixFormatError, match="header"):
            load_matrix(p)

    def test_empty_file(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_text("")
        with pytest.raises(MatrixFormatError, match="empty file"):
            load_matrix(p)

    def test_zero_dimension_header(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_text("0 5\n")
        with pytest.raises(MatrixFormatError, match="positive"):
            load_matrix(p)

    def test_trailing_blank_lines_tolerated(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_text("2 2\n1.0 2.0\n3.0 4.0\n\n\n")
        assert np.allclose(load_matrix(p), [[1.0, 2.0], [3.0, 4.0]])


class TestSaveLoadRoundTrip:
    def test_float_round_trip(self, tmp_path):
        rng = np.random.default_rng(5)
        A = rng.standard_normal((7, 4)) * 10.0 ** rng.integers(-8, 8, size=(7, 4))
        p = tmp_path / "m.txt"
        save_matrix(p, A)
        assert np.array_equal(load_matrix(p), A)

    def test_binary_round_trip(self, tmp_path):
        rng = np.random.default_rng(6)
        Y = (rng.random((5, 9)) < 0.4).astype(float)
        p = tmp_path / "y.txt"
        save_matrix(p, Y, binary=True)
        assert np.array_equal(load_matrix(p, binary=True), Y)

    @settings(max_examples=25, deadline=None)
    @given(A=hnp.arrays(np.float64, hnp.array_shapes(min_dims=2, max_dims=2, min_side=1, max_side=6),
                        elements=st.floats(-1e12, 1e12, allow_nan=False, allow_infinity=False)))
    def test_round_trip_property(self, A, tmp_path_factory):
        p = tmp_path_factory.mktemp("rt") / "m.txt"
        save_matrix(p, A)
        assert np.array_equal(load_matrix(p), A)


class TestDataset:
    def test_rejects_truth_outside_candidates(self):
        X = np.ones((2, 2))
        Y = np.array([[1.0, 0.0], [1.0, 1.0]])
        Y_true = np.array([[1.0, 1.0], [1.0, 0.0]])
        with pytest.raises(ValueError, match="Y_true"):
            Dataset(X=X, Y=Y, Y_true=Y_true)

    def test_rejects_non_binary_labels(self):
        with pytest.raises(ValueError, match="0/1"):
            Dataset(X=np.ones((1, 2)), Y=np.array([[0.5, 1.0]]))

    def test_rejects_row_mismatch(self):
        with pytest.raises(ValueError, match="rows"):
            Dataset(X=np.ones((3, 2)), Y=np.ones((2, 2)))

    def test_load_dataset_pair(self, tmp_path):
        save_matrix(tmp_path / "x.txt", np.arange(6.0).reshape(3, 2))
        save_matrix(tmp_path / "y.txt", np.array([[1.0, 0], [0, 1], [1, 1]]), binary=True)
        ds = load_dataset(tmp_path / "x.txt", tmp_path / "y.txt")
        assert ds.n == 3 and ds.d == 2 and ds.l == 2
        assert ds.Y_true is None

    def test_load_dataset_standardizes_after_filtering(self, tmp_path):
        X = np.array([[1.0, 5.0], [3.0, 5.0], [100.0, 100.0]])
        Y = np.array([[1.0, 0], [0, 1], [1, 1]])
        T = np.array([[1.0, 0], [0, 1], [0, 0]])
        save_matrix(tmp_path / "x.txt", X)
        save_matrix(tmp_path / "y.txt", Y, binary=True)
        save_matrix(tmp_path / "t.txt", T, binary=True)
        ds = load_dataset(tmp_path / "x.txt", tmp_path / "y.txt", tmp_path / "t.txt",
                          standardize_features=True, filter_empty_truth=True)
        # the third sample drops first, so its outlier never enters the stats
        assert ds.n == 2
        assert np.allclose(ds.X, [[-1.0, 0.0], [1.0, 0.0]])

    def test_names_length_validated(self):
        with pytest.raises(ValueError, match="names"):
            Dataset(X=np.ones((1, 2)), Y=np.ones((1, 3)), names=["a", "b"])
        ds = Dataset(X=np.ones((1, 2)), Y=np.ones((1, 3)), names=["a", "b", "c"])
        assert ds.names == ["a", "b", "c"]

    def test_drop_empty_truth(self):
        ds = Dataset(
            X=np.arange(8.0).reshape(4, 2),
            Y=np.array([[1.0, 1], [1, 0], [0, 1], [1, 1]]),
            Y_true=np.array([[1.0, 0], [0, 0], [0, 1], [0, 0]]),
        )
        kept = drop_empty_truth(ds)
        assert kept.n == 2
        assert np.array_equal(kept.X, ds.X[[0, 2]])

    def test_drop_empty_truth_requires_truth(self):
        ds = Dataset(X=np.ones((2, 1)), Y=np.ones((2, 2)))
        with pytest.raises(ValueError):
            drop_empty_truth(ds)

    def test_drop_empty_truth_rejects_all_empty(self):
        ds = Dataset(X=np.ones((2, 1)), Y=np.ones((2, 2)), Y_true=np.zeros((2, 2)))
        with pytest.raises(ValueError, match="nothing left"):
            drop_empty_truth(ds)

    def test_rejects_truth_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            Dataset(X=np.ones((2, 1)), Y=np.ones((2, 2)), Y_true=np.ones((2, 3)))


class TestInjectNoise:
    def test_saturated_row_unchanged(self):
        truth = np.array([[1.0, 1.0, 1.0]])
        out = inject_noise(truth, NoiseSpec(r=2, seed=0))
        assert np.array_equal(out, truth)

    def test_all_negatives_consumed(self):
        truth = np.array([[1.0, 0.0, 0.0, 0.0]])
        out = inject_noise(truth, NoiseSpec(r=4, seed=0))
        assert np.array_equal(out, np.ones((1, 4)))

    def test_exactly_one_per_row_and_deterministic(self):
        rng = np.random.default_rng(9)
        truth = (rng.random((3, 4)) < 0.4).astype(float)
        a = inject_noise(truth, NoiseSpec(r=1, seed=123))
        b = inject_noise(truth, NoiseSpec(r=1, seed=123))
        assert np.array_equal(a, b)
        added = a - truth
        expected = np.minimum(1, 4 - truth.sum(axis=1))
        assert np.array_equal(added.sum(axis=1), expected)

    def test_different_seeds_differ(self):
        truth = np.zeros((20, 10))
        a = inject_noise(truth, NoiseSpec(r=2, seed=1))
        b = inject_noise(truth, NoiseSpec(r=2, seed=2))
        assert not np.array_equal(a, b)

    def test_rejects_negative_r(self):
        with pytest.raises(ValueError):
            NoiseSpec(r=-1, seed=0)

    @settings(max_examples=40, deadline=None)
    @given(
        hnp.arrays(np.float64, hnp.array_shapes(min_dims=2, max_dims=2, min_side=1, max_side=8),
                   elements=st.sampled_from([0.0, 1.0])),
        st.integers(0, 10),
        st.integers(0, 2**32 - 1),
    )
    def test_invariants(self, truth, r, seed):
        out = inject_noise(truth, NoiseSpec(r=r, seed=seed))
        added = out - truth
        assert np.all(truth <= out)
        assert set(np.unique(added)) <= {0.0, 1.0}
        zeros_per_row = truth.shape[1] - truth.sum(axis=1)
        assert np.array_equal(added.sum(axis=1), np.minimum(r, zeros_per_row))


class TestKfold:
    def test_even_folds(self):
        split = kfold_split(10, 5, seed=0)
        sizes = np.bincount(split.assignments, minlength=5)
        assert np.array_equal(sizes, [2, 2, 2, 2, 2])

    def test_uneven_folds(self):
        split = kfold_split(11, 5, seed=0)
        sizes = sorted(np.bincount(split.assignments, minlength=5))
        assert sizes == [2, 2, 2, 2, 3]

    def test_deterministic(self):
        a = kfold_split(10, 5, seed=42)
        b = kfold_split(10, 5, seed=42)
        assert np.array_equal(a.assignments, b.assignments)

    def test_partition(self):
        split = kfold_split(23, 4, seed=3)
        seen = np.concatenate([split.test_indices(f) for f in range(4)])
        assert sorted(seen) == list(range(23))
        for f in range(4):
            train = set(split.train_indices(f))
            test = set(split.test_indices(f))
            assert not train & test
            assert train | test == set(range(23))

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            kfold_split(4, 5, seed=0)
        with pytest.raises(ValueError):
            kfold_split(10, 1, seed=0)


class TestDescribe:
    def test_avg_candidates(self):
        ds = Dataset(X=np.ones((2, 1)), Y=np.array([[1.0, 1], [1, 0]]))
        out = describe(ds)
        assert out["avg_candidate_labels"] == pytest.approx(1.5)
        assert "avg_true_labels" not in out

    def test_with_truth(self):
        ds = Dataset(
            X=np.ones((2, 1)),
            Y=np.array([[1.0, 1], [1, 0]]),
            Y_true=np.array([[1.0, 0], [1, 0]]),
        )
        out = describe(ds)
        assert out["n"] == 2 and out["d"] == 1 and out["l"] == 2
        assert out["avg_true_labels"] == pytest.approx(1.0)


class TestStandardize:
    def test_two_point_column(self):
        out = standardize(np.array([[1.0], [3.0]]))
        assert np.allclose(out, [[-1.0], [1.0]])

    def test_constant_column(self):
        out = standardize(np.array([[5.0], [5.0]]))
        assert np.array_equal(out, [[0.0], [0.0]])

    def test_random_columns_centered_and_scaled(self):
        rng = np.random.default_rng(17)
        X = rng.standard_normal((50, 6)) * 7 + 3
        out = standardize(X)
        assert np.all(np.abs(out.mean(axis=0)) <= 1e-12)
        assert np.allclose(out.std(axis=0), 1.0)
