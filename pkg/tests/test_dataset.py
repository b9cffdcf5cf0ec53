"""Tests for loading data and building design matrices."""

import numpy as np
import pandas as pd
import pytest

from ramplab.dataset import (
    INTERCEPT,
    ColumnKind,
    Dataset,
    DesignSpec,
    build_design,
    counterfactual,
    design_from_arrays,
    load_csv,
    load_frame,
    validate,
)
from ramplab.exceptions import (
    DataError,
    EmptyAfterCompleteCase,
    MalformedValue,
    MissingColumn,
    NonBinaryOutcome,
    NotBinary,
    RankDeficient,
    UnknownColumn,
)


def write_csv(tmp_path, text):
    path = tmp_path / "data.csv"
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCsv:
    """CSV ingestion and the complete-case rule."""

    def test_three_rows(self, tmp_path):
        path = write_csv(tmp_path, "y,x\n0,1.5\n1,2.5\n0,-0.5\n")
        data = load_csv(path, "y", ["x"])

        assert data.n_obs == 3
        assert data.n_dropped == 0
        assert list(data.y) == [0.0, 1.0, 0.0]
        assert list(data.columns["x"]) == [1.5, 2.5, -0.5]

    def test_incomplete_rows_are_dropped(self, tmp_path):
        path = write_csv(tmp_path, "y,x,z\n0,1,\n1,2,3\n0,,4\n1,5,6\n")
        data = load_csv(path, "y", ["x", "z"])

        assert data.n_obs == 2
        assert data.n_dropped == 2
        assert list(data.columns["z"]) == [3.0, 6.0]

    def test_unused_columns_do_not_drop_rows(self, tmp_path):
        path = write_csv(tmp_path, "y,x,unused\n0,1,\n1,2,\n0,3,\n")
        assert load_csv(path, "y", ["x"]).n_obs == 3

    def test_non_binary_outcome(self, tmp_path):
        path = write_csv(tmp_path, "y,x\n0,1\n2,2\n1,3\n")
        with pytest.raises(NonBinaryOutcome):
            load_csv(path, "y", ["x"])

    def test_missing_column(self, tmp_path):
        path = write_csv(tmp_path, "y,x\n0,1\n1,2\n")
        with pytest.raises(MissingColumn):
            load_csv(path, "y", ["x", "w"])

    def test_malformed_value(self, tmp_path):
        path = write_csv(tmp_path, "y,x\n0,1\n1,abc\n")
        with pytest.raises(MalformedValue):
            load_csv(path, "y", ["x"])

    def test_nothing_complete(self, tmp_path):
        path = write_csv(tmp_path, "y,x\n0,\n1,\n")
        with pytest.raises(EmptyAfterCompleteCase):
            load_csv(path, "y", ["x"])

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            load_csv(tmp_path / "nope.csv", "y", ["x"])

    def test_frame_and_csv_agree(self, tmp_path):
        path = write_csv(tmp_path, "y,x\n0,1.5\n1,\n0,-0.5\n1,3\n")
        frame = pd.DataFrame({"y": [0, 1, 0, 1], "x": [1.5, None, -0.5, 3.0]})

        from_csv = load_csv(path, "y", ["x"])
        from_frame = load_frame(frame, "y", ["x"])

        np.testing.assert_array_equal(from_csv.y, from_frame.y)
        np.testing.assert_array_equal(from_csv.columns["x"], from_frame.columns["x"])


class TestDataset:
    def test_arrays_are_read_only(self):
        data = Dataset(y=[0, 1, 1], columns={"x": [1.0, 2.0, 3.0]})
        with pytest.raises(ValueError):
            data.y[0] = 1.0

    def test_take_resamples_rows(self):
        data = Dataset(y=[0, 1, 1], columns={"x": [1.0, 2.0, 3.0]})
        sample = data.take(np.array([2, 2, 0]))

        assert list(sample.y) == [1.0, 1.0, 0.0]
        assert list(sample.columns["x"]) == [3.0, 3.0, 1.0]


class TestBuildDesign:
    """Column order, interactions and the rank check."""

    def data(self, n=50, seed=0):
        rng = np.random.default_rng(seed)
        return Dataset(
            y=(rng.random(n) < 0.5).astype(float),
            columns={
                "a": rng.normal(size=n),
                "b": rng.normal(size=n),
                "w": (rng.random(n) < 0.5).astype(float),
            },
        )

    def test_plain_regressors(self):
        design = build_design(self.data(), DesignSpec(regressors=("a", "w")))

        assert design.names == (INTERCEPT, "a", "w")
        assert design.kinds == (ColumnKind.INTERCEPT, ColumnKind.CONTINUOUS, ColumnKind.BINARY)
        assert np.all(design.X[:, 0] == 1.0)

    def test_explicit_interaction(self):
        data = self.data()
        design = build_design(data, DesignSpec(regressors=("a", "w"), interactions=(("a", "w"),)))

        assert design.names == (INTERCEPT, "a", "w", "a:w")
        np.testing.assert_array_equal(design.X[:, 3], data.columns["a"] * data.columns["w"])
        assert design.interactions_of("a") == [3]
        assert design.interactions_of("b") == []

    def test_full_interactions_order(self):
        design = build_design(
            self.data(), DesignSpec(regressors=("a", "b", "w"), full_interactions_with="w")
        )
        assert design.names == (INTERCEPT, "a", "b", "w", "w:a", "w:b")

    def test_full_interactions_need_binary(self):
        with pytest.raises(NotBinary):
            build_design(self.data(), DesignSpec(regressors=("a", "b"), full_interactions_with="a"))

    def test_unknown_column(self):
        with pytest.raises(UnknownColumn):
            build_design(self.data(), DesignSpec(regressors=("a", "nope")))

    def test_interaction_parent_must_be_regressor(self):
        with pytest.raises(UnknownColumn):
            build_design(self.data(), DesignSpec(regressors=("a",), interactions=(("a", "w"),)))

    def test_duplicate_column_is_rank_deficient(self):
        data = self.data()
        data = Dataset(y=data.y, columns={**data.columns, "a2": 2.0 * data.columns["a"]})

        with pytest.raises(RankDeficient) as info:
            build_design(data, DesignSpec(regressors=("a", "a2")))
        assert info.value.column == "a2"

    def test_mutually_exclusive_dummies_with_intercept(self):
        n = 40
        d1 = np.tile([1.0, 0.0], n // 2)
        y = np.tile([1.0, 0.0, 0.0, 1.0], n // 4)
        with pytest.raises(RankDeficient):
            design_from_arrays(y, {"d1": d1, "d0": 1.0 - d1})


class TestCounterfactual:
    def test_interactions_recomputed(self):
        x = np.array([0.5, 1.5, 2.5, 3.5, 4.5, 5.5])
        w = np.array([0.0, 1.0, 0.0, 1.0, 1.0, 0.0])
        y = np.array([0.0, 1.0, 1.0, 0.0, 1.0, 0.0])
        design = design_from_arrays(y, {"x": x, "w": w}, [("x", "w")])

        X1 = counterfactual(design, "w", 1.0)
        X0 = counterfactual(design, "w", 0.0)

        np.testing.assert_array_equal(X1[:, 2], 1.0)
        np.testing.assert_array_equal(X1[:, 3], x)
        np.testing.assert_array_equal(X0[:, 3], 0.0)
        np.testing.assert_array_equal(design.X[:, 2], w)

    def test_continuous_variable_rejected(self, sym_design):
        with pytest.raises(NotBinary):
            counterfactual(sym_design, "x1", 1.0)


class TestValidate:
    def test_outcome_summary_comes_first(self, sym_design):
        diagnostics = validate(sym_design, outcome="y")

        first = diagnostics.summaries[0]
        assert first.name == "y"
        assert first.mean == pytest.approx(np.mean(sym_design.y))
        assert first.sd == pytest.approx(np.std(sym_design.y, ddof=1))
        assert diagnostics.full_rank
        assert diagnostics.rank == 3

    def test_binary_moments(self):
        # p = 0.25: skew = (1 - 2p)/sqrt(p(1 - p)), kurtosis = 1/(p(1 - p)) - 3
        y = np.array([1.0, 0.0, 0.0, 0.0] * 25)
        x = np.linspace(-1.0, 1.0, 100)
        design = design_from_arrays(y, {"x": x})

        row = validate(design).summary("y")
        p = 0.25
        assert row.skewness == pytest.approx((1 - 2 * p) / np.sqrt(p * (1 - p)))
        assert row.kurtosis == pytest.approx(1 / (p * (1 - p)) - 3)

    def test_constant_column_has_no_higher_moments(self, sym_design):
        row = validate(sym_design).summary(INTERCEPT)
        assert row.sd == 0.0
        assert row.skewness is None
        assert row.jarque_bera is None
