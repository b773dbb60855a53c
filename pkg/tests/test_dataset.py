import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import make_pattern
from margitron import (
    DatasetError,
    SparsePattern,
    build_training_set,
    format_svmlight,
    max_directional_margin,
    parse_prediction_data,
    parse_svmlight,
)


class TestParse:
    def test_basic_one_based(self):
        (p,) = parse_svmlight("+1 1:0.5 3:1.0")
        assert p.label == 1
        assert p.features == [(0, 0.5), (2, 1.0)]
        assert p.base_norm_sq == 1.25

    def test_comment_stripped(self):
        (p,) = parse_svmlight("-1 2:2.0 # note")
        assert p.label == -1
        assert p.features == [(1, 2.0)]
        assert p.base_norm_sq == 4.0

    def test_non_increasing_index_rejected(self):
        with pytest.raises(DatasetError, match="strictly increasing"):
            parse_svmlight("+1 3:1 2:1")

    def test_duplicate_index_rejected(self):
        with pytest.raises(DatasetError, match="strictly increasing"):
            parse_svmlight("+1 2:1 2:1")

    def test_label_zero_rejected(self):
        with pytest.raises(DatasetError, match="label 0"):
            parse_svmlight("0 1:1")

    def test_label_signs(self):
        pats = parse_svmlight("2.5 1:1\n-0.1 1:1\n+1 1:1\n-3 1:1")
        assert [p.label for p in pats] == [1, -1, 1, -1]

    def test_bad_label_reports_line(self):
        with pytest.raises(DatasetError, match="line 2"):
            parse_svmlight("+1 1:1\nfoo 1:1")

    def test_bad_feature_token(self):
        with pytest.raises(DatasetError, match="malformed feature token"):
            parse_svmlight("+1 1:1 junk")
        with pytest.raises(DatasetError, match="malformed feature token"):
            parse_svmlight("+1 x:1")

    def test_label_only_line_rejected(self):
        with pytest.raises(DatasetError, match="expected"):
            parse_svmlight("+1")

    def test_empty_input_rejected(self):
        with pytest.raises(DatasetError, match="empty input"):
            parse_svmlight("")
        with pytest.raises(DatasetError, match="empty input"):
            parse_svmlight("# only a comment\n\n")

    def test_zero_based_flag(self):
        (p,) = parse_svmlight("+1 0:0.5 2:1.0", zero_based=True)
        assert p.features == [(0, 0.5), (2, 1.0)]

    def test_one_based_index_zero_rejected(self):
        with pytest.raises(DatasetError, match="one-based"):
            parse_svmlight("+1 0:0.5")

    def test_zero_based_negative_rejected(self):
        with pytest.raises(DatasetError, match="negative"):
            parse_svmlight("+1 -1:0.5", zero_based=True)

    def test_crlf_and_bytes(self):
        pats = parse_svmlight(b"+1 1:1\r\n-1 2:1\r\n")
        assert len(pats) == 2
        assert pats[1].features == [(1, 1.0)]

    def test_sequential_ids(self):
        pats = parse_svmlight("+1 1:1\n# gap\n-1 1:2")
        assert [p.id for p in pats] == [0, 1]

    def test_non_finite_value_rejected(self):
        with pytest.raises(DatasetError, match="non-finite"):
            parse_svmlight("+1 1:nan")


class TestPredictionData:
    def test_question_mark_label(self):
        rows = parse_prediction_data("? 1:1\n+1 2:3")
        assert rows[0][0] is None
        assert rows[1][0] == 1
        assert rows[1][1].tolist() == [1]

    def test_empty_is_fine(self):
        assert parse_prediction_data("") == []


class TestRoundTrip:
    @given(
        st.lists(
            st.tuples(
                st.sampled_from([1, -1]),
                st.lists(
                    st.tuples(
                        st.integers(min_value=0, max_value=500),
                        st.floats(
                            min_value=-1e12,
                            max_value=1e12,
                            allow_nan=False,
                            allow_infinity=False,
                        ),
                    ),
                    min_size=1,
                    max_size=12,
                    unique_by=lambda pair: pair[0],
                ),
            ),
            min_size=1,
            max_size=8,
        )
    )
    @settings(max_examples=60, deadline=None)
    def test_parse_format_parse(self, rows):
        pats = [
            make_pattern(i, label, sorted(pairs)) for i, (label, pairs) in enumerate(rows)
        ]
        text = format_svmlight(pats)
        reparsed = parse_svmlight(text)
        assert len(reparsed) == len(pats)
        for a, b in zip(pats, reparsed):
            assert a.label == b.label
            assert np.array_equal(a.indices, b.indices)
            assert np.array_equal(a.values, b.values)
            assert a.base_norm_sq == b.base_norm_sq

    def test_zero_based_round_trip(self):
        pats = parse_svmlight("+1 0:0.25 7:-3.5", zero_based=True)
        text = format_svmlight(pats, zero_based=True)
        assert text == "+1 0:0.25 7:-3.5\n"


class TestPattern:
    def test_bad_label(self):
        with pytest.raises(DatasetError, match="label"):
            SparsePattern.create(0, 2, [0], [1.0])

    def test_cached_norm_checked(self):
        with pytest.raises(DatasetError, match="squared norm"):
            SparsePattern(
                0, 1, np.array([0], dtype=np.int64), np.array([2.0]), base_norm_sq=1.0
            )

    def test_arrays_read_only(self):
        p = SparsePattern.create(0, 1, [0, 3], [1.0, 2.0])
        with pytest.raises(ValueError):
            p.values[0] = 5.0


class TestBuild:
    def test_radius_single(self, single_pattern_set, sqrt2):
        assert single_pattern_set.radius == sqrt2
        assert single_pattern_set.base_dim == 1
        assert single_pattern_set.n == 1

    def test_radius_two_patterns_with_extension(self):
        pats = [
            make_pattern(0, 1, [(0, 1.0)]),
            make_pattern(1, -1, [(0, 3.0)]),
        ]
        ts = build_training_set(pats, rho=1.0, delta=2.0)
        assert ts.radius == pytest.approx(math.sqrt(14.0), rel=1e-15)

    def test_rho_zero_rejected(self):
        with pytest.raises(DatasetError, match="rho"):
            build_training_set([make_pattern(0, 1, [(0, 1.0)])], rho=0.0, delta=0.0)

    def test_negative_delta_rejected(self):
        with pytest.raises(DatasetError, match="delta"):
            build_training_set([make_pattern(0, 1, [(0, 1.0)])], rho=1.0, delta=-1.0)

    def test_empty_rejected(self):
        with pytest.raises(DatasetError, match="at least one"):
            build_training_set([], rho=1.0, delta=0.0)

    def test_non_sequential_ids_rejected(self):
        with pytest.raises(DatasetError, match="sequential"):
            build_training_set([make_pattern(3, 1, [(0, 1.0)])], rho=1.0, delta=0.0)

    def test_base_dim_covers_largest_index(self):
        pats = [make_pattern(0, 1, [(4, 1.0)]), make_pattern(1, -1, [(9, 2.0)])]
        ts = build_training_set(pats, rho=0.5, delta=0.0)
        assert ts.base_dim == 10

    def test_radius_identity_random(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            n = int(rng.integers(1, 9))
            pats = []
            for i in range(n):
                k = int(rng.integers(1, 5))
                idx = sorted(rng.choice(30, size=k, replace=False).tolist())
                vals = rng.uniform(-3, 3, size=k).tolist()
                pats.append(make_pattern(i, 1 if rng.random() < 0.5 else -1, list(zip(idx, vals))))
            rho = float(rng.uniform(0.1, 3.0))
            delta = float(rng.choice([0.0, 0.5, 2.0]))
            ts = build_training_set(pats, rho, delta)
            max_base = max(p.base_norm_sq for p in pats)
            lhs = ts.radius**2 - max_base
            rhs = rho * rho + delta * delta
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    def test_pattern_norm_sq(self):
        pats = [make_pattern(0, -1, [(0, 2.0)])]
        ts = build_training_set(pats, rho=1.5, delta=0.5)
        assert ts.pattern_norm_sq(0) == pytest.approx(4.0 + 2.25 + 0.25, rel=1e-15)


class TestExtensionMarginFloor:
    @pytest.mark.parametrize("n,delta", [(2, 0.5), (3, 1.0), (4, 2.0)])
    def test_extended_margin_at_least_delta_over_sqrt_n(self, n, delta):
        # deliberately clashing labels on overlapping points: inseparable
        # without the extension, separable with it
        rng = np.random.default_rng(100 + n)
        pats = []
        for i in range(n):
            x = float(rng.uniform(-1, 1))
            pats.append(make_pattern(i, 1 if i % 2 == 0 else -1, [(0, x)]))
        ts = build_training_set(pats, rho=1.0, delta=delta)
        gamma = max_directional_margin(ts)
        assert gamma is not None, "extended data must be separable"
        floor = delta / math.sqrt(n)
        assert gamma >= floor * (1.0 - 1e-9)
