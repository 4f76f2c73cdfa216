import itertools

import pytest
from hypothesis import given, settings, strategies as st

from zslreq.agreement import (
    AnnotationTable,
    BAND_ORDER,
    DegenerateTable,
    IncompleteTable,
    OutOfRange,
    Tie,
    UnresolvedMaybe,
    WrongAnnotatorCount,
    breakdown,
    fleiss_kappa,
    interpret_kappa,
    krippendorff_alpha,
    load_tags,
    majority_vote,
    pooled,
)

MIXED = {"i1": ("y", "y", "n"), "i2": ("n", "n", "n")}


def permuted(table, order):
    """Same table with annotator columns reordered."""
    rows = {item: tuple(table.row(item)[i] for i in order) for item in table.items}
    return AnnotationTable.from_rows(rows)


class TestAnnotationTable:
    def test_requires_completeness(self):
        with pytest.raises(IncompleteTable):
            AnnotationTable(
                items=("i1",), annotators=("a1", "a2"), tags={("i1", "a1"): "y"}
            )

    def test_requires_two_annotators(self):
        with pytest.raises(WrongAnnotatorCount):
            AnnotationTable.from_rows({"i1": ("y",)})


class TestBreakdown:
    def test_three_kinds_of_item(self):
        table = AnnotationTable.from_rows(
            {"i1": ("yes", "yes", "yes"), "i2": ("yes", "yes", "no"),
             "i3": ("yes", "no", "maybe")}
        )
        result = breakdown(table)
        assert result.perfect == pytest.approx(1 / 3)
        assert result.partial == pytest.approx(1 / 3)
        assert result.disagreement == pytest.approx(1 / 3)

    def test_unanimous(self):
        table = AnnotationTable.from_rows({"i1": ("no", "no", "no")})
        assert breakdown(table).perfect == 1.0

    def test_needs_exactly_three(self):
        with pytest.raises(WrongAnnotatorCount):
            breakdown(AnnotationTable.from_rows({"i1": ("yes", "no")}))

    @given(
        st.dictionaries(
            st.integers(0, 30),
            st.tuples(*[st.sampled_from(["yes", "no", "maybe"])] * 3),
            min_size=1,
            max_size=30,
        )
    )
    @settings(max_examples=60)
    def test_proportions_sum_to_one(self, rows):
        table = AnnotationTable.from_rows({f"i{k}": v for k, v in rows.items()})
        result = breakdown(table)
        assert result.perfect + result.partial + result.disagreement == pytest.approx(
            1.0, abs=1e-9
        )


class TestMajorityVote:
    def test_yes_wins(self):
        assert majority_vote(("yes", "yes", "no")) == "yes"

    def test_no_wins(self):
        assert majority_vote(("no", "yes", "no")) == "no"

    def test_tie(self):
        with pytest.raises(Tie):
            majority_vote(("yes", "no"))

    def test_unresolved_maybe(self):
        with pytest.raises(UnresolvedMaybe):
            majority_vote(("yes", "maybe", "no"))


class TestFleissKappa:
    def test_unanimous_multi_category(self):
        table = AnnotationTable.from_rows(
            {"i1": ("y", "y", "y"), "i2": ("n", "n", "n"), "i3": ("y", "y", "y")}
        )
        assert fleiss_kappa(table) == 1.0

    def test_mixed_fixture_equals_quarter(self):
        # hand-evaluated: P_bar = 2/3, Pe_bar = 5/9, kappa = 1/4
        assert fleiss_kappa(AnnotationTable.from_rows(MIXED)) == pytest.approx(
            0.25, abs=1e-9
        )

    def test_single_category_convention(self):
        table = AnnotationTable.from_rows({"i1": ("n", "n"), "i2": ("n", "n")})
        assert fleiss_kappa(table) == 1.0

    def test_degenerate_single_item_single_category(self):
        with pytest.raises(DegenerateTable):
            fleiss_kappa(AnnotationTable.from_rows({"i1": ("y", "y", "y")}))

    def test_column_permutations_leave_kappa_unchanged(self):
        table = AnnotationTable.from_rows(
            {"i1": ("y", "n", "m"), "i2": ("y", "y", "n"), "i3": ("m", "m", "m")}
        )
        base = fleiss_kappa(table)
        for order in itertools.permutations(range(3)):
            assert fleiss_kappa(permuted(table, order)) == pytest.approx(base, abs=1e-12)


class TestKrippendorffAlpha:
    def test_unanimous_multi_category(self):
        table = AnnotationTable.from_rows({"i1": ("y", "y", "y"), "i2": ("n", "n", "n")})
        assert krippendorff_alpha(table) == 1.0

    def test_mixed_fixture_matches_coincidence_oracle(self):
        # hand-evaluated coincidence matrix: Do = 2, De = 16/5, alpha = 3/8
        assert krippendorff_alpha(AnnotationTable.from_rows(MIXED)) == pytest.approx(
            0.375, abs=1e-9
        )

    def test_single_category_degenerate(self):
        table = AnnotationTable.from_rows({"i1": ("n", "n"), "i2": ("n", "n")})
        with pytest.raises(DegenerateTable):
            krippendorff_alpha(table)

    def test_column_permutations_leave_alpha_unchanged(self):
        table = AnnotationTable.from_rows(
            {"i1": ("y", "n", "m"), "i2": ("y", "y", "n"), "i3": ("n", "m", "m")}
        )
        base = krippendorff_alpha(table)
        for order in itertools.permutations(range(3)):
            assert krippendorff_alpha(permuted(table, order)) == pytest.approx(
                base, abs=1e-12
            )


class TestInterpretKappa:
    @pytest.mark.parametrize(
        "value,band",
        [
            (0.41, "moderate"),
            (0.45, "moderate"),
            (1.0, "almost perfect"),
            (0.0, "slight"),
            (0.20, "slight"),
            (0.21, "fair"),
            (0.40, "fair"),
            (0.60, "moderate"),
            (0.61, "substantial"),
            (0.80, "substantial"),
            (0.81, "almost perfect"),
            (-0.2, "poor"),
        ],
    )
    def test_bands(self, value, band):
        assert interpret_kappa(value) == band

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            interpret_kappa(1.5)

    @given(st.floats(-1, 1), st.floats(-1, 1))
    def test_monotone(self, v1, v2):
        low, high = sorted((v1, v2))
        assert BAND_ORDER.index(interpret_kappa(low)) <= BAND_ORDER.index(
            interpret_kappa(high)
        )


class TestLoadTags:
    def test_grouped_file(self, fixtures_dir):
        tables = load_tags(fixtures_dir / "tags_grouped.csv")
        assert set(tables) == {"security", "usability"}
        assert tables["security"].items == ("t1", "t2", "t3")
        assert tables["security"].row("t1") == ("yes", "yes", "no")

    def test_pooled_micro_table(self, fixtures_dir):
        tables = load_tags(fixtures_dir / "tags_grouped.csv")
        merged = pooled(tables)
        assert len(merged.items) == 6
        assert all("/" in item for item in merged.items)
        assert -1.0 <= krippendorff_alpha(merged) <= 1.0

    def test_incomplete_file_rejected(self, tmp_path):
        path = tmp_path / "tags.csv"
        path.write_text(
            "item,annotator,tag\ni1,a1,yes\ni1,a2,yes\ni2,a1,no\n", encoding="utf-8"
        )
        with pytest.raises(IncompleteTable):
            load_tags(path)

    def test_ungrouped_header(self, tmp_path):
        path = tmp_path / "tags.csv"
        path.write_text(
            "item,annotator,tag\ni1,a1,yes\ni1,a2,no\n", encoding="utf-8"
        )
        tables = load_tags(path)
        assert list(tables) == [""]
