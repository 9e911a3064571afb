import pytest

from glyphforge.constraints import (
    ConstraintSet,
    check_constraint,
    cluster_1d,
    parse_constraint,
    render_constraint,
    violation_ratio,
)
from glyphforge.core import NormBox
from glyphforge.errors import EmptyLayoutError, EmptySampleSetError, UnrecognizedConstraintError


def row(y, xs, h=0.1, w=0.08):
    return [NormBox(x, y - h / 2, x + w, y + h / 2) for x in xs]


class TestParse:
    @pytest.mark.parametrize(
        "text,field,value",
        [
            ("horizontal line", "arrangement", "horizontal_line"),
            ("vertical line", "arrangement", "vertical_line"),
            ("rows 3", "rows", 3),
            ("columns 2", "cols", 2),
            ("diagonal down", "arrangement", "diagonal_down"),
            ("diagonal up", "arrangement", "diagonal_up"),
            ("align left", "alignment", "left"),
            ("align bottom", "alignment", "bottom"),
            ("uniform size", "uniform_size", True),
        ],
    )
    def test_single_clauses(self, text, field, value):
        cs = parse_constraint(text)
        assert getattr(cs, field) == value

    def test_grid(self):
        cs = parse_constraint("grid 2x3")
        assert cs.arrangement == "grid"
        assert (cs.rows, cs.cols) == (2, 3)
        # spacing around the x is tolerated
        assert parse_constraint("grid 2 x 3") == cs

    def test_emphasis(self):
        cs = parse_constraint("glyph 0 largest")
        assert (cs.emphasis_index, cs.emphasis_role) == (0, "largest")

    def test_multi_clause_and_case(self):
        cs = parse_constraint("Horizontal Line; ALIGN TOP; uniform size")
        assert cs.arrangement == "horizontal_line"
        assert cs.alignment == "top"
        assert cs.uniform_size

    def test_later_clause_overrides(self):
        cs = parse_constraint("rows 2; rows 4")
        assert cs.rows == 4
        cs = parse_constraint("horizontal line; vertical line")
        assert cs.arrangement == "vertical_line"

    @pytest.mark.parametrize(
        "text",
        ["sideways line", "rows", "rows -1", "grid 2", "align diagonal",
         "glyph largest", "glyph 1 biggest", "", ";;", "horizontal line; nope"],
    )
    def test_rejects_unknown(self, text):
        with pytest.raises(UnrecognizedConstraintError):
            parse_constraint(text)


def test_render_round_trips_every_production():
    texts = [
        "horizontal line",
        "vertical line",
        "rows 3",
        "columns 4",
        "grid 2x3",
        "diagonal down",
        "diagonal up",
        "align center",
        "glyph 2 smallest",
        "uniform size",
        "vertical line; align left; glyph 0 largest; uniform size",
    ]
    for text in texts:
        cs = parse_constraint(text)
        assert parse_constraint(render_constraint(cs)) == cs


def test_render_rejects_empty():
    with pytest.raises(ValueError):
        render_constraint(ConstraintSet())


def test_cluster_1d():
    assert cluster_1d([0.1, 0.12, 0.5, 0.52], 0.05) == [[0, 1], [2, 3]]
    assert cluster_1d([0.5, 0.1], 0.05) == [[1], [0]]
    assert cluster_1d([0.3], 0.05) == [[0]]
    # everything within gap lands in one cluster
    assert cluster_1d([0.1, 0.14, 0.18], 0.05) == [[0, 1, 2]]


class TestCheck:
    def test_empty_set_always_satisfied(self):
        ok = check_constraint(row(0.5, [0.1, 0.4, 0.7]), ConstraintSet())
        assert ok.satisfied and ok.violations == ()

    def test_empty_layout_raises(self):
        with pytest.raises(EmptyLayoutError):
            check_constraint((), ConstraintSet())

    def test_horizontal_line(self):
        cs = parse_constraint("horizontal line")
        assert check_constraint(row(0.5, [0.1, 0.4, 0.7]), cs).satisfied
        # out of reading order on x
        bad = row(0.5, [0.4, 0.1, 0.7])
        assert check_constraint(bad, cs).violations == ("horizontal_line",)
        # second glyph drifts off the band
        drift = row(0.5, [0.1, 0.4, 0.7])
        drift[1] = NormBox(0.4, 0.6, 0.48, 0.7)
        assert not check_constraint(drift, cs).satisfied

    def test_vertical_line(self):
        cs = parse_constraint("vertical line")
        boxes = [NormBox(0.45, y, 0.55, y + 0.1) for y in (0.1, 0.4, 0.7)]
        assert check_constraint(boxes, cs).satisfied
        assert not check_constraint(list(reversed(boxes)), cs).satisfied

    def test_rows(self):
        cs = parse_constraint("rows 2")
        boxes = row(0.25, [0.1, 0.5]) + row(0.75, [0.1, 0.5])
        assert check_constraint(boxes, cs).satisfied
        assert not check_constraint(row(0.5, [0.1, 0.3, 0.5, 0.7]), cs).satisfied
        # right cluster count but second row scrambled on x
        scrambled = row(0.25, [0.1, 0.5]) + row(0.75, [0.5, 0.1])
        assert check_constraint(scrambled, cs).violations == ("rows_2",)

    def test_columns(self):
        cs = parse_constraint("columns 2")
        boxes = [
            NormBox(0.2, 0.1, 0.3, 0.2),
            NormBox(0.7, 0.1, 0.8, 0.2),
            NormBox(0.2, 0.6, 0.3, 0.7),
            NormBox(0.7, 0.6, 0.8, 0.7),
        ]
        assert check_constraint(boxes, cs).satisfied
        assert not check_constraint(row(0.5, [0.1, 0.3, 0.6, 0.8]), cs).satisfied

    def test_grid(self):
        cs = parse_constraint("grid 2x2")
        boxes = row(0.25, [0.2, 0.6]) + row(0.75, [0.2, 0.6])
        assert check_constraint(boxes, cs).satisfied
        assert not check_constraint(row(0.5, [0.1, 0.3, 0.5, 0.7]), cs).satisfied

    def test_diagonals(self):
        down = [NormBox(t, t, t + 0.1, t + 0.1) for t in (0.1, 0.35, 0.6)]
        assert check_constraint(down, parse_constraint("diagonal down")).satisfied
        assert not check_constraint(down, parse_constraint("diagonal up")).satisfied
        up = [NormBox(t, 0.8 - t, t + 0.1, 0.9 - t) for t in (0.1, 0.35, 0.6)]
        assert check_constraint(up, parse_constraint("diagonal up")).satisfied
        assert not check_constraint(up, parse_constraint("diagonal down")).satisfied

    def test_diagonal_needs_real_steps(self):
        # x advances but y barely moves: below the minimum step
        flat = [NormBox(t, 0.5, t + 0.1, 0.6) for t in (0.1, 0.35, 0.6)]
        assert not check_constraint(flat, parse_constraint("diagonal down")).satisfied

    @pytest.mark.parametrize("side", ["left", "right", "top", "bottom", "center"])
    def test_alignment(self, side):
        cs = parse_constraint(f"align {side}")
        if side in ("top", "bottom"):
            good = row(0.5, [0.1, 0.4, 0.7])
        else:
            good = [NormBox(0.45, y, 0.55, y + 0.1) for y in (0.1, 0.4, 0.7)]
        assert check_constraint(good, cs).satisfied
        bad = [NormBox(0.1, 0.1, 0.3, 0.3), NormBox(0.6, 0.6, 0.9, 0.9)]
        assert check_constraint(bad, cs).violations == (f"align_{side}",)

    def test_emphasis_largest(self):
        cs = parse_constraint("glyph 0 largest")
        boxes = [NormBox(0.1, 0.1, 0.5, 0.5), NormBox(0.6, 0.1, 0.7, 0.2)]
        assert check_constraint(boxes, cs).satisfied
        assert not check_constraint(list(reversed(boxes)), cs).satisfied

    def test_emphasis_smallest_requires_strict(self):
        cs = parse_constraint("glyph 1 smallest")
        same = [NormBox(0.25, 0.25, 0.5, 0.5), NormBox(0.5, 0.25, 0.75, 0.5)]
        # exactly equal areas are not strictly smallest
        assert not check_constraint(same, cs).satisfied

    def test_emphasis_index_out_of_range(self):
        cs = parse_constraint("glyph 5 largest")
        assert not check_constraint(row(0.5, [0.1, 0.4]), cs).satisfied

    def test_uniform_size(self):
        cs = parse_constraint("uniform size")
        assert check_constraint(row(0.5, [0.1, 0.4, 0.7]), cs).satisfied
        mixed = [NormBox(0.1, 0.1, 0.5, 0.5), NormBox(0.6, 0.1, 0.65, 0.15)]
        assert check_constraint(mixed, cs).violations == ("uniform_size",)

    def test_combined_reports_each_failure(self):
        cs = parse_constraint("vertical line; uniform size")
        mixed = [NormBox(0.1, 0.1, 0.5, 0.5), NormBox(0.6, 0.1, 0.65, 0.15)]
        out = check_constraint(mixed, cs)
        assert set(out.violations) == {"vertical_line", "uniform_size"}


def test_violation_ratio():
    cs = parse_constraint("horizontal line")
    good = row(0.5, [0.1, 0.4, 0.7])
    bad = row(0.5, [0.4, 0.1, 0.7])
    assert violation_ratio([good, bad, good, bad], [cs] * 4) == 0.5
    assert violation_ratio([good], [cs]) == 0.0
    with pytest.raises(ValueError):
        violation_ratio([good], [cs, cs])
    with pytest.raises(EmptySampleSetError):
        violation_ratio([], [])
