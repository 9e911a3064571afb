"""User layout constraints: a small controlled grammar plus a checker.

Constraint text is a semicolon-separated list of clauses, case-insensitive
and whitespace-tolerant:

    horizontal line | vertical line | rows <k> | columns <k>
    | grid <r>x<c> | diagonal down | diagonal up
    | align <left|center|right|top|bottom>
    | glyph <i> <largest|smallest> | uniform size

Satisfaction is geometric with fixed tolerances: center bands and edge
alignment use 0.03 of the canvas, row/column clustering splits on center
gaps above 0.05, and uniform size means every box area within 15% of the
mean. Emphasis compares box areas strictly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import Layout, box_area
from .errors import EmptyLayoutError, EmptySampleSetError, UnrecognizedConstraintError

TOL_BAND = 0.03
TOL_ALIGN = 0.03
TOL_ROW_GAP = 0.05
UNIFORM_SIZE_SLACK = 0.15
DIAGONAL_MIN_STEP = 0.01

ARRANGEMENTS = (
    "horizontal_line",
    "vertical_line",
    "rows",
    "columns",
    "grid",
    "diagonal_down",
    "diagonal_up",
)
ALIGNMENTS = ("left", "center", "right", "top", "bottom")


@dataclass(frozen=True)
class ConstraintSet:
    """Parsed constraint clauses. All fields optional; empty means none."""

    arrangement: str | None = None
    rows: int | None = None
    cols: int | None = None
    alignment: str | None = None
    emphasis_index: int | None = None
    emphasis_role: str | None = None
    uniform_size: bool = False

    def __post_init__(self) -> None:
        if self.arrangement is not None and self.arrangement not in ARRANGEMENTS:
            raise ValueError(f"unknown arrangement: {self.arrangement!r}")
        if self.alignment is not None and self.alignment not in ALIGNMENTS:
            raise ValueError(f"unknown alignment: {self.alignment!r}")
        if self.emphasis_role is not None and self.emphasis_role not in ("largest", "smallest"):
            raise ValueError(f"unknown emphasis role: {self.emphasis_role!r}")
        if (self.emphasis_index is None) != (self.emphasis_role is None):
            raise ValueError("emphasis index and role must come together")

    def is_empty(self) -> bool:
        return (
            self.arrangement is None
            and self.alignment is None
            and self.emphasis_index is None
            and not self.uniform_size
        )


@dataclass(frozen=True)
class ConstraintCheck:
    """Checker verdict: overall flag plus named clause failures."""

    satisfied: bool
    violations: tuple[str, ...]


_CLAUSE_PATTERNS: tuple[tuple[re.Pattern[str], str], ...] = (
    (re.compile(r"^horizontal\s+line$"), "horizontal_line"),
    (re.compile(r"^vertical\s+line$"), "vertical_line"),
    (re.compile(r"^rows\s+(\d+)$"), "rows"),
    (re.compile(r"^columns\s+(\d+)$"), "columns"),
    (re.compile(r"^grid\s+(\d+)\s*x\s*(\d+)$"), "grid"),
    (re.compile(r"^diagonal\s+down$"), "diagonal_down"),
    (re.compile(r"^diagonal\s+up$"), "diagonal_up"),
    (re.compile(r"^align\s+(left|center|right|top|bottom)$"), "align"),
    (re.compile(r"^glyph\s+(\d+)\s+(largest|smallest)$"), "glyph"),
    (re.compile(r"^uniform\s+size$"), "uniform_size"),
)


def parse_constraint(text: str) -> ConstraintSet:
    """Parse constraint text into a ConstraintSet.

    Later clauses of the same kind override earlier ones. Raises
    UnrecognizedConstraintError for anything outside the grammar,
    including empty text.
    """
    clauses = [c.strip().lower() for c in text.split(";")]
    clauses = [c for c in clauses if c]
    if not clauses:
        raise UnrecognizedConstraintError("constraint text is empty")

    fields: dict[str, object] = {}
    for clause in clauses:
        for pattern, kind in _CLAUSE_PATTERNS:
            m = pattern.match(clause)
            if not m:
                continue
            if kind in ("horizontal_line", "vertical_line", "diagonal_down", "diagonal_up"):
                fields.update(arrangement=kind, rows=None, cols=None)
            elif kind == "rows":
                k = int(m.group(1))
                if k < 1:
                    raise UnrecognizedConstraintError(f"rows count must be >= 1: {clause!r}")
                fields.update(arrangement="rows", rows=k, cols=None)
            elif kind == "columns":
                k = int(m.group(1))
                if k < 1:
                    raise UnrecognizedConstraintError(f"columns count must be >= 1: {clause!r}")
                fields.update(arrangement="columns", rows=None, cols=k)
            elif kind == "grid":
                r, c = int(m.group(1)), int(m.group(2))
                if r < 1 or c < 1:
                    raise UnrecognizedConstraintError(f"grid dims must be >= 1: {clause!r}")
                fields.update(arrangement="grid", rows=r, cols=c)
            elif kind == "align":
                fields["alignment"] = m.group(1)
            elif kind == "glyph":
                fields["emphasis_index"] = int(m.group(1))
                fields["emphasis_role"] = m.group(2)
            else:
                fields["uniform_size"] = True
            break
        else:
            raise UnrecognizedConstraintError(f"unrecognized clause: {clause!r}")
    return ConstraintSet(**fields)  # type: ignore[arg-type]


def render_constraint(cs: ConstraintSet) -> str:
    """Canonical constraint text for a ConstraintSet (parse round-trips)."""
    parts: list[str] = []
    if cs.arrangement == "horizontal_line":
        parts.append("horizontal line")
    elif cs.arrangement == "vertical_line":
        parts.append("vertical line")
    elif cs.arrangement == "rows":
        parts.append(f"rows {cs.rows}")
    elif cs.arrangement == "columns":
        parts.append(f"columns {cs.cols}")
    elif cs.arrangement == "grid":
        parts.append(f"grid {cs.rows}x{cs.cols}")
    elif cs.arrangement == "diagonal_down":
        parts.append("diagonal down")
    elif cs.arrangement == "diagonal_up":
        parts.append("diagonal up")
    if cs.alignment is not None:
        parts.append(f"align {cs.alignment}")
    if cs.emphasis_index is not None:
        parts.append(f"glyph {cs.emphasis_index} {cs.emphasis_role}")
    if cs.uniform_size:
        parts.append("uniform size")
    if not parts:
        raise ValueError("cannot render an empty constraint set")
    return "; ".join(parts)


def cluster_1d(values: list[float], gap: float) -> list[list[int]]:
    """Greedy 1-D clustering: sort, split where neighbors differ by > gap.

    Returns clusters of original indices, ordered by ascending value.
    """
    order = sorted(range(len(values)), key=lambda i: values[i])
    clusters: list[list[int]] = []
    for i in order:
        if clusters and values[i] - values[clusters[-1][-1]] <= gap:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return clusters


def _ascending(vals: list[float], tol: float = 1e-9) -> bool:
    return all(vals[i + 1] >= vals[i] - tol for i in range(len(vals) - 1))


def _descending(vals: list[float], tol: float = 1e-9) -> bool:
    return all(vals[i + 1] <= vals[i] + tol for i in range(len(vals) - 1))


def _within_band(vals: list[float], tol: float) -> bool:
    mean = sum(vals) / len(vals)
    return all(abs(v - mean) <= tol for v in vals)


def _strict_steps(vals: list[float], step: float) -> bool:
    return all(vals[i + 1] - vals[i] >= step for i in range(len(vals) - 1))


def check_constraint(layout: Layout, cs: ConstraintSet) -> ConstraintCheck:
    """Check a layout against a constraint set.

    Box order is glyph reading order. Returns every failing clause by
    name; an empty constraint set is trivially satisfied.
    """
    if not layout:
        raise EmptyLayoutError("cannot check an empty layout")
    cxs = [b.center[0] for b in layout]
    cys = [b.center[1] for b in layout]
    areas = [box_area(b) for b in layout]
    violations: list[str] = []

    arr = cs.arrangement
    if arr == "horizontal_line":
        if not (_within_band(cys, TOL_BAND) and _ascending(cxs)):
            violations.append("horizontal_line")
    elif arr == "vertical_line":
        if not (_within_band(cxs, TOL_BAND) and _ascending(cys)):
            violations.append("vertical_line")
    elif arr == "rows":
        if not _row_clusters_ok(cys, cxs, cs.rows or 0):
            violations.append(f"rows_{cs.rows}")
    elif arr == "columns":
        if not _row_clusters_ok(cxs, cys, cs.cols or 0):
            violations.append(f"columns_{cs.cols}")
    elif arr == "grid":
        ok = _row_clusters_ok(cys, cxs, cs.rows or 0) and _row_clusters_ok(cxs, cys, cs.cols or 0)
        if not ok:
            violations.append(f"grid_{cs.rows}x{cs.cols}")
    elif arr == "diagonal_down":
        if not (_strict_steps(cxs, DIAGONAL_MIN_STEP) and _strict_steps(cys, DIAGONAL_MIN_STEP)):
            violations.append("diagonal_down")
    elif arr == "diagonal_up":
        down = [-v for v in cys]
        if not (_strict_steps(cxs, DIAGONAL_MIN_STEP) and _strict_steps(down, DIAGONAL_MIN_STEP)):
            violations.append("diagonal_up")

    if cs.alignment is not None:
        edges = {
            "left": [b.left for b in layout],
            "center": cxs,
            "right": [b.right for b in layout],
            "top": [b.top for b in layout],
            "bottom": [b.bottom for b in layout],
        }[cs.alignment]
        if not _within_band(edges, TOL_ALIGN):
            violations.append(f"align_{cs.alignment}")

    if cs.emphasis_index is not None:
        i = cs.emphasis_index
        if i >= len(layout):
            violations.append(f"emphasis_{cs.emphasis_role}")
        else:
            others = areas[:i] + areas[i + 1:]
            if cs.emphasis_role == "largest":
                ok = all(areas[i] > a for a in others)
            else:
                ok = all(areas[i] < a for a in others)
            if not (ok or not others):
                violations.append(f"emphasis_{cs.emphasis_role}")

    if cs.uniform_size:
        mean = sum(areas) / len(areas)
        if any(abs(a - mean) > UNIFORM_SIZE_SLACK * mean for a in areas):
            violations.append("uniform_size")

    return ConstraintCheck(satisfied=not violations, violations=tuple(violations))


def _row_clusters_ok(primary: list[float], secondary: list[float], k: int) -> bool:
    """k clusters on the primary axis, each ascending on the secondary."""
    if k < 1:
        return False
    clusters = cluster_1d(primary, TOL_ROW_GAP)
    if len(clusters) != k:
        return False
    for members in clusters:
        ordered = sorted(members)
        if not _ascending([secondary[i] for i in ordered]):
            return False
    return True


def violation_ratio(layouts: list[Layout], constraints: list[ConstraintSet]) -> float:
    """Fraction of samples whose layout fails its constraint."""
    if len(layouts) != len(constraints):
        raise ValueError("layouts and constraints must pair up")
    if not layouts:
        raise EmptySampleSetError("violation ratio over zero samples")
    failed = sum(
        0 if check_constraint(lay, cs).satisfied else 1
        for lay, cs in zip(layouts, constraints)
    )
    return failed / len(layouts)
