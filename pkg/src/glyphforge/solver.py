"""Simulated-annealing layout search.

The solver walks box layouts with three move kinds (Gaussian translation,
log-uniform resizing about the box center, and position swaps), scoring
each state with a weighted energy:

    w_overlap  * Overlap IoU on a reduced occupancy grid
  + w_balance  * Visual Balance
  + w_ratio    * Ratio Consistency
  + w_constraint * violation count from the constraint checker
  + w_compact  * 100 * |1 - total box area / target_fill|
  + w_canvas   * 100 * out-of-canvas box area fraction

Restarts begin from the rule baselines and, for enforced constraints,
from a constructed layout that already satisfies the constraint set.
Acceptance is Metropolis with the energy delta normalized by the chain's
initialization energy, which keeps the trajectory invariant under a
positive rescaling of all weights. Everything is deterministic given the
config seed.
"""

from __future__ import annotations

import hashlib
import math
import random
import time
from dataclasses import dataclass, fields, replace

import numpy as np

from .baselines import layout_rule_a, layout_rule_b
from .constraints import (
    TOL_ROW_GAP,
    ConstraintSet,
    check_constraint,
    cluster_1d,
)
from .core import (
    GlyphElement,
    Layout,
    LogoInstance,
    NormBox,
    box_aspect_ratio,
    glyph_aspect_ratio,
    to_pixel_box,
)
from .errors import TemplateIncompatibleError
from .resample import box_mean_resample, integral_image

MIN_BOX_SIZE = 1e-3


@dataclass(frozen=True)
class SolverConfig:
    """Annealer weights, schedule, and move scales.

    Weights follow pilot-run defaults; initial_temp is expressed relative
    to the chain's initialization energy (see module docstring). Move
    scales are canvas fractions: translate_scale is the Gaussian sigma,
    resize_scale bounds the log-uniform resize factor to
    [1/(1+s), 1+s].
    """

    w_overlap: float = 3.0
    w_balance: float = 0.5
    w_ratio: float = 1.0
    w_constraint: float = 50.0
    w_compact: float = 0.5
    w_canvas: float = 10.0
    target_fill: float = 0.35
    iterations: int = 20000
    restarts: int = 4
    initial_temp: float = 5.0
    cooling_rate: float = 0.9995
    translate_scale: float = 0.05
    resize_scale: float = 0.2
    swap_prob: float = 0.1
    ar_preserve_prob: float = 0.7
    grid_side: int = 128
    seed: int = 0
    wall_time_budget: float | None = None

    def __post_init__(self) -> None:
        if self.iterations <= 0:
            raise ValueError("iterations must be positive")
        if not 0.0 < self.cooling_rate < 1.0:
            raise ValueError("cooling_rate must lie in (0, 1)")
        if self.restarts <= 0:
            raise ValueError("restarts must be positive")
        if self.grid_side < 2:
            raise ValueError("grid_side must be at least 2")
        for name in ("w_overlap", "w_balance", "w_ratio", "w_constraint",
                     "w_compact", "w_canvas"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"{name} must be a finite non-negative weight")

    @classmethod
    def from_dict(cls, d: dict[str, object]) -> "SolverConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return replace(cls(), **d)  # type: ignore[arg-type]


@dataclass(frozen=True)
class EnergyTerms:
    """Unweighted energy components plus the weighted total."""

    overlap: float
    balance: float
    ratio: float
    violations: int
    compact: float
    canvas: float
    total: float


@dataclass(frozen=True)
class SolveTrace:
    """What happened during one solve call."""

    best_energy: float
    energy_history: tuple[float, ...]
    accepted_moves: int
    wall_time: float
    timed_out: bool
    init_labels: tuple[str, ...]
    init_energies: tuple[float, ...]


def _derived_seed(seed: int, tag: str) -> int:
    digest = hashlib.blake2b(f"{seed}:{tag}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


class _GridState:
    """Incremental energy bookkeeping over the reduced occupancy grid."""

    def __init__(self, instance: LogoInstance, constraint: ConstraintSet | None, cfg: SolverConfig):
        self.cfg = cfg
        self.side = cfg.grid_side
        self.canvas_w = instance.canvas_w
        self.canvas_h = instance.canvas_h
        self.n = instance.glyph_count
        self.integrals = [integral_image(g.raster.tight_content()) for g in instance.glyphs]
        self.aspects = [glyph_aspect_ratio(g.raster) for g in instance.glyphs]
        self.constraint = constraint
        self.check_needed = (
            constraint is not None and not constraint.is_empty() and cfg.w_constraint != 0
        )
        self.counts = np.zeros((self.side, self.side), dtype=np.int16)
        self.covered = 0
        self.doubled = 0
        self.boxes: list[NormBox] = []
        self.stamps: list[tuple] = []
        self.area = [0.0] * self.n
        self.mx = [0.0] * self.n
        self.my = [0.0] * self.n
        self.ratio_dev = [0.0] * self.n

    def _stamp(self, i: int, box: NormBox):
        px = to_pixel_box(box, self.side, self.side)
        means = box_mean_resample(self.integrals[i], px.height, px.width)
        return px, means >= 0.5

    def _paint(self, px, stamp, sign: int) -> None:
        """Add or remove one stamp, keeping coverage tallies current."""
        region = self.counts[px.top:px.bottom, px.left:px.right]
        c0 = int(np.count_nonzero(region))
        d0 = int(np.count_nonzero(region > 1))
        if sign > 0:
            region += stamp
        else:
            region -= stamp
        self.covered += int(np.count_nonzero(region)) - c0
        self.doubled += int(np.count_nonzero(region > 1)) - d0

    def _cache_box(self, i: int, box: NormBox) -> None:
        a = box.width * box.height
        cx, cy = box.center
        self.area[i] = a
        self.mx[i] = a * cx
        self.my[i] = a * cy
        ar_box = box_aspect_ratio(box, self.canvas_w, self.canvas_h)
        self.ratio_dev[i] = 100.0 * abs(ar_box - self.aspects[i]) / self.aspects[i]

    def set_layout(self, layout: Layout) -> None:
        self.counts[:] = 0
        self.covered = 0
        self.doubled = 0
        self.boxes = list(layout)
        self.stamps = []
        for i, box in enumerate(layout):
            px, stamp = self._stamp(i, box)
            self._paint(px, stamp, +1)
            self.stamps.append((px, stamp))
            self._cache_box(i, box)

    def apply(self, moves: list[tuple[int, NormBox]]) -> list[tuple]:
        """Tentatively apply moves; returns an undo token."""
        undo = []
        for i, nb in moves:
            px, stamp = self.stamps[i]
            self._paint(px, stamp, -1)
            undo.append((i, self.boxes[i], px, stamp,
                         self.area[i], self.mx[i], self.my[i], self.ratio_dev[i]))
            npx, nstamp = self._stamp(i, nb)
            self._paint(npx, nstamp, +1)
            self.stamps[i] = (npx, nstamp)
            self.boxes[i] = nb
            self._cache_box(i, nb)
        return undo

    def revert(self, undo: list[tuple]) -> None:
        for i, box, px, stamp, a, mx, my, rdev in reversed(undo):
            npx, nstamp = self.stamps[i]
            self._paint(npx, nstamp, -1)
            self._paint(px, stamp, +1)
            self.stamps[i] = (px, stamp)
            self.boxes[i] = box
            self.area[i], self.mx[i], self.my[i], self.ratio_dev[i] = a, mx, my, rdev

    def terms(self) -> EnergyTerms:
        covered = self.covered
        doubled = self.doubled
        iou = 100.0 * doubled / covered if covered else 0.0
        area_sum = sum(self.area)
        bal = 100.0 * math.hypot(
            sum(self.mx) / area_sum - 0.5, sum(self.my) / area_sum - 0.5
        )
        ratio = sum(self.ratio_dev) / self.n
        compact = 100.0 * abs(1.0 - area_sum / self.cfg.target_fill)
        # Valid boxes always lie inside the unit canvas, so this term is
        # zero unless the box model is ever relaxed.
        canvas_frac = 0.0
        for b in self.boxes:
            vis_w = min(b.right, 1.0) - max(b.left, 0.0)
            vis_h = min(b.bottom, 1.0) - max(b.top, 0.0)
            vis = max(vis_w, 0.0) * max(vis_h, 0.0)
            a = b.width * b.height
            canvas_frac += (a - vis) / a
        canvas = 100.0 * canvas_frac / self.n
        violations = 0
        if self.check_needed:
            violations = len(check_constraint(tuple(self.boxes), self.constraint).violations)
        cfg = self.cfg
        total = (
            cfg.w_overlap * iou
            + cfg.w_balance * bal
            + cfg.w_ratio * ratio
            + cfg.w_constraint * violations
            + cfg.w_compact * compact
            + cfg.w_canvas * canvas
        )
        return EnergyTerms(iou, bal, ratio, violations, compact, canvas, total)

    def total(self) -> float:
        return self.terms().total


def energy_breakdown(
    instance: LogoInstance,
    layout: Layout,
    constraint: ConstraintSet | None = None,
    cfg: SolverConfig | None = None,
) -> EnergyTerms:
    """Score a layout without searching; same terms the annealer uses."""
    cfg = cfg or SolverConfig()
    state = _GridState(instance, constraint, cfg)
    state.set_layout(layout)
    return state.terms()


def energy(
    instance: LogoInstance,
    layout: Layout,
    constraint: ConstraintSet | None = None,
    cfg: SolverConfig | None = None,
) -> float:
    """Weighted total energy of a layout."""
    return energy_breakdown(instance, layout, constraint, cfg).total


def _clamped_box(left: float, top: float, w: float, h: float) -> NormBox:
    w = min(max(w, MIN_BOX_SIZE), 1.0)
    h = min(max(h, MIN_BOX_SIZE), 1.0)
    left = min(max(left, 0.0), 1.0 - w)
    top = min(max(top, 0.0), 1.0 - h)
    return NormBox(left, top, min(left + w, 1.0), min(top + h, 1.0))


def _recentered(b: NormBox, cx: float, cy: float) -> NormBox:
    return _clamped_box(cx - b.width / 2.0, cy - b.height / 2.0, b.width, b.height)


def _propose(boxes: list[NormBox], rng: random.Random, cfg: SolverConfig) -> list[tuple[int, NormBox]]:
    """One random move: swap, translate, or resize."""
    n = len(boxes)
    if n >= 2 and rng.random() < cfg.swap_prob:
        i, j = rng.sample(range(n), 2)
        ci, cj = boxes[i].center, boxes[j].center
        return [(i, _recentered(boxes[i], *cj)), (j, _recentered(boxes[j], *ci))]
    i = rng.randrange(n)
    b = boxes[i]
    if rng.random() < 0.5:
        dx = rng.gauss(0.0, cfg.translate_scale)
        dy = rng.gauss(0.0, cfg.translate_scale)
        return [(i, _clamped_box(b.left + dx, b.top + dy, b.width, b.height))]
    span = math.log1p(cfg.resize_scale)
    f = math.exp(rng.uniform(-span, span))
    if rng.random() < cfg.ar_preserve_prob:
        fw = fh = f
    else:
        fw, fh = f, math.exp(rng.uniform(-span, span))
    cx, cy = b.center
    w, h = b.width * fw, b.height * fh
    return [(i, _clamped_box(cx - w / 2.0, cy - h / 2.0, w, h))]


def neighbor(layout: Layout, rng: random.Random, cfg: SolverConfig | None = None) -> Layout:
    """One randomized neighbor of a layout, clamped to validity."""
    cfg = cfg or SolverConfig()
    boxes = list(layout)
    for i, nb in _propose(boxes, rng, cfg):
        boxes[i] = nb
    return tuple(boxes)


def _pack_line_scaled(
    aspects: list[float],
    scales: list[float],
    canvas_w: int,
    canvas_h: int,
    axis: str,
    *,
    gap: float = 0.02,
    max_fill: float = 0.9,
    max_side: float = 0.5,
    cross_center: float = 0.5,
) -> list[NormBox]:
    """Center-aligned single-line pack with per-glyph size scales."""
    n = len(aspects)
    if axis == "horizontal":
        span_px, cross_px = canvas_w, canvas_h
        spans = [a * s for a, s in zip(aspects, scales)]
        crosses = list(scales)
    else:
        span_px, cross_px = canvas_h, canvas_w
        spans = [s / a for a, s in zip(aspects, scales)]
        crosses = list(scales)

    gap_px = gap * span_px
    budget = max_fill * span_px
    if n > 1 and (n - 1) * gap_px > budget / 2.0:
        gap_px = budget / (2.0 * (n - 1))
    base = min(
        max_side * cross_px / max(crosses),
        (budget - (n - 1) * gap_px) / sum(spans),
    )
    extents = [u * base for u in spans]
    cursor = (span_px - (sum(extents) + (n - 1) * gap_px)) / 2.0
    boxes = []
    for ext, cr in zip(extents, crosses):
        c_lo = cross_center * cross_px - cr * base / 2.0
        if axis == "horizontal":
            boxes.append(NormBox(
                cursor / span_px, c_lo / cross_px,
                (cursor + ext) / span_px, (c_lo + cr * base) / cross_px,
            ))
        else:
            boxes.append(NormBox(
                c_lo / cross_px, cursor / span_px,
                (c_lo + cr * base) / cross_px, (cursor + ext) / span_px,
            ))
        cursor += ext + gap_px
    return boxes


def _emphasis_scales(cs: ConstraintSet, aspects: list[float], scales: list[float]) -> list[float]:
    """Adjust one glyph's scale so its box area is strictly extreme."""
    i = cs.emphasis_index
    if i is None or i >= len(aspects):
        return scales
    rel = [a * s * s for a, s in zip(aspects, scales)]
    others = [r for j, r in enumerate(rel) if j != i]
    if not others:
        return scales
    out = list(scales)
    if cs.uniform_size:
        # Stay inside the +-15% uniform-size band while making the area
        # strictly extreme.
        factor = 1.1 if cs.emphasis_role == "largest" else 1.0 / 1.1
        out[i] = scales[i] * math.sqrt(factor)
    elif cs.emphasis_role == "largest":
        needed = math.sqrt(1.1 * max(others) / aspects[i])
        out[i] = max(1.8 * scales[i], needed)
    else:
        needed = math.sqrt(0.9 * min(others) / aspects[i])
        out[i] = min(0.55 * scales[i], needed)
    return out


def _grid_compatible(n: int, r: int, c: int) -> bool:
    return n <= r * c and n > (r - 1) * c and n >= c


def _equalize_areas(boxes: list[NormBox], cs: ConstraintSet) -> list[NormBox]:
    """Shrink boxes about their centers to a common area.

    Shrinking never creates overlap or leaves the canvas, and centers stay
    put, so arrangement predicates survive untouched. When an emphasis
    clause rides along, the non-emphasized (largest role) or emphasized
    (smallest role) boxes settle one notch below the shared area: strictly
    extreme, yet inside the uniform-size band.
    """
    areas = [b.width * b.height for b in boxes]
    target = min(areas)
    emphasis = cs.emphasis_index if (
        cs.emphasis_index is not None and cs.emphasis_index < len(boxes)
    ) else None
    out = []
    for i, (b, a) in enumerate(zip(boxes, areas)):
        t = target
        if emphasis is not None:
            if cs.emphasis_role == "largest" and i != emphasis:
                t = target / 1.1
            elif cs.emphasis_role == "smallest" and i == emphasis:
                t = target / 1.1
        f = math.sqrt(t / a)
        cx, cy = b.center
        w, h = b.width * f, b.height * f
        left = max(cx - w / 2.0, 0.0)
        top = max(cy - h / 2.0, 0.0)
        out.append(NormBox(left, top, min(left + w, 1.0), min(top + h, 1.0)))
    return out


def seed_layout(
    cs: ConstraintSet,
    glyphs: tuple[GlyphElement, ...],
    canvas_w: int,
    canvas_h: int,
) -> Layout:
    """Construct a layout satisfying a constraint set, deterministically.

    Arrangement clauses pick the skeleton (defaulting to a line whose axis
    suits any alignment clause); uniform-size and emphasis clauses shape
    per-glyph scales; alignment clauses shift boxes afterwards. Raises
    TemplateIncompatibleError when a grid cannot host the glyph count.
    """
    n = len(glyphs)
    if n < 1:
        raise TemplateIncompatibleError("no glyphs to lay out")
    aspects = [glyph_aspect_ratio(g.raster) for g in glyphs]

    scales = [1.0] * n
    if cs.uniform_size:
        scales = [1.0 / math.sqrt(a) for a in aspects]
    scales = _emphasis_scales(cs, aspects, scales)

    arrangement = cs.arrangement
    if arrangement is None:
        if cs.alignment in ("left", "center", "right"):
            arrangement = "vertical_line"
        else:
            arrangement = "horizontal_line"

    if arrangement == "horizontal_line":
        boxes = _pack_line_scaled(aspects, scales, canvas_w, canvas_h, "horizontal")
    elif arrangement == "vertical_line":
        boxes = _pack_line_scaled(aspects, scales, canvas_w, canvas_h, "vertical")
    elif arrangement in ("rows", "columns"):
        k = (cs.rows if arrangement == "rows" else cs.cols) or 1
        if k > n:
            raise TemplateIncompatibleError(f"{k} {arrangement} for {n} glyphs")
        boxes = _banded_layout(aspects, scales, canvas_w, canvas_h, k, arrangement)
    elif arrangement == "grid":
        r, c = cs.rows or 1, cs.cols or 1
        if not _grid_compatible(n, r, c):
            raise TemplateIncompatibleError(f"grid {r}x{c} cannot host {n} glyphs")
        boxes = _grid_layout(aspects, scales, canvas_w, canvas_h, r, c)
    else:
        boxes = _diagonal_layout(aspects, scales, canvas_w, canvas_h, arrangement == "diagonal_up")

    if cs.uniform_size:
        boxes = _equalize_areas(boxes, cs)
    boxes = _apply_alignment(boxes, cs.alignment, arrangement)
    return tuple(boxes)


def _banded_layout(
    aspects: list[float],
    scales: list[float],
    canvas_w: int,
    canvas_h: int,
    k: int,
    kind: str,
) -> list[NormBox]:
    """k rows (or columns) of center-aligned lines, stacked with clear gaps."""
    n = len(aspects)
    groups = [list(g) for g in np.array_split(np.arange(n), k)]
    band_gap = TOL_ROW_GAP + 0.01
    # Band pitch splits the stacked axis evenly; each band packs its
    # glyphs as one centered line at the band's center.
    pitch = (1.0 - 2.0 * 0.05) / k
    boxes: list[NormBox | None] = [None] * n
    for bi, group in enumerate(groups):
        center = 0.05 + (bi + 0.5) * pitch
        sub_aspects = [aspects[i] for i in group]
        sub_scales = [scales[i] for i in group]
        axis = "horizontal" if kind == "rows" else "vertical"
        max_side = max(pitch - band_gap, 0.02)
        line = _pack_line_scaled(
            sub_aspects, sub_scales, canvas_w, canvas_h, axis,
            max_side=max_side, cross_center=center,
        )
        for i, b in zip(group, line):
            boxes[i] = b
    return [b for b in boxes if b is not None]


def _grid_layout(
    aspects: list[float],
    scales: list[float],
    canvas_w: int,
    canvas_h: int,
    r: int,
    c: int,
) -> list[NormBox]:
    """Row-major placement at cell centers of an r x c grid."""
    n = len(aspects)
    margin = 0.08
    pitch_x = (1.0 - 2.0 * margin) / c
    pitch_y = (1.0 - 2.0 * margin) / r
    smax = max(scales)
    boxes = []
    for i in range(n):
        row, col = divmod(i, c)
        cx = margin + (col + 0.5) * pitch_x
        cy = margin + (row + 0.5) * pitch_y
        # Fit the box in its cell with slack, aspect preserved in pixels.
        h_px = min(
            0.8 * pitch_y * canvas_h,
            0.8 * pitch_x * canvas_w / aspects[i],
        ) * scales[i] / smax
        w_px = aspects[i] * h_px
        w, h = w_px / canvas_w, h_px / canvas_h
        boxes.append(_clamped_box(cx - w / 2.0, cy - h / 2.0, w, h))
    return boxes


def _diagonal_layout(
    aspects: list[float],
    scales: list[float],
    canvas_w: int,
    canvas_h: int,
    upward: bool,
) -> list[NormBox]:
    """Staircase of boxes marching corner to corner."""
    n = len(aspects)
    margin = 0.08
    span = 1.0 - 2.0 * margin
    step = span / n
    smax = max(scales)
    boxes = []
    for i in range(n):
        cx = margin + (i + 0.5) * step
        cy = margin + (i + 0.5) * step
        if upward:
            cy = 1.0 - cy
        h_px = min(0.85 * step * canvas_h, 0.85 * step * canvas_w / aspects[i])
        h_px *= scales[i] / smax
        w_px = aspects[i] * h_px
        w, h = w_px / canvas_w, h_px / canvas_h
        boxes.append(_clamped_box(cx - w / 2.0, cy - h / 2.0, w, h))
    return boxes


def _apply_alignment(
    boxes: list[NormBox],
    alignment: str | None,
    arrangement: str,
) -> list[NormBox]:
    """Shift boxes to share an edge, where the arrangement allows it."""
    if alignment is None:
        return boxes
    horizontal = arrangement in ("horizontal_line",)
    vertical = arrangement in ("vertical_line",)
    if alignment in ("top", "bottom") and horizontal:
        ref = min(b.top for b in boxes) if alignment == "top" else max(b.bottom for b in boxes)
        out = []
        for b in boxes:
            top = ref if alignment == "top" else ref - b.height
            out.append(_clamped_box(b.left, top, b.width, b.height))
        return out
    if alignment in ("left", "right", "center") and vertical:
        if alignment == "left":
            ref = min(b.left for b in boxes)
            return [_clamped_box(ref, b.top, b.width, b.height) for b in boxes]
        if alignment == "right":
            ref = max(b.right for b in boxes)
            return [_clamped_box(ref - b.width, b.top, b.width, b.height) for b in boxes]
        return boxes  # centered stacks already share center-x
    return boxes


def _initial_layouts(
    instance: LogoInstance,
    constraint: ConstraintSet | None,
    cfg: SolverConfig,
) -> list[tuple[str, Layout]]:
    """Restart initializations: constraint template first when enforced."""
    inits: list[tuple[str, Layout]] = []
    enforced = constraint is not None and not constraint.is_empty() and cfg.w_constraint != 0
    if enforced:
        try:
            inits.append((
                "template",
                seed_layout(constraint, instance.glyphs, instance.canvas_w, instance.canvas_h),
            ))
        except TemplateIncompatibleError:
            pass
    inits.append(("rule_a", layout_rule_a(instance.glyphs, instance.canvas_w, instance.canvas_h)))
    inits.append((
        "rule_b",
        layout_rule_b(
            instance.glyphs, instance.canvas_w, instance.canvas_h,
            seed=_derived_seed(cfg.seed, "rule_b"),
        ),
    ))
    return inits


def solve(
    instance: LogoInstance,
    constraint: ConstraintSet | None = None,
    cfg: SolverConfig | None = None,
) -> tuple[Layout, SolveTrace]:
    """Multi-restart annealing; returns the minimum-energy layout found.

    The returned energy can never exceed any initialization's energy,
    because every chain starts at an initialization and the best state
    over all chains is tracked. Two calls with equal inputs return
    identical results.
    """
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()
    inits = _initial_layouts(instance, constraint, cfg)
    state = _GridState(instance, constraint, cfg)

    init_energies = []
    for _, lay in inits:
        state.set_layout(lay)
        init_energies.append(state.total())

    best_energy = math.inf
    best_layout: Layout = inits[0][1]
    history: list[float] = []
    accepted = 0
    timed_out = False
    sample_every = max(1, cfg.iterations // 200)

    for r in range(cfg.restarts):
        label_idx = r % len(inits)
        rng = random.Random(_derived_seed(cfg.seed, f"chain-{r}"))
        state.set_layout(inits[label_idx][1])
        cur = init_energies[label_idx]
        e_scale = max(abs(cur), 1e-9)
        if cur < best_energy:
            best_energy = cur
            best_layout = tuple(state.boxes)
        temp = cfg.initial_temp
        for it in range(cfg.iterations):
            if cfg.wall_time_budget is not None and (it & 0xFF) == 0:
                if time.perf_counter() - t0 > cfg.wall_time_budget:
                    timed_out = True
                    break
            moves = _propose(state.boxes, rng, cfg)
            undo = state.apply(moves)
            new = state.total()
            delta = new - cur
            if delta <= 0.0 or rng.random() < math.exp(-delta / (e_scale * max(temp, 1e-12))):
                cur = new
                accepted += 1
                if new < best_energy:
                    best_energy = new
                    best_layout = tuple(state.boxes)
            else:
                state.revert(undo)
            temp *= cfg.cooling_rate
            if it % sample_every == 0:
                history.append(best_energy)
        if timed_out:
            break

    trace = SolveTrace(
        best_energy=best_energy,
        energy_history=tuple(history),
        accepted_moves=accepted,
        wall_time=time.perf_counter() - t0,
        timed_out=timed_out,
        init_labels=tuple(label for label, _ in inits),
        init_energies=tuple(init_energies),
    )
    return best_layout, trace


def describe_layout(
    layout: Layout,
    glyphs: tuple[GlyphElement, ...] | None = None,
) -> tuple[tuple[str, ...], str]:
    """Deterministic English descriptions of a layout.

    Returns (per-glyph detail strings, overall description). Details name
    strict area superlatives, horizontal position terciles, vertical
    terciles, and row membership for multi-row layouts; the overall line
    reports the glyph count and the detected arrangement.
    """
    n = len(layout)
    if n == 0:
        raise ValueError("cannot describe an empty layout")
    if glyphs is not None and len(glyphs) != n:
        raise ValueError("glyphs and layout must have equal length")
    areas = [b.width * b.height for b in layout]
    cys = [b.center[1] for b in layout]
    clusters = cluster_1d(cys, TOL_ROW_GAP)
    row_of = {}
    for row_idx, members in enumerate(clusters):
        for i in members:
            row_of[i] = row_idx + 1

    details = []
    for i, b in enumerate(layout):
        cx, cy = b.center
        superlative = ""
        if n >= 2:
            if all(areas[i] > a for j, a in enumerate(areas) if j != i):
                superlative = "the largest and "
            elif all(areas[i] < a for j, a in enumerate(areas) if j != i):
                superlative = "the smallest and "
        if cx < 1.0 / 3.0:
            pos = "on the far left"
        elif cx > 2.0 / 3.0:
            pos = "on the far right"
        else:
            pos = "in the center"
        if cy < 1.0 / 3.0:
            vpos = " at the top"
        elif cy > 2.0 / 3.0:
            vpos = " at the bottom"
        else:
            vpos = ""
        row = f" in row {row_of[i]} of {len(clusters)}" if len(clusters) > 1 else ""
        details.append(f"This character is {superlative}positioned {pos}{vpos}{row}.")

    overall = f"There are {n} characters in this image"
    horizontal = check_constraint(layout, ConstraintSet(arrangement="horizontal_line"))
    vertical = check_constraint(layout, ConstraintSet(arrangement="vertical_line"))
    if n >= 2 and horizontal.satisfied:
        overall += ", arranged horizontally from left to right."
    elif n >= 2 and vertical.satisfied:
        overall += ", arranged vertically from top to bottom."
    elif len(clusters) > 1:
        overall += f", arranged in {len(clusters)} rows."
    else:
        overall += "."
    return tuple(details), overall
