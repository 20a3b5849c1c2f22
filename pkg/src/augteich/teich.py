"""Pants complexes, Fenchel-Nielsen coordinates, holonomy and the numerical
convergence checks.

Gluing convention. Slot i of a pants is its cuff d(alpha_i). In the alpha_i
frame of a pants the cuff is the imaginary axis, the pants lies in Re > 0 and
x = log|w| runs along the cuff with period l. Two slots glued along a curve
with twist tau are identified by x_P = tau - x_Q (a symmetric relation), which
is realised by the frame change M_P A(tau) S M_Q^-1 with S(w) = -1/w and
A(tau)(w) = e^tau w. Twists are in length units; theta = tau / l in turns.

Holonomy is computed by developing tiles: a tile is (pants, sheet, g), where
sheet 0 is g(H) and sheet 1 is g(r(H)) with r(z) = -conj(z).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .collar_hexagon import (
    NEXT,
    PREV,
    collar_chart,
    hexagon_from_sides,
    hexagon_regions,
)
from .hyp_core import GeometryError, MobiusTransform
from .standard_maps import (
    DistortionReport,
    PantsMap,
    pants_map_distortion,
)


class ComplexError(ValueError):
    """Malformed pants complex or mismatched coordinates."""


class NodeCrossingError(GeometryError):
    pass


# --- combinatorics -------------------------------------------------------------------


@dataclass(frozen=True)
class Curve:
    a: tuple     # (pants, slot)
    b: tuple
    name: str = ""


@dataclass(frozen=True)
class PantsComplex:
    n_pants: int
    curves: tuple
    free: tuple = ()     # free slots (pants, slot), computed when left empty

    def __post_init__(self):
        if self.n_pants < 1:
            raise ComplexError("need at least one pair of pants")
        seen = set()
        for c in self.curves:
            for p, s in (c.a, c.b):
                if not (0 <= p < self.n_pants and 0 <= s < 3):
                    raise ComplexError(f"slot {(p, s)} does not exist")
                if (p, s) in seen:
                    raise ComplexError(f"slot {(p, s)} is glued twice")
                seen.add((p, s))
        free = tuple((p, s) for p in range(self.n_pants) for s in range(3)
                     if (p, s) not in seen)
        if self.free and tuple(sorted(self.free)) != free:
            raise ComplexError("free slots disagree with the gluings")
        object.__setattr__(self, "free", free)
        # connectivity by union-find over pants
        parent = list(range(self.n_pants))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for c in self.curves:
            parent[find(c.a[0])] = find(c.b[0])
        if len({find(p) for p in range(self.n_pants)}) != 1:
            raise ComplexError("pants complex is disconnected")

    @property
    def euler_characteristic(self) -> int:
        return -self.n_pants

    @cached_property
    def slot_map(self) -> dict:
        """(pants, slot) -> ('curve', index, other side) or ('free', index)."""
        out = {}
        for k, c in enumerate(self.curves):
            out[c.a] = ("curve", k, c.b)
            out[c.b] = ("curve", k, c.a)
        for k, fs in enumerate(self.free):
            out[fs] = ("free", k, None)
        return out

    def curve_name(self, k: int) -> str:
        return self.curves[k].name or f"c{k}"


def one_holed_torus() -> PantsComplex:
    return PantsComplex(1, (Curve((0, 1), (0, 2), "gamma"),))


def four_holed_sphere() -> PantsComplex:
    return PantsComplex(2, (Curve((0, 0), (1, 0), "gamma"),))


def genus_two() -> PantsComplex:
    return PantsComplex(2, tuple(Curve((0, i), (1, i), f"c{i}") for i in range(3)))


@dataclass(frozen=True)
class FNPoint:
    lengths: tuple
    twists: tuple
    boundary: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "lengths", tuple(float(v) for v in self.lengths))
        object.__setattr__(self, "twists", tuple(float(v) for v in self.twists))
        object.__setattr__(self, "boundary", tuple(float(v) for v in self.boundary))
        if len(self.lengths) != len(self.twists):
            raise ComplexError("need one twist per curve")
        if any(not (v >= 0 and math.isfinite(v)) for v in self.lengths + self.boundary):
            raise ComplexError("lengths must be finite and nonnegative")
        if any(not math.isfinite(v) for v in self.twists):
            raise ComplexError("twists must be finite")

    def inert(self, k: int) -> bool:
        """Twist of curve k is undefined at a node."""
        return self.lengths[k] == 0

    def theta(self, k: int) -> float:
        """Twist in turns; 0 at nodes, where it carries no information."""
        return 0.0 if self.inert(k) else self.twists[k] / self.lengths[k]

    def check(self, c: PantsComplex):
        if len(self.lengths) != len(c.curves):
            raise ComplexError(f"expected {len(c.curves)} curve values, got {len(self.lengths)}")
        if len(self.boundary) != len(c.free):
            raise ComplexError(f"expected {len(c.free)} boundary values, got {len(self.boundary)}")


# --- surfaces --------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MarkedSurface:
    complex: PantsComplex
    fn: FNPoint

    def __post_init__(self):
        self.fn.check(self.complex)

    def slot_length(self, p: int, s: int) -> float:
        kind, k, _ = self.complex.slot_map[(p, s)]
        return self.fn.lengths[k] if kind == "curve" else self.fn.boundary[k]

    @cached_property
    def hexagons(self) -> tuple:
        return tuple(hexagon_from_sides(*(self.slot_length(p, s) / 2.0 for s in range(3)))
                     for p in range(self.complex.n_pants))

    @cached_property
    def regions(self) -> tuple:
        return tuple(hexagon_regions(hx) for hx in self.hexagons)

    @property
    def nodes(self) -> tuple:
        return tuple(k for k in range(len(self.complex.curves)) if self.fn.lengths[k] == 0)

    def collar_table(self):
        """Per slot: (pants, slot, label, length, t, width, outer length)."""
        rows = []
        for p in range(self.complex.n_pants):
            for s in range(3):
                kind, k, _ = self.complex.slot_map[(p, s)]
                label = self.complex.curve_name(k) if kind == "curve" else f"b{k}"
                ell = self.slot_length(p, s)
                R = self.regions[p]
                ch = collar_chart(ell, R.t[s])
                rows.append((p, s, label, ell, ch.t, ch.width, ch.outer_length))
        return rows


def build_surface(c: PantsComplex, fn: FNPoint) -> MarkedSurface:
    return MarkedSurface(c, fn)


# --- holonomy ----------------------------------------------------------------------


@dataclass(frozen=True)
class Tile:
    pants: int
    sheet: int
    g: MobiusTransform = field(default_factory=MobiusTransform.identity)


def _seam_move(s: MarkedSurface, tile: Tile, j: int) -> Tile:
    N = s.hexagons[tile.pants].beta_frames[j]
    if tile.sheet == 0:
        step = N @ N.inverse().conjugate_by_reflection()
    else:
        step = N.conjugate_by_reflection() @ N.inverse()
    return Tile(tile.pants, 1 - tile.sheet, tile.g @ step)


def _cross_move(s: MarkedSurface, tile: Tile, slot: int) -> Tile:
    if tile.sheet != 0:
        raise GeometryError("cuff crossings are defined from sheet 0 only")
    kind, k, other = s.complex.slot_map[(tile.pants, slot)]
    if kind == "free":
        raise GeometryError(f"slot {slot} of pants {tile.pants} is a free boundary")
    if s.fn.lengths[k] == 0:
        raise NodeCrossingError(f"curve {s.complex.curve_name(k)} is a node")
    q, qslot = other
    MP = s.hexagons[tile.pants].alpha_frames[slot]
    MQ = s.hexagons[q].alpha_frames[qslot]
    tau = s.fn.twists[k]
    A = MobiusTransform.dilation(math.exp(tau))
    S = MobiusTransform(0.0, -1.0, 1.0, 0.0)
    return Tile(q, 0, tile.g @ MP @ A @ S @ MQ.inverse())


def develop(s: MarkedSurface, word, start: Tile | None = None) -> Tile:
    """Follow a word of moves ('seam', j) / ('cross', slot) from a tile."""
    tile = start or Tile(0, 0)
    for move, arg in word:
        if move == "seam":
            tile = _seam_move(s, tile, int(arg))
        elif move == "cross":
            tile = _cross_move(s, tile, int(arg))
        else:
            raise ComplexError(f"unknown move {move!r}")
    return tile


def holonomy(s: MarkedSurface, word, pants: int = 0) -> MobiusTransform:
    """Holonomy of a closed word starting on sheet 0 of ``pants``."""
    start = Tile(pants, 0)
    end = develop(s, word, start)
    if (end.pants, end.sheet) != (start.pants, start.sheet):
        raise ComplexError("word does not close up")
    return end.g


def cuff_word(slot: int):
    """Loop once around cuff ``slot``, from and back to sheet 0."""
    return [("seam", PREV[slot]), ("seam", NEXT[slot])]


def curve_word(c: PantsComplex, k: int):
    """(pants, word) for a loop around internal curve k."""
    p, slot = c.curves[k].a
    return p, cuff_word(slot)


def transverse_word(c: PantsComplex, k: int):
    """(pants, word) for a closed curve meeting curve k essentially.

    Self-glued curve: cross once. Otherwise cross, go round another cuff of
    the far pants, cross back and go round another cuff of the near pants.
    """
    (p, i), (q, j) = c.curves[k].a, c.curves[k].b
    if p == q:
        return p, [("cross", i)]
    i2, j2 = (i + 1) % 3, (j + 1) % 3
    return p, [("cross", i)] + cuff_word(j2) + [("cross", j)] + cuff_word(i2)


def dehn_twisted(c: PantsComplex, p: int, word, k: int):
    """The word with every crossing of curve k preceded by a loop around it,
    so that holonomy(word at tau + l) = holonomy(dehn_twisted at tau)."""
    out, pants = [], p
    for move, arg in word:
        if move == "cross":
            kind, kk, other = c.slot_map[(pants, int(arg))]
            if kind == "curve" and kk == k:
                out += cuff_word(int(arg))
            out.append((move, arg))
            pants = other[0]
        else:
            out.append((move, arg))
    return out


def length_from_trace(tr: float) -> float:
    tr = abs(tr)
    return 2.0 * math.acosh(tr / 2.0) if tr > 2.0 else 0.0


def curve_lengths(s: MarkedSurface) -> tuple:
    out = []
    for k in range(len(s.complex.curves)):
        p, w = curve_word(s.complex, k)
        out.append(length_from_trace(holonomy(s, w, p).trace))
    return tuple(out)


# --- convergence of coordinates -------------------------------------------------------


def trend_converges(values, tol: float, zero: float = 1e-12) -> bool:
    """Strictly decreasing tail (exact zeros allowed) and final value <= tol."""
    v = [float(x) for x in values]
    if not v:
        return True
    tail = v[len(v) // 2:] if len(v) > 2 else v
    dec = all(b < a or b <= zero for a, b in zip(tail, tail[1:]))
    return dec and v[-1] <= tol


@dataclass(frozen=True)
class ConvergenceVerdict:
    converges: bool
    residuals: dict           # coordinate label -> list of residuals
    per_coordinate: dict      # coordinate label -> bool
    inert: tuple              # labels of twists ignored at nodes
    tol: float


def converge_check_coordinates(c: PantsComplex, target: FNPoint, sequence,
                               tol: float = 0.1) -> ConvergenceVerdict:
    target.check(c)
    seq = list(sequence)
    for fn in seq:
        try:
            fn.check(c)
        except ComplexError as e:
            raise ComplexError(f"sequence point does not match the complex: {e}") from e
    res, inert = {}, []
    for k in range(len(c.curves)):
        name = c.curve_name(k)
        res[f"length:{name}"] = [abs(fn.lengths[k] - target.lengths[k]) for fn in seq]
        if target.inert(k):
            inert.append(f"twist:{name}")
        else:
            res[f"twist:{name}"] = [abs(fn.twists[k] - target.twists[k]) for fn in seq]
    for k in range(len(c.free)):
        res[f"boundary:b{k}"] = [abs(fn.boundary[k] - target.boundary[k]) for fn in seq]
    per = {key: trend_converges(v, tol) for key, v in res.items()}
    return ConvergenceVerdict(all(per.values()), res, per, tuple(inert), tol)


# --- good representatives -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GoodRepresentative:
    """Standard maps approximant -> target on every pants."""

    target: MarkedSurface
    approximant: MarkedSurface
    pants_maps: tuple
    half_twists: tuple        # per curve, turns applied on each side
    continuity: float         # worst mismatch across curve gluings

    def realized_twist(self, k: int) -> float:
        """Relative twist (turns) realised across curve k."""
        return 2.0 * self.half_twists[k]


def good_representative(target: MarkedSurface, approximant: MarkedSurface,
                        continuity_samples: int = 128) -> GoodRepresentative:
    c = target.complex
    if approximant.complex is not c and approximant.complex != c:
        raise ComplexError("surfaces are built on different pants complexes")
    for k in range(len(c.curves)):
        if approximant.fn.lengths[k] == 0 and target.fn.lengths[k] > 0:
            raise GeometryError(f"approximant has a node at {c.curve_name(k)} but the target does not")
    for k in range(len(c.free)):
        if (approximant.fn.boundary[k] == 0) != (target.fn.boundary[k] == 0):
            raise GeometryError("boundary cusps must match")
    half = []
    for k in range(len(c.curves)):
        if target.fn.inert(k):
            half.append(0.0)
        else:
            half.append(0.5 * (target.fn.theta(k) - approximant.fn.theta(k)))
    maps = []
    for p in range(c.n_pants):
        tw = []
        for s in range(3):
            kind, k, _ = c.slot_map[(p, s)]
            tw.append(half[k] if kind == "curve" else 0.0)
        maps.append(PantsMap(approximant.regions[p], target.regions[p], tuple(tw)))

    # across each glued curve the images of matching points must match
    worst = 0.0
    u = (np.arange(continuity_samples) + 0.5) / continuity_samples
    for k, cv in enumerate(c.curves):
        if target.fn.lengths[k] == 0:
            continue
        (p, i), (q, j) = cv.a, cv.b
        ell_n, ell = approximant.fn.lengths[k], target.fn.lengths[k]
        _, xp = maps[p].collar_maps[i].eval(np.zeros_like(u), u * ell_n)
        _, xq = maps[q].collar_maps[j].eval(np.zeros_like(u),
                                            approximant.fn.twists[k] - u * ell_n)
        gap = np.mod(xp + xq - target.fn.twists[k] + ell / 2, ell) - ell / 2
        worst = max(worst, float(np.abs(gap).max()))
    return GoodRepresentative(target, approximant, tuple(maps), tuple(half), worst)


# --- metric verification -------------------------------------------------------------------


@dataclass(frozen=True)
class CriterionRow:
    n: int
    eps_core: float                  # sup eps of the inverse map on the thick part
    K_core: float
    eps_F: tuple                     # per exhaustion level j
    K_F: tuple
    continuity: float


@dataclass(frozen=True)
class CriterionReport:
    rows: tuple
    levels: tuple
    coordinate: ConvergenceVerdict
    eps_decreasing: bool             # sup eps on the thick part, whole sequence
    K_decreasing: bool
    eps_F_decreasing: tuple          # per level
    K_F_decreasing: tuple
    metric_converges: bool           # conditions on the thick part
    distortion_converges: bool
    exhaustion_converges: bool       # conditions on every F_j
    coherent: bool
    tol: float
    metric_tol: float
    grid: int


def _surface_distortion(rep: GoodRepresentative, grid: int, s_max_nodes: float) -> DistortionReport:
    """Distortion over all pants; collars of target nodes restricted to s <= s_max_nodes."""
    c = rep.target.complex
    parts = []
    for p, m in enumerate(rep.pants_maps):
        smax = []
        for s in range(3):
            kind, k, _ = c.slot_map[(p, s)]
            node = kind == "curve" and rep.target.fn.lengths[k] == 0
            smax.append(s_max_nodes if node else 1.0)
        parts.append(pants_map_distortion(m, grid, tuple(smax)))
    return DistortionReport.merge(parts, grid)


def strictly_decreasing(values, zero: float = 1e-12) -> bool:
    v = [float(x) for x in values]
    return all(b < a or b <= zero for a, b in zip(v, v[1:]))


# finite-difference noise floor of sup-grid deviations (identity maps)
METRIC_FLOOR = 1e-6


def _metric_trend(values, metric_tol: float) -> bool:
    # sup-grid distortions are scale dependent (thin collars), so the tail
    # tolerance is relative to the first term
    v = [float(x) for x in values]
    return bool(v) and trend_converges(v, max(metric_tol * v[0], METRIC_FLOOR), METRIC_FLOOR)


def verify_conditions(target: MarkedSurface, sequence, grid: int = 32,
                      levels=(2, 4, 8), tol: float = 0.1,
                      metric_tol: float = 0.5) -> CriterionReport:
    """Per-n sup metric deviation and distortion of the good representatives
    on the thick part (node collars removed) and on the exhaustion F_j (node
    collars cut at s <= 1 - 1/j), with trend verdicts."""
    seq = list(sequence)
    rows = []
    for n, approx in enumerate(seq):
        rep = good_representative(target, approx)
        thick = _surface_distortion(rep, grid, 0.0)
        eF, kF = [], []
        for j in levels:
            d = _surface_distortion(rep, grid, 1.0 - 1.0 / j)
            eF.append(d.sup_eps_inverse)
            kF.append(d.sup_K)
        rows.append(CriterionRow(n, thick.sup_eps_inverse, thick.sup_K, tuple(eF), tuple(kF),
                                 rep.continuity))
    coord = converge_check_coordinates(target.complex, target.fn, [s.fn for s in seq], tol)
    eps = [r.eps_core for r in rows]
    K1 = [r.K_core - 1.0 for r in rows]
    eF = [[r.eps_F[a] for r in rows] for a in range(len(levels))]
    kF = [[r.K_F[a] - 1.0 for r in rows] for a in range(len(levels))]
    metric = _metric_trend(eps, metric_tol)
    dist = _metric_trend(K1, metric_tol)
    exh = all(_metric_trend(e, metric_tol) and _metric_trend(k, metric_tol)
              for e, k in zip(eF, kF))
    coherent = coord.converges == (metric and dist and exh)
    return CriterionReport(
        tuple(rows), tuple(levels), coord,
        strictly_decreasing(eps, METRIC_FLOOR), strictly_decreasing(K1, METRIC_FLOOR),
        tuple(strictly_decreasing(e, METRIC_FLOOR) for e in eF),
        tuple(strictly_decreasing(k, METRIC_FLOOR) for k in kF),
        metric, dist, exh, coherent, tol, metric_tol, grid)


def grafting_contraction_bound(ell: float) -> float:
    """tanh(-log(l)/2) = (1 - l)/(1 + l) for a short pinched length l."""
    if not 0 < ell < 1:
        raise GeometryError("bound is only meaningful for 0 < l < 1")
    return math.tanh(-math.log(ell) / 2.0)


__all__ = [
    "ComplexError", "NodeCrossingError", "Curve", "PantsComplex", "FNPoint",
    "MarkedSurface", "build_surface", "Tile", "develop", "holonomy", "cuff_word",
    "curve_word", "transverse_word", "dehn_twisted", "length_from_trace",
    "curve_lengths", "trend_converges", "ConvergenceVerdict",
    "converge_check_coordinates", "GoodRepresentative", "good_representative",
    "CriterionRow", "CriterionReport", "verify_conditions", "strictly_decreasing",
    "grafting_contraction_bound", "one_holed_torus", "four_holed_sphere", "genus_two",
]
