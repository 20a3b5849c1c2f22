"""Conformal moduli: annuli, rectangles, quadrilaterals, the Grötzsch modulus
function mu and the distortion function lambda.

Normalisations: an annulus r < |z| < 1 has modulus -log(r)/(2 pi); a
quadrilateral's modulus is the Dirichlet energy of the harmonic function
equal to 0 and 1 on its two a-sides (so the rectangle with a-sides of length a
and b-sides of length b has modulus a/b); mu is the Lehto-Virtanen function
mu(r) = (pi/2) K'(r)/K(r), for which mu(1/sqrt 2) = pi/2 and lambda(1) = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import spsolve
import shapely
from shapely.geometry import LineString, Polygon

SYMMETRIC_R = 1.0 / math.sqrt(2.0)
MU_SYMMETRIC = math.pi / 2


class ModulusDomainError(ValueError):
    pass


class TopologyError(ValueError):
    pass


def annulus_modulus(r: float) -> float:
    if not 0.0 < r < 1.0:
        raise ModulusDomainError(f"inner radius must lie in (0, 1), got {r}")
    return -math.log(r) / (2.0 * math.pi)


def rectangle_modulus(a: float, b: float) -> float:
    """Modulus of R(0, a, a+ib, ib), i.e. a/b."""
    if not (a > 0 and b > 0):
        raise ModulusDomainError("rectangle sides must be positive")
    return a / b


def agm(a: float, b: float, tol: float = 1e-15) -> float:
    """Arithmetic-geometric mean of two positive numbers."""
    if a <= 0 or b <= 0:
        raise ModulusDomainError("agm needs positive arguments")
    for _ in range(100):
        if abs(a - b) <= tol * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def ellipk(k: float) -> float:
    """Complete elliptic integral of the first kind, modulus k (not parameter k^2)."""
    if not 0.0 <= k < 1.0:
        raise ModulusDomainError("elliptic modulus must lie in [0, 1)")
    return math.pi / (2.0 * agm(1.0, math.sqrt((1.0 - k) * (1.0 + k))))


def _complement(r: float) -> float:
    return math.sqrt((1.0 - r) * (1.0 + r))


def grotzsch_mu(r: float) -> float:
    """Modulus of the Grötzsch ring: the unit disc slit along [0, r]."""
    if not 0.0 < r < 1.0:
        raise ModulusDomainError(f"mu is defined on (0, 1), got {r}")
    rc = _complement(r)
    if rc == 0.0:
        raise ModulusDomainError(f"r = {r!r} is indistinguishable from 1")
    # K(r') / K(r) = agm(1, r') / agm(1, r)
    return MU_SYMMETRIC * agm(1.0, rc) / agm(1.0, r)


_LOG_R_MIN = math.log(1e-300)


def _bisect_small_r(m: float, maxiter: int = 200) -> float:
    """r in (0, 1/sqrt 2] with mu(r) = m, for m >= pi/2."""
    lo, hi = _LOG_R_MIN, math.log(SYMMETRIC_R)
    if m > grotzsch_mu(math.exp(lo)):
        raise ModulusDomainError(f"mu^-1({m}) underflows double precision")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if grotzsch_mu(math.exp(mid)) > m:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16:
            break
    return math.exp(0.5 * (lo + hi))


def mu_inverse_pair(m: float) -> tuple[float, float]:
    """(r, sqrt(1 - r^2)) with mu(r) = m, both computed without cancellation.

    Uses mu(r) mu(r') = pi^2/4 to reduce to the branch r <= 1/sqrt 2.
    """
    if not m > 0:
        raise ModulusDomainError(f"mu^-1 needs a positive argument, got {m}")
    if m >= MU_SYMMETRIC:
        r = _bisect_small_r(m)
        return r, _complement(r)
    rc = _bisect_small_r(MU_SYMMETRIC ** 2 / m)
    return _complement(rc), rc


def mu_inverse(m: float) -> float:
    return mu_inverse_pair(m)[0]


def lambda_of_K(K: float) -> float:
    """lambda(K) = mu^-1(pi K / 2)^-2 - 1."""
    if not K > 0:
        raise ModulusDomainError(f"lambda needs K > 0, got {K}")
    r, rc = mu_inverse_pair(math.pi * K / 2.0)
    return (rc / r) ** 2


@dataclass(frozen=True)
class IsoperimetricCheck:
    holds: bool
    slack: float
    ratio: float
    bound: float


def isoperimetric_bound(area_inner: float, area_outer: float,
                        separating_modulus: float) -> IsoperimetricCheck:
    """Check Area(D)/Area(R) <= 1/(1 + 4 pi mod(R \\ D))."""
    if not 0 < area_inner < area_outer:
        raise ModulusDomainError("need 0 < inner area < outer area")
    if separating_modulus < 0:
        raise ModulusDomainError("modulus must be nonnegative")
    ratio = area_inner / area_outer
    bound = 1.0 / (1.0 + 4.0 * math.pi * separating_modulus)
    return IsoperimetricCheck(ratio <= bound, bound - ratio, ratio, bound)


# --- quadrilaterals ----------------------------------------------------------


@dataclass(frozen=True)
class Quadrilateral:
    """Jordan polygon with four marked boundary vertices in cyclic order.

    The a-sides run from vertex 0 to vertex 1 and from vertex 2 to vertex 3.
    """

    boundary: tuple
    vertices: tuple

    def __post_init__(self):
        pts = np.asarray(self.boundary, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 4:
            raise ModulusDomainError("boundary must be a list of >= 4 planar points")
        object.__setattr__(self, "boundary", tuple(map(tuple, pts)))
        v = tuple(int(i) for i in self.vertices)
        if len(v) != 4 or len(set(v)) != 4 or any(not 0 <= i < len(pts) for i in v):
            raise ModulusDomainError("need four distinct vertex indices")
        k = v.index(min(v))
        rolled = v[k:] + v[:k]
        if list(rolled) != sorted(rolled):
            raise ModulusDomainError("vertices are not in cyclic order")
        object.__setattr__(self, "vertices", v)
        poly = self.polygon
        if not poly.is_valid or poly.area <= 0:
            raise ModulusDomainError("boundary is not a simple closed polygon")
        if poly.area < 1e-6 * poly.length ** 2:
            raise ModulusDomainError("degenerate (slit-like) quadrilateral")

    @classmethod
    def rectangle(cls, a: float, b: float) -> "Quadrilateral":
        return cls(((0, 0), (a, 0), (a, b), (0, b)), (0, 1, 2, 3))

    @property
    def polygon(self) -> Polygon:
        return Polygon(self.boundary)

    def side(self, k: int) -> LineString:
        """Boundary polyline from vertex k to vertex k+1 (cyclically)."""
        n = len(self.boundary)
        i, j = self.vertices[k], self.vertices[(k + 1) % 4]
        idx = [i]
        while idx[-1] != j:
            idx.append((idx[-1] + 1) % n)
        return LineString([self.boundary[t] for t in idx])

    @property
    def a_sides(self):
        return self.side(0), self.side(2)

    @property
    def b_sides(self):
        return self.side(1), self.side(3)

    @property
    def area(self) -> float:
        return self.polygon.area


@dataclass(frozen=True)
class ModulusValue:
    value: float
    method: str
    resolution: int | None = None


def rengel_lower_bound(q: Quadrilateral) -> float:
    """s^2/Area with s the Euclidean distance between the b-sides."""
    b1, b2 = q.b_sides
    return b1.distance(b2) ** 2 / q.area


def grid_quadrilateral_modulus(q: Quadrilateral, resolution: int = 256) -> ModulusValue:
    """Resistor-network estimate of the modulus on a rasterised domain.

    Nodes on a lattice inside the polygon, conductances h_perp/h_par scaled by
    the fraction of each dual edge lying inside, Dirichlet 0/1 on nodes within
    0.75 spacings of the a-sides, free (Neumann) elsewhere.
    """
    if resolution < 16:
        raise ModulusDomainError("resolution must be at least 16")
    poly = q.polygon
    xmin, ymin, xmax, ymax = poly.bounds
    # lattice aligned with the bounding box in both directions
    side = max(xmax - xmin, ymax - ymin)
    nx = max(2, round(resolution * (xmax - xmin) / side))
    ny = max(2, round(resolution * (ymax - ymin) / side))
    hx, hy = (xmax - xmin) / nx, (ymax - ymin) / ny
    hs = max(hx, hy)
    X, Y = np.meshgrid(xmin + hx * np.arange(nx + 1), ymin + hy * np.arange(ny + 1),
                       indexing="ij")
    nx, ny = X.shape
    closed = poly.buffer(1e-9 * hs)
    active = shapely.intersects_xy(closed, X, Y)

    t = (np.arange(8) + 0.5) / 8 - 0.5
    rows, cols, wts = [], [], []
    index = -np.ones(X.shape, dtype=np.int64)
    index[active] = np.arange(int(active.sum()))
    for dx, dy in ((1, 0), (0, 1)):
        a = active[: nx - dx, : ny - dy] & active[dx:, dy:]
        i0 = index[: nx - dx, : ny - dy][a]
        i1 = index[dx:, dy:][a]
        mx = X[: nx - dx, : ny - dy][a] + 0.5 * hx * dx
        my = Y[: nx - dx, : ny - dy][a] + 0.5 * hy * dy
        # dual edge is perpendicular to the primal one
        sx = mx[:, None] + (t[None, :] * hx if dy else 0.0)
        sy = my[:, None] + (t[None, :] * hy if dx else 0.0)
        frac = shapely.contains_xy(poly, sx, sy).mean(axis=1)
        scale = hy / hx if dx else hx / hy
        keep = frac > 0
        rows.append(i0[keep])
        cols.append(i1[keep])
        wts.append(scale * frac[keep])
    rows, cols, wts = (np.concatenate(v) for v in (rows, cols, wts))
    n = int(active.sum())
    W = sp.coo_matrix((wts, (rows, cols)), shape=(n, n)).tocsr()
    W = W + W.T

    px, py = X[active], Y[active]
    a1, a2 = q.a_sides
    d1 = shapely.distance(a1, shapely.points(px, py))
    d2 = shapely.distance(a2, shapely.points(px, py))
    # nearest interior nodes to a slanted side can be up to h/sqrt(2) away;
    # 0.75 h catches them without taking a second row on axis-aligned sides
    low = d1 <= 0.75 * hs
    high = d2 <= 0.75 * hs
    if np.any(low & high):
        raise TopologyError("a-sides closer than the grid spacing; raise the resolution")
    if not low.any() or not high.any():
        raise TopologyError("an a-side has no grid nodes")

    ncomp, labels = connected_components(W, directed=False)
    comp = np.unique(labels[low])
    if not np.isin(labels[high], comp).any():
        raise TopologyError("rasterised domain disconnects the two a-sides")
    live = np.isin(labels, comp)

    u = np.zeros(n)
    u[high] = 1.0
    free = live & ~low & ~high
    L = sp.diags(np.asarray(W.sum(axis=1)).ravel()) - W
    Lff = L[free][:, free]
    rhs = -L[free][:, high] @ u[high]
    u[free] = spsolve(Lff.tocsc(), rhs)
    Wc = W.tocoo()
    energy = 0.5 * float(np.sum(Wc.data * (u[Wc.row] - u[Wc.col]) ** 2))
    return ModulusValue(energy, "grid_estimate", resolution)
