"""Closed-form distortion constants and the origin-fixing modification of
quasiconformal self-maps of the unit disc."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .moduli import ModulusDomainError, lambda_of_K, mu_inverse_pair


class BoundDomainError(ValueError):
    pass


class BoundVacuousError(ValueError):
    pass


@dataclass(frozen=True)
class UniversalConstants:
    beta0: float = 2.0
    beta1: float = 1.0

    def __post_init__(self):
        if not (self.beta0 > 1 and self.beta1 > 0):
            raise BoundDomainError(f"need beta0 > 1 and beta1 > 0, got {self.beta0}, {self.beta1}")


DEFAULT_CONSTANTS = UniversalConstants()


@dataclass(frozen=True)
class BoundReport:
    kind: str
    K: float
    eps: float
    constants: UniversalConstants
    intermediates: dict = field(default_factory=dict)
    value: float = 1.0


def _check(K: float, eps: float):
    if not (K >= 1 and math.isfinite(K)):
        raise BoundDomainError(f"K must be >= 1, got {K}")
    if not 0 < eps < 1:
        raise BoundDomainError(f"eps must lie in (0, 1), got {eps}")


def _k_eps(K: float, eps: float, c: UniversalConstants, root: int, weight: float) -> float:
    # (2, 1) gives K_eps, (8, 1/8) the primed variant used for K-hat
    s = eps ** (1.0 / root)
    return K * (1.0 + (c.beta0 - 1.0 + c.beta1 / (1.0 - s) ** 2)
                / (1.0 + weight * math.log(1.0 / eps)))


def k_eps(K: float, eps: float, c: UniversalConstants = DEFAULT_CONSTANTS) -> float:
    _check(K, eps)
    return _k_eps(K, eps, c, 2, 1.0)


def _lambda(K: float) -> float:
    try:
        return lambda_of_K(K)
    except ModulusDomainError as e:
        raise BoundVacuousError(f"bound vacuous: lambda({K:.6g}) overflows") from e


def k_tilde(K: float, eps: float, c: UniversalConstants = DEFAULT_CONSTANTS) -> float:
    return _lambda(k_eps(K, eps, c)) ** 2


def d_bound(K: float, eps: float) -> tuple[float, float]:
    """(d, 1 - d) with d = mu^-1(log(1/eps) / (8 pi K)); 1 - d without cancellation."""
    _check(K, eps)
    m = math.log(1.0 / eps) / (8.0 * math.pi * K)
    d, dc = mu_inverse_pair(m)
    return d, dc * dc / (1.0 + d)


def k_hat(K: float, eps: float, c: UniversalConstants = DEFAULT_CONSTANTS) -> BoundReport:
    _check(K, eps)
    d, one_minus_d = d_bound(K, eps)
    if not one_minus_d > 0:
        raise BoundVacuousError(
            f"bound vacuous: displacement bound d = mu^-1({math.log(1 / eps) / (8 * math.pi * K):.6g})"
            " rounds to 1; decrease eps")
    kp = _k_eps(K, eps, c, 8, 0.125)
    lam = _lambda(kp)
    factor = (1.0 + d) / one_minus_d
    value = lam * lam * factor
    if not math.isfinite(value):
        raise BoundVacuousError("bound vacuous: value overflows")
    return BoundReport("k-hat", K, eps, c,
                       {"k_eps_prime": kp, "lambda": lam, "d": d, "factor": factor}, value)


def k_eps_report(K: float, eps: float, c: UniversalConstants = DEFAULT_CONSTANTS) -> BoundReport:
    v = k_eps(K, eps, c)
    return BoundReport("k-eps", K, eps, c, {"k_eps": v}, v)


def k_tilde_report(K: float, eps: float, c: UniversalConstants = DEFAULT_CONSTANTS) -> BoundReport:
    ke = k_eps(K, eps, c)
    lam = _lambda(ke)
    return BoundReport("k-tilde", K, eps, c, {"k_eps": ke, "lambda": lam}, lam * lam)


def extension_constant(r: float, c: UniversalConstants = DEFAULT_CONSTANTS) -> float:
    if not 0 <= r < 1:
        raise BoundDomainError(f"r must lie in [0, 1), got {r}")
    return c.beta0 + c.beta1 / (1.0 - r) ** 2


# --- translation modification --------------------------------------------------------


def _T(z):
    return 1j * (1 - z) / (1 + z)


def _T_inv(w):
    return (1j - w) / (1j + w)


def translate_to_fix_origin(h, d: float | None = None):
    """Modify a disc self-map h so that it fixes 0 and keeps its boundary values.

    Returns (h_hat, factor) with factor = (1+d)/(1-d), the extra dilatation of
    the vertical stretch conjugated to the disc.
    """
    h0 = complex(np.asarray(h(np.array([0j])))[0])
    if d is None:
        d = abs(h0)
    if not 0 <= d < 1:
        raise BoundDomainError(f"need 0 <= |h(0)| < 1, got {d}")
    rot = h0 / abs(h0) if abs(h0) > 0 else 1.0
    k = (1.0 + d) / (1.0 - d)
    if d == 0:
        return h, 1.0

    def h_hat(z):
        w = _T(np.asarray(h(z), dtype=complex) / rot)
        return rot * _T_inv(w.real + 1j * k * w.imag)

    return h_hat, k


def disc_translation(a: complex):
    """Disc automorphism sending 0 to a."""
    a = complex(a)
    return lambda z: (np.asarray(z, dtype=complex) + a) / (1 + np.conj(a) * np.asarray(z, dtype=complex))


def disc_grid(n: int = 64, r_max: float = 0.95):
    """Polar n x n grid of the disc |z| <= r_max."""
    r = r_max * (np.arange(n) + 0.5) / n
    th = 2 * math.pi * (np.arange(n) + 0.5) / n
    R, TH = np.meshgrid(r, th, indexing="ij")
    return (R * np.exp(1j * TH)).ravel()


def dilatation(f, points, step: float = 1e-6):
    """Pointwise K = (|f_z| + |f_zbar|)/(|f_z| - |f_zbar|) by central differences."""
    z = np.asarray(points, dtype=complex)
    fx = (np.asarray(f(z + step)) - np.asarray(f(z - step))) / (2 * step)
    fy = (np.asarray(f(z + 1j * step)) - np.asarray(f(z - 1j * step))) / (2 * step)
    a = np.abs(0.5 * (fx - 1j * fy))
    b = np.abs(0.5 * (fx + 1j * fy))
    if np.any(a <= b):
        raise BoundDomainError("map is not orientation preserving on the grid")
    return (a + b) / (a - b)


__all__ = [
    "BoundDomainError", "BoundVacuousError", "UniversalConstants", "DEFAULT_CONSTANTS",
    "BoundReport", "k_eps", "k_tilde", "d_bound", "k_hat", "k_eps_report",
    "k_tilde_report", "extension_constant", "translate_to_fix_origin",
    "disc_translation", "disc_grid", "dilatation",
]
