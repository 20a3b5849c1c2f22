"""Acceptance criteria 1-8 at their stated tolerances.

Each criterion collects named sub-checks, records one PASS/FAIL line (shown in
the pytest terminal summary) and fails if any sub-check or the runtime limit
fails. Run directly with ``python3 tests/test_acceptance.py`` for the lines alone.
"""
import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from augteich.cli import main as cli_main                                    # noqa: E402
from augteich.collar_hexagon import (                                        # noqa: E402
    collar_chart, collar_quantities, hexagon_from_sides, hexagon_regions,
)
from augteich.hyp_core import IdealPoint                                     # noqa: E402
from augteich.moduli import (                                                # noqa: E402
    Quadrilateral, annulus_modulus, grid_quadrilateral_modulus, grotzsch_mu,
    lambda_of_K, rengel_lower_bound,
)
from augteich.qc_bounds import (                                             # noqa: E402
    dilatation, disc_grid, disc_translation, k_eps, k_hat, k_tilde,
    translate_to_fix_origin,
)
from augteich.standard_maps import (                                         # noqa: E402
    annulus_map, measure_distortion, pants_map, pants_map_distortion,
)
from augteich.teich import (                                                 # noqa: E402
    FNPoint, build_surface, converge_check_coordinates, curve_word, four_holed_sphere,
    genus_two, holonomy, one_holed_torus, verify_conditions,
)
from cli_cases import ERRORS, EXAMPLES                                       # noqa: E402


class Checks:
    def __init__(self):
        self.items = []

    def add(self, name, ok, detail=""):
        self.items.append((name, bool(ok), detail))

    @property
    def failed(self):
        return [(n, d) for n, ok, d in self.items if not ok]


# --- criteria -----------------------------------------------------------------------


def criterion_1(c: Checks):
    c.add("lambda(1)=1", abs(lambda_of_K(1.0) - 1) < 1e-9)
    worst = max(abs(lambda_of_K(K) * lambda_of_K(1 / K) - 1) for K in (1.1, 2.0, 5.0))
    c.add("lambda(K)lambda(1/K)=1", worst < 1e-8, f"{worst:.2e}")
    rs = np.linspace(0.05, 0.95, 9)
    worst = max(abs(grotzsch_mu(r) * grotzsch_mu(math.sqrt(1 - r * r)) - math.pi ** 2 / 4)
                for r in rs)
    c.add("mu functional equation", worst < 1e-8, f"{worst:.2e}")
    r = 1e-4
    gap = abs(grotzsch_mu(r) - math.log(4 / r) / (2 * math.pi))
    c.add("mu small-r asymptotic", gap < 1e-3, f"gap {gap:.4f}")


def criterion_2(c: Checks):
    rng = np.random.default_rng(2)
    worst = 0.0
    for r1, r2 in rng.uniform(1e-6, 0.999, (200, 2)):
        worst = max(worst, abs(annulus_modulus(r1 * r2) - annulus_modulus(r1) - annulus_modulus(r2)))
    c.add("annulus log-additivity", worst < 1e-12, f"{worst:.2e}")
    v = grid_quadrilateral_modulus(Quadrilateral.rectangle(2, 1), 256).value
    c.add("2x1 rectangle", abs(v - 2) / 2 < 0.02, f"{v:.5f}")
    bad = 0
    for _ in range(20):
        ang = np.sort(rng.uniform(0, 2 * math.pi, 4))
        if np.min(np.diff(np.append(ang, ang[0] + 2 * math.pi))) < 0.4:
            ang = np.array([0.0, 0.5, 1.0, 1.5]) * math.pi + rng.uniform(0, 0.3)
        rad = rng.uniform(0.5, 1.5, 4)
        q = Quadrilateral(tuple((float(a * math.cos(t)), float(a * math.sin(t)))
                                for a, t in zip(rad, ang)), (0, 1, 2, 3))
        if grid_quadrilateral_modulus(q, 128).value < rengel_lower_bound(q) * 0.98:
            bad += 1
    c.add("Rengel lower bound", bad == 0, f"{bad}/20 violations")


def criterion_3(c: Checks):
    rng = np.random.default_rng(3)
    worst = 0.0
    for ell, d in zip(rng.uniform(1e-3, 20, 1000), rng.uniform(1e-3, 5, 1000)):
        lp, area = collar_quantities(ell, d)
        worst = max(worst, abs(lp * lp - ell * ell - area * area) / (lp * lp))
    c.add("collar Pythagoras", worst < 1e-12, f"rel {worst:.2e}")
    worst = 0.0
    for ell in (0.1, 1.0, 5.0):
        ch = collar_chart(ell, 1.0)
        worst = max(worst, abs(ch.integrated_area() - ell / (2 * math.sinh(ell / 2))))
    c.add("collar area by integration", worst < 1e-6, f"{worst:.2e}")


def criterion_4(c: Checks):
    b = hexagon_from_sides(1, 1, 1).b
    c.add("equilateral seams", max(b) - min(b) < 1e-10, f"{max(b) - min(b):.2e}")
    rng = np.random.default_rng(4)
    worst = 0.0
    cusps_ok = True
    for k in range(100):
        h = rng.uniform(0.05, 5.0, 3)
        if k % 10 == 0:
            h[k % 3] = 0.0
        hx = hexagon_from_sides(*h)
        for i in range(3):
            if h[i] == 0:
                cusps_ok &= hx.is_cusp(i) and sum(isinstance(v, IdealPoint) for v in hx.vertices) == 2
            else:
                worst = max(worst, abs(hx.measured_alpha(i) - h[i]))
    c.add("vertex round trip", worst < 1e-9 and cusps_ok, f"{worst:.2e}")
    fails = []
    for h in [(a, b_, c_) for a in (0, .1, 1, 5) for b_ in (0, .1, 1, 5) for c_ in (0, .1, 1, 5)]:
        ch = hexagon_regions(hexagon_from_sides(*h)).checks
        if not (ch["tent_margin"] >= 0 and ch["conv_in_core"] and ch["star_shaped"]
                and ch["core_boundary_in_hexagon"]):
            fails.append(h)
    c.add("region containments", not fails, f"{len(fails)}/64 failed")


def criterion_5(c: Checks):
    a = annulus_map(2.0, 2.0, 0.0, t=1.0)
    pts = a.chart_grid(64)
    Ka = measure_distortion(a.eval_halfplane, pts[pts.real > 0]).K
    Kp = pants_map_distortion(pants_map((1, 1.5, 2), (1, 1.5, 2)), 64).K
    dev = max(np.abs(Ka - 1).max(), np.abs(Kp - 1).max())
    c.add("identity K=1", dev < 1e-6, f"{dev:.2e}")
    Ks = []
    for lt in (2.2, 2.02, 2.002):
        m = annulus_map(2.0, lt, 0.0, t=1.0)
        pts = m.chart_grid(64)
        Ks.append(measure_distortion(m.eval_halfplane, pts[pts.real > 0]).sup_K - 1)
    c.add("K-1 strictly decreasing", Ks[0] > Ks[1] > Ks[2] >= 0,
          ", ".join(f"{k:.3e}" for k in Ks))
    gaps = [pants_map(h, ht, tw).interface_gap(256) for h, ht, tw in (
        ((1, 1, 1), (1.2, 0.9, 1.1), (0.3, -0.2, 0.1)),
        ((0, 1, 2), (0, 1.5, 1.5), (0.0, 0.5, 0.0)),
        ((0.3, 0.5, 0.2), (0, 0, 0), (1.0, 1.0, 1.0)))]
    c.add("interface continuity", max(gaps) < 1e-7, f"{max(gaps):.2e}")


def criterion_6(c: Checks):
    rng = np.random.default_rng(6)
    makers = [(one_holed_torus, 1), (four_holed_sphere, 4), (genus_two, 0)]
    worst = 0.0
    for k in range(50):
        make, nb = makers[k % 3]
        cx = make()
        n = len(cx.curves)
        s = build_surface(cx, FNPoint(rng.uniform(0.1, 5, n), rng.uniform(-5, 5, n),
                                      rng.uniform(0.1, 3, nb)))
        for i in range(n):
            p, w = curve_word(cx, i)
            tr = abs(holonomy(s, w, p).trace)
            worst = max(worst, abs(tr - 2 * math.cosh(s.fn.lengths[i] / 2)) / tr)
    c.add("trace identity", worst < 1e-9, f"rel {worst:.2e}")

    cx = one_holed_torus()
    ns = (2, 4, 8, 16)
    target_fn = FNPoint([0.0], [0.0], [1.0])
    seq_fn = [FNPoint([1 / n], [float(n)], [1.0]) for n in ns]
    base = converge_check_coordinates(cx, target_fn, seq_fn).converges
    inert = all(
        converge_check_coordinates(cx, FNPoint([0.0], [t0], [1.0]),
                                   [FNPoint([1 / n], [t], [1.0]) for n, t in zip(ns, ts)]).converges == base
        for t0, ts in ((3.0, (0, 0, 0, 0)), (-7.5, (100, -50, 1, 9)), (0.1, (1e3, 1e-3, -1e3, 0))))
    c.add("node twist inertness", inert)

    target = build_surface(cx, target_fn)
    rep = verify_conditions(target, [build_surface(cx, fn) for fn in seq_fn], grid=64,
                            levels=(2, 4, 8))
    eps = [r.eps_core for r in rep.rows]
    c.add("pinching: coordinates converge", rep.coordinate.converges)
    c.add("pinching: sup eps on thick part strictly decreasing", rep.eps_decreasing,
          ", ".join(f"{e:.3g}" for e in eps))
    KF = [[r.K_F[a] for r in rep.rows] for a in range(len(rep.levels))]
    c.add("pinching: sup K on each F_j strictly decreasing", all(rep.K_F_decreasing),
          "; ".join(f"F{j}: " + ", ".join(f"{k:.3g}" for k in ks) for j, ks in zip(rep.levels, KF)))

    ctrl_target = build_surface(cx, FNPoint([2.0], [0.0], [1.0]))
    ctrl = [build_surface(cx, FNPoint([2.0], [0.4 * (-1) ** n], [1.0])) for n in range(4)]
    crep = verify_conditions(ctrl_target, ctrl, grid=32, levels=(2,))
    c.add("control: agreeing negative verdicts",
          not crep.coordinate.converges and not crep.metric_converges and crep.coherent)


def criterion_7(c: Checks):
    path = [(1 + 1 / m, math.exp(-m)) for m in (4, 8, 16, 32)]
    ok, detail = True, []
    for name, f in (("k_eps", k_eps), ("k_tilde", k_tilde), ("k_hat", lambda K, e: k_hat(K, e).value)):
        v = [f(K, e) for K, e in path]
        ok &= all(x >= 1 for x in v) and all(a > b for a, b in zip(v, v[1:]))
        detail.append(f"{name} {v[-1]:.4g}")
        # continuity: small input perturbations give small changes
        for K, e in path:
            a, b = f(K, e), f(K * (1 + 1e-9), e * (1 + 1e-9))
            ok &= abs(a - b) <= 1e-5 * a
    c.add("bounds >= 1, continuous, decreasing to 1", ok, "; ".join(detail))
    z = np.exp(2j * math.pi * np.arange(256) / 256)
    pts = disc_grid(64, 0.95)
    worst_o, worst_b, infl = 0.0, 0.0, True
    for a in (0.5, 0.3 * np.exp(1.1j), 0.7j):
        h = disc_translation(a)
        g, factor = translate_to_fix_origin(h)
        worst_o = max(worst_o, abs(g(np.array([0j]))[0]))
        worst_b = max(worst_b, float(np.max(np.abs(g(z) - h(z)))))
        infl &= dilatation(g, pts).max() <= factor * dilatation(h, pts).max() * 1.02
    c.add("translation fixes origin", worst_o < 1e-12, f"{worst_o:.1e}")
    c.add("translation keeps boundary", worst_b < 1e-8, f"{worst_b:.1e}")
    c.add("translation distortion inflation", infl)


def criterion_8(c: Checks):
    with tempfile.TemporaryDirectory() as d:
        diffs, codes = [], []
        for k, (argv, code) in enumerate(EXAMPLES):
            texts = []
            for rep in range(2):
                out = Path(d) / f"{k}_{rep}.txt"
                got = cli_main(argv + ["--out", str(out)])
                texts.append(out.read_text() if out.exists() else None)
                if got != code:
                    codes.append(" ".join(argv))
            if texts[0] is None or texts[0] != texts[1]:
                diffs.append(" ".join(argv))
        c.add("byte-identical reports", not diffs and not codes, "; ".join(diffs + codes))
        wrong = []
        for argv, code in ERRORS:
            got = cli_main(argv + ["--out", str(Path(d) / "err.txt")])
            if got != code:
                wrong.append(f"{' '.join(argv)} -> {got}")
        c.add("error exit codes", not wrong, "; ".join(wrong))


CRITERIA = {
    1: (criterion_1, 1.0, "special functions"),
    2: (criterion_2, 30.0, "moduli"),
    3: (criterion_3, 5.0, "collar geometry"),
    4: (criterion_4, 60.0, "hexagons"),
    5: (criterion_5, 120.0, "standard maps"),
    6: (criterion_6, 600.0, "Teichmueller layer"),
    7: (criterion_7, 60.0, "bounds"),
    8: (criterion_8, 60.0, "CLI"),
}


def evaluate(n):
    fn, limit, title = CRITERIA[n]
    c = Checks()
    t0 = time.perf_counter()
    fn(c)
    dt = time.perf_counter() - t0
    c.add(f"runtime < {limit:g} s", dt < limit, f"{dt:.2f} s")
    status = "FAIL" if c.failed else "PASS"
    line = f"criterion {n} ({title}): {status} in {dt:.2f} s"
    if c.failed:
        line += " | failed: " + "; ".join(f"{name} [{det}]" if det else name for name, det in c.failed)
    return c, line


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, acceptance_log):
    c, line = evaluate(n)
    acceptance_log.append(line)
    print(line)
    assert not c.failed, line


if __name__ == "__main__":
    bad = 0
    for n in sorted(CRITERIA):
        c, line = evaluate(n)
        bad += bool(c.failed)
        print(line, flush=True)
    sys.exit(1 if bad else 0)
