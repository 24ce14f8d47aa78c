"""Acceptance criteria, one test and one printed PASS/FAIL line each.

The lines are collected in ``RESULTS`` and echoed by the terminal summary
hook in ``conftest.py``; running this file directly prints them as well.
Ruspini-75 and Bongartz-287 coordinates are not bundled: fetch them with
``scripts/fetch_orlib.py`` into ``tests/data/``.
"""

from __future__ import annotations

import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from invloc.core import NormTag, Point, objective
from invloc.forward import centroid, weighted_median, weiszfeld
from invloc.inverse import (
    StopKind,
    StopReason,
    StopRule,
    baseline_sqeuclid,
    isflp1,
    isflp2,
    probe_feasibility,
)
from invloc.io import attach_random_params, load_xy_points

from conftest import eighteen, example1

DATA = Path(__file__).parent / "data"
RESULTS: list[str] = []

GAP = StopRule(StopKind.RELATIVE_GAP, 0.01)
DIST = StopRule(StopKind.TARGET_DISTANCE, 1e-4)


def verdict(number: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _best_time(fn, repeat=20):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


def test_criterion_1_forward_solvers():
    c1, t1 = _best_time(lambda: centroid(example1()))
    c18, t2 = _best_time(lambda: centroid(eighteen()))
    m1, t3 = _best_time(lambda: weighted_median(example1(NormTag.RECTILINEAR)))
    m18, t4 = _best_time(lambda: weighted_median(eighteen(NormTag.RECTILINEAR)))
    wz, t5 = _best_time(lambda: weiszfeld(example1(NormTag.EUCLIDEAN)))
    checks = {
        "centroid ex1": abs(c1.x + 0.1667) <= 5e-5 and abs(c1.y - 0.8333) <= 5e-5,
        "centroid 18": abs(c18.x - 5.2750) <= 5e-5 and abs(c18.y - 4.6000) <= 5e-5,
        "l1 median ex1": m1 == Point(1, 0),
        "l1 median 18": m18 == Point(5, 5),
        "weiszfeld ex1": abs(wz.location.x - 0.9768) <= 1e-3 and abs(wz.location.y - 0.0049) <= 1e-3,
        "< 1 ms": max(t1, t2, t3, t4, t5) < 1e-3,
    }
    failed = [k for k, v in checks.items() if not v]
    verdict(1, not failed,
            f"weiszfeld=({wz.location.x:.4f}, {wz.location.y:.4f}) slowest={1e3 * max(t1, t2, t3, t4, t5):.3f}ms"
            + (f" failed: {', '.join(failed)}" if failed else ""))


def test_criterion_2_baseline_example1():
    t0 = time.perf_counter()
    rep = baseline_sqeuclid(example1(), Point(0, 1))
    elapsed = time.perf_counter() - t0
    c = rep.final_coords
    f = objective(rep.final_instance, Point(0, 1))
    ok = (np.allclose(c[0], [1.3333, 0], atol=1e-4) and np.allclose(c[3], [0, 0.5], atol=1e-4)
          and np.allclose(c[1:3], example1().coords[1:3]) and abs(f - 154.1667) <= 1e-3
          and abs(rep.accumulated_cost - 1.4714) <= 1e-3 and elapsed < 0.1)
    verdict(2, ok, f"P1=({c[0, 0]:.4f}, {c[0, 1]:.4f}) P4=({c[3, 0]:.4f}, {c[3, 1]:.4f}) "
                   f"F={f:.4f} cost={rep.accumulated_cost:.4f} time={elapsed:.4f}s")


def test_criterion_3_baseline_eighteen():
    rep = baseline_sqeuclid(eighteen(), Point(2, 2))
    verdict(3, abs(rep.accumulated_cost - 78.3333) <= 1e-3, f"cost={rep.accumulated_cost:.4f}")


def test_criterion_4_isflp_example1_sq():
    t0 = time.perf_counter()
    r1 = isflp1(example1(), Point(0, 1), DIST)
    r2 = isflp2(example1(), Point(0, 1), DIST)
    elapsed = time.perf_counter() - t0
    same = len(r1.iterations) == len(r2.iterations) and all(
        np.allclose(a.coords, b.coords, atol=1e-9) for a, b in zip(r1.iterations, r2.iterations))
    ok = True
    for r in (r1, r2):
        f = objective(r.final_instance, Point(0, 1))
        ok &= (r.num_iterations <= 30 and abs(r.accumulated_cost - 1.4709) <= 0.02
               and abs(f - 154.168) <= 0.01)
    verdict(4, ok and same and elapsed < 5,
            f"iterations={r1.num_iterations}/{r2.num_iterations} cost={r1.accumulated_cost:.4f}"
            f"/{r2.accumulated_cost:.4f} F={objective(r1.final_instance, Point(0, 1)):.4f} "
            f"identical={same} time={elapsed:.2f}s")


def test_criterion_5_isflp_eighteen_sq():
    parts, ok = [], True
    for solver in (isflp1, isflp2):
        r = solver(eighteen(), Point(2, 2), DIST)
        ok &= abs(r.accumulated_cost - 78.3333) <= 0.005 * 78.3333 and r.num_iterations <= 40
        parts.append(f"{solver.__name__} cost={r.accumulated_cost:.4f} iterations={r.num_iterations}")
    verdict(5, ok, "; ".join(parts))


def test_criterion_6_rectilinear_example1():
    parts, ok = [], True
    for solver in (isflp1, isflp2):
        r = solver(example1(NormTag.RECTILINEAR), Point(0, 1), GAP)
        last = r.last
        ok &= (last.gap <= 0.01 and abs(last.median.y - 0.935) <= 0.01
               and abs(last.median_value - 32.13) <= 0.1
               and abs(r.accumulated_cost - 5.68) <= 0.15 * 5.68)
        parts.append(f"{solver.__name__} gap={last.gap:.4f} y={last.median.y:.4f} "
                     f"F={last.median_value:.4f} cost={r.accumulated_cost:.4f}")
    verdict(6, ok, "; ".join(parts))


def test_criterion_7_euclidean_example1():
    parts, ok = [], True
    for solver in (isflp1, isflp2):
        r = solver(example1(NormTag.EUCLIDEAN), Point(0, 1), GAP)
        last = r.last
        slack = probe_feasibility(r.final_instance, Point(0, 1), extra=[last.median])
        ok &= (last.gap <= 0.01 and abs(r.accumulated_cost - 5.7684) <= 0.15 * 5.7684
               and slack <= last.gap * last.target_value)
        parts.append(f"{solver.__name__} gap={last.gap:.4f} cost={r.accumulated_cost:.4f} "
                     f"net={r.net_cost:.4f} probe_slack={slack:.4f}")
    verdict(7, ok, "; ".join(parts))


PROPERTY_TESTS = [
    "tests/test_inverse.py::test_feasible_after_tight_stop",
    "tests/test_inverse.py::test_fixpoint_stop_is_feasible",
    "tests/test_inverse.py::test_target_at_median_stops_immediately",
    "tests/test_inverse.py::test_baseline_bounds_isflp_cost",
    "tests/test_forward.py::test_weiszfeld_monotone_descent",
    "tests/test_subproblem.py::test_sqeuclid_matches_grid_oracle",
    "tests/test_subproblem.py::test_ccp_one_site_close_to_grid_oracle",
    "tests/test_linprog.py::test_deterministic",
    "tests/test_linprog.py::test_cost_scaling_keeps_argmin",
    "tests/test_linprog.py::test_matches_vertex_enumeration",
    "tests/test_io.py::test_format_parse_round_trip",
]


def test_criterion_8_property_suites():
    root = Path(__file__).parent.parent
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *PROPERTY_TESTS],
                          cwd=root, capture_output=True, text=True)
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr.strip()
    verdict(8, proc.returncode == 0, tail)


RUSPINI_TARGETS = [(50, 50), (-80, -20), (-20, 80)]
BONGARTZ_TARGETS = [(15, 35), (20, 29), (50, 45)]
EIGHTEEN_TARGETS = [(7, 7), (-3, -5)]
SEED = 42


def _large_instances():
    out = [("18-point", eighteen(), EIGHTEEN_TARGETS)]
    missing = []
    for name, fname, targets in (("Ruspini-75", "ruspini75.txt", RUSPINI_TARGETS),
                                 ("Bongartz-287", "bongartz287.txt", BONGARTZ_TARGETS)):
        path = DATA / fname
        if path.exists():
            pts = load_xy_points(path.read_text())
            out.append((name, attach_random_params(pts, SEED, 1.0, 10.0), targets))
        else:
            missing.append(name)
    return out, missing


def test_criterion_9_large_instances():
    instances, missing = _large_instances()
    failures, notes = [], []
    worst_sq = 0.0
    for name, inst, targets in instances:
        for t in targets:
            target = Point(*t)
            for norm in NormTag:
                stop = DIST if norm is NormTag.SQUARED_EUCLIDEAN else GAP
                for solver in (isflp1, isflp2):
                    r = solver(inst.with_norm(norm), target, stop)
                    if r.stop_reason is StopReason.SUBPROBLEM_FAILED:
                        failures.append(f"{name} {t} {norm.value} {solver.__name__} SubproblemFailed")
                    if norm is NormTag.SQUARED_EUCLIDEAN:
                        base = baseline_sqeuclid(inst, target).accumulated_cost
                        diff = abs(r.accumulated_cost - base)
                        worst_sq = max(worst_sq, diff)
                        if diff > 1e-6:
                            failures.append(f"{name} {t} {solver.__name__} sq cost {r.accumulated_cost:.6g} "
                                            f"vs baseline {base:.6g}")
            notes.append(f"{name} {t}")
    if missing:
        failures.append("data missing: " + ", ".join(missing))
    detail = f"{len(notes)} pairs run, worst sq-vs-baseline gap={worst_sq:.3g}"
    if failures:
        detail += f"; {len(failures)} problems: " + " | ".join(failures)
    verdict(9, not failures, detail)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
