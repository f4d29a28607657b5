"""The ten end-to-end checks, each printed as one PASS/FAIL line."""
import time

from hdrflow import suites

SEED = 0


def run(k, fn, check):
    start = time.perf_counter()
    ok, details = fn(SEED)
    ok = bool(ok) and check(details)
    name = suites.SUITES[k - 1][0]
    print("%s criterion %d: %s (%.1fs)" % ("PASS" if ok else "FAIL", k, name, time.perf_counter() - start))
    assert ok, details


def test_criterion_1_three_pointed_line():
    def check(rows):
        return [r["p"] for r in rows] == [5, 7] and all(
            r["ambient"] == r["p"] - 1 and r["W_F"] == 0 and r["B"] == 1 and r["xi0_nonzero"]
            and r["splitting"] == [(r["p"] + 1) // 2, (r["p"] - 1) // 2]
            and len(r["s_nonzero_at"]) == 3 and all(r["s_nonzero_at"].values())
            for r in rows)
    run(1, suites.suite_three_pointed, check)


def test_criterion_2_whole_space_on_three_points():
    run(2, suites.suite_whole_cone, lambda d: d["classes"] == 5 ** 4 and d["outside_cone"] == 0
        and d["min_d1"] >= 3)


def test_criterion_3_four_pointed_line():
    def check(rows):
        return [r["lambda"] for r in rows] == [2, 3, 4] and all(
            r["ambient"] == 9 and r["W_F"] == 1 and r["A"] == 1 and r["B"] == 2
            and r["ker_dims"] == [4] * 20 and r["W_F_cap_K"] == [[0]]
            and r["hit"] is not None and r["hit"]["m"] <= 4 and r["period"] == 1
            for r in rows)
    run(3, suites.suite_four_pointed, check)


def test_criterion_4_torsor_identity():
    run(4, suites.suite_torsor, lambda rows: len(rows) == 3
        and all(r["pairs"] == 25 and not r["failures"] for r in rows))


def test_criterion_5_round_trip():
    run(5, suites.suite_round_trip, lambda rows: [r["p"] for r in rows] == [3, 5, 7] and all(
        r["cases"] == 50 and r["iso_failures"] == 0 and r["residue_failures"] == 0 for r in rows))


def test_criterion_6_p_curvature_nowhere_zero():
    run(6, suites.suite_p_curvature, lambda rows: {r["p"] for r in rows} == {3, 5, 7}
        and all(not r["zeros"] for r in rows))


def test_criterion_7_nodal_curves():
    def check(rows):
        seen = {(r["g"], r["r"], r["p"]) for r in rows}
        want = {(g, r, p) for g, r in ((2, 0), (1, 2)) for p in (5, 7)}
        parity = all(r["two_torsion"]["square_trivial"] for r in rows) and all(
            r["two_torsion"]["trivial"] for r in rows if r["p"] == 5)
        return seen == want and parity and all(r["ok"] and r["mu_scan_solutions"] == 1 for r in rows)
    run(7, suites.suite_nodal, check)


def test_criterion_8_kernel_intersection_law():
    run(8, suites.suite_kernel_intersection, lambda rows: len(rows) == 30
        and all(r[2] == r[3] for r in rows))


def test_criterion_9_twist_invariance():
    run(9, suites.suite_twist, lambda rows: len(rows) == 15 and all(r["same"] for r in rows))


def test_criterion_10_obstruction_differential():
    run(10, suites.suite_obstruction, lambda rows: bool(rows)
        and all(r["bijective"] == r["ordinary"] for r in rows))
