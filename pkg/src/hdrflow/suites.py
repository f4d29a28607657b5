"""Verification suites run by `hdrflow verify`.

Each suite returns (ok, details) with details JSON-ready and fully
determined by the seed.
"""

import random
from itertools import product

from .exactalg import Frac, Poly, span_basis
from .logcurve import INF, MarkedProjLine, LineBundle
from .bundles import (GradedHiggs, splitting_type, max_sub_line, p_curvature, p_curvature_zero_locus,
                      grading_of, higgs_iso_test)
from .cartier import W2LiftChoice, build_atlas, inverse_cartier, cartier, residue_identity_check
from .periodicity import (maximal_higgs, compute_spaces, extension_bundle, cone_member, cone_degree,
                          ker_phi_s, LineSection, intersect_A_K, flow_run, rho, frobenius_theta_map,
                          ks_coords, rho_image_dim, d_obstruction, is_bijective, ordinary_test)
from . import nodal

LAMBDAS = (2, 3, 4)


def four_pointed(lam, p=5):
    return MarkedProjLine(p, [0, 1, INF, lam])


def three_pointed(p):
    return MarkedProjLine(p, [0, 1, INF])


# ----------------------------------------------------------------------
# random inputs

def random_curve(rng, p):
    pts = list(range(2, p))
    rng.shuffle(pts)
    r = rng.randint(3, min(5, p + 1))
    return MarkedProjLine(p, [0, 1, INF] + pts[:r - 3])


def random_graded_higgs(rng, p):
    """A random graded nilpotent Higgs bundle src -> tgt (x) omega_log on a random curve."""
    C = random_curve(rng, p)
    F = C.F
    s, q = rng.randint(-2, 3), rng.randint(-3, 3)
    if rng.random() < 0.5:
        src = LineBundle.O(C.atlas, s)
    else:
        src = C.omega(1, s - (C.r - 2))
    tgt = LineBundle.O(C.atlas, q)
    bound = q - s + C.r - 2
    phi = Poly(F, [rng.randrange(p) for _ in range(bound + 1)]) if bound >= 0 else Poly(F)
    return GradedHiggs(C, src, tgt, Frac(phi, _reduced=True))


def random_choice(rng, C):
    return W2LiftChoice(C, {a: rng.randrange(C.p) for a in C.finite})


def random_unipotent_gauge(rng, C):
    F = C.F
    one, zero = Frac.const(F, 1), Frac.const(F, 0)
    Q = {}
    for i in C.charts:
        f = Frac(Poly(F, [rng.randrange(C.p) for _ in range(3)]), _reduced=True)
        if i == INF:
            f = f.invert_coordinate()
        Q[i] = ((one, f), (zero, one)) if rng.random() < 0.5 else ((one, zero), (f, one))
    return Q


def random_section(rng, F, e):
    while True:
        P = Poly(F, [rng.randrange(F.p) for _ in range(e + 1)])
        if not P.is_zero():
            return LineSection(P, e)


def random_section_pair(rng, F, e):
    """Two distinct sections of O(e); every other pair shares a random factor."""
    while True:
        if rng.random() < 0.5:
            return random_section(rng, F, e), random_section(rng, F, e)
        k = rng.randint(1, e)
        common = Poly(F, [rng.randrange(F.p) for _ in range(k)] + [1])
        rest = [Poly(F, [rng.randrange(F.p) for _ in range(e - k + 1)]) for _ in range(2)]
        if any(r.is_zero() for r in rest) or rest[0] == rest[1]:
            continue
        return LineSection(common * rest[0], e), LineSection(common * rest[1], e)


def section_dim(E):
    return E.curve.p * E.src.d - cone_degree(E)


# ----------------------------------------------------------------------
# suites

def suite_three_pointed(seed=0):
    rows = []
    ok = True
    for p in (5, 7):
        C = three_pointed(p)
        E = maximal_higgs(C)
        sp = compute_spaces(E)
        H0 = extension_bundle(sp.xi_base, E)
        split = splitting_type(H0)
        w = cone_member(sp.xi_base, E, split)
        div = w.s.divisor()
        at_marked = {str(P): str(P) not in div for P in C.marked}
        good = (sp.ambient_dim == p - 1 and sp.dim_W_F == 0 and sp.dim_B == 1 and sp.dim_A == 0
                and rho_image_dim(E) == 0 and any(sp.xi_base)
                and split == ((p + 1) // 2, (p - 1) // 2) and all(at_marked.values()))
        ok &= good
        rows.append({"p": p, "ambient": sp.ambient_dim, "W_F": sp.dim_W_F, "B": sp.dim_B, "A": sp.dim_A,
                     "xi0_nonzero": any(sp.xi_base), "splitting": list(split),
                     "s_nonzero_at": at_marked, "ok": good})
    return ok, rows


def suite_whole_cone(seed=0):
    C = three_pointed(5)
    E = maximal_higgs(C)
    n = compute_spaces(E).ambient_dim
    c = cone_degree(E)
    below = 0
    least = None
    for xi in product(range(5), repeat=n):
        d1 = splitting_type(extension_bundle(list(xi), E))[0]
        least = d1 if least is None else min(least, d1)
        below += d1 < c
    return below == 0, {"classes": 5 ** n, "c": c, "min_d1": least, "outside_cone": below}


def suite_four_pointed(seed=0):
    rng = random.Random(seed)
    rows = []
    ok = True
    for lam in LAMBDAS:
        C = four_pointed(lam)
        E = maximal_higgs(C)
        sp = compute_spaces(E)
        e = section_dim(E)
        kdims = [len(ker_phi_s(random_section(rng, C.F, e), E)) for _ in range(20)]
        wf_in_K = []
        for coeffs in product(range(5), repeat=sp.dim_W_F):
            w = [0] * sp.ambient_dim
            for c, v in zip(coeffs, sp.W_F):
                w = [C.F.add(x, C.F.mul(c, y)) for x, y in zip(w, v)]
            if cone_member(w, E) is not None:
                wf_in_K.append(list(coeffs))
        hits = intersect_A_K(E, 4, stop_at_first=True)
        period = None
        if hits:
            h = hits[0]
            trace = flow_run(h["E"], W2LiftChoice(h["curve"], h["eps"]), 3)
            period = trace.period
        good = (sp.ambient_dim == 9 and sp.dim_W_F == 1 and sp.dim_A == 1 and sp.dim_B == 2
                and rho_image_dim(E) == 1
                and all(k == 4 for k in kdims) and wf_in_K == [[0] * sp.dim_W_F]
                and bool(hits) and period == 1)
        ok &= good
        rows.append({"lambda": lam, "ambient": sp.ambient_dim, "W_F": sp.dim_W_F, "A": sp.dim_A,
                     "B": sp.dim_B, "ker_dims": kdims, "W_F_cap_K": wf_in_K,
                     "hit": {"m": hits[0]["m"], "eps": {str(k): hits[0]["curve"].F.to_str(v)
                                                        for k, v in hits[0]["eps"].items()}}
                     if hits else None, "period": period, "ok": good})
    return ok, rows


def suite_torsor(seed=0):
    rows = []
    ok = True
    for lam in LAMBDAS:
        C = four_pointed(lam)
        E = maximal_higgs(C)
        F = C.F
        fm = frobenius_theta_map(E)
        bad = []
        for eps, nu in product(range(5), repeat=2):
            r0 = rho(W2LiftChoice(C, {lam: eps}), E).coords()
            r1 = rho(W2LiftChoice(C, {lam: F.add(eps, nu)}), E).coords()
            if [F.sub(a, b) for a, b in zip(r1, r0)] != fm(ks_coords(C, {lam: nu})):
                bad.append([eps, nu])
        ok &= not bad
        rows.append({"lambda": lam, "pairs": 25, "failures": bad})
    return ok, rows


def round_trip_case(E, choice, Q):
    """(iso ok, residue identity ok) for one gauged round trip."""
    Hf = inverse_cartier(E.to_higgs(), build_atlas(E.curve, choice)).gauge(Q)
    psi = p_curvature(Hf)
    res_ok = residue_identity_check(Hf, psi)
    E2 = cartier(Hf, build_atlas(E.curve, choice), psi)
    split_ok = splitting_type(E2.bundle) == tuple(sorted(E.degrees(), reverse=True))
    if E.phi.is_zero():
        return split_ok, res_ok
    return split_ok and higgs_iso_test(grading_of(E2), E), res_ok


def suite_round_trip(seed=0, count=50):
    rows = []
    ok = True
    for p in (3, 5, 7):
        rng = random.Random("%d-%d" % (seed, p))
        iso_fail, res_fail = 0, 0
        for _ in range(count):
            E = random_graded_higgs(rng, p)
            choice = random_choice(rng, E.curve)
            Q = random_unipotent_gauge(rng, E.curve)
            iso, res = round_trip_case(E, choice, Q)
            iso_fail += not iso
            res_fail += not res
        ok &= iso_fail == 0 and res_fail == 0
        rows.append({"p": p, "cases": count, "iso_failures": iso_fail, "residue_failures": res_fail})
    return ok, rows


def suite_p_curvature(seed=0):
    rng = random.Random(seed)
    rows = []
    ok = True
    for p in (3, 5, 7):
        for C in (three_pointed(p), MarkedProjLine(p, [0, 1, INF, 2])):
            E = maximal_higgs(C)
            for choice in (W2LiftChoice(C), random_choice(rng, C)):
                Hf = inverse_cartier(E.to_higgs(), build_atlas(C, choice))
                zeros = p_curvature_zero_locus(Hf)
                ok &= not zeros
                rows.append({"p": p, "r": C.r, "eps": choice.to_dict(),
                             "zeros": {str(k): v.to_str() for k, v in zeros.items()}})
    return ok, rows


def nodal_report(curve, p):
    dims = nodal.h1_dims(curve, p)
    glued = nodal.base_flat_bundle(curve, p)
    inter = nodal.solve_unique_intersection(glued)
    F = glued.F
    expected = [F.div(F.neg(2), b) for b, _ in glued.b]
    scan = nodal.mu_scan(glued) if curve.delta <= 3 and p <= 7 else None
    ordinary = nodal.nodal_ordinary(glued)
    tors = inter.torsion
    parity = tors.is_trivial() if ((p + 1) // 2) % 2 else tors.square().is_trivial()
    good = (dims.agree() and inter.mu == expected and (scan is None or scan == [inter.mu])
            and ordinary and parity)
    return good, {"g": curve.g, "r": curve.r, "p": p, "dims": dims.to_dict(), "b": glued.b_values(),
                  "mu": inter.mu, "mu_scan_solutions": None if scan is None else len(scan),
                  "ordinary": ordinary, "two_torsion": tors.to_dict(), "ok": good}


def suite_nodal(seed=0):
    rows = []
    ok = True
    for curve in (nodal.theta_graph(), nodal.necklace()):
        for p in (5, 7):
            good, row = nodal_report(curve, p)
            ok &= good
            rows.append(row)
    return ok, rows


def suite_kernel_intersection(seed=0):
    rng = random.Random(seed)
    C = four_pointed(2)
    E = maximal_higgs(C)
    F = C.F
    e = section_dim(E)
    n = compute_spaces(E).ambient_dim
    rows = []
    ok = True
    for _ in range(30):
        s, s2 = random_section_pair(rng, F, e)
        k1, k2 = ker_phi_s(s, E), ker_phi_s(s2, E)
        inter = len(k1) + len(k2) - len(span_basis(F, k1 + k2, n))
        g = s.gcd_degree(s2)
        ok &= inter == g
        rows.append([s.poly.to_str(), s2.poly.to_str(), inter, g])
    return ok, rows


def _cone_verdicts(E):
    sp = compute_spaces(E)
    pts = [sp.point([c]) for c in range(E.curve.p)]
    return sp.xi_base, pts, [cone_member(x, E) is not None for x in pts]


def suite_twist(seed=0):
    rows = []
    ok = True
    for lam in LAMBDAS:
        E = maximal_higgs(four_pointed(lam))
        base = _cone_verdicts(E)
        for n in range(-2, 3):
            same = _cone_verdicts(E.twist(n)) == base
            ok &= same
            rows.append({"lambda": lam, "n": n, "verdicts": base[2], "same": same})
    return ok, rows


def suite_obstruction(seed=0):
    rows = []
    ok = True
    for lam in LAMBDAS:
        E = maximal_higgs(four_pointed(lam))
        for h in intersect_A_K(E, 1):
            at = build_atlas(h["curve"], W2LiftChoice(h["curve"], h["eps"]))
            Hf = inverse_cartier(h["E"].to_higgs(), at)
            fil = max_sub_line(Hf.bundle)
            bij = is_bijective(d_obstruction(h["E"], Hf, fil))
            ordi = ordinary_test(h["witness"].s, h["E"])
            ok &= bij == ordi
            rows.append({"lambda": lam, "eps": {str(k): v for k, v in h["eps"].items()},
                         "bijective": bij, "ordinary": ordi})
    return ok and bool(rows), rows


SUITES = [
    ("three-pointed line", suite_three_pointed),
    ("periodic cone is everything on (0,3)", suite_whole_cone),
    ("four-pointed line", suite_four_pointed),
    ("torsor identity", suite_torsor),
    ("round trip", suite_round_trip),
    ("p-curvature nowhere zero", suite_p_curvature),
    ("nodal curves", suite_nodal),
    ("kernel intersection law", suite_kernel_intersection),
    ("twist invariance", suite_twist),
    ("obstruction differential", suite_obstruction),
]


def run_all(seed=0):
    out = []
    for k, (name, fn) in enumerate(SUITES, 1):
        ok, details = fn(seed)
        out.append({"id": k, "name": name, "pass": bool(ok), "details": details})
    return out
