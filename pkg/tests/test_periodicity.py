import random
from itertools import product

import pytest

from hdrflow.exactalg import Frac, Poly, field, span_basis
from hdrflow.logcurve import INF, MarkedProjLine, LineBundle
from hdrflow.bundles import GradedHiggs, max_sub_line
from hdrflow.cartier import W2LiftChoice, build_atlas, inverse_cartier
from hdrflow.periodicity import (maximal_higgs, compute_spaces, rho, rho_formula, rho_image_dim,
                                 cone_degree, LineSection, ker_phi_s, phi_s, cone_member,
                                 intersect_A_K, flow_run, ordinary_test,
                                 obstruction_multiplier, d_obstruction, is_bijective)
from hdrflow.suites import random_choice, random_section, random_section_pair, section_dim


def curve(p, r):
    return MarkedProjLine(p, [0, 1, INF] + list(range(2, r - 1)))


# rho

@pytest.mark.parametrize("p,r", [(3, 4), (5, 3), (5, 4), (5, 5), (7, 4), (7, 5)])
def test_rho_matches_closed_form(p, r):
    C = curve(p, r)
    E = maximal_higgs(C)
    rng = random.Random(p * r)
    for _ in range(4):
        ch = random_choice(rng, C)
        assert rho(ch, E).coords() == rho_formula(ch, E).coords()


@pytest.mark.parametrize("lam", [2, 3, 4])
def test_rho_never_meets_frobenius_image(lam):
    C = MarkedProjLine(5, [0, 1, INF, lam])
    E = maximal_higgs(C)
    sp = compute_spaces(E)
    for eps in range(5):
        xi = rho(W2LiftChoice(C, {lam: eps}), E).coords()
        assert sp.in_A(xi) and not sp.in_W_F(xi) and sp.in_B(xi)


# spaces

@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("r", [3, 4, 5, 6])
def test_space_dimensions(p, r):
    if r > p + 1:
        pytest.skip("not enough rational points")
    C = curve(p, r)
    E = maximal_higgs(C)
    sp = compute_spaces(E)
    # h^1(O(d)) = -d - 1 with d = -p(r - 2)
    assert sp.ambient_dim == p * (r - 2) - 1
    assert sp.dim_W_F == sp.dim_A == r - 3
    assert sp.dim_B == r - 2
    assert all(sp.invariants().values())
    assert rho_image_dim(E) == sp.dim_A


def test_named_examples():
    sp = compute_spaces(maximal_higgs(curve(5, 4)))
    assert (sp.ambient_dim, sp.dim_W_F, sp.dim_A, sp.dim_B) == (9, 1, 1, 2)
    sp = compute_spaces(maximal_higgs(curve(5, 3)))
    assert (sp.ambient_dim, sp.dim_W_F, sp.dim_A, sp.dim_B) == (4, 0, 0, 1)
    assert any(sp.xi_base)
    sp = compute_spaces(maximal_higgs(curve(5, 6)))
    assert sp.dim_A == 3


# kernels

def test_kernel_dimension_by_brute_force():
    # (0,4) over F_3: ambient F_3^5, sections of O(2)
    C = curve(3, 4)
    E = maximal_higgs(C)
    F = C.F
    e = section_dim(E)
    assert e == 2
    rng = random.Random(3)
    for _ in range(6):
        s = random_section(rng, F, e)
        zeros = sum(1 for xi in product(range(3), repeat=5) if not any(phi_s(s, E, list(xi))))
        assert zeros == 3 ** len(ker_phi_s(s, E)) == 3 ** e


@pytest.mark.parametrize("p,r", [(5, 4), (5, 5), (7, 4), (3, 4)])
def test_kernel_dimension_is_divisor_degree(p, r):
    C = curve(p, r)
    E = maximal_higgs(C)
    e = section_dim(E)
    rng = random.Random(p + r)
    for _ in range(10):
        s = random_section(rng, C.F, e)
        ker = ker_phi_s(s, E)
        assert len(ker) == e
        assert all(not any(phi_s(s, E, v)) for v in ker)


def test_zero_section_rejected():
    with pytest.raises(ValueError):
        LineSection(Poly(field(5)), 3)
    with pytest.raises(ValueError):
        LineSection(Poly(field(5), [1, 1]), 0)


def test_kernel_intersection_follows_common_divisor():
    C = curve(5, 4)
    E = maximal_higgs(C)
    F = C.F
    e = section_dim(E)
    n = compute_spaces(E).ambient_dim
    rng = random.Random(9)
    for _ in range(12):
        s, s2 = random_section_pair(rng, F, e)
        k1, k2 = ker_phi_s(s, E), ker_phi_s(s2, E)
        assert len(k1) + len(k2) - len(span_basis(F, k1 + k2, n)) == s.gcd_degree(s2)
    # coprime divisors, one with a zero at infinity
    t = Poly.monomial(F, 1)
    a = LineSection(Poly.from_roots(F, [0, 1, 2]), 4)
    b = LineSection(Poly.from_roots(F, [3, 4, 3, 4]), 4)
    assert a.gcd_degree(b) == 0
    assert len(span_basis(F, ker_phi_s(a, E) + ker_phi_s(b, E), n)) == 8
    assert LineSection(t, 4).divisor() == {"0": 1, INF: 3}


@pytest.mark.parametrize("p,r", [(3, 3), (3, 4), (5, 3), (5, 4), (5, 5), (5, 6), (7, 4)])
def test_dim_A_plus_dim_K_is_ambient(p, r):
    C = curve(p, r)
    E = maximal_higgs(C)
    sp = compute_spaces(E)
    e = section_dim(E)
    s = random_section(random.Random(p * r), C.F, e)
    # P(H^0(O(e))) has dimension e, each kernel has dimension deg Div(s)
    assert sp.dim_A + e + len(ker_phi_s(s, E)) == sp.ambient_dim


# cone

def test_three_pointed_cone_is_everything_on_a_sample():
    C = curve(5, 3)
    E = maximal_higgs(C)
    rng = random.Random(0)
    for _ in range(20):
        xi = [rng.randrange(5) for _ in range(4)]
        assert cone_member(xi, E) is not None


def test_four_pointed_cone_examples():
    C = curve(5, 4)
    E = maximal_higgs(C)
    sp = compute_spaces(E)
    w = cone_member([0] * 9, E)
    assert w is not None and w.split == (5, -5)
    for c in range(1, 5):
        assert cone_member([c * x % 5 for x in sp.W_F[0]], E) is None


@pytest.mark.parametrize("p,r", [(5, 3), (5, 4), (7, 4)])
def test_witness_section_kills_its_class(p, r):
    C = curve(p, r)
    E = maximal_higgs(C)
    sp = compute_spaces(E)
    rng = random.Random(p)
    found = 0
    for _ in range(30):
        xi = [rng.randrange(p) for _ in range(sp.ambient_dim)]
        w = cone_member(xi, E)
        if w is None:
            continue
        found += 1
        assert w.split[0] >= cone_degree(E)
        assert w.s.e == section_dim(E)
        assert not any(phi_s(w.s, E, xi))
    assert found


# intersection and the flow

def test_three_pointed_intersection_is_the_base_point():
    E = maximal_higgs(curve(5, 3))
    hits = intersect_A_K(E, 2)
    assert len(hits) == 1
    assert hits[0]["xi"] == compute_spaces(E).xi_base and hits[0]["m"] == 1


@pytest.mark.parametrize("lam", [2, 3, 4])
def test_flow_period_tracks_cone_membership(lam):
    C = MarkedProjLine(5, [0, 1, INF, lam])
    E = maximal_higgs(C)
    for eps in range(5):
        ch = W2LiftChoice(C, {lam: eps})
        member = cone_member(rho(ch, E).coords(), E) is not None
        trace = flow_run(E, ch, 3)
        if member:
            assert trace.period == 1 and trace.to_dict()["result"] == "period 1"
        else:
            assert trace.period is None
            assert trace.steps[-1].split == (0, 0)
            assert trace.to_dict()["result"].startswith("stopped: balanced splitting")


def test_found_intersection_solves_for_its_lift():
    E = maximal_higgs(curve(5, 4))
    hits = intersect_A_K(E, 1)
    assert hits
    for h in hits:
        assert rho(W2LiftChoice(h["curve"], h["eps"]), h["E"]).coords() == h["xi"]


def test_trivial_higgs_bundle_is_one_periodic():
    C = curve(5, 4)
    O = LineBundle.O(C.atlas, 0)
    trace = flow_run(GradedHiggs(C, O, O, 0), W2LiftChoice(C, {2: 1}), 3)
    assert trace.period == 1


def test_grading_at_intersection_reproduces_start():
    E = maximal_higgs(curve(7, 4))
    h = intersect_A_K(E, 1, stop_at_first=True)[0]
    trace = flow_run(h["E"], W2LiftChoice(h["curve"], h["eps"]), 2)
    assert trace.period == 1 and trace.steps[0].graded.degrees() == (1, -1)


# ordinariness and the obstruction differential

def test_ordinary_is_scale_invariant():
    C = curve(5, 4)
    E = maximal_higgs(C)
    rng = random.Random(4)
    for _ in range(15):
        s = random_section(rng, C.F, section_dim(E))
        v = ordinary_test(s, E)
        assert all(ordinary_test(s.scale(c), E) == v for c in range(1, 5))


def test_ordinary_vacuous_on_three_points():
    E = maximal_higgs(curve(5, 3))
    w = cone_member(compute_spaces(E).xi_base, E)
    assert ordinary_test(w.s, E)


def test_ordinary_detects_vanishing_composite():
    # for s = t^k: t^-1 -> t^-5 -> t^(2k-5) in H^1(O(-2)), nonzero only for k = 2
    C = curve(5, 4)
    E = maximal_higgs(C)
    for k in range(5):
        assert ordinary_test(LineSection(Poly.monomial(C.F, k), 4), E) == (k == 2)


@pytest.mark.parametrize("p,lam", [(5, 2), (5, 3), (5, 4), (7, 3)])
def test_obstruction_differential_vs_ordinary(p, lam):
    E = maximal_higgs(MarkedProjLine(p, [0, 1, INF, lam]))
    hits = intersect_A_K(E, 1)
    assert hits
    for h in hits:
        at = build_atlas(h["curve"], W2LiftChoice(h["curve"], h["eps"]))
        Hf = inverse_cartier(h["E"].to_higgs(), at)
        fil = max_sub_line(Hf.bundle)
        s = h["witness"].s
        f = d_obstruction(h["E"], Hf, fil)
        assert (f.nrows, f.ncols) == (1, 1)
        assert is_bijective(f) == ordinary_test(s, h["E"])
        # the multiplier is a nonzero constant times s^2
        ratio = obstruction_multiplier(h["E"], Hf, fil) / Frac(s.poly * s.poly, _reduced=True)
        assert ratio.is_poly() and ratio.num.deg() == 0


def test_obstruction_differential_three_points_is_empty():
    C = curve(5, 3)
    E = maximal_higgs(C)
    Hf = inverse_cartier(E.to_higgs(), build_atlas(C))
    f = d_obstruction(E, Hf, max_sub_line(Hf.bundle))
    assert f.ncols == 0 and is_bijective(f)


# twists

@pytest.mark.parametrize("lam", [2, 4])
def test_twist_invariance(lam):
    E = maximal_higgs(MarkedProjLine(5, [0, 1, INF, lam]))
    sp = compute_spaces(E)
    base = [cone_member(sp.point([c]), E) is not None for c in range(5)]
    for n in (-2, -1, 1, 2):
        Et = E.twist(n)
        spt = compute_spaces(Et)
        assert spt.ambient_dim == sp.ambient_dim and spt.xi_base == sp.xi_base and spt.W_F == sp.W_F
        assert [cone_member(spt.point([c]), Et) is not None for c in range(5)] == base
