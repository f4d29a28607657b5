"""Lifting spaces, the periodic cone and the flow engine.

Throughout E is graded with theta: src -> tgt (x) omega_log given by a
polynomial phi, s = deg src and q = deg tgt.  Extension classes of
C^{-1}(E) live in H^1(Hom(F^*src, F^*tgt)) = H^1(O(p(q - s))) and are
written in canonical coordinates.
"""

from itertools import product

from .exactalg import (Frac, Poly, poly_gcd, SemilinearMap, rank_kernel_image,
                       kernel_basis, in_span, span_basis, solve_linear)
from .logcurve import (INF, LineBundle, CechClass, class_from_coords, h1_dim,
                       frobenius_pullback_matrix, mult_matrix, hypercoh_h1_dR)
from .bundles import (GradedHiggs, extension_from_class, class_of_extension, splitting_type,
                      max_sub_line, grade, higgs_iso_test, BalancedSplitting,
                      _section_columns, m2_vec, mat_pullback)
from .cartier import W2LiftChoice, build_atlas, inverse_cartier, kodaira_spencer

DUALITY = "Hom(F*src, F*tgt) = O(p(q-s)) through the global frames of src and tgt"


def maximal_higgs(curve, a=1):
    """The maximal graded Higgs bundle: L (+) L^-1 for r even, omega (+) O for r odd."""
    F = curve.F
    if (curve.r - 2) % 2 == 0:
        ell = (curve.r - 2) // 2
        src = LineBundle.O(curve.atlas, ell)
        tgt = LineBundle.O(curve.atlas, -ell)
        return GradedHiggs(curve, src, tgt, Frac.const(F, 1))
    src = curve.omega(1)
    tgt = LineBundle.O(curve.atlas, 0)
    return GradedHiggs(curve, src, tgt, Frac.const(F, a))


def regrade(E, curve):
    """The same graded Higgs bundle over another coefficient field."""
    phi = Poly(curve.F, list(E.phi.num.c))
    return GradedHiggs(curve, E.src.over(curve), E.tgt.over(curve), Frac(phi, _reduced=True))


def ambient_degree(E):
    return E.curve.p * (E.tgt.d - E.src.d)


def cone_degree(E):
    """Degree c of the sub line forced by periodicity: c = s + (p-1)(q+s)/2."""
    p = E.curve.p
    s, q = E.src.d, E.tgt.d
    if ((p - 1) * (q + s)) % 2:
        raise ValueError("(p-1)(q+s) must be even")
    return s + (p - 1) * (q + s) // 2


def extension_sides(E):
    """(A, B) = (F^*tgt, F^*src)."""
    return E.tgt.frobenius_pullback(), E.src.frobenius_pullback()


# ----------------------------------------------------------------------
# rho

def rho(choice, E):
    """Extension class of C^{-1}(E) for the lift choice, as a CechClass."""
    atlas = build_atlas(E.curve, choice)
    Hf = inverse_cartier(E.to_higgs(), atlas)
    A, B = extension_sides(E)
    return class_of_extension(Hf.bundle, A, B)


def rho_formula(choice, E):
    """Closed form xi_{a,inf} = -phi^sigma(t^p) h_{a,inf} / P^p."""
    c = E.curve
    atlas = build_atlas(c, choice)
    phip = E.phi.frob_pullback()
    Pp = Frac(c.P.frob_pullback(), _reduced=True)
    ch = {}
    for a in c.finite:
        ch[(a, INF)] = -(phip * Frac(atlas.h(a, INF), _reduced=True) / Pp)
    return CechClass(ambient_degree(E), c.atlas, ch, check=False)


def rho_image_dim(E):
    """Dimension of the affine span of rho over all lift choices.

    rho is affine in eps, so the span is reached from eps = 0 and the unit
    shifts at each finite marked point.
    """
    c = E.curve
    F = c.F
    base = rho(W2LiftChoice(c), E).coords()
    diffs = []
    for a in c.finite:
        v = rho(W2LiftChoice(c, {a: 1}), E).coords()
        diffs.append([F.sub(x, y) for x, y in zip(v, base)])
    return len(span_basis(F, diffs, len(base))) if diffs else 0


def theta_check_matrix(E):
    """theta-check: H^1(T_log) -> H^1(Hom(src, tgt)), multiplication by phi."""
    c = E.curve
    return mult_matrix(c.F, 2 - c.r, E.phi, E.tgt.d - E.src.d)


def frobenius_theta_map(E):
    """F^* o theta-check as a sigma-linear map on canonical coordinates."""
    F = E.curve.F
    d = E.tgt.d - E.src.d
    th = SemilinearMap(F, theta_check_matrix(E), 0, h1_dim(2 - E.curve.r))
    return frobenius_pullback_matrix(F, d).compose(th)


def ks_coords(curve, nu):
    return kodaira_spencer(curve, nu).coords()


class LiftingSpaces:
    def __init__(self, E):
        c = E.curve
        F = c.F
        self.E = E
        self.d_ambient = ambient_degree(E)
        self.ambient_dim = h1_dim(self.d_ambient)
        fmap = frobenius_theta_map(E)
        self.frob_theta = fmap
        _, _, img = rank_kernel_image(fmap) if fmap.ncols else (0, [], [])
        self.W_F = [list(v) for v in img]
        self.xi_base = rho(W2LiftChoice(c), E).coords()
        dr = hypercoh_h1_dR(c, E.tgt.d - E.src.d)
        self.derham = dr
        self.B = span_basis(F, dr.B, self.ambient_dim) if dr.B else []
        self.duality = DUALITY

    @property
    def dim_W_F(self):
        return len(self.W_F)

    @property
    def dim_A(self):
        return len(self.W_F)

    @property
    def dim_B(self):
        return len(self.B)

    def in_W_F(self, v):
        F = self.E.curve.F
        if not self.W_F:
            return all(x == 0 for x in v)
        return in_span(F, self.W_F, v, self.ambient_dim)

    def in_B(self, v):
        F = self.E.curve.F
        if not self.B:
            return all(x == 0 for x in v)
        return in_span(F, self.B, v, self.ambient_dim)

    def in_A(self, v):
        F = self.E.curve.F
        diff = [F.sub(x, y) for x, y in zip(v, self.xi_base)]
        return self.in_W_F(diff)

    def invariants(self):
        """Dictionary of named checks."""
        return {
            "W_F_in_B": all(self.in_B(w) for w in self.W_F),
            "dim_B_eq_dim_A_plus_1": self.dim_B == self.dim_A + 1,
            "xi_base_not_in_W_F": not self.in_W_F(self.xi_base),
            "xi_base_in_B": self.in_B(self.xi_base),
            "zero_not_in_A": not self.in_A([0] * self.ambient_dim),
        }

    def point(self, coeffs):
        """xi_base + sum c_k W_F[k]."""
        F = self.E.curve.F
        v = list(self.xi_base)
        for ck, w in zip(coeffs, self.W_F):
            v = [F.add(x, F.mul(ck, y)) for x, y in zip(v, w)]
        return v

    def to_dict(self):
        F = self.E.curve.F
        s = F.to_str
        return {"ambient_dim": self.ambient_dim, "dim_W_F": self.dim_W_F, "dim_A": self.dim_A,
                "dim_B": self.dim_B, "xi_base": [s(x) for x in self.xi_base],
                "W_F": [[s(x) for x in v] for v in self.W_F], "B": [[s(x) for x in v] for v in self.B],
                "duality": self.duality}


def compute_spaces(E):
    return LiftingSpaces(E)


# ----------------------------------------------------------------------
# sections between line bundles and the cone

class LineSection:
    """A section of O(e) in global coefficients: a polynomial of degree <= e."""

    def __init__(self, poly, e):
        if poly.is_zero():
            raise ValueError("zero section")
        if poly.deg() > e:
            raise ValueError("section of degree %d does not fit in O(%d)" % (poly.deg(), e))
        self.poly, self.e = poly, e

    @property
    def F(self):
        return self.poly.F

    def inf_multiplicity(self):
        return self.e - self.poly.deg()

    def div_degree(self):
        return self.e

    def divisor(self):
        """Rational part of Div(s): {point: multiplicity}."""
        out = {}
        for a in self.F.elements():
            k = self.poly.root_multiplicity(a)
            if k:
                out[self.F.to_str(a)] = k
        if self.inf_multiplicity():
            out[INF] = self.inf_multiplicity()
        return out

    def gcd_degree(self, other):
        g = poly_gcd(self.poly, other.poly)
        return g.deg() + min(self.inf_multiplicity(), other.inf_multiplicity())

    def scale(self, c):
        return LineSection(self.poly.scale(c), self.e)

    def to_dict(self):
        return {"degree": self.e, "poly": self.poly.to_str(),
                "divisor": {str(k): v for k, v in self.divisor().items()}}


class ConeWitness:
    def __init__(self, xi, c, split, sub, s):
        self.xi, self.c, self.split, self.sub, self.s = xi, c, split, sub, s

    def to_dict(self):
        F = self.s.F
        return {"xi": [F.to_str(x) for x in self.xi], "c": self.c, "splitting": list(self.split),
                "s": self.s.to_dict()}


def ker_phi_s(s, E):
    """Kernel of xi -> s*xi on H^1(O(p(q-s))), s a section of O(e)."""
    if s is None or s.poly.is_zero():
        raise ValueError("s must be nonzero")
    F = E.curve.F
    d = ambient_degree(E)
    rows = mult_matrix(F, d, Frac(s.poly, _reduced=True), d + s.e)
    n = h1_dim(d)
    if not rows:
        return [[1 if i == k else 0 for i in range(n)] for k in range(n)]
    return kernel_basis(F, rows, n)


def phi_s(s, E, xi):
    F = E.curve.F
    d = ambient_degree(E)
    cl = class_from_coords(d, xi, F)
    return cl.map_values(lambda v: v * Frac(s.poly, _reduced=True), d=d + s.e).coords()


def extension_bundle(xi, E):
    A, B = extension_sides(E)
    F = E.curve.F
    cl = class_from_coords(ambient_degree(E), xi, F, E.curve.atlas)
    return extension_from_class(cl, A, B)


def cone_member(xi, E, split=None):
    """ConeWitness if H_xi contains a sub line of degree c, else None."""
    c = cone_degree(E)
    H = extension_bundle(xi, E)
    split = split or splitting_type(H)
    d1, d2 = split
    if d1 < c:
        return None
    F = E.curve.F
    B = extension_sides(E)[1]
    if d1 > d2:
        sub = max_sub_line(H, split)
        cols = sub.cols
        dsub = d1
    else:
        Q, secs = H.twist(-c).sections()
        N = secs[0]
        flat = [x for f in N for x in f.c]
        inv = F.inv(next(x for x in flat if x))
        N = [f.scale(inv) for f in N]
        cols = _section_columns(H, c, Q, N)
        sub = None
        dsub = c
    g = {}
    for i in E.curve.charts:
        src_frame = Frac.t_power(F, dsub) if i == INF else Frac.const(F, 1)
        g[i] = cols[i][1] * B.g(i) / src_frame
    vals = list(g.values())
    if any(not (v - vals[0]).is_zero() for v in vals):
        raise RuntimeError("witness section is not chart independent")
    sv = vals[0]
    if not sv.is_poly():
        raise RuntimeError("witness section is not a polynomial")
    e = E.curve.p * E.src.d - c
    s = LineSection(sv.num, e)
    return ConeWitness(list(xi), c, split, sub, s)


def _points_of_subfield_free(F):
    """Elements of F not lying in a proper subfield."""
    m = F.m
    out = []
    for a in F.elements():
        minimal = True
        for k in range(1, m):
            if m % k == 0 and F.frob(a, k) == a:
                minimal = False
                break
        if minimal:
            out.append(a)
    return out


def intersect_A_K(E, M, stop_at_first=False):
    """Points of A over GF(p^m), m <= M, that lie in K.

    A over GF(p^m) is xi_base + W_F (x) GF(p^m); each hit records the lift
    parameters eps (solved from the affine rho-system), xi and the witness.
    """
    base = E.curve
    hits = []
    for m in range(1, M + 1):
        curve = base.over(m)
        Em = regrade(E, curve)
        sp = LiftingSpaces(Em)
        F = curve.F
        k = sp.dim_W_F
        fresh = _points_of_subfield_free(F) if m > 1 else list(F.elements())
        allel = list(F.elements())
        for coeffs in product(allel, repeat=k):
            if m > 1 and not any(x in set(fresh) for x in coeffs) and k > 0:
                continue
            if k == 0 and m > 1:
                continue
            xi = sp.point(list(coeffs))
            w = cone_member(xi, Em)
            if w is None:
                continue
            eps = solve_eps(Em, sp, xi)
            hits.append({"m": m, "coeffs": list(coeffs), "eps": eps, "xi": xi, "witness": w,
                         "curve": curve, "E": Em})
            if stop_at_first:
                return hits
    return hits


def eps_points(curve):
    return [a for a in curve.finite if a not in (0, 1)]


def solve_eps(E, sp, xi):
    """eps on the extra marked points with rho(eps) = xi (None if no solution)."""
    c = E.curve
    F = c.F
    pts = eps_points(c)
    if not pts:
        return {} if list(xi) == list(sp.xi_base) else None
    cols = []
    for a in pts:
        v = rho_formula(W2LiftChoice(c, {a: 1}), E).coords()
        cols.append([F.sub(x, y) for x, y in zip(v, sp.xi_base)])
    mat = [[cols[k][i] for k in range(len(pts))] for i in range(sp.ambient_dim)]
    target = [F.sub(x, y) for x, y in zip(xi, sp.xi_base)]
    sol = solve_linear(SemilinearMap(F, mat, 0, len(pts)), target)
    if sol is None:
        return None
    return dict(zip(pts, sol[0]))


# ----------------------------------------------------------------------
# ordinariness and the obstruction differential

def ordinary_matrix(s, E):
    """s^2 o F^* : H^1(O(q-s)) -> H^1(O(q-s)) on canonical coordinates (twist 1)."""
    F = E.curve.F
    d = E.tgt.d - E.src.d
    fmat = frobenius_pullback_matrix(F, d)
    s2 = Frac(s.poly * s.poly, _reduced=True)
    mm = mult_matrix(F, E.curve.p * d, s2, E.curve.p * d + 2 * s.e)
    return SemilinearMap(F, mm, 0, h1_dim(E.curve.p * d)).compose(fmat)


def ordinary_test(s, E):
    if s is None or s.poly.is_zero():
        raise ValueError("s must be nonzero")
    f = ordinary_matrix(s, E)
    n = h1_dim(E.tgt.d - E.src.d)
    if n == 0:
        return True
    return rank_kernel_image(f)[0] == n


def obstruction_multiplier(E, Hf, fil):
    """Global coefficient of T_log -> F^*T_log -> End(H) -> Hom(Fil, H/Fil)."""
    c = E.curve
    F = c.F
    vals = []
    for i in c.charts:
        th = mat_pullback(E.to_higgs().theta[i])
        f = fil.cols[i]
        w = m2_vec(th, f)
        r = fil.rows[i]
        loc = r[0] * w[0] + r[1] * w[1]
        gd1 = Frac.t_power(F, fil.d) if i == INF else Frac.const(F, 1)
        gd2 = Frac.t_power(F, fil.d2) if i == INF else Frac.const(F, 1)
        vals.append(-(loc * gd2 / (gd1 * c.u(i).frob_pullback())))
    if any(not (v - vals[0]).is_zero() for v in vals):
        raise RuntimeError("obstruction multiplier is not chart independent")
    return vals[0]


def d_obstruction(E, Hf, fil):
    """H^1(T_log) -> H^1(Hom(Fil, H/Fil)) as a sigma-linear map."""
    c = E.curve
    F = c.F
    m = obstruction_multiplier(E, Hf, fil)
    if not m.is_poly() and not m.is_zero():
        raise RuntimeError("obstruction multiplier has poles")
    src = 2 - c.r
    fmat = frobenius_pullback_matrix(F, src)
    tgt = fil.d2 - fil.d
    mm = mult_matrix(F, c.p * src, m, tgt)
    return SemilinearMap(F, mm, 0, h1_dim(c.p * src)).compose(fmat)


def is_bijective(f):
    if f.nrows != f.ncols:
        return False
    if f.ncols == 0:
        return True
    return rank_kernel_image(f)[0] == f.ncols


# ----------------------------------------------------------------------
# the flow

class FlowStep:
    def __init__(self, index, graded, split, fil, iso_with):
        self.index, self.graded, self.split, self.fil, self.iso_with = index, graded, split, fil, iso_with

    def to_dict(self):
        out = {"index": self.index, "graded": self.graded.to_dict() if self.graded else None,
               "splitting": list(self.split) if self.split else None,
               "iso_with": self.iso_with}
        if self.fil is not None:
            out["filtration"] = self.fil.to_dict()
        return out


class FlowTrace:
    def __init__(self, start):
        self.start = start
        self.steps = []
        self.period = None
        self.preperiod = None
        self.failure = None

    def to_dict(self):
        return {"start": self.start.to_dict(), "steps": [s.to_dict() for s in self.steps],
                "period": self.period, "preperiod": self.preperiod,
                "result": ("period %d" % self.period) if self.period else
                ("no period <= %d" % len(self.steps) if not self.failure else "stopped: " + self.failure)}


def flow_step(E, atlas):
    """One step: C^{-1}, filtration, grading.  Returns (graded, split, fil)."""
    Hf = inverse_cartier(E.to_higgs(), atlas)
    split = splitting_type(Hf.bundle)
    if E.phi.is_zero():
        # theta = 0: the trivial filtration, Gr = H with zero field
        c = E.curve
        g = GradedHiggs(c, LineBundle.O(c.atlas, split[0]), LineBundle.O(c.atlas, split[1]),
                        Frac.const(c.F, 0))
        return g, split, None, Hf
    fil = max_sub_line(Hf.bundle, split)
    g = grade(Hf, fil)
    return g, split, fil, Hf


def flow_run(E, choice, N):
    atlas = build_atlas(E.curve, choice)
    trace = FlowTrace(E)
    terms = [E]
    cur = E
    for k in range(1, N + 1):
        try:
            g, split, fil, _ = flow_step(cur, atlas)
        except BalancedSplitting as e:
            Hf = inverse_cartier(cur.to_higgs(), atlas)
            trace.steps.append(FlowStep(k, None, splitting_type(Hf.bundle), None, None))
            trace.failure = "balanced splitting at step %d: %s" % (k, e)
            return trace
        if g.phi.is_zero() and not E.phi.is_zero():
            trace.steps.append(FlowStep(k, g, split, fil, None))
            trace.failure = "filtration is flat at step %d" % k
            return trace
        match = None
        for j, prev in enumerate(terms):
            if higgs_iso_test(g, prev):
                match = j
                break
        trace.steps.append(FlowStep(k, g, split, fil, match))
        if match is not None:
            trace.period = k - match
            trace.preperiod = match
            return trace
        terms.append(g)
        cur = g
    return trace
