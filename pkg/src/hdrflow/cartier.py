"""Frobenius lifts mod p^2 and the (inverse) Cartier transform on charts.

For a finite chart a the lift is t -> a~ + (t - a~)^p with a~ = a + p*eps_a,
on the INF chart it is s -> s^p.  The difference of two lifts divided by p
is the vector field h_ab * d/dt (pulled back by Frobenius); h is affine in
the eps parameters, which may be taken in an extension field formally.
"""

from .exactalg import (Frac, Poly, W2Scalar, rref, kernel_basis, m2_mul, m2_inv, m2_sub,
                       m2_add, m2_scale, m2_map, m2_is_zero, m2_det, frac_identity)
from .logcurve import INF, CechClass
from .bundles import (HiggsBundle, FlatBundle, NotNilpotent, ChartIncompatible,
                      mat_pullback, mat_pth_root, mat_value, p_curvature)


class DescentError(RuntimeError):
    pass


class W2LiftChoice:
    """eps_a for finite marked points (missing points mean eps = 0)."""

    def __init__(self, curve, eps=None):
        self.curve = curve
        F = curve.F
        eps = dict(eps or {})
        for a in eps:
            if a not in curve.finite:
                raise ValueError("lift parameter for unmarked point %r" % (a,))
        self.eps = {a: (F.from_int(v) if isinstance(v, int) and F.m == 1 else v) for a, v in eps.items()}

    def lift(self, a):
        """a~ in Z/p^2 when eps_a is F_p-rational."""
        p = self.curve.p
        e = self.eps.get(a, 0)
        if e >= p:
            raise ValueError("eps_%s is not F_p-rational" % (a,))
        return W2Scalar(p, a + p * e)

    def shifted(self, nu):
        F = self.curve.F
        out = dict(self.eps)
        for a, v in nu.items():
            out[a] = F.add(out.get(a, 0), v)
        return W2LiftChoice(self.curve, out)

    def to_dict(self):
        F = self.curve.F
        return {str(a): F.to_str(v) for a, v in sorted(self.eps.items())}


def lift_polynomial(p, at):
    """Coefficients over Z/p^2 of a~ + (t - a~)^p, low degree first."""
    from math import comb
    coeffs = []
    for k in range(p + 1):
        c = W2Scalar(p, comb(p, k)) * ((-at) ** (p - k))
        coeffs.append(c)
    coeffs[0] = coeffs[0] + at
    return coeffs


class FrobLiftAtlas:
    def __init__(self, curve, choice):
        self.curve, self.choice = curve, choice
        F = curve.F
        p = curve.p
        self.lifts = {}
        self.h_inf = {}
        for a in curve.finite:
            at = W2Scalar(p, a)
            poly = lift_polynomial(p, at)
            self.lifts[a] = poly
            diff = list(poly)
            diff[p] = diff[p] - 1
            h = Poly(F, [F.from_int(c.divp()) for c in diff])
            e = choice.eps.get(a, 0)
            self.h_inf[a] = h + Poly(F, [e])
        # zeta(F^* omega_i) = omega_i on every chart
        self.zeta = {i: 1 for i in curve.charts}

    def h(self, i, j):
        """h_ij = (F~_i - F~_j)/p as the coefficient of F^* d/dt."""
        F = self.curve.F
        if i == j:
            return Poly(F)
        if j == INF:
            return self.h_inf[i]
        if i == INF:
            return -self.h_inf[j]
        return self.h_inf[i] - self.h_inf[j]

    def kappa(self, i):
        """<F^* d/dt, F^* omega_i> = 1/ell_i^p."""
        return self.curve.ell(i).frob_pullback().inverse()

    def lift_reduces_to_frobenius(self):
        p = self.curve.p
        for a, poly in self.lifts.items():
            red = [c.reduce() for c in poly]
            if red != [0] * p + [1]:
                return False
        return True

    def log_condition(self):
        """F~_a(t) - a~ equals (t - a~)^p coefficientwise in Z/p^2."""
        from math import comb
        p = self.curve.p
        for a, poly in self.lifts.items():
            at = W2Scalar(p, a)
            shifted = list(poly)
            shifted[0] = shifted[0] - at
            want = [W2Scalar(p, comb(p, k)) * ((-at) ** (p - k)) for k in range(p + 1)]
            if shifted != want:
                return False
        return True

    def obstruction_cocycle(self):
        """The cocycle h_ab as a class of F^*T_log = O(p(2-r)) in global coefficients."""
        c = self.curve
        Pp = Frac(c.P.frob_pullback(), _reduced=True)
        ch = {(a, INF): Frac(self.h_inf[a], _reduced=True) / Pp for a in c.finite}
        return CechClass(c.p * (2 - c.r), c.atlas, ch, check=False)

    def to_dict(self):
        F = self.curve.F
        p = self.curve.p
        out = {}
        for a in self.curve.finite:
            e = self.choice.eps.get(a, 0)
            out[str(a)] = {"base": a, "eps": F.to_str(e)}
            if e < p:
                out[str(a)]["lift_mod_p2"] = a + p * e
        out[INF] = "s^p"
        return out


def build_atlas(curve, choice=None):
    if choice is None:
        choice = W2LiftChoice(curve)
    for a in curve.finite:
        if not (isinstance(a, int) and 0 <= a < curve.p):
            raise ValueError("marked point %r is not F_p-rational" % (a,))
    return FrobLiftAtlas(curve, choice)


def obstruction_class(at1, at2):
    """Class of h^1 - h^2 in H^1(F^*T_log)."""
    if at1.curve.marked != at2.curve.marked or at1.curve.F is not at2.curve.F:
        raise ValueError("atlases over different curves")
    c1 = at1.obstruction_cocycle()
    c2 = at2.obstruction_cocycle()
    return c1 - c2


def kodaira_spencer(curve, nu):
    """KS class of the torsor shift nu: tau_ab = (nu_b - nu_a) d/dt, in O(2-r)."""
    F = curve.F
    P = Frac(curve.P, _reduced=True)
    ch = {(a, INF): Frac.const(F, F.neg(nu.get(a, 0))) / P for a in curve.finite}
    return CechClass(2 - curve.r, curve.atlas, ch, check=False)


# ----------------------------------------------------------------------
# inverse Cartier

def inverse_cartier(E, atlas):
    """(F^*E, nabla_can + zeta(F^*theta)) glued by (1 - h kappa F^*theta) F^*T."""
    c = E.curve
    if not E.is_nilpotent():
        raise NotNilpotent("theta is not nilpotent")
    F = c.F
    conn = {i: mat_pullback(E.theta[i]) for i in c.charts}
    hub = {}
    one = frac_identity(F)
    for a in c.finite:
        corr = m2_scale(Frac(atlas.h(a, INF), _reduced=True) * atlas.kappa(a), conn[a])
        hub[a] = m2_mul(m2_sub(one, corr), mat_pullback(E.hub[a]))
    return FlatBundle(c, hub, conn)


# ----------------------------------------------------------------------
# Cartier

def _horizontal_equation(F, a, A, N):
    """Rows for ((t-a) d/dt + A) v = 0, v polynomial of degree <= N.

    Unknown order: degree descending, component 0 before 1.
    """
    den = Poly(F, [1])
    for r in range(2):
        for s in range(2):
            d = A[r][s].den
            den = den * d.exact_div(_gcd(den, d))
    lin = Poly.x_minus(F, a) * den
    B = [[(A[r][s] * Frac(den, _reduced=True)).num for s in range(2)] for r in range(2)]
    top = N + max(lin.deg(), max(B[r][s].deg() for r in range(2) for s in range(2)))
    ncols = 2 * (N + 1)

    def col(k, comp):
        return 2 * (N - k) + comp

    rows = []
    for r in range(2):
        blk = [[0] * ncols for _ in range(top + 1)]
        # derivative term on component r: lin * k * t^(k-1)
        for k in range(1, N + 1):
            kk = F.from_int(k)
            if kk == 0:
                continue
            for i, x in enumerate(lin.c):
                if x:
                    e = i + k - 1
                    blk[e][col(k, r)] = F.add(blk[e][col(k, r)], F.mul(kk, x))
        for s in range(2):
            for k in range(N + 1):
                for i, x in enumerate(B[r][s].c):
                    if x:
                        e = i + k
                        blk[e][col(k, s)] = F.add(blk[e][col(k, s)], x)
        rows.extend(blk)
    return rows, ncols


def _gcd(a, b):
    from .exactalg import poly_gcd
    return poly_gcd(a, b)


def _vec_from_cols(F, v, N):
    c0 = [0] * (N + 1)
    c1 = [0] * (N + 1)
    for k in range(N + 1):
        c0[k] = v[2 * (N - k)]
        c1[k] = v[2 * (N - k) + 1]
    return Poly(F, c0), Poly(F, c1)


def horizontal_frame(F, a, A, max_deg=None):
    """Polynomial basis (v1, v2) of horizontal vectors for (t-a)d/dt + A.

    v1 has minimal degree, v2 minimal degree among vectors independent of v1
    over the function field; this is a basis of the k[t^p]-module of
    polynomial solutions.
    """
    p = F.p
    N = 2 * p + 2
    base = max((A[r][s].num.deg() for r in range(2) for s in range(2)), default=0) + \
        max((A[r][s].den.deg() for r in range(2) for s in range(2)), default=0)
    limit = max_deg or (4 * p + 4 * base + 8)
    while True:
        rows, ncols = _horizontal_equation(F, a, A, N)
        ker = kernel_basis(F, rows, ncols)
        if ker:
            ech, piv = rref(F, ker, ncols)
            # degree of an echelon row = degree of its pivot column
            items = sorted(((N - pc // 2, row) for row, pc in zip(ech, piv)), key=lambda x: x[0])
            v1deg, v1row = items[0]
            v1 = _vec_from_cols(F, v1row, N)
            for dg, row in items[1:]:
                v = _vec_from_cols(F, row, N)
                det = v1[0] * v[1] - v1[1] * v[0]
                if not det.is_zero():
                    return v1, v
        if N >= limit:
            raise DescentError("no horizontal frame of degree <= %d" % N)
        N = min(2 * N, limit)


def _frame_matrix(v1, v2):
    return ((Frac(v1[0], _reduced=True), Frac(v2[0], _reduced=True)),
            (Frac(v1[1], _reduced=True), Frac(v2[1], _reduced=True)))


def _chart_frame(curve, i, A):
    F = curve.F
    if i != INF:
        v1, v2 = horizontal_frame(F, i, A)
        Phi = _frame_matrix(v1, v2)
    else:
        As = m2_map(lambda f: f.invert_coordinate(), A)
        v1, v2 = horizontal_frame(F, 0, As)
        Phi = m2_map(lambda f: f.invert_coordinate(), _frame_matrix(v1, v2))
    return Phi


def _det_unit_on_chart(curve, i, Phi):
    from .logcurve import _splits
    d = m2_det(Phi)
    others = [b for b in curve.finite if b != i]
    if not _splits(d.num, others):
        return False
    if i == INF:
        return d.deg() == 0 or d.value_at(None) != 0
    return True


def cartier(Hf, atlas, psi=None):
    """Descend (H, nabla + zeta(psi)) chart by chart; theta = -psi on the descent."""
    c = Hf.curve
    F = c.F
    if psi is None:
        psi = p_curvature(Hf)
    for i in c.charts:
        if not m2_is_zero(m2_mul(psi[i], psi[i])):
            raise NotNilpotent("p-curvature is not nilpotent on chart %s" % (i,))
    Aprime = {i: m2_add(Hf.conn[i], psi[i]) for i in c.charts}
    for i in c.charts:
        res = mat_value(Aprime[i], i)
        if any(res[r][s] for r in range(2) for s in range(2)):
            raise ChartIncompatible("residue of the descended connection is nonzero at %s" % (i,))
    Phi = {}
    for i in c.charts:
        Phi[i] = _chart_frame(c, i, Aprime[i])
        if not _det_unit_on_chart(c, i, Phi[i]):
            raise DescentError("horizontal frame degenerates on chart %s" % (i,))
    one = frac_identity(F)
    hub = {}
    for a in c.finite:
        corr = m2_scale(Frac(atlas.h(a, INF), _reduced=True) * atlas.kappa(a), psi[a])
        X = m2_mul(m2_mul(m2_inv(Phi[a]), m2_sub(one, corr)), m2_mul(Hf.hub[a], Phi[INF]))
        try:
            hub[a] = mat_pth_root(X)
        except ArithmeticError:
            raise DescentError("descended transition on (%s, inf) is not a Frobenius pullback" % (a,))
    theta = {}
    for i in c.charts:
        Y = m2_mul(m2_mul(m2_inv(Phi[i]), m2_scale(Frac.const(F, F.neg(1)), psi[i])), Phi[i])
        try:
            theta[i] = mat_pth_root(Y)
        except ArithmeticError:
            raise DescentError("descended Higgs field on chart %s is not a Frobenius pullback" % (i,))
    return HiggsBundle(c, hub, theta)


def residue_identity_check(Hf, psi=None):
    """Res(zeta psi) = -Res(nabla) at every marked point."""
    c = Hf.curve
    F = c.F
    if psi is None:
        psi = p_curvature(Hf)
    for i in c.charts:
        rp = mat_value(psi[i], i)
        rn = mat_value(Hf.conn[i], i)
        for r in range(2):
            for s in range(2):
                if F.add(rp[r][s], rn[r][s]) != 0:
                    return False
    return True
