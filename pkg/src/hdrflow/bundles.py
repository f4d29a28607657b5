"""Rank-two bundles on the marked line: extensions, splitting types,
Higgs fields, connections, p-curvature and grading.

Conventions: local coordinates satisfy f_i = T_ij f_j; the hub chart is
INF and a bundle is determined by the matrices T_{a,inf}.  Higgs fields and
connection matrices are taken against the log frame omega_i = dt/ell_i, and
the log derivation on chart i is D_i = ell_i d/dt.
"""

from math import comb

from .exactalg import (Frac, Poly, kernel_basis, m2_mul, m2_inv, m2_det, m2_sub,
                       m2_add, m2_scale, m2_map, m2_is_zero, m2_vec, frac_identity, frac_zero)
from .logcurve import INF, LineBundle, CechClass


class BalancedSplitting(ValueError):
    pass


class FiltrationFlat(ValueError):
    pass


class ChartIncompatible(RuntimeError):
    pass


class NotNilpotent(ValueError):
    pass


class PointNotMarked(ValueError):
    pass


def _fr(F, x):
    return Frac.const(F, x)


def mat_pullback(M):
    return m2_map(lambda f: f.frob_pullback(), M)


def mat_pth_root(M):
    return m2_map(lambda f: f.pth_root(), M)


def mat_deriv(curve, i, M):
    return m2_map(lambda f: curve.log_derivation(i, f), M)


def mat_value(M, pt):
    pt = None if pt == INF else pt
    return tuple(tuple(M[r][c].value_at(pt) for c in range(2)) for r in range(2))


def mat_regular_at(M, pt):
    pt = None if pt == INF else pt
    return all(M[r][c].is_regular_at(pt) for r in range(2) for c in range(2))


# ----------------------------------------------------------------------
# global sections with INF as hub

def _taylor_monomial(F, a, j, n):
    """Coefficients of (t-a)^i in t^j for i < n."""
    out = []
    for i in range(min(n, j + 1)):
        c = comb(j, i) % F.p
        out.append(F.mul(F.from_int(c), F.pow(a, j - i)) if c else 0)
    return out + [0] * (n - len(out))


def global_sections(F, finite, hub, n, extra=None):
    """Basis of sections as (denominator Q, list of numerator vectors).

    hub[a] is an (n' x n) matrix of Frac taking the INF coordinates to the
    chart-a coordinates.  The INF coordinates are N_k/Q with deg N_k <= deg Q,
    Q built from the pole orders allowed by hub[a]^-1 at each a.
    extra(Q, E) may return additional linear constraint rows on the
    stacked numerator coefficients.
    """
    inv_bounds = {}
    for a in finite:
        inv_bounds[a] = _pole_bound_inverse(hub[a], a)
    Q = Poly(F, [1])
    for a in finite:
        Q = Q * Poly.x_minus(F, a) ** inv_bounds[a]
    E = Q.deg()
    Qf = Frac(Q, _reduced=True)
    rows = []
    ncols = n * (E + 1)
    # constraint blocks: for each a, each output component c
    for a in finite:
        Ma = hub[a]
        for c in range(len(Ma)):
            series = []
            depth = 0
            for k in range(n):
                R = Ma[c][k] / Qf
                if R.is_zero():
                    series.append(None)
                    continue
                v, cs = R.laurent_at(a, 0)
                series.append((v, cs))
                depth = max(depth, -v)
            if depth == 0:
                continue
            block = [[0] * ncols for _ in range(depth)]
            for k in range(n):
                if series[k] is None:
                    continue
                v, cs = series[k]
                if v >= 0:
                    continue
                for j in range(E + 1):
                    tay = _taylor_monomial(F, a, j, -v)
                    col = k * (E + 1) + j
                    # coefficient of (t-a)^(-m), m = 1..depth
                    for m in range(1, -v + 1):
                        s = 0
                        for i in range(0, -v - m + 1):
                            e = -m - i  # exponent in R
                            idx = e - v
                            if 0 <= idx < len(cs) and tay[i]:
                                s = F.add(s, F.mul(cs[idx], tay[i]))
                        if s:
                            block[m - 1][col] = F.add(block[m - 1][col], s)
            rows.extend(block)
    if extra is not None:
        rows.extend(extra(Q, E))
    if not rows:
        basis = [[1 if i == k else 0 for i in range(ncols)] for k in range(ncols)]
    else:
        basis = kernel_basis(F, rows, ncols)
    out = []
    for v in basis:
        out.append([Poly(F, v[k * (E + 1):(k + 1) * (E + 1)]) for k in range(n)])
    return Q, out


def _pole_bound_inverse(M, a):
    """Max pole order at a of the entries of M^-1 (square M)."""
    if len(M) == 2 and len(M[0]) == 2:
        Mi = m2_inv(M)
    else:
        Mi = _inverse_general(M)
    worst = 0
    for row in Mi:
        for f in row:
            if not f.is_zero():
                worst = max(worst, -f.order_at(a))
    return worst


def _inverse_general(M):
    n = len(M)
    F = M[0][0].F
    A = [list(r) + [_fr(F, 1 if i == j else 0) for j in range(n)] for i, r in enumerate(M)]
    for c in range(n):
        k = next(i for i in range(c, n) if not A[i][c].is_zero())
        A[c], A[k] = A[k], A[c]
        inv = A[c][c].inverse()
        A[c] = [x * inv for x in A[c]]
        for i in range(n):
            if i != c and not A[i][c].is_zero():
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return [r[n:] for r in A]


# ----------------------------------------------------------------------
# rank-two bundles

class RankTwoBundle:
    """Transition matrices T_{a,inf} on a cover (INF is the hub)."""

    def __init__(self, cover, hub):
        self.cover = cover
        self.F = cover.F
        self.hub = dict(hub)
        for a in cover.finite:
            if m2_det(self.hub[a]).is_zero():
                raise ValueError("singular transition at chart %r" % (a,))

    def transition(self, i, j):
        if i == j:
            return frac_identity(self.F)
        if j == INF:
            return self.hub[i]
        if i == INF:
            return m2_inv(self.hub[j])
        return m2_mul(self.hub[i], m2_inv(self.hub[j]))

    def det_degree(self):
        return sum(m2_det(self.hub[b]).order_at(b) for b in self.cover.finite)

    def twist(self, n):
        tn = Frac.t_power(self.F, n)
        return RankTwoBundle(self.cover, {a: m2_scale(tn, T) for a, T in self.hub.items()})

    def dual(self):
        out = {}
        for a, T in self.hub.items():
            Ti = m2_inv(T)
            out[a] = ((Ti[0][0], Ti[1][0]), (Ti[0][1], Ti[1][1]))
        return RankTwoBundle(self.cover, out)

    def frobenius_pullback(self):
        return RankTwoBundle(self.cover, {a: mat_pullback(T) for a, T in self.hub.items()})

    def sections(self):
        """(Q, numerators): INF coordinates N/Q of a basis of H^0."""
        return global_sections(self.F, self.cover.finite, self.hub, 2)

    def h0(self):
        return len(self.sections()[1])

    def local_section(self, i, f_inf):
        if i == INF:
            return f_inf
        return m2_vec(self.hub[i], f_inf)

    def to_table(self):
        return {"%s,inf" % a: [[x.to_str() for x in row] for row in T] for a, T in sorted(self.hub.items(), key=lambda kv: str(kv[0]))}


def split_bundle(A, B):
    """A (+) B for line bundles on the same cover."""
    F = A.cover.F
    z = _fr(F, 0)
    hub = {a: ((A.transition(a, INF), z), (z, B.transition(a, INF))) for a in A.cover.finite}
    return RankTwoBundle(A.cover, hub)


def extension_from_class(xi, A, B):
    """Extension 0 -> A -> H -> B -> 0 with class xi in H^1(Hom(B, A))."""
    if xi.d != A.d - B.d:
        raise ValueError("class lives in O(%d), expected O(%d)" % (xi.d, A.d - B.d))
    if xi.cover != A.cover:
        from .logcurve import refine_class
        xi = refine_class(xi, A.cover)
    F = A.cover.F
    z = _fr(F, 0)
    hub = {}
    for a in A.cover.finite:
        x = xi.value(a, INF) * B.g(INF) / A.g(a)
        hub[a] = ((A.transition(a, INF), x), (z, B.transition(a, INF)))
    return RankTwoBundle(A.cover, hub)


def class_of_extension(H, A, B):
    """Class in H^1(Hom(B, A)) of an upper triangular H."""
    ch = {}
    for a in H.cover.finite:
        T = H.transition(a, INF)
        if not T[1][0].is_zero():
            raise ValueError("transition is not upper triangular")
        ch[(a, INF)] = A.g(a) * T[0][1] / B.g(INF)
    return CechClass(A.d - B.d, H.cover, ch, check=False)


def splitting_type(H):
    """(d1, d2) with H = O(d1) + O(d2), d1 >= d2."""
    deg = H.det_degree()
    lo = -((-deg) // 2)  # ceil(deg/2); h0(H(-lo)) > 0 always
    if H.twist(-lo).h0() == 0:
        raise ChartIncompatible("h0(H(-ceil(deg/2))) vanished; transitions inconsistent")
    step = 1
    hi = lo + step
    while H.twist(-hi).h0() > 0:
        lo = hi
        step *= 2
        hi = lo + step
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if H.twist(-mid).h0() > 0:
            lo = mid
        else:
            hi = mid
    return lo, deg - lo


class SubLine:
    """An inclusion O(d) -> H with local columns f_i, plus the quotient map.

    pi_i are row vectors with pi_i f_i = 0 giving H -> O(d2).
    """

    def __init__(self, H, d, cols, d2=None, rows=None):
        self.H, self.d, self.cols = H, d, cols
        self.d2, self.rows = d2, rows

    def column(self, i):
        return self.cols[i]

    def value_at(self, i):
        """Fibre value at the chart point of chart i."""
        pt = None if i == INF else i
        return tuple(f.value_at(pt) for f in self.cols[i])

    def saturated(self):
        """No common zero of the column on any chart."""
        from .exactalg import poly_gcd
        from .logcurve import _splits
        fin = self.H.cover.finite
        for i in self.H.cover.charts:
            f = self.cols[i]
            nums = [x.num for x in f if not x.is_zero()]
            if not nums:
                return False
            g = nums[0] if len(nums) == 1 else poly_gcd(nums[0], nums[1])
            if not _splits(g, [x for x in fin if x != i]):
                return False
            if i == INF and all(x == 0 for x in self.value_at(INF)):
                return False
        return True

    def to_dict(self):
        F = self.H.F
        return {"degree": self.d, "columns": {str(i): [f.to_str() for f in c] for i, c in self.cols.items()},
                "values": {str(i): [F.to_str(x) for x in self.value_at(i)] for i in self.cols}}


def _section_columns(H, d, Q, N):
    F = H.F
    Qf = Frac(Q, _reduced=True)
    f_inf = tuple(Frac(n) / Qf for n in N)
    cols = {INF: f_inf}
    td = Frac.t_power(F, -d)
    for a in H.cover.finite:
        v = m2_vec(H.hub[a], f_inf)
        cols[a] = (v[0] * td, v[1] * td)
    return cols


def max_sub_line(H, split=None):
    """The maximal destabilizing sub-line O(d1) -> H (requires d1 > d2)."""
    d1, d2 = split or splitting_type(H)
    if d1 == d2:
        raise BalancedSplitting("splitting type (%d,%d) is balanced" % (d1, d2))
    F = H.F
    Q, secs = H.twist(-d1).sections()
    if len(secs) != 1:
        raise ChartIncompatible("expected a unique maximal sub line, got %d" % len(secs))
    N = secs[0]
    flat = [x for f in N for x in f.c]
    lead = next(x for x in flat if x)
    inv = F.inv(lead)
    N = [f.scale(inv) for f in N]
    cols = _section_columns(H, d1, Q, N)
    _, rows = quotient_rows(H, d1, cols)
    sl = SubLine(H, d1, cols, d2, rows)
    for i in H.cover.charts:
        c, r = cols[i], rows[i]
        if not (r[0] * c[0] + r[1] * c[1]).is_zero():
            raise ChartIncompatible("quotient map does not kill the sub line")
    return sl


# ----------------------------------------------------------------------
# Higgs and flat bundles

class GradedHiggs:
    """tgt (+) src with theta: src -> tgt (x) omega_log, theta = phi * dt/P globally.

    Local field on chart i: theta_i = phi * u_i * g^src_i / g^tgt_i.
    Basis order is (tgt, src) so theta is strictly upper triangular.
    """

    def __init__(self, curve, src, tgt, phi):
        self.curve, self.src, self.tgt = curve, src, tgt
        F = curve.F
        if isinstance(phi, Poly):
            phi = Frac(phi, _reduced=True)
        elif not isinstance(phi, Frac):
            phi = Frac.const(F, phi)
        if not phi.is_zero():
            if not phi.is_poly():
                raise ValueError("phi must be a polynomial")
            bound = tgt.d - src.d + curve.r - 2
            if phi.deg() > bound:
                raise ValueError("phi has degree %d > %d" % (phi.deg(), bound))
        self.phi = phi

    @property
    def F(self):
        return self.curve.F

    def theta_local(self, i):
        c = self.curve
        return self.phi * c.u(i) * self.src.g(i) / self.tgt.g(i)

    def is_maximal(self):
        return not self.phi.is_zero() and self.phi.deg() == 0 and \
            self.tgt.d - self.src.d + self.curve.r - 2 == 0

    def to_higgs(self):
        F = self.F
        z = _fr(F, 0)
        hub = {a: ((self.tgt.transition(a, INF), z), (z, self.src.transition(a, INF)))
               for a in self.curve.finite}
        theta = {i: ((z, self.theta_local(i)), (z, z)) for i in self.curve.charts}
        return HiggsBundle(self.curve, hub, theta)

    def twist(self, n):
        return GradedHiggs(self.curve, self.src.twist(n), self.tgt.twist(n), self.phi)

    def degrees(self):
        return (self.src.d, self.tgt.d)

    def to_dict(self):
        return {"src_degree": self.src.d, "tgt_degree": self.tgt.d, "phi": self.phi.to_str()}

    def __repr__(self):
        return "GradedHiggs(src=O(%d), tgt=O(%d), phi=%s)" % (self.src.d, self.tgt.d, self.phi.to_str())


def _check_theta_compat(curve, T, th_i, th_j, i, j):
    lhs = th_i
    rhs = m2_scale(curve.frame_ratio(i, j), m2_mul(m2_mul(T, th_j), m2_inv(T)))
    return m2_is_zero(m2_sub(lhs, rhs))


class HiggsBundle:
    """Transitions T_{a,inf} and local fields theta_i (against omega_i)."""

    def __init__(self, curve, hub, theta, check=True):
        self.curve = curve
        self.bundle = RankTwoBundle(curve.atlas, hub)
        self.theta = dict(theta)
        if check:
            self.check()

    @property
    def F(self):
        return self.curve.F

    @property
    def hub(self):
        return self.bundle.hub

    def transition(self, i, j):
        return self.bundle.transition(i, j)

    def check(self):
        c = self.curve
        for i in c.charts:
            if not mat_regular_at(self.theta[i], i):
                raise ChartIncompatible("theta_%s has a pole at its marked point" % (i,))
        for a in c.finite:
            if not _check_theta_compat(c, self.hub[a], self.theta[a], self.theta[INF], a, INF):
                raise ChartIncompatible("theta incompatible on (%s, inf)" % (a,))

    def is_nilpotent(self):
        return all(m2_is_zero(m2_mul(t, t)) for t in self.theta.values())

    def gauge(self, Q):
        """Change local frames e_i -> e_i Q_i."""
        hub = {a: m2_mul(m2_mul(m2_inv(Q[a]), self.hub[a]), Q[INF]) for a in self.curve.finite}
        th = {i: m2_mul(m2_mul(m2_inv(Q[i]), self.theta[i]), Q[i]) for i in self.curve.charts}
        return HiggsBundle(self.curve, hub, th)


class FlatBundle:
    """Transitions G_{a,inf} and connection matrices A_i: nabla(e_i f) = e_i (D_i f + A_i f) omega_i."""

    def __init__(self, curve, hub, conn, check=True):
        self.curve = curve
        self.bundle = RankTwoBundle(curve.atlas, hub)
        self.conn = dict(conn)
        if check:
            self.check()

    @property
    def F(self):
        return self.curve.F

    @property
    def hub(self):
        return self.bundle.hub

    def transition(self, i, j):
        return self.bundle.transition(i, j)

    def compat_defect(self, i, j):
        """(l_i/l_j) G A_j - D_i(G) - A_i G; zero when compatible."""
        c = self.curve
        G = self.transition(i, j)
        lhs = m2_scale(c.frame_ratio(i, j), m2_mul(G, self.conn[j]))
        return m2_sub(m2_sub(lhs, mat_deriv(c, i, G)), m2_mul(self.conn[i], G))

    def check(self):
        c = self.curve
        for i in c.charts:
            if not mat_regular_at(self.conn[i], i):
                raise ChartIncompatible("connection on chart %s has a pole at its point" % (i,))
        for a in c.finite:
            if not m2_is_zero(self.compat_defect(a, INF)):
                raise ChartIncompatible("connection incompatible on (%s, inf)" % (a,))

    def gauge(self, Q):
        c = self.curve
        hub = {a: m2_mul(m2_mul(m2_inv(Q[a]), self.hub[a]), Q[INF]) for a in c.finite}
        conn = {}
        for i in c.charts:
            Qi = m2_inv(Q[i])
            conn[i] = m2_add(m2_mul(Qi, mat_deriv(c, i, Q[i])), m2_mul(m2_mul(Qi, self.conn[i]), Q[i]))
        return FlatBundle(c, hub, conn)


def residue(Hf, a):
    """Residue matrix of the connection at the marked point a (local frame e_a)."""
    if a not in Hf.curve.charts:
        raise PointNotMarked("%r is not a marked point" % (a,))
    return mat_value(Hf.conn[a], a)


def canonical_flat(curve, E_hub):
    """(F^*E, nabla_can) for transitions E_hub on the atlas."""
    F = curve.F
    return FlatBundle(curve, {a: mat_pullback(T) for a, T in E_hub.items()},
                      {i: frac_zero(F) for i in curve.charts})


def p_curvature(Hf):
    """psi_i with psi(D_i) = nabla_{D_i}^p - nabla_{D_i}, against F^*omega_i."""
    c = Hf.curve
    p = c.F.p
    out = {}
    for i in c.charts:
        A = Hf.conn[i]
        M = A
        for _ in range(p - 1):
            M = m2_add(mat_deriv(c, i, M), m2_mul(A, M))
        out[i] = m2_sub(M, A)
    for a in c.finite:
        G = Hf.transition(a, INF)
        rhs = m2_scale(c.frame_ratio(a, INF).frob_pullback(), m2_mul(m2_mul(G, out[INF]), m2_inv(G)))
        if not m2_is_zero(m2_sub(out[a], rhs)):
            raise ChartIncompatible("p-curvature disagrees on (%s, inf)" % (a,))
    return out


def p_curvature_zero_locus(Hf, psi=None):
    """{chart: residual gcd} for charts where psi has zeros inside the chart.

    On each chart the gcd of the entry numerators is stripped of factors
    supported at the other marked points; the infinity chart is read in
    s = 1/t.  An empty result means psi vanishes nowhere.
    """
    from .exactalg import poly_gcd
    c = Hf.curve
    F = c.F
    psi = psi or p_curvature(Hf)
    out = {}
    for i in c.charts:
        ents = [x for row in psi[i] for x in row]
        if i == INF:
            ents = [x.invert_coordinate() for x in ents]
            outside = [F.inv(b) for b in c.finite if b != 0]
        else:
            outside = [b for b in c.finite if b != i]
        nums = [x.num for x in ents if not x.is_zero()]
        if not nums:
            out[i] = Poly(F, [0])
            continue
        g = nums[0]
        for n in nums[1:]:
            g = poly_gcd(g, n)
        for b in outside:
            while g.deg() > 0 and g(b) == 0:
                g = g.exact_div(Poly.x_minus(F, b))
        if g.deg() > 0:
            out[i] = g.monic()
    return out


def p_curvature_iterated(Hf, i, vec):
    """Oracle: apply nabla_{D_i} p times to a local section and subtract one application."""
    c = Hf.curve
    A = Hf.conn[i]

    def nab(v):
        dv = (c.log_derivation(i, v[0]), c.log_derivation(i, v[1]))
        av = m2_vec(A, v)
        return (dv[0] + av[0], dv[1] + av[1])
    w = vec
    for _ in range(c.F.p):
        w = nab(w)
    once = nab(vec)
    return (w[0] - once[0], w[1] - once[1])


def grade(Hf, fil, require_nonzero=False):
    """Graded Higgs bundle of a filtration O(d1) -> H: src = Fil, tgt = H/Fil."""
    c = Hf.curve
    if fil.rows is None:
        raise ValueError("filtration needs a quotient map")
    src = LineBundle.O(c.atlas, fil.d)
    tgt = LineBundle.O(c.atlas, fil.d2)
    phis = {}
    for i in c.charts:
        f = fil.cols[i]
        A = Hf.conn[i]
        Df = (c.log_derivation(i, f[0]), c.log_derivation(i, f[1]))
        Af = m2_vec(A, f)
        v = (Df[0] + Af[0], Df[1] + Af[1])
        r = fil.rows[i]
        th = r[0] * v[0] + r[1] * v[1]
        phis[i] = th * tgt.g(i) / (c.u(i) * src.g(i))
    vals = list(phis.values())
    if any(not (v - vals[0]).is_zero() for v in vals):
        raise ChartIncompatible("graded Higgs field is not chart independent")
    phi = vals[0]
    if phi.is_zero() and require_nonzero:
        raise FiltrationFlat("filtration is preserved by the connection")
    return GradedHiggs(c, src, tgt, phi)


def higgs_iso_test(g1, g2):
    """Graded rank-two Higgs bundles on P^1: same degrees and proportional fields."""
    if g1.curve.marked != g2.curve.marked:
        return False
    if g1.degrees() != g2.degrees():
        return False
    z1, z2 = g1.phi.is_zero(), g2.phi.is_zero()
    if z1 or z2:
        return z1 and z2
    ratio = g1.phi / g2.phi
    return ratio.is_poly() and ratio.num.deg() == 0


def _proportional_rows(F, col, n_unknown_blocks):
    """Rows forcing N0*c1 - N1*c0 = 0 for numerators N of degree <= E."""
    c0, c1 = col
    a = c1.num * c0.den
    b = c0.num * c1.den

    def extra(Q, E):
        width = E + 1
        top = E + max(a.deg(), b.deg(), 0)
        rows = []
        for k in range(top + 1):
            row = [0] * (n_unknown_blocks * width)
            for j in range(width):
                row[j] = a[k - j] if 0 <= k - j else 0
                row[width + j] = F.neg(b[k - j]) if 0 <= k - j else 0
            rows.append(row)
        return rows
    return extra


def _sub_line_through(H, col):
    """Saturation of the line spanned by the INF-chart vector col."""
    F = H.F
    d1, _ = splitting_type(H)
    for d in range(d1, d1 - 400, -1):
        T = H.twist(-d)
        Q, secs = global_sections(F, H.cover.finite, T.hub, 2, _proportional_rows(F, col, 2))
        if secs:
            if len(secs) != 1:
                raise ChartIncompatible("sub line through vector is not unique")
            return d, _section_columns(H, d, Q, secs[0])
    raise ChartIncompatible("no sub line through the given vector")


def quotient_rows(H, d, cols):
    """Rows pi_i of the quotient H -> O(deg - d) killing the sub line cols."""
    F = H.F
    deg = H.det_degree()
    d2 = deg - d
    Hd = H.dual().twist(d2)
    f = cols[INF]
    perp = (f[1], -f[0])
    Qd, dsecs = global_sections(F, H.cover.finite, Hd.hub, 2, _proportional_rows(F, perp, 2))
    if len(dsecs) != 1:
        raise ChartIncompatible("quotient map not unique (%d)" % len(dsecs))
    M = dsecs[0]
    flat = [x for g in M for x in g.c]
    inv = F.inv(next(x for x in flat if x))
    M = [g.scale(inv) for g in M]
    return d2, _section_columns(H.dual(), -d2, Qd, M)


def grading_of(E):
    """Grading of a nilpotent Higgs bundle with theta != 0: tgt = ker theta."""
    c = E.curve
    F = c.F
    th = E.theta[INF]
    if m2_is_zero(th):
        raise FiltrationFlat("theta vanishes")
    col = (th[0][0], th[1][0]) if not (th[0][0].is_zero() and th[1][0].is_zero()) else (th[0][1], th[1][1])
    H = E.bundle
    d, cols = _sub_line_through(H, col)
    d2, rows = quotient_rows(H, d, cols)
    tgt = LineBundle.O(c.atlas, d)
    src = LineBundle.O(c.atlas, d2)
    phis = []
    for i in c.charts:
        r = rows[i]
        f = cols[i]
        if not r[0].is_zero():
            w = (r[0].inverse(), _fr(F, 0))
        else:
            w = (_fr(F, 0), r[1].inverse())
        tw = m2_vec(E.theta[i], w)
        lam = tw[0] / f[0] if not f[0].is_zero() else tw[1] / f[1]
        phis.append(lam * tgt.g(i) / (c.u(i) * src.g(i)))
    if any(not (x - phis[0]).is_zero() for x in phis):
        raise ChartIncompatible("grading field not chart independent")
    return GradedHiggs(c, src, tgt, phis[0])
