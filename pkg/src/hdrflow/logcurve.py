"""The marked projective line as a log curve.

Points are elements of F_p or INF.  Every line bundle is stored through a
global rational frame whose divisor is d * [inf]; sections and Cech
cochains are then plain rational functions ("global coefficients"), and the
chart frames g_i only matter for local matrices.
"""

from .exactalg import Frac, Poly, field, SemilinearMap, rank_kernel_image, kernel_basis

INF = "inf"


class CurveError(ValueError):
    pass


class CoverMismatch(ValueError):
    pass


def parse_point(x, p):
    if x is None or (isinstance(x, str) and x.strip().lower() in ("inf", "oo", "infinity")):
        return INF
    try:
        v = int(x)
    except (TypeError, ValueError):
        raise CurveError("marked point %r is not in F_%d or inf" % (x, p))
    if isinstance(x, str) and not x.strip().lstrip("-").isdigit():
        raise CurveError("marked point %r is not in F_%d or inf" % (x, p))
    return v % p


def _mobius(p, x1, x2, x3):
    """Map sending x1, x2, x3 to 0, 1, INF (projective 2x2 matrix)."""
    if x3 == INF:
        M = ((1, -x1), (0, x2 - x1))
    elif x1 == INF:
        M = ((0, x2 - x3), (1, -x3))
    elif x2 == INF:
        M = ((1, -x1), (1, -x3))
    else:
        M = ((x2 - x3, -x1 * (x2 - x3)), (x2 - x1, -x3 * (x2 - x1)))

    def apply(t):
        x, z = (1, 0) if t == INF else (t, 1)
        num = (M[0][0] * x + M[0][1] * z) % p
        den = (M[1][0] * x + M[1][1] * z) % p
        if den == 0:
            return INF
        return num * pow(den, p - 2, p) % p
    return apply


class MarkedProjLine:
    """(P^1, D) with D in F_p u {INF}, normalized so 0, 1, INF come first."""

    def __init__(self, p, marked, m=1, normalize=True):
        self.F = field(p, m)
        self.p, self.m = p, m
        pts = [parse_point(x, p) for x in marked]
        if len(set(pts)) != len(pts):
            raise CurveError("marked points must be distinct")
        if len(pts) < 3:
            raise CurveError("need at least three marked points, got %d" % len(pts))
        if normalize:
            if not {0, 1, INF} <= set(pts):
                f = _mobius(p, pts[0], pts[1], pts[2])
                pts = [f(x) for x in pts]
            rest = [x for x in pts if x not in (0, 1, INF)]
            pts = [0, 1, INF] + rest
        self.marked = tuple(pts)
        self.r = len(pts)
        self.finite = tuple(x for x in pts if x != INF)
        if INF not in pts:
            raise CurveError("INF must be marked")
        F = self.F
        self.P = Poly.from_roots(F, self.finite)
        self.charts = self.finite + (INF,)
        self.atlas = Cover(F, self.finite)
        self._ell = {a: Frac(Poly.x_minus(F, a), _reduced=True) for a in self.finite}
        self._ell[INF] = Frac(Poly(F, [0, F.neg(1)]), _reduced=True)

    def __repr__(self):
        return "MarkedProjLine(p=%d, m=%d, marked=%s)" % (self.p, self.m, self.marked_strings())

    def __eq__(self, o):
        return isinstance(o, MarkedProjLine) and (self.p, self.m, self.marked) == (o.p, o.m, o.marked)

    def __hash__(self):
        return hash((self.p, self.m, self.marked))

    def marked_strings(self):
        return [str(x) for x in self.marked]

    @classmethod
    def from_spec(cls, spec, m=1):
        if not isinstance(spec, dict) or spec.get("type") != "rational":
            raise CurveError("expected a spec with type 'rational'")
        if "p" not in spec or "marked" not in spec:
            raise CurveError("rational spec needs 'p' and 'marked'")
        return cls(int(spec["p"]), spec["marked"], m=m)

    def to_spec(self):
        return {"type": "rational", "p": self.p, "marked": self.marked_strings()}

    def over(self, m):
        """Same curve with coefficients in GF(p^m)."""
        return MarkedProjLine(self.p, self.marked, m=m, normalize=False)

    def ell(self, i):
        """Local log coordinate: omega_i = dt / ell_i."""
        return self._ell[i]

    def u(self, i):
        """dt/P = u_i * omega_i."""
        return self._ell[i] / Frac(self.P, _reduced=True)

    def frame_ratio(self, i, j):
        """omega_j / omega_i."""
        return self._ell[i] / self._ell[j]

    def point_in_chart(self, i):
        return i

    def log_derivation(self, i, f):
        """D_i f = ell_i * df/dt."""
        return self._ell[i] * f.deriv()

    def omega(self, n=1, twist=0):
        return LineBundle.log_power(self, n, twist)


class Cover:
    """Charts V_a (a finite) and V_inf for a finite point set containing 0."""

    def __init__(self, F, finite):
        self.F = F
        self.finite = tuple(finite)
        self.charts = self.finite + (INF,)

    def __eq__(self, o):
        return isinstance(o, Cover) and self.F is o.F and self.finite == o.finite

    def __hash__(self):
        return hash((self.F.p, self.F.m, self.finite))

    def __repr__(self):
        return "Cover(%s)" % (list(self.charts),)

    def refines_std(self):
        return 0 in self.finite


def _splits(den, pts):
    rest = den
    for a in pts:
        while rest.deg() > 0 and rest(a) == 0:
            rest = rest.exact_div(Poly.x_minus(rest.F, a))
    return rest.deg() == 0


def std_cover(F):
    return Cover(F, (0,))


class LineBundle:
    """A line bundle of degree d with chart frames g_i (e_i = g_i * e_glob)."""

    def __init__(self, cover, d, frames=None, spec=None):
        self.cover, self.d = cover, d
        F = cover.F
        if frames is None:
            one = Frac.const(F, 1)
            frames = {a: one for a in cover.finite}
            frames[INF] = Frac.t_power(F, d)
            spec = (0, d)
        self.frames = dict(frames)
        # (n, k) when the frames are those of omega^n (x) O(k)
        self.spec = spec

    @classmethod
    def O(cls, cover, d):
        return cls(cover, d)

    @classmethod
    def log_power(cls, curve, n, twist=0):
        """omega_log^n (x) O(twist) in natural frames."""
        F = curve.F
        cover = curve.atlas
        frames = {}
        for i in cover.charts:
            base = Frac(curve.P, _reduced=True) / curve.ell(i)
            g = base ** n
            if i == INF:
                g = g * Frac.t_power(F, twist)
            frames[i] = g
        return cls(cover, n * (curve.r - 2) + twist, frames, (n, twist))

    def over(self, curve):
        """The same bundle on another coefficient field of the curve."""
        if self.spec is None:
            raise ValueError("bundle frames are not of standard type")
        n, k = self.spec
        if n == 0:
            return LineBundle.O(curve.atlas, k)
        return LineBundle.log_power(curve, n, k)

    def g(self, i):
        return self.frames[i]

    def transition(self, i, j):
        """T_ij with f_i = T_ij f_j."""
        return self.frames[j] / self.frames[i]

    def local(self, i, glob):
        return glob / self.frames[i]

    def tensor(self, o):
        if o.cover != self.cover:
            raise CoverMismatch("line bundles on different covers")
        spec = None
        if self.spec is not None and o.spec is not None:
            spec = (self.spec[0] + o.spec[0], self.spec[1] + o.spec[1])
        return LineBundle(self.cover, self.d + o.d,
                          {i: self.frames[i] * o.frames[i] for i in self.cover.charts}, spec)

    def dual(self):
        spec = None if self.spec is None else (-self.spec[0], -self.spec[1])
        return LineBundle(self.cover, -self.d, {i: self.frames[i].inverse() for i in self.cover.charts}, spec)

    def twist(self, n):
        return self.tensor(LineBundle.O(self.cover, n))

    def frobenius_pullback(self):
        p = self.cover.F.p
        spec = None if self.spec is None else (p * self.spec[0], p * self.spec[1])
        return LineBundle(self.cover, p * self.d,
                          {i: g.frob_pullback() for i, g in self.frames.items()}, spec)

    def degree_from_frames(self):
        """deg via sum over finite chart points of ord(T_{b,inf})."""
        total = 0
        for b in self.cover.finite:
            total += self.transition(b, INF).order_at(b)
        return total

    def __repr__(self):
        return "LineBundle(d=%d)" % self.d


# ----------------------------------------------------------------------
# H^0 and H^1 of O(d)

def h0_dim(d):
    return max(d + 1, 0)


def h1_dim(d):
    return max(-d - 1, 0)


def h0_basis(bundle):
    """Global sections t^0..t^d as global coefficients."""
    F = bundle.cover.F
    return [Poly.monomial(F, k) for k in range(bundle.d + 1)]


def h1_exponents(d):
    return list(range(-1, d, -1))


def h1_basis(bundle):
    F = bundle.cover.F
    std = std_cover(F)
    out = []
    for j in h1_exponents(bundle.d):
        out.append(CechClass(bundle.d, std, {(0, INF): Frac.t_power(F, j)}))
    return out


class CechClass:
    """A 1-cocycle of O(d) on a cover, in global coefficients.

    Stored by its values c_{a,inf}; c_ij = c_{i,inf} - c_{j,inf}.
    """

    def __init__(self, d, cover, cochain, check=True):
        self.d, self.cover = d, cover
        F = cover.F
        zero = Frac.const(F, 0)
        hub = {}
        for (i, j), v in cochain.items():
            if j == INF and i != INF:
                hub[i] = v
            elif i == INF and j != INF:
                hub[j] = -v
        for a in cover.finite:
            hub.setdefault(a, zero)
        self.hub = hub
        if check:
            for (i, j), v in cochain.items():
                if i == j:
                    if not v.is_zero():
                        raise ValueError("c_ii must vanish")
                    continue
                if not (self.value(i, j) - v).is_zero():
                    raise ValueError("cochain is not a cocycle on (%s,%s)" % (i, j))
            for a, v in hub.items():
                if not _splits(v.den, cover.finite):
                    raise ValueError("cochain has poles off the marked points")

    @property
    def F(self):
        return self.cover.F

    def value(self, i, j):
        F = self.cover.F
        if i == j:
            return Frac.const(F, 0)
        if j == INF:
            return self.hub[i]
        if i == INF:
            return -self.hub[j]
        return self.hub[i] - self.hub[j]

    def coords(self):
        """Coefficients of t^-1, ..., t^(d+1) in the canonical basis."""
        n = h1_dim(self.d)
        if n == 0:
            return []
        F = self.cover.F
        R = Frac.const(F, 0)
        for a in self.cover.finite:
            R = R + principal_part(self.hub[a], a)
        lo = self.d + 1
        top, cs = R.laurent_at_inf(lo)
        out = []
        for j in h1_exponents(self.d):
            if top is None or j > top:
                out.append(0)
            else:
                out.append(cs[top - j])
        return out

    def is_zero(self):
        return all(x == 0 for x in self.coords())

    def __add__(self, o):
        if o.cover != self.cover or o.d != self.d:
            raise CoverMismatch("adding classes on different covers/bundles")
        return CechClass(self.d, self.cover,
                         {(a, INF): self.hub[a] + o.hub[a] for a in self.cover.finite}, check=False)

    def __neg__(self):
        return CechClass(self.d, self.cover, {(a, INF): -self.hub[a] for a in self.cover.finite}, check=False)

    def __sub__(self, o):
        return self + (-o)

    def scale(self, c):
        cf = Frac.const(self.F, c)
        return CechClass(self.d, self.cover, {(a, INF): cf * self.hub[a] for a in self.cover.finite}, check=False)

    def map_values(self, fn, d=None, cover=None):
        return CechClass(self.d if d is None else d, cover or self.cover,
                         {(a, INF): fn(self.hub[a]) for a in self.cover.finite}, check=False)

    def cochain(self):
        ch = self.cover.charts
        return {(i, j): self.value(i, j) for i in ch for j in ch if i != j}

    def __repr__(self):
        return "CechClass(d=%d, coords=%s)" % (self.d, [self.F.to_str(x) for x in self.coords()])


def principal_part(f, a):
    """Principal part of f at the finite point a, as a rational function."""
    F = f.F
    cs = f.principal_part_at(a)
    out = Frac.const(F, 0)
    for k, c in enumerate(cs, start=1):
        if c:
            out = out + Frac.lin(F, a, -k) * Frac.const(F, c)
    return out


def class_from_coords(d, coords, F, cover=None):
    cover = cover or std_cover(F)
    exps = h1_exponents(d)
    if len(coords) != len(exps):
        raise ValueError("expected %d coordinates for O(%d)" % (len(exps), d))
    c = Frac.const(F, 0)
    for j, x in zip(exps, coords):
        if x:
            c = c + Frac.t_power(F, j) * Frac.const(F, x)
    return CechClass(d, cover, {(a, INF): c for a in cover.finite}, check=False)


def coboundary(d, cover, g):
    """(delta g)_ij = g_j - g_i for a 0-cochain g of O(d) in global coefficients."""
    for i, gi in g.items():
        frame = Frac.t_power(cover.F, d) if i == INF else Frac.const(cover.F, 1)
        loc = gi / frame
        if i == INF:
            if not loc.is_regular_at(None):
                raise ValueError("g_inf not regular at infinity")
        elif not _splits(loc.den, [x for x in cover.finite if x != i]):
            raise ValueError("g_%s not regular on its chart" % (i,))
    return CechClass(d, cover, {(a, INF): g[INF] - g[a] for a in cover.finite}, check=False)


def refine_class(c, target):
    """Move a class to another cover; canonical coordinates are unchanged."""
    if target.F is not c.cover.F:
        raise CoverMismatch("covers over different fields")
    if not (c.cover.refines_std() and target.refines_std()):
        raise CoverMismatch("covers have no common refinement through the standard cover")
    if target == c.cover:
        return c
    if target.finite == (0,):
        return class_from_coords(c.d, c.coords(), c.F, target)
    std = c if c.cover.finite == (0,) else refine_class(c, std_cover(c.F))
    v = std.hub[0]
    return CechClass(c.d, target, {(a, INF): v for a in target.finite}, check=False)


def frobenius_pullback_h1(c):
    """F^*: H^1(O(d)) -> H^1(O(pd)), sigma-linear."""
    return c.map_values(lambda f: f.frob_pullback(), d=c.cover.F.p * c.d)


def frobenius_pullback_matrix(F, d):
    """Matrix of F^* on canonical coordinates (twist 1)."""
    p = F.p
    src = h1_exponents(d)
    dst = h1_exponents(p * d)
    rows = [[1 if p * j == k else 0 for j in src] for k in dst]
    return SemilinearMap(F, rows, twist=1, ncols=len(src))


def multiply_class(c, f, d_new):
    """Cup with a global section f of O(d_new - d)."""
    return c.map_values(lambda v: v * f, d=d_new)


def mult_matrix(F, d, f, d_new):
    """Matrix of c -> f*c from H^1(O(d)) to H^1(O(d_new)) on canonical coordinates."""
    cols = []
    ff = f if isinstance(f, Frac) else Frac(f, _reduced=True)
    std = std_cover(F)
    for j in h1_exponents(d):
        c = CechClass(d, std, {(0, INF): Frac.t_power(F, j)}, check=False)
        cols.append(multiply_class(c, ff, d_new).coords())
    n = h1_dim(d_new)
    return [[cols[k][i] for k in range(len(cols))] for i in range(n)]


# ----------------------------------------------------------------------
# de Rham cohomology of (F^* O(d'), nabla_can)

class DeRhamH1:
    """H^1 of O(p d') --nabla--> O(p d') (x) omega_log for the canonical connection.

    Fits in 0 -> coker(H^0 nabla) -> H^1_dR --alpha--> B -> 0 with
    B = ker(H^1 nabla).  beta: H^1(O(d')) -> H^1_dR is nu -> (F^* nu, 0).
    """

    def __init__(self, curve, d_prime):
        self.curve = curve
        F = curve.F
        p = F.p
        self.d_prime = d_prime
        self.d = p * d_prime
        self.d_omega = self.d + curve.r - 2
        P = Frac(curve.P, _reduced=True)
        # H^0 part
        n0 = h0_dim(self.d)
        n1 = h0_dim(self.d_omega)
        rows = [[0] * n0 for _ in range(n1)]
        for k in range(n0):
            img = (P * Frac(Poly.monomial(F, k), _reduced=True).deriv()).num
            for i in range(n1):
                rows[i][k] = img[i]
        rk = rank_kernel_image(SemilinearMap(F, rows, 0, n0))[0] if n0 and n1 else 0
        self.coker_dim = n1 - rk
        # H^1 part
        self.nabla_h1 = [list(r) for r in _nabla_h1_matrix(F, self.d, self.d_omega, P)]
        nh = h1_dim(self.d)
        self.B = kernel_basis(F, self.nabla_h1, nh) if nh else []
        if nh and not self.nabla_h1:
            self.B = [[1 if i == k else 0 for i in range(nh)] for k in range(nh)]
        self.dim = self.coker_dim + len(self.B)

    def alpha_image(self):
        return self.B

    def beta(self):
        return frobenius_pullback_matrix(self.curve.F, self.d_prime)

    def expected_dim(self):
        return h1_dim(self.d_prime) + h0_dim(self.d_prime + self.curve.r - 2)


def _nabla_h1_matrix(F, d, d_omega, P):
    std = std_cover(F)
    cols = []
    for j in h1_exponents(d):
        c = CechClass(d, std, {(0, INF): Frac.t_power(F, j)}, check=False)
        cols.append(c.map_values(lambda v: P * v.deriv(), d=d_omega).coords())
    n = h1_dim(d_omega)
    return [[cols[k][i] for k in range(len(cols))] for i in range(n)]


def hypercoh_h1_dR(curve, d_prime):
    return DeRhamH1(curve, d_prime)
