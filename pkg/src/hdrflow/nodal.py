"""Totally degenerate (g, r)-curves.

A curve is a connected trivalent graph whose vertices are copies of
(P^1, {0, 1, inf}).  Each edge is a node and carries one label, the
marked point it occupies on both of its components, so the two sides
share a local coordinate.  Legs are the r marked points.

Cohomology of sheaves on the nodal curve is computed through the
normalization sequence; all component data comes from the (0,3) model
built with the rest of the package.
"""

from collections import deque
from functools import lru_cache

from .exactalg import field, rank, SemilinearMap, rank_kernel_image
from .logcurve import INF, MarkedProjLine, h0_dim, h1_dim, hypercoh_h1_dR
from .bundles import residue, splitting_type, max_sub_line
from .cartier import build_atlas, inverse_cartier

LABELS = (0, 1, INF)


class TDCurveError(ValueError):
    pass


def _label(x):
    if x in (INF, "inf", "oo", "infinity"):
        return INF
    try:
        v = int(x)
    except (TypeError, ValueError):
        raise TDCurveError("bad label %r" % (x,))
    if v not in (0, 1):
        raise TDCurveError("bad label %r" % (x,))
    return v


class TDCurve:
    def __init__(self, g, r, edges, labels, legs):
        self.g, self.r = g, r
        self.edges = [tuple(e) for e in edges]
        self.labels = list(labels)
        self.legs = [tuple(l) for l in legs]

    @property
    def nu(self):
        return 2 * self.g - 2 + self.r

    @property
    def delta(self):
        return 3 * self.g - 3 + self.r

    def vertices(self):
        return range(self.nu)

    def points_at(self, v):
        """Labels of the half-edges and legs at vertex v."""
        out = []
        for (a, b), lab in zip(self.edges, self.labels):
            out += [lab] * ((a == v) + (b == v))
        out += [lab for w, lab in self.legs if w == v]
        return out

    def cycle_basis(self):
        """Fundamental cycles of a BFS tree, as lists of (edge, orientation)."""
        parent = {0: None}
        queue = deque([0])
        tree = set()
        while queue:
            v = queue.popleft()
            for j, (a, b) in enumerate(self.edges):
                if v not in (a, b):
                    continue
                w = b if a == v else a
                if w not in parent:
                    parent[w] = (j, v)
                    tree.add(j)
                    queue.append(w)

        def path_to_root(v):
            out = []
            while parent[v] is not None:
                j, up = parent[v]
                out.append((j, v))
                v = up
            return out

        cycles = []
        for j, (a, b) in enumerate(self.edges):
            if j in tree:
                continue
            # walk a -> b along the edge, then back to a through the tree
            cyc = [(j, 1)]
            pb, pa = path_to_root(b), path_to_root(a)
            while pb and pa and pb[-1] == pa[-1]:
                pb.pop()
                pa.pop()
            # up from b: v is the tail; down to a: v is the head
            for k, v in pb:
                cyc.append((k, 1 if self.edges[k][0] == v else -1))
            for k, v in reversed(pa):
                cyc.append((k, 1 if self.edges[k][1] == v else -1))
            cycles.append(cyc)
        return cycles

    def to_spec(self):
        lab = lambda x: "inf" if x == INF else str(x)
        return {"type": "td", "g": self.g, "r": self.r, "edges": [list(e) for e in self.edges],
                "labels": [lab(x) for x in self.labels], "legs": [[v, lab(x)] for v, x in self.legs]}

    def __repr__(self):
        return "TDCurve(g=%d, r=%d, edges=%s)" % (self.g, self.r, self.edges)


def build_td(g, r, edges, labels, legs=()):
    """Validate and build a t.d. (g, r)-curve."""
    nu, delta = 2 * g - 2 + r, 3 * g - 3 + r
    if g < 0 or r < 0 or nu < 1:
        raise TDCurveError("no stable t.d. curve with g=%d, r=%d" % (g, r))
    edges = [tuple(int(x) for x in e) for e in edges]
    if len(edges) != delta:
        raise TDCurveError("expected %d nodes, got %d" % (delta, len(edges)))
    if len(legs) != r:
        raise TDCurveError("expected %d legs, got %d" % (r, len(legs)))
    if len(labels) != len(edges):
        raise TDCurveError("one label per edge required")
    labs = []
    for x in labels:
        if isinstance(x, (list, tuple)):
            if len(x) != 2 or _label(x[0]) != _label(x[1]):
                raise TDCurveError("both sides of a node must carry the same label")
            x = x[0]
        labs.append(_label(x))
    legs = [(int(v), _label(x)) for v, x in legs]
    for a, b in edges:
        if a == b:
            raise TDCurveError("self-nodes are not supported")
        if not (0 <= a < nu and 0 <= b < nu):
            raise TDCurveError("edge (%d,%d) out of range for %d components" % (a, b, nu))
    for v, _ in legs:
        if not 0 <= v < nu:
            raise TDCurveError("leg on unknown component %d" % v)
    C = TDCurve(g, r, edges, labs, legs)
    for v in C.vertices():
        pts = C.points_at(v)
        if sorted(pts, key=str) != sorted(LABELS, key=str):
            raise TDCurveError("labeling at component %d is not excellent: %s" % (v, pts))
    seen, stack = {0}, [0]
    while stack:
        v = stack.pop()
        for a, b in edges:
            for x, y in ((a, b), (b, a)):
                if x == v and y not in seen:
                    seen.add(y)
                    stack.append(y)
    if len(seen) != nu:
        raise TDCurveError("dual graph is not connected")
    return C


def from_spec(spec):
    if spec.get("type") != "td":
        raise TDCurveError("not a t.d. curve spec")
    return build_td(spec["g"], spec["r"], spec["edges"], spec["labels"], spec.get("legs", []))


def theta_graph():
    return build_td(2, 0, [(0, 1)] * 3, [0, 1, INF])


def necklace():
    """(1, 2): two components joined at 0 and 1, one leg each at inf."""
    return build_td(1, 2, [(0, 1)] * 2, [0, 1], [(0, INF), (1, INF)])


def tetrahedron():
    """(3, 0): K4 with its proper 3-edge-colouring."""
    return build_td(3, 0, [(0, 1), (2, 3), (0, 2), (1, 3), (0, 3), (1, 2)],
                    [0, 0, 1, 1, INF, INF])


def tripod():
    return build_td(0, 3, [], [], [(0, 0), (0, 1), (0, INF)])


# ----------------------------------------------------------------------
# cohomology via the normalization sequence

def _mm(F, A, B):
    return tuple(tuple(F.add(F.mul(A[i][0], B[0][j]), F.mul(A[i][1], B[1][j])) for j in range(2))
                 for i in range(2))


def _section_value(F, k, d, label):
    # t^k in O(d): frame 1 on finite charts, t^d at infinity
    if label == INF:
        return 1 if k == d else 0
    return F.pow(label, k)


def normalization_h1(curve, F, d, sign):
    """h^1 of a sheaf that is O(d) on each component, glued by `sign` at nodes.

    0 -> S -> gamma_* gamma^* S -> (+) k_P -> 0 gives
    h^1(S) = sum h^1(O(d)) + delta - rank(H^0 of components -> node fibres).
    """
    n0 = h0_dim(d)
    rows = []
    for (a, b), lab in zip(curve.edges, curve.labels):
        row = [0] * (curve.nu * n0)
        for k in range(n0):
            val = _section_value(F, k, d, lab)
            row[a * n0 + k] = F.add(row[a * n0 + k], val)
            row[b * n0 + k] = F.sub(row[b * n0 + k], F.mul(sign % F.p, val))
        rows.append(row)
    rk = rank(F, rows, curve.nu * n0) if rows and n0 else 0
    return curve.nu * h1_dim(d) + curve.delta - rk


class ComponentModel:
    """C^{-1}(omega (+) O, theta_a) on (P^1, {0, 1, inf}) with the standard lift."""

    def __init__(self, p, a=1):
        self.p = p
        self.curve = MarkedProjLine(p, [0, 1, INF])
        from .periodicity import maximal_higgs
        self.E = maximal_higgs(self.curve, a)
        self.flat = inverse_cartier(self.E.to_higgs(), build_atlas(self.curve))
        self.split = splitting_type(self.flat.bundle)
        self.sub = max_sub_line(self.flat.bundle, self.split)
        self.residues = {P: residue(self.flat, P) for P in LABELS}
        self.values = {P: self.sub.value_at(P) for P in LABELS}
        F = self.curve.F
        # h = [e1] + b [e2] in the natural frame at P
        self.b = {P: F.div(v[1], v[0]) if v[0] else None for P, v in self.values.items()}
        self.derham_dim = hypercoh_h1_dR(self.curve, self.E.tgt.d - self.E.src.d).dim


@lru_cache(maxsize=None)
def component_model(p, a=1):
    return ComponentModel(p, a)


class NodalDims:
    def __init__(self, curve, p, sequence, closed):
        self.curve, self.p = curve, p
        self.sequence, self.closed = sequence, closed

    def agree(self):
        return self.sequence == self.closed

    def to_dict(self):
        return {k: {"sequence": self.sequence[k], "closed_form": self.closed[k]} for k in self.closed}


def residue_gluing_map(curve, p):
    """(a_v) -> residue mismatch at every node, a sigma-linear map k^nu -> k^(4 delta).

    Res(nabla_a) = a^p N at each point; gluing at a node through
    B = [[1, mu], [0, -1]] reads  Res_u B = B (-Res_v).
    """
    F = field(p, 1)
    model = component_model(p)
    B = ((1, 0), (0, F.neg(1)))
    rows = []
    for (u, v), lab in zip(curve.edges, curve.labels):
        N = model.residues[lab]
        left, right = _mm(F, N, B), _mm(F, B, N)
        for x in range(2):
            for y in range(2):
                row = [0] * curve.nu
                row[u] = F.add(row[u], left[x][y])
                row[v] = F.add(row[v], right[x][y])
                rows.append(row)
    return SemilinearMap(F, rows, twist=1, ncols=curve.nu)


def h1_dims(curve, p):
    """dim H^1(F^*T), dim W_F = dim H^1(T), dim B: by the sequence and in closed form."""
    F = field(p, 1)
    g, r = curve.g, curve.r
    model = component_model(p)
    # T_log restricts to O(-1) and omega_log glues by -1 across a node
    seq_FT = normalization_h1(curve, F, -p, (-1) ** p)
    seq_T = normalization_h1(curve, F, -1, -1)
    w_f = rank_kernel_image(frobenius_coords_map(curve, F))[0] if curve.delta else 0
    rk, _, _ = rank_kernel_image(residue_gluing_map(curve, p))
    kernel = curve.nu - rk
    # component H^1_dR is spanned by the a-parameter
    if model.derham_dim != 1:
        raise RuntimeError("unexpected de Rham dimension %d on a component" % model.derham_dim)
    seq_B = curve.delta + kernel
    sequence = {"H1_FT": seq_FT, "H1_T": seq_T, "W_F": w_f, "B": seq_B}
    closed = {"H1_FT": (2 * p + 1) * (g - 1) + p * r, "H1_T": 3 * g - 3 + r,
              "W_F": 3 * g - 3 + r, "B": 3 * g - 2 + r}
    return NodalDims(curve, p, sequence, closed)


def arithmetic_genus(curve, p):
    return normalization_h1(curve, field(p, 1), 0, 1)


def frobenius_coords_map(curve, F):
    """F^*: H^1(T) = k^delta -> H^1(F^*T), landing in the node block."""
    p = F.p
    comp = curve.nu * h1_dim(-p)
    rows = [[0] * curve.delta for _ in range(comp)]
    for j in range(curve.delta):
        rows.append([1 if k == j else 0 for k in range(curve.delta)])
    return SemilinearMap(F, rows, twist=1, ncols=curve.delta)


def frobenius_coords(curve, F, lam):
    """Coordinates of F^*[E_lambda]: zero on components, lambda^p at the nodes."""
    return frobenius_coords_map(curve, F)(list(lam))


# ----------------------------------------------------------------------
# gluing

class TwoTorsionClass:
    def __init__(self, signs):
        self.signs = tuple(signs)

    def is_trivial(self):
        return all(s == 1 for s in self.signs)

    def square(self):
        return TwoTorsionClass([s * s for s in self.signs])

    def to_dict(self):
        return {"signs": list(self.signs), "trivial": self.is_trivial(),
                "square_trivial": self.square().is_trivial()}


class GluedBundle:
    """Copies of the component model glued at nodes by [[1, mu_j], [0, -1]]."""

    def __init__(self, curve, p, model, mu, kind="flat"):
        self.curve, self.p, self.model = curve, p, model
        self.mu = list(mu)
        self.kind = kind
        F = model.curve.F
        self.F = F
        self.b = [(model.b[lab], model.b[lab]) for lab in curve.labels]
        self.x = [(model.values[lab][0], model.values[lab][0]) for lab in curve.labels]

    def gluing_matrix(self, j):
        return ((1, self.mu[j]), (0, self.F.neg(1)))

    def b_values(self):
        return [x for pair in self.b for x in pair]

    def to_dict(self):
        s = self.F.to_str
        return {"kind": self.kind, "splitting_on_components": list(self.model.split),
                "mu": [s(m) for m in self.mu], "b": [[s(x) for x in pair] for pair in self.b]}


def base_flat_bundle(curve, p):
    """The xi_0 representative: every component carries C^{-1}(omega (+) O, theta_1), mu = 0."""
    model = component_model(p)
    F = model.curve.F
    glued = GluedBundle(curve, p, model, [0] * curve.delta)
    if any(b is None or b == 0 for b in glued.b_values()):
        raise RuntimeError("sub line meets [e1] at a node")
    # residues must glue, which forces a common a-parameter
    if curve.delta:
        _, ker, _ = rank_kernel_image(residue_gluing_map(curve, p))
        if len(ker) != 1 or any(x != ker[0][0] for x in ker[0]):
            raise RuntimeError("residue gluing does not force equal parameters")
    for j in range(curve.delta):
        lab = curve.labels[j]
        R = model.residues[lab]
        Bj = glued.gluing_matrix(j)
        minus_R = tuple(tuple(F.neg(x) for x in row) for row in R)
        if _mm(F, R, Bj) != _mm(F, Bj, minus_R):
            raise RuntimeError("residues do not glue at node %d" % j)
    return glued


def _node_gluable(F, bu, bv, mu):
    """Some u in k^* with (1, b_u) = u B (1, b_v)."""
    w = (F.add(1, F.mul(mu, bv)), F.neg(bv))
    return [u for u in range(1, F.p) if (F.mul(u, w[0]), F.mul(u, w[1])) == (1, bu)]


class Intersection:
    def __init__(self, mu, u, chars, torsion):
        self.mu, self.u, self.chars, self.torsion = mu, u, chars, torsion

    def to_dict(self):
        return {"mu": list(self.mu), "u": list(self.u), "node_characters": list(self.chars),
                "two_torsion": self.torsion.to_dict()}


def solve_unique_intersection(glued):
    """The mu-vector along which the degree (p+1)/2 sub lines glue.

    Per node (1, b_u) = u B (1, b_v) gives u = -b_u/b_v and
    mu = (1/u - 1)/b_v, i.e. u = -1 and mu = -2/b when b_u = b_v.
    """
    F, curve, p = glued.F, glued.curve, glued.p
    k = (p + 1) // 2
    mus, us, chars = [], [], []
    for j in range(curve.delta):
        bu, bv = glued.b[j]
        xu, xv = glued.x[j]
        u = F.neg(F.div(bu, bv))
        mus.append(F.div(F.sub(F.inv(u), 1), bv))
        us.append(u)
        # sub line frames glue by x_v/(u x_u); omega^k by (-1)^k
        c = F.div(xv, F.mul(F.mul(u, xu), (-1) ** k % p))
        chars.append(c)
    if any(c not in (1, p - 1) for c in chars):
        raise RuntimeError("glued sub line is not a two-torsion twist of omega^k")
    signs = []
    for cyc in curve.cycle_basis():
        acc = 1
        for j, o in cyc:
            acc = F.mul(acc, chars[j] if o > 0 else F.inv(chars[j]))
        signs.append(1 if acc == 1 else -1)
    return Intersection(mus, us, [1 if c == 1 else -1 for c in chars], TwoTorsionClass(signs))


def mu_scan(glued):
    """All mu in F_p^delta for which every node admits a gluing."""
    from itertools import product
    F, curve = glued.F, glued.curve
    per_node = [[m for m in range(F.p) if _node_gluable(F, glued.b[j][0], glued.b[j][1], m)]
                for j in range(curve.delta)]
    out = []
    for mu in product(range(F.p), repeat=curve.delta):
        if all(mu[j] in per_node[j] for j in range(curve.delta)):
            out.append(list(mu))
    return out


def ordinary_map(glued, scale=None):
    """lambda -> s-check^2 (lambda^p) on the node block, s-check(P_j) = b_j."""
    F, curve = glued.F, glued.curve
    if scale is None:
        scale = [F.mul(glued.b[j][0], glued.b[j][0]) for j in range(curve.delta)]
    diag = [[scale[i] if i == j else 0 for j in range(curve.delta)] for i in range(curve.delta)]
    return SemilinearMap(F, diag, twist=1, ncols=curve.delta)


def nodal_ordinary(glued, scale=None):
    if not glued.curve.delta:
        return True
    rk, _, _ = rank_kernel_image(ordinary_map(glued, scale))
    return rk == glued.curve.delta
