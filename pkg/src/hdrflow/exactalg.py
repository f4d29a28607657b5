"""Exact arithmetic over small finite fields.

Elements of GF(p^m) are stored as integers whose base-p digits are the
coefficients against a fixed primitive modulus.  Polynomials, rational
functions and Laurent polynomials carry a reference to their field; the
linear algebra helpers work on plain lists of such integers.
"""

from functools import lru_cache
import re


class ExactArithmeticError(ArithmeticError):
    pass


def _is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


class GF:
    """The field with p**m elements."""

    def __init__(self, p, m=1):
        if not _is_prime(p) or p == 2:
            raise ValueError("p must be an odd prime, got %r" % (p,))
        if m < 1:
            raise ValueError("extension degree must be >= 1")
        self.p, self.m = p, m
        self.q = p ** m
        self.modulus, self._exp = _primitive_modulus(p, m)
        q1 = self.q - 1
        self._log = [0] * self.q
        for k in range(q1):
            self._log[self._exp[k]] = k
        self._exp = self._exp + self._exp
        self._neg = [self._digits_neg(a) for a in range(self.q)]
        self._addtab = None
        if m > 1 and self.q <= 729:
            self._addtab = [[self._digits_add(a, b) for b in range(self.q)]
                            for a in range(self.q)]

    def __repr__(self):
        return "GF(%d^%d)" % (self.p, self.m)

    def __reduce__(self):
        return (field, (self.p, self.m))

    # digit helpers
    def _digits_add(self, a, b):
        p, r, s = self.p, 0, 1
        while a or b:
            r += ((a % p + b % p) % p) * s
            a //= p
            b //= p
            s *= p
        return r

    def _digits_neg(self, a):
        p, r, s = self.p, 0, 1
        while a:
            r += ((-(a % p)) % p) * s
            a //= p
            s *= p
        return r

    def coeffs(self, a):
        out = []
        for _ in range(self.m):
            out.append(a % self.p)
            a //= self.p
        return out

    def from_coeffs(self, cs):
        cs = list(cs)
        if len(cs) > self.m:
            raise ValueError("too many coefficients for %r" % self)
        v = 0
        for c in reversed(cs):
            v = v * self.p + (c % self.p)
        return v

    def from_int(self, n):
        return n % self.p

    def gen(self):
        return self._exp[1]

    def elements(self):
        return range(self.q)

    # arithmetic on encodings
    def add(self, a, b):
        if self.m == 1:
            return (a + b) % self.p
        if self._addtab is not None:
            return self._addtab[a][b]
        return self._digits_add(a, b)

    def neg(self, a):
        return self._neg[a]

    def sub(self, a, b):
        return self.add(a, self._neg[b])

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        if self.m == 1:
            return a * b % self.p
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in %r" % self)
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, n):
        if a == 0:
            if n < 0:
                raise ZeroDivisionError("zero to a negative power")
            return 1 if n == 0 else 0
        return self._exp[(self._log[a] * n) % (self.q - 1)]

    def frob(self, a, e=1):
        """sigma^e(a) = a^(p^e)."""
        e %= self.m
        if e == 0 or a == 0:
            return a
        return self._exp[(self._log[a] * self.p ** e) % (self.q - 1)]

    def frob_inv(self, a, e=1):
        return self.frob(a, -e)

    def log(self, a):
        return self._log[a]

    # text form
    def to_str(self, a):
        cs = self.coeffs(a)
        if self.m == 1:
            return str(cs[0])
        parts = [str(cs[0])]
        for i in range(1, self.m):
            parts.append("%d*x" % cs[i] if i == 1 else "%d*x^%d" % (cs[i], i))
        return "+".join(parts)

    def parse(self, s):
        s = str(s).replace(" ", "")
        if s == "":
            raise ValueError("empty field element")
        cs = [0] * self.m
        for term in re.split(r"(?=[+-])", s):
            if not term:
                continue
            m = re.fullmatch(r"([+-]?)(\d*)(?:\*?x(?:\^(\d+))?)?", term)
            if m is None or (m.group(2) == "" and "x" not in term):
                raise ValueError("cannot parse field element %r" % s)
            sign = -1 if m.group(1) == "-" else 1
            c = int(m.group(2)) if m.group(2) else 1
            k = 0
            if "x" in term:
                k = int(m.group(3)) if m.group(3) else 1
            if k >= self.m:
                raise ValueError("power x^%d out of range in %r" % (k, s))
            cs[k] = (cs[k] + sign * c) % self.p
        return self.from_coeffs(cs)

    def __call__(self, v):
        if isinstance(v, FieldElement):
            if v.F is not self:
                raise ValueError("element of %r used in %r" % (v.F, self))
            return v
        if isinstance(v, str):
            return FieldElement(self, self.parse(v))
        return FieldElement(self, self.from_int(int(v)))


def _primitive_modulus(p, m):
    """Least primitive monic polynomial of degree m, with its power table.

    Candidates are ordered lexicographically on (c_{m-1}, ..., c_0).
    For m == 1 the modulus is x - g for the least primitive root g.
    """
    q = p ** m
    if m == 1:
        for g in range(2 if p > 2 else 1, p):
            exp, x = [], 1
            for _ in range(p - 1):
                exp.append(x)
                x = x * g % p
            if len(set(exp)) == p - 1:
                return (p - g, 1), exp
        return (p - 1, 1), [1]
    from itertools import product
    for tail in product(range(p), repeat=m):
        low = tuple(reversed(tail))
        if low[0] == 0:
            continue
        exp = _powers_of_x(p, m, low, q)
        if exp is not None:
            return low + (1,), exp
    raise ExactArithmeticError("no primitive polynomial found")


def _powers_of_x(p, m, low, q):
    cur = [1] + [0] * (m - 1)
    exp = []
    for k in range(q - 1):
        v = 0
        for c in reversed(cur):
            v = v * p + c
        if k > 0 and v == 1:
            return None
        exp.append(v)
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(m):
                cur[i] = (cur[i] - top * low[i]) % p
    v = 0
    for c in reversed(cur):
        v = v * p + c
    return exp if v == 1 else None


@lru_cache(maxsize=None)
def field(p, m=1):
    return GF(p, m)


class FieldElement:
    """An immutable element of GF(p^m) with operator support."""

    __slots__ = ("F", "v")

    def __init__(self, F, v):
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "v", v)

    def __setattr__(self, k, v):
        raise AttributeError("FieldElement is immutable")

    def _co(self, o):
        if isinstance(o, FieldElement):
            if o.F is not self.F:
                raise ValueError("mixed fields %r and %r" % (self.F, o.F))
            return o.v
        if isinstance(o, int):
            return self.F.from_int(o)
        return NotImplemented

    def __add__(self, o):
        b = self._co(o)
        return NotImplemented if b is NotImplemented else FieldElement(self.F, self.F.add(self.v, b))

    __radd__ = __add__

    def __sub__(self, o):
        b = self._co(o)
        return NotImplemented if b is NotImplemented else FieldElement(self.F, self.F.sub(self.v, b))

    def __rsub__(self, o):
        b = self._co(o)
        return NotImplemented if b is NotImplemented else FieldElement(self.F, self.F.sub(b, self.v))

    def __mul__(self, o):
        b = self._co(o)
        return NotImplemented if b is NotImplemented else FieldElement(self.F, self.F.mul(self.v, b))

    __rmul__ = __mul__

    def __truediv__(self, o):
        b = self._co(o)
        return NotImplemented if b is NotImplemented else FieldElement(self.F, self.F.div(self.v, b))

    def __rtruediv__(self, o):
        b = self._co(o)
        return NotImplemented if b is NotImplemented else FieldElement(self.F, self.F.div(b, self.v))

    def __neg__(self):
        return FieldElement(self.F, self.F.neg(self.v))

    def __pow__(self, n):
        return FieldElement(self.F, self.F.pow(self.v, n))

    def __eq__(self, o):
        if isinstance(o, FieldElement):
            return self.F is o.F and self.v == o.v
        if isinstance(o, int):
            return self.v == self.F.from_int(o)
        return NotImplemented

    def __hash__(self):
        return hash((self.F.p, self.F.m, self.v))

    def __bool__(self):
        return self.v != 0

    def frob(self, e=1):
        return FieldElement(self.F, self.F.frob(self.v, e))

    def inverse(self):
        return FieldElement(self.F, self.F.inv(self.v))

    def __str__(self):
        return self.F.to_str(self.v)

    def __repr__(self):
        return "FieldElement(%s in %r)" % (self, self.F)


class W2Scalar:
    """An element of Z/p^2."""

    __slots__ = ("p", "v")

    def __init__(self, p, v):
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "v", v % (p * p))

    def __setattr__(self, k, v):
        raise AttributeError("W2Scalar is immutable")

    def _co(self, o):
        if isinstance(o, W2Scalar):
            if o.p != self.p:
                raise ValueError("mixed primes")
            return o.v
        return int(o)

    def __add__(self, o):
        return W2Scalar(self.p, self.v + self._co(o))

    __radd__ = __add__

    def __sub__(self, o):
        return W2Scalar(self.p, self.v - self._co(o))

    def __rsub__(self, o):
        return W2Scalar(self.p, self._co(o) - self.v)

    def __mul__(self, o):
        return W2Scalar(self.p, self.v * self._co(o))

    __rmul__ = __mul__

    def __neg__(self):
        return W2Scalar(self.p, -self.v)

    def __pow__(self, n):
        return W2Scalar(self.p, pow(self.v, n, self.p * self.p))

    def __eq__(self, o):
        if isinstance(o, W2Scalar):
            return self.p == o.p and self.v == o.v
        if isinstance(o, int):
            return self.v == o % (self.p * self.p)
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.v))

    def reduce(self):
        """Image in F_p."""
        return self.v % self.p

    def divp(self):
        """x/p in F_p for x in pZ/p^2."""
        if self.v % self.p:
            raise ExactArithmeticError("%d is not divisible by %d" % (self.v, self.p))
        return self.v // self.p

    @classmethod
    def teichmuller_free(cls, p, a, eps=0):
        """The lift a + p*eps with 0 <= a < p."""
        return cls(p, (a % p) + p * (eps % p))

    def __repr__(self):
        return "W2Scalar(%d mod %d^2)" % (self.v, self.p)


# ----------------------------------------------------------------------
# polynomials

class Poly:
    """Univariate polynomial over a GF; coefficients low degree first."""

    __slots__ = ("F", "c")

    def __init__(self, F, coeffs=()):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "c", tuple(c))

    def __setattr__(self, k, v):
        raise AttributeError("Poly is immutable")

    @classmethod
    def const(cls, F, a):
        return cls(F, [a])

    @classmethod
    def monomial(cls, F, k, a=1):
        return cls(F, [0] * k + [a])

    @classmethod
    def x_minus(cls, F, a):
        return cls(F, [F.neg(a), 1])

    @classmethod
    def from_roots(cls, F, roots):
        out = cls(F, [1])
        for a in roots:
            out = out * cls.x_minus(F, a)
        return out

    def deg(self):
        return len(self.c) - 1

    def is_zero(self):
        return not self.c

    def lead(self):
        return self.c[-1] if self.c else 0

    def __getitem__(self, k):
        return self.c[k] if 0 <= k < len(self.c) else 0

    def _lift(self, o):
        if isinstance(o, Poly):
            return o
        if isinstance(o, FieldElement):
            return Poly(self.F, [o.v])
        if isinstance(o, int):
            return Poly(self.F, [self.F.from_int(o)])
        return None

    def __add__(self, o):
        o = self._lift(o)
        if o is None:
            return NotImplemented
        F, a, b = self.F, self.c, o.c
        n = max(len(a), len(b))
        return Poly(F, [F.add(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0)
                        for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.F, [self.F.neg(x) for x in self.c])

    def __sub__(self, o):
        o = self._lift(o)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._lift(o)
        if o is None:
            return NotImplemented
        F, a, b = self.F, self.c, o.c
        if not a or not b:
            return Poly(F)
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
        return Poly(F, out)

    __rmul__ = __mul__

    def scale(self, a):
        return Poly(self.F, [self.F.mul(a, x) for x in self.c])

    def __pow__(self, n):
        out, base = Poly(self.F, [1]), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def divmod(self, o):
        F = self.F
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        dq = len(r) - len(o.c)
        if dq < 0:
            return Poly(F), self
        q = [0] * (dq + 1)
        il = F.inv(o.c[-1])
        for k in range(dq, -1, -1):
            coef = F.mul(r[k + len(o.c) - 1], il)
            q[k] = coef
            if coef:
                for j, y in enumerate(o.c):
                    r[k + j] = F.sub(r[k + j], F.mul(coef, y))
        return Poly(F, q), Poly(F, r[:len(o.c) - 1])

    def __floordiv__(self, o):
        return self.divmod(o)[0]

    def __mod__(self, o):
        return self.divmod(o)[1]

    def exact_div(self, o):
        qq, r = self.divmod(o)
        if not r.is_zero():
            raise ExactArithmeticError("inexact polynomial division")
        return qq

    def __eq__(self, o):
        if isinstance(o, Poly):
            return self.F is o.F and self.c == o.c
        if isinstance(o, int):
            return self == Poly(self.F, [self.F.from_int(o)])
        return NotImplemented

    def __hash__(self):
        return hash((self.F.p, self.F.m, self.c))

    def monic(self):
        if self.is_zero():
            return self
        return self.scale(self.F.inv(self.c[-1]))

    def __call__(self, a):
        F, r = self.F, 0
        for x in reversed(self.c):
            r = F.add(F.mul(r, a), x)
        return r

    def deriv(self):
        F = self.F
        return Poly(F, [F.mul(F.from_int(i), self.c[i]) for i in range(1, len(self.c))])

    def frob_pullback(self):
        """F*: coefficients through sigma, t -> t^p."""
        F, p = self.F, self.F.p
        out = [0] * ((len(self.c) - 1) * p + 1 if self.c else 0)
        for i, x in enumerate(self.c):
            out[i * p] = F.frob(x)
        return Poly(F, out)

    def is_pth_power(self):
        p = self.F.p
        return all(x == 0 for i, x in enumerate(self.c) if i % p)

    def pth_root(self):
        """Inverse of frob_pullback."""
        if not self.is_pth_power():
            raise ExactArithmeticError("polynomial is not a Frobenius pullback")
        F, p = self.F, self.F.p
        return Poly(F, [F.frob_inv(self.c[i]) for i in range(0, len(self.c), p)])

    def taylor_shift(self, a):
        """f(t + a)."""
        F = self.F
        out = Poly(F)
        lin = Poly(F, [a, 1])
        for x in reversed(self.c):
            out = out * lin + Poly(F, [x])
        return out

    def reverse(self, n=None):
        n = self.deg() if n is None else n
        c = list(self.c) + [0] * (n + 1 - len(self.c))
        return Poly(self.F, list(reversed(c[:n + 1])))

    def valuation(self):
        for i, x in enumerate(self.c):
            if x:
                return i
        return None

    def roots(self):
        return [a for a in self.F.elements() if self(a) == 0] if self.c else list(self.F.elements())

    def root_multiplicity(self, a):
        f, k = self, 0
        lin = Poly.x_minus(self.F, a)
        while not f.is_zero():
            qq, r = f.divmod(lin)
            if not r.is_zero():
                break
            f, k = qq, k + 1
        return k

    def to_str(self, var="t"):
        if not self.c:
            return "0"
        F, parts = self.F, []
        for i, x in enumerate(self.c):
            if x == 0:
                continue
            cs = F.to_str(x)
            if F.m > 1:
                cs = "(" + cs + ")"
            if i == 0:
                parts.append(cs)
            elif i == 1:
                parts.append("%s*%s" % (cs, var))
            else:
                parts.append("%s*%s^%d" % (cs, var, i))
        return " + ".join(parts)

    def __repr__(self):
        return "Poly(%s)" % self.to_str()


def poly_gcd(a, b):
    """Monic gcd of two polynomials, not both zero."""
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd of two zero polynomials")
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_xgcd(a, b):
    F = a.F
    r0, r1 = a, b
    s0, s1 = Poly(F, [1]), Poly(F)
    t0, t1 = Poly(F), Poly(F, [1])
    while not r1.is_zero():
        qq, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - qq * s1
        t0, t1 = t1, t0 - qq * t1
    il = F.inv(r0.lead())
    return r0.scale(il), s0.scale(il), t0.scale(il)


# ----------------------------------------------------------------------
# rational functions

class Frac:
    """Rational function num/den in t, den monic and coprime to num."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _reduced=False):
        F = num.F
        if den is None:
            den = Poly(F, [1])
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _reduced:
            if num.is_zero():
                den = Poly(F, [1])
            else:
                g = poly_gcd(num, den)
                if g.deg() > 0:
                    num, den = num.exact_div(g), den.exact_div(g)
                lc = den.lead()
                if lc != 1:
                    il = F.inv(lc)
                    num, den = num.scale(il), den.scale(il)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, k, v):
        raise AttributeError("Frac is immutable")

    @property
    def F(self):
        return self.num.F

    @classmethod
    def const(cls, F, a):
        return cls(Poly(F, [a]), _reduced=True)

    @classmethod
    def t_power(cls, F, k):
        if k >= 0:
            return cls(Poly.monomial(F, k), _reduced=True)
        return cls(Poly(F, [1]), Poly.monomial(F, -k), _reduced=True)

    @classmethod
    def lin(cls, F, a, k=1):
        """(t - a)^k, k of either sign."""
        base = Poly.x_minus(F, a) ** abs(k)
        if k >= 0:
            return cls(base, _reduced=True)
        return cls(Poly(F, [1]), base, _reduced=True)

    def _lift(self, o):
        if isinstance(o, Frac):
            return o
        if isinstance(o, Poly):
            return Frac(o, _reduced=True)
        if isinstance(o, FieldElement):
            return Frac.const(self.F, o.v)
        if isinstance(o, int):
            return Frac.const(self.F, self.F.from_int(o))
        return None

    def is_zero(self):
        return self.num.is_zero()

    def __add__(self, o):
        o = self._lift(o)
        if o is None:
            return NotImplemented
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        if self.den == o.den:
            return Frac(self.num + o.num, self.den)
        return Frac(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return Frac(-self.num, self.den, _reduced=True)

    def __sub__(self, o):
        o = self._lift(o)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._lift(o)
        if o is None:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return Frac(Poly(self.F))
        return Frac(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return Frac(self.den, self.num)

    def __truediv__(self, o):
        o = self._lift(o)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, o):
        return self._lift(o) * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        return Frac(self.num ** n, self.den ** n, _reduced=True)

    def __eq__(self, o):
        o2 = self._lift(o) if not isinstance(o, Frac) else o
        if o2 is None:
            return NotImplemented
        return self.num == o2.num and self.den == o2.den

    def __hash__(self):
        return hash((self.num, self.den))

    def deg(self):
        """deg num - deg den; minus the order at infinity."""
        if self.is_zero():
            return None
        return self.num.deg() - self.den.deg()

    def is_poly(self):
        return self.den.deg() == 0

    def order_at(self, a):
        """Order of vanishing at the finite point a (None for zero)."""
        if self.is_zero():
            return None
        return self.num.root_multiplicity(a) - self.den.root_multiplicity(a)

    def order_at_inf(self):
        return None if self.is_zero() else -self.deg()

    def is_regular_at(self, a):
        if a is None:
            return self.is_zero() or self.deg() <= 0
        return self.den(a) != 0

    def value_at(self, a):
        """Value at a finite point or at infinity (a is None)."""
        F = self.F
        if self.is_zero():
            return 0
        if a is None:
            d = self.deg()
            if d > 0:
                raise ExactArithmeticError("pole at infinity")
            if d < 0:
                return 0
            return F.div(self.num.lead(), self.den.lead())
        dv = self.den(a)
        if dv == 0:
            raise ExactArithmeticError("pole at %s" % F.to_str(a))
        return F.div(self.num(a), dv)

    def laurent_at(self, a, upto):
        """Coefficients of (t-a)^k for ord <= k < upto, as (ord, list)."""
        F = self.F
        if self.is_zero():
            return upto, []
        n = self.num.taylor_shift(a)
        d = self.den.taylor_shift(a)
        vn, vd = n.valuation(), d.valuation()
        n = Poly(F, n.c[vn:])
        d = Poly(F, d.c[vd:])
        v = vn - vd
        count = upto - v
        if count <= 0:
            return v, []
        return v, _series_div(F, n, d, count)

    def principal_part_at(self, a):
        """Coefficients c_k of (t-a)^(-k), k = 1..order of pole."""
        v, cs = self.laurent_at(a, 0)
        if v >= 0:
            return []
        out = cs[:]
        out.reverse()
        return out

    def laurent_at_inf(self, lowest):
        """Coefficients of t^k for lowest <= k <= deg, highest first."""
        F = self.F
        if self.is_zero():
            return None, []
        d = self.deg()
        if d < lowest:
            return d, []
        n = self.num.reverse()
        den = self.den.reverse()
        return d, _series_div(F, n, den, d - lowest + 1)

    def frob_pullback(self):
        return Frac(self.num.frob_pullback(), self.den.frob_pullback(), _reduced=True)

    def is_pth_power(self):
        return self.num.is_pth_power() and self.den.is_pth_power()

    def pth_root(self):
        if not self.is_pth_power():
            raise ExactArithmeticError("rational function is not a Frobenius pullback")
        return Frac(self.num.pth_root(), self.den.pth_root(), _reduced=True)

    def deriv(self):
        n, d = self.num, self.den
        return Frac(n.deriv() * d - n * d.deriv(), d * d)

    def invert_coordinate(self):
        """f(1/t)."""
        F = self.F
        if self.is_zero():
            return self
        dn, dd = self.num.deg(), self.den.deg()
        n = self.num.reverse() * Poly.monomial(F, max(dd - dn, 0))
        d = self.den.reverse() * Poly.monomial(F, max(dn - dd, 0))
        return Frac(n, d)

    def map_coeffs(self, fn):
        F = self.F
        return Frac(Poly(F, [fn(x) for x in self.num.c]), Poly(F, [fn(x) for x in self.den.c]))

    def to_str(self):
        if self.den.deg() == 0:
            return self.num.to_str()
        return "(%s)/(%s)" % (self.num.to_str(), self.den.to_str())

    def __repr__(self):
        return "Frac(%s)" % self.to_str()


def _series_div(F, n, d, count):
    """First count power-series coefficients of n/d, d(0) != 0."""
    inv0 = F.inv(d[0])
    out = []
    for k in range(count):
        s = n[k]
        for j in range(1, min(k, d.deg()) + 1):
            s = F.sub(s, F.mul(d[j], out[k - j]))
        out.append(F.mul(s, inv0))
    return out


class LaurentPoly:
    """Finite Laurent series sum c_k t^k stored as (valuation, coeffs)."""

    __slots__ = ("F", "val", "c")

    def __init__(self, F, terms=None):
        d = {}
        for k, x in (terms or {}).items():
            if x:
                d[k] = x
        object.__setattr__(self, "F", F)
        if d:
            lo, hi = min(d), max(d)
            object.__setattr__(self, "val", lo)
            object.__setattr__(self, "c", tuple(d.get(k, 0) for k in range(lo, hi + 1)))
        else:
            object.__setattr__(self, "val", 0)
            object.__setattr__(self, "c", ())

    def __setattr__(self, k, v):
        raise AttributeError("LaurentPoly is immutable")

    def terms(self):
        return {self.val + i: x for i, x in enumerate(self.c) if x}

    def coeff(self, k):
        i = k - self.val
        return self.c[i] if 0 <= i < len(self.c) else 0

    def is_zero(self):
        return not self.c

    def __add__(self, o):
        F, out = self.F, self.terms()
        for k, x in o.terms().items():
            out[k] = F.add(out.get(k, 0), x)
        return LaurentPoly(F, out)

    def __neg__(self):
        return LaurentPoly(self.F, {k: self.F.neg(x) for k, x in self.terms().items()})

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        F = self.F
        if isinstance(o, int):
            o = F.from_int(o)
            return LaurentPoly(F, {k: F.mul(o, x) for k, x in self.terms().items()})
        out = {}
        for i, x in self.terms().items():
            for j, y in o.terms().items():
                out[i + j] = F.add(out.get(i + j, 0), F.mul(x, y))
        return LaurentPoly(F, out)

    def scale(self, a):
        return LaurentPoly(self.F, {k: self.F.mul(a, x) for k, x in self.terms().items()})

    def __eq__(self, o):
        return isinstance(o, LaurentPoly) and self.F is o.F and self.terms() == o.terms()

    def __hash__(self):
        return hash(tuple(sorted(self.terms().items())))

    def frob_pullback(self):
        F = self.F
        return LaurentPoly(F, {k * F.p: F.frob(x) for k, x in self.terms().items()})

    def to_frac(self):
        F = self.F
        if self.is_zero():
            return Frac(Poly(F))
        num = Poly(F, self.c)
        if self.val >= 0:
            return Frac(num * Poly.monomial(F, self.val))
        return Frac(num, Poly.monomial(F, -self.val))

    @classmethod
    def from_frac(cls, f):
        """Exact conversion; the denominator must be a power of t."""
        F = f.F
        if f.den.deg() > 0 and any(f.den.c[:-1]):
            raise ExactArithmeticError("denominator is not a power of t")
        shift = -f.den.deg()
        return cls(F, {i + shift: x for i, x in enumerate(f.num.c) if x})

    def __repr__(self):
        return "LaurentPoly(%r)" % {k: self.F.to_str(x) for k, x in self.terms().items()}


# ----------------------------------------------------------------------
# linear algebra on lists of encoded field elements

def rref(F, rows, ncols=None):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    A = [list(r) for r in rows]
    if ncols is None:
        ncols = len(A[0]) if A else 0
    piv = []
    r = 0
    for c in range(ncols):
        k = next((i for i in range(r, len(A)) if A[i][c]), None)
        if k is None:
            continue
        A[r], A[k] = A[k], A[r]
        il = F.inv(A[r][c])
        A[r] = [F.mul(il, x) for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                Ai, Ar = A[i], A[r]
                A[i] = [F.sub(Ai[j], F.mul(f, Ar[j])) for j in range(ncols)]
        piv.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], piv


def kernel_basis(F, rows, ncols):
    """Basis of {x : A x = 0}, one vector per free column, RREF-canonical."""
    R, piv = rref(F, rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for i, pc in enumerate(piv):
            v[pc] = F.neg(R[i][fc])
        out.append(v)
    return out


def rank(F, rows, ncols=None):
    return len(rref(F, rows, ncols)[1])


def mat_vec(F, A, v):
    out = []
    for row in A:
        s = 0
        for x, y in zip(row, v):
            if x and y:
                s = F.add(s, F.mul(x, y))
        out.append(s)
    return out


def mat_mul(F, A, B):
    if not A:
        return []
    cols = list(zip(*B)) if B else []
    return [[_dot(F, row, col) for col in cols] for row in A]


def _dot(F, a, b):
    s = 0
    for x, y in zip(a, b):
        if x and y:
            s = F.add(s, F.mul(x, y))
    return s


def span_basis(F, vectors, n):
    """RREF basis of the span of the given vectors of length n."""
    R, _ = rref(F, vectors, n)
    return R


def in_span(F, basis, v, n):
    return rank(F, list(basis) + [list(v)], n) == rank(F, list(basis), n)


class SemilinearMap:
    """f(v) = M * sigma^twist(v) between coordinate spaces over GF(p^m)."""

    def __init__(self, F, matrix, twist=0, ncols=None):
        self.F = F
        self.matrix = [list(r) for r in matrix]
        self.twist = twist
        if ncols is None:
            ncols = len(self.matrix[0]) if self.matrix else 0
        self.nrows, self.ncols = len(self.matrix), ncols
        if any(len(r) != ncols for r in self.matrix):
            raise ValueError("ragged matrix")

    def __call__(self, v):
        if len(v) != self.ncols:
            raise ValueError("dimension mismatch: %d vs %d" % (len(v), self.ncols))
        F = self.F
        return mat_vec(F, self.matrix, [F.frob(x, self.twist) for x in v])

    def compose(self, g):
        """self o g."""
        if self.ncols != g.nrows:
            raise ValueError("dimension mismatch in composition")
        F = self.F
        twisted = [[F.frob(x, self.twist) for x in row] for row in g.matrix]
        return SemilinearMap(F, mat_mul(F, self.matrix, twisted) if self.matrix else [],
                             self.twist + g.twist, g.ncols)

    def _linear(self):
        return self.twist % self.F.m == 0

    def restriction_of_scalars(self):
        """The F_p matrix of the map on F_p^(m*ncols)."""
        F, m = self.F, self.F.m
        cols = []
        for j in range(self.ncols):
            for i in range(m):
                e = [0] * self.ncols
                e[j] = F.from_coeffs([0] * i + [1])
                img = self(e)
                cols.append([c for y in img for c in F.coeffs(y)])
        nr = self.nrows * m
        return [[cols[j][i] for j in range(len(cols))] for i in range(nr)]


def _prime_subfield(F):
    return field(F.p, 1)


def _unpack(F, w):
    m = F.m
    return [F.from_coeffs(w[k * m:(k + 1) * m]) for k in range(len(w) // m)]


def rank_kernel_image(f):
    """(rank over GF(p^m), kernel basis, image basis) of a semilinear map.

    Twisted maps are handled by restriction of scalars to F_p; the
    returned bases are RREF bases over GF(p^m) of the (GF(p^m)-stable)
    kernel and image.
    """
    F = f.F
    if f._linear():
        R, piv = rref(F, f.matrix, f.ncols)
        ker = kernel_basis(F, f.matrix, f.ncols)
        cols = [list(c) for c in zip(*f.matrix)] if f.matrix else []
        img = span_basis(F, cols, f.nrows) if cols else []
        return len(piv), ker, img
    Fp = _prime_subfield(F)
    A = f.restriction_of_scalars()
    nc = f.ncols * F.m
    kp = kernel_basis(Fp, A, nc)
    rk_p = nc - len(kp)
    if rk_p % F.m:
        raise ExactArithmeticError("F_p rank not divisible by m")
    ker = span_basis(F, [_unpack(F, w) for w in kp], f.ncols) if kp else []
    cols = [list(c) for c in zip(*A)] if A else []
    ip = span_basis(Fp, cols, f.nrows * F.m) if cols else []
    img = span_basis(F, [_unpack(F, w) for w in ip], f.nrows) if ip else []
    return rk_p // F.m, ker, img


def solve_linear(f, target):
    """Solutions of f(x) = target as (particular, kernel basis) or None.

    For twisted maps the kernel basis is over F_p (restriction of scalars).
    """
    F = f.F
    if len(target) != f.nrows:
        raise ValueError("dimension mismatch: target %d vs %d rows" % (len(target), f.nrows))
    if f._linear():
        aug = [row + [b] for row, b in zip(f.matrix, target)]
        R, piv = rref(F, aug, f.ncols + 1)
        if f.ncols in piv:
            return None
        x = [0] * f.ncols
        for i, pc in enumerate(piv):
            x[pc] = R[i][f.ncols]
        return x, kernel_basis(F, f.matrix, f.ncols)
    Fp = _prime_subfield(F)
    A = f.restriction_of_scalars()
    nc = f.ncols * F.m
    b = [c for y in target for c in F.coeffs(y)]
    aug = [row + [bb] for row, bb in zip(A, b)]
    R, piv = rref(Fp, aug, nc + 1)
    if nc in piv:
        return None
    x = [0] * nc
    for i, pc in enumerate(piv):
        x[pc] = R[i][nc]
    return _unpack(F, x), [_unpack(F, w) for w in kernel_basis(Fp, A, nc)]


# ----------------------------------------------------------------------
# small matrices over a commutative ring (Frac, FieldElement, ...)

def m2_mul(A, B):
    return ((A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]),
            (A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]))


def m2_det(A):
    return A[0][0] * A[1][1] - A[0][1] * A[1][0]


def m2_inv(A):
    d = m2_det(A)
    if d.is_zero():
        raise ZeroDivisionError("singular 2x2 matrix")
    di = d.inverse()
    return ((A[1][1] * di, -A[0][1] * di), (-A[1][0] * di, A[0][0] * di))


def m2_add(A, B):
    return tuple(tuple(A[i][j] + B[i][j] for j in range(2)) for i in range(2))


def m2_sub(A, B):
    return tuple(tuple(A[i][j] - B[i][j] for j in range(2)) for i in range(2))


def m2_scale(c, A):
    return tuple(tuple(c * A[i][j] for j in range(2)) for i in range(2))


def m2_map(fn, A):
    return tuple(tuple(fn(A[i][j]) for j in range(2)) for i in range(2))


def m2_is_zero(A):
    return all(A[i][j].is_zero() for i in range(2) for j in range(2))


def m2_vec(A, v):
    return (A[0][0] * v[0] + A[0][1] * v[1], A[1][0] * v[0] + A[1][1] * v[1])


def frac_identity(F):
    one, zero = Frac.const(F, 1), Frac.const(F, 0)
    return ((one, zero), (zero, one))


def frac_zero(F):
    z = Frac.const(F, 0)
    return ((z, z), (z, z))
