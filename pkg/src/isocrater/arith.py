"""Exact arithmetic in F_p and F_{p^k}, plus dense univariate polynomials.

Elements are thin wrappers around a raw representation owned by the field:
an ``int`` in ``[0, p)`` for prime fields and a ``k``-tuple of ints (low to
high) for extensions.  Polynomials store raw coefficients and call back into
the field, so the hot loops never allocate element objects.
"""

from __future__ import annotations

import random
from functools import lru_cache

from sympy import isprime

__all__ = [
    "ArithError",
    "FieldElem",
    "PrimeField",
    "ExtField",
    "Poly",
    "make_extension",
    "poly_roots",
    "distinct_degree_factors",
    "irreducible_factors",
    "norm_product",
    "one_root",
]


class ArithError(ValueError):
    """Raised for invalid field construction or mixed-field operands."""


class FieldElem:
    __slots__ = ("field", "raw")

    def __init__(self, field, raw):
        self.field = field
        self.raw = raw

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            if other.field is not self.field and other.field != self.field:
                raise ArithError(f"mixed-field operands: {self.field} and {other.field}")
            return other.raw
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.field, self.field.add(self.raw, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.field, self.field.sub(self.raw, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.field, self.field.sub(o, self.raw))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.field, self.field.mul(self.raw, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.field, self.field.mul(self.raw, self.field.inv(o)))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.field, self.field.mul(o, self.field.inv(self.raw)))

    def __neg__(self):
        return FieldElem(self.field, self.field.neg(self.raw))

    def __pow__(self, e: int):
        return FieldElem(self.field, self.field.pow(self.raw, e))

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.field == other.field and self.raw == other.raw
        if isinstance(other, int):
            return self.raw == self.field.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.order, self.raw))

    def __bool__(self):
        return not self.field.is_zero(self.raw)

    def __lt__(self, other):
        return self.encode() < other.encode()

    def __repr__(self):
        return f"{self.field.fmt(self.raw)}"

    def inv(self) -> FieldElem:
        return FieldElem(self.field, self.field.inv(self.raw))

    def sqrt(self) -> FieldElem | None:
        r = self.field.sqrt(self.raw)
        return None if r is None else FieldElem(self.field, r)

    def is_square(self) -> bool:
        return self.field.is_square(self.raw)

    def frobenius(self, j: int = 1) -> FieldElem:
        return FieldElem(self.field, self.field.frobenius(self.raw, j))

    def encode(self):
        return self.raw

    def is_zero(self) -> bool:
        return self.field.is_zero(self.raw)


class _FieldBase:
    """Shared helpers; subclasses provide the raw operations."""

    p: int
    k: int
    order: int

    def __call__(self, value) -> FieldElem:
        if isinstance(value, FieldElem):
            if value.field == self:
                return value
            raise ArithError(f"element of {value.field} is not in {self}")
        return FieldElem(self, self.convert(value))

    @property
    def zero(self) -> FieldElem:
        return FieldElem(self, self.zero_raw)

    @property
    def one(self) -> FieldElem:
        return FieldElem(self, self.one_raw)

    def pow(self, a, e: int):
        if e < 0:
            a = self.inv(a)
            e = -e
        result = self.one_raw
        mul = self.mul
        while e:
            if e & 1:
                result = mul(result, a)
            e >>= 1
            if e:
                a = mul(a, a)
        return result

    def is_square(self, a) -> bool:
        if self.is_zero(a):
            return True
        return self.pow(a, (self.order - 1) // 2) == self.one_raw

    def frobenius(self, a, j: int = 1):
        for _ in range(j % self.k if self.k > 1 else 0):
            a = self.pow(a, self.p)
        return a

    @property
    def _nonresidue(self):
        cached = self.__dict__.get("_nr")
        if cached is None:
            for cand in self._candidates():
                if not self.is_zero(cand) and not self.is_square(cand):
                    cached = cand
                    break
            self.__dict__["_nr"] = cached
        return cached

    def sqrt(self, a):
        """Canonical square root (smaller encoding) or None."""
        if self.is_zero(a):
            return a
        q = self.order
        if not self.is_square(a):
            return None
        if q % 4 == 3:
            r = self.pow(a, (q + 1) // 4)
        else:
            # Tonelli-Shanks
            s, t = 0, q - 1
            while t % 2 == 0:
                s += 1
                t //= 2
            z = self.pow(self._nonresidue, t)
            x = self.pow(a, (t + 1) // 2)
            b = self.pow(a, t)
            mul = self.mul
            one = self.one_raw
            m = s
            while b != one:
                i, bb = 0, b
                while bb != one:
                    bb = mul(bb, bb)
                    i += 1
                w = z
                for _ in range(m - i - 1):
                    w = mul(w, w)
                x = mul(x, w)
                z = mul(w, w)
                b = mul(b, z)
                m = i
            r = x
        other = self.neg(r)
        return min(r, other)

    def random_raw(self, rng: random.Random):
        raise NotImplementedError

    def random(self, rng: random.Random) -> FieldElem:
        return FieldElem(self, self.random_raw(rng))

    def elements(self):
        for raw in self._all_raw():
            yield FieldElem(self, raw)


class PrimeField(_FieldBase):
    """The prime field F_p with p >= 5."""

    def __init__(self, p: int):
        p = int(p)
        if p < 5 or not isprime(p):
            raise ArithError(f"characteristic must be a prime >= 5, got {p}")
        self.p = p
        self.k = 1
        self.order = p
        self.zero_raw = 0
        self.one_raw = 1
        self.base = self

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return f"F_{self.p}"

    is_prime_field = True

    def convert(self, value):
        return int(value) % self.p

    def from_int(self, n: int):
        return n % self.p

    def fmt(self, a):
        return str(a)

    def add(self, a, b):
        s = a + b
        return s - self.p if s >= self.p else s

    def sub(self, a, b):
        s = a - b
        return s + self.p if s < 0 else s

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def pow(self, a, e: int):
        if e < 0:
            return pow(self.inv(a), -e, self.p)
        return pow(a, e, self.p)

    def is_zero(self, a) -> bool:
        return a == 0

    def is_square(self, a) -> bool:
        return a == 0 or pow(a, (self.p - 1) // 2, self.p) == 1

    def frobenius(self, a, j: int = 1):
        return a

    def _candidates(self):
        return range(2, self.p)

    def _all_raw(self):
        return range(self.p)

    def random_raw(self, rng):
        return rng.randrange(self.p)

    def embed(self, raw_base):
        return raw_base


class ExtField(_FieldBase):
    """F_{p^k} = F_p[T]/(M(T)) with M monic irreducible of degree k.

    ``modulus`` lists the non-leading coefficients of M, low to high.
    """

    is_prime_field = False

    def __init__(self, base: PrimeField, modulus):
        self.base = base
        self.p = base.p
        self.k = len(modulus)
        if self.k < 1:
            raise ArithError("extension degree must be >= 1")
        self.modulus = tuple(int(c) % self.p for c in modulus)
        self.order = self.p ** self.k
        self.zero_raw = (0,) * self.k
        self.one_raw = (1,) + (0,) * (self.k - 1)
        # T^(k+i) mod M as coefficient rows, i = 0 .. k-2
        p, k = self.p, self.k
        rows = []
        cur = [(-c) % p for c in self.modulus]
        for _ in range(max(k - 1, 0)):
            rows.append(tuple(cur))
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                cur = [(x - top * c) % p for x, c in zip(cur, self.modulus)]
        self._red_rows = rows
        self._frob_matrix = None

    def __eq__(self, other):
        return isinstance(other, ExtField) and other.p == self.p and other.modulus == self.modulus

    def __hash__(self):
        return hash(("Fq", self.p, self.modulus))

    def __repr__(self):
        return f"F_{self.p}^{self.k}"

    def convert(self, value):
        if isinstance(value, int):
            return self.from_int(value)
        coeffs = [int(c) % self.p for c in value]
        if len(coeffs) > self.k:
            raise ArithError("too many coefficients for extension element")
        return tuple(coeffs) + (0,) * (self.k - len(coeffs))

    def from_int(self, n: int):
        return (n % self.p,) + (0,) * (self.k - 1)

    def embed(self, raw_base: int):
        """Raw image of a base-field raw value."""
        return (raw_base % self.p,) + (0,) * (self.k - 1)

    def lift(self, x: FieldElem) -> FieldElem:
        if x.field != self.base:
            raise ArithError(f"cannot lift {x.field} into {self}")
        return FieldElem(self, self.embed(x.raw))

    def fmt(self, a):
        return "[" + ",".join(map(str, a)) + "]"

    def gen(self) -> FieldElem:
        if self.k == 1:
            return FieldElem(self, ((-self.modulus[0]) % self.p,))
        return FieldElem(self, (0, 1) + (0,) * (self.k - 2))

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.p
        return tuple((-x) % p for x in a)

    def scale(self, a, c: int):
        p = self.p
        return tuple(x * c % p for x in a)

    def mul(self, a, b):
        k = self.k
        if k == 1:
            return (a[0] * b[0] % self.p,)
        prod = [0] * (2 * k - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        p = self.p
        low = prod[:k]
        for i, row in enumerate(self._red_rows):
            c = prod[k + i] % p
            if c:
                for j in range(k):
                    low[j] += c * row[j]
        return tuple(x % p for x in low)

    def is_zero(self, a) -> bool:
        return not any(a)

    def inv(self, a):
        if not any(a):
            raise ZeroDivisionError("inverse of zero")
        p = self.p
        # extended Euclid on F_p[T]: find u with u*a = 1 mod M
        r0 = list(self.modulus) + [1]
        r1 = _trim(list(a))
        s0, s1 = [0], [1]
        while len(r1) > 1:
            q, r = _int_divmod(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, _int_sub(s0, _int_mul(q, s1, p), p)
        c = pow(r1[0], -1, p)
        s1 = [x * c % p for x in s1]
        s1 = s1 + [0] * (self.k - len(s1))
        return tuple(s1[: self.k])

    def frobenius(self, a, j: int = 1):
        j %= self.k
        if j == 0:
            return a
        mat = self._frobenius_rows()
        p, k = self.p, self.k
        for _ in range(j):
            out = [0] * k
            for i, ai in enumerate(a):
                if ai:
                    row = mat[i]
                    for t in range(k):
                        out[t] += ai * row[t]
            a = tuple(x % p for x in out)
        return a

    def _frobenius_rows(self):
        if self._frob_matrix is None:
            t_p = self.pow(self.gen().raw, self.p) if self.k > 1 else self.one_raw
            rows = [self.one_raw]
            for _ in range(1, self.k):
                rows.append(self.mul(rows[-1], t_p))
            self._frob_matrix = rows
        return self._frob_matrix

    def _candidates(self):
        p, k = self.p, self.k
        for c in range(p):
            for lead in range(1, p):
                if k == 1:
                    yield (c,)
                    break
                yield (c, lead) + (0,) * (k - 2)

    def _all_raw(self):
        p, k = self.p, self.k
        for n in range(self.order):
            digits = []
            for _ in range(k):
                n, d = divmod(n, p)
                digits.append(d)
            yield tuple(digits)

    def random_raw(self, rng):
        return tuple(rng.randrange(self.p) for _ in range(self.k))


# ---------------------------------------------------------------------------
# integer-coefficient helpers (polynomials over F_p as int lists)


def _trim(c):
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def _int_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([v % p for v in out])


def _int_sub(a, b, p):
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _int_divmod(a, b, p):
    a = list(a)
    inv_lead = pow(b[-1], -1, p)
    db = len(b) - 1
    if len(a) - 1 < db:
        return [0], _trim(a)
    q = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] * inv_lead % p
        if c:
            q[i - db] = c
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % p
    return _trim(q), _trim(a[:db] if db else [0])


# ---------------------------------------------------------------------------
# polynomials


class Poly:
    """Dense polynomial over a field, coefficients low to high (raw values)."""

    __slots__ = ("field", "c")

    def __init__(self, field, coeffs):
        self.field = field
        c = list(coeffs)
        z = field.zero_raw
        while c and c[-1] == z:
            c.pop()
        self.c = c

    @classmethod
    def from_elems(cls, field, coeffs) -> Poly:
        return cls(field, [field(x).raw if isinstance(x, FieldElem) else field.convert(x) for x in coeffs])

    @classmethod
    def x(cls, field) -> Poly:
        return cls(field, [field.zero_raw, field.one_raw])

    @classmethod
    def const(cls, field, value) -> Poly:
        return cls(field, [field(value).raw])

    @classmethod
    def from_roots(cls, field, roots) -> Poly:
        out = cls(field, [field.one_raw])
        for r in roots:
            out = out * cls(field, [field.neg(field(r).raw), field.one_raw])
        return out

    # basic shape -----------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def coeff(self, i: int) -> FieldElem:
        return FieldElem(self.field, self.c[i] if i < len(self.c) else self.field.zero_raw)

    def coeffs(self) -> list:
        return [FieldElem(self.field, v) for v in self.c]

    def lc(self):
        return self.c[-1]

    def monic(self) -> Poly:
        if not self.c:
            return self
        F = self.field
        inv = F.inv(self.c[-1])
        return Poly(F, [F.mul(v, inv) for v in self.c])

    def __eq__(self, other):
        return isinstance(other, Poly) and self.field == other.field and self.c == other.c

    def __hash__(self):
        return hash((self.field, tuple(self.c)))

    def __repr__(self):
        F = self.field
        terms = [f"{F.fmt(v)}*x^{i}" for i, v in enumerate(self.c) if not F.is_zero(v)]
        return "Poly(" + (" + ".join(terms) if terms else "0") + f" over {F})"

    # arithmetic ------------------------------------------------------------
    def _wrap(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.field != self.field:
                raise ArithError("polynomials over different fields")
            return other
        return Poly(self.field, [self.field(other).raw])

    def __add__(self, other):
        other = self._wrap(other)
        F = self.field
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, v in enumerate(b):
            out[i] = F.add(out[i], v)
        return Poly(F, out)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return Poly(F, [F.neg(v) for v in self.c])

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __rsub__(self, other):
        return self._wrap(other) - self

    def __mul__(self, other):
        other = self._wrap(other)
        F = self.field
        a, b = self.c, other.c
        if not a or not b:
            return Poly(F, [])
        if F.is_prime_field:
            p = F.p
            out = [0] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                if x:
                    for j, y in enumerate(b):
                        out[i + j] += x * y
            return Poly(F, [v % p for v in out])
        out = [F.zero_raw] * (len(a) + len(b) - 1)
        mul, add, isz = F.mul, F.add, F.is_zero
        for i, x in enumerate(a):
            if not isz(x):
                for j, y in enumerate(b):
                    out[i + j] = add(out[i + j], mul(x, y))
        return Poly(F, out)

    __rmul__ = __mul__

    def scale(self, s) -> Poly:
        F = self.field
        r = F(s).raw
        return Poly(F, [F.mul(v, r) for v in self.c])

    def __pow__(self, e: int) -> Poly:
        out = Poly(self.field, [self.field.one_raw])
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def divmod(self, other: Poly):
        other = self._wrap(other)
        if not other.c:
            raise ZeroDivisionError("polynomial division by zero")
        F = self.field
        a = list(self.c)
        b = other.c
        db = len(b) - 1
        if len(a) - 1 < db:
            return Poly(F, []), Poly(F, a)
        inv_lead = F.inv(b[-1])
        q = [F.zero_raw] * (len(a) - db)
        if F.is_prime_field:
            p = F.p
            for i in range(len(a) - 1, db - 1, -1):
                c = a[i] * inv_lead % p
                if c:
                    q[i - db] = c
                    off = i - db
                    for j in range(db + 1):
                        a[off + j] = (a[off + j] - c * b[j]) % p
        else:
            mul, sub, isz = F.mul, F.sub, F.is_zero
            for i in range(len(a) - 1, db - 1, -1):
                if isz(a[i]):
                    continue
                c = mul(a[i], inv_lead)
                q[i - db] = c
                off = i - db
                for j in range(db + 1):
                    a[off + j] = sub(a[off + j], mul(c, b[j]))
        return Poly(F, q), Poly(F, a[:db])

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def gcd(self, other: Poly) -> Poly:
        a, b = self, self._wrap(other)
        while b.c:
            a, b = b, a % b
        return a.monic()

    def powmod(self, e: int, mod: Poly) -> Poly:
        result = Poly(self.field, [self.field.one_raw]) % mod
        base = self % mod
        while e:
            if e & 1:
                result = (result * base) % mod
            e >>= 1
            if e:
                base = (base * base) % mod
        return result

    def derivative(self) -> Poly:
        F = self.field
        return Poly(F, [F.mul(v, F.from_int(i)) for i, v in enumerate(self.c) if i > 0])

    def __call__(self, x):
        """Evaluate at an element of this field or of an extension of it."""
        F = self.field
        if isinstance(x, int):
            x = F(x)
        G = x.field
        if G == F:
            coeffs = self.c
        elif isinstance(G, ExtField) and G.base == F:
            coeffs = [G.embed(v) for v in self.c]
        else:
            raise ArithError(f"cannot evaluate a polynomial over {F} at an element of {G}")
        acc = G.zero_raw
        xr = x.raw
        mul, add = G.mul, G.add
        for v in reversed(coeffs):
            acc = add(mul(acc, xr), v)
        return FieldElem(G, acc)

    def lift(self, G: ExtField) -> Poly:
        if G == self.field:
            return self
        if not (isinstance(G, ExtField) and G.base == self.field):
            raise ArithError(f"cannot lift {self.field} polynomial into {G}")
        return Poly(G, [G.embed(v) for v in self.c])

    def compose_mod(self, inner: Poly, mod: Poly) -> Poly:
        """self(inner) mod mod, by Horner."""
        F = self.field
        acc = Poly(F, [])
        for v in reversed(self.c):
            acc = (acc * inner + Poly(F, [v])) % mod
        return acc


# ---------------------------------------------------------------------------
# irreducibility and extension construction


def _is_irreducible(f: Poly) -> bool:
    """Rabin's test over a prime field."""
    F = f.field
    k = f.degree
    if k <= 0:
        return False
    if k == 1:
        return True
    x = Poly.x(F)
    powers = [x % f]
    # X^(p^i) mod f for i = 1..k
    for _ in range(k):
        powers.append(powers[-1].powmod(F.p, f))
    if powers[k] != powers[0]:
        return False
    for r in _prime_divisors(k):
        g = (powers[k // r] - x).gcd(f)
        if g.degree != 0:
            return False
    return True


def _prime_divisors(n: int):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def _smallest_irreducible(p: int, k: int) -> tuple:
    F = PrimeField(p)
    if k == 1:
        return (0,)
    # the constant term must be nonzero, so start the lexicographic scan at c0 = 1
    digits = [1] + [0] * (k - 1)
    while True:
        f = Poly(F, digits + [1])
        if _is_irreducible(f):
            return tuple(digits)
        # increment in lexicographic order of (c0, ..., c_{k-1}): last position moves fastest
        i = k - 1
        while True:
            digits[i] += 1
            if digits[i] < p:
                break
            digits[i] = 0
            i -= 1
            if i < 0:
                raise ArithError(f"no irreducible polynomial of degree {k} over F_{p}")


@lru_cache(maxsize=None)
def _extension_cached(p: int, k: int) -> ExtField:
    return ExtField(PrimeField(p), _smallest_irreducible(p, k))


def make_extension(base: PrimeField, k: int) -> ExtField:
    """F_{p^k} using the lexicographically smallest monic irreducible modulus."""
    if k < 1:
        raise ArithError("extension degree must be >= 1")
    return _extension_cached(base.p, int(k))


# ---------------------------------------------------------------------------
# root finding

EXHAUSTIVE_LIMIT = 1 << 20
# scanning costs one evaluation per field element; past this much work splitting wins
_SCAN_WORK_LIMIT = 1 << 16


def distinct_degree_factors(f: Poly) -> list[tuple[int, Poly]]:
    """Distinct-degree factorization of a squarefree monic f over F_p.

    Returns (d, g_d) pairs where g_d is the product of the degree-d irreducible factors.
    """
    F = f.field
    if not F.is_prime_field:
        raise ArithError("distinct-degree factorization is implemented over prime fields")
    out = []
    f = f.monic()
    x = Poly.x(F)
    h = x % f if f.degree > 0 else x
    d = 0
    while f.degree >= 2 * (d + 1):
        d += 1
        h = h.powmod(F.p, f)
        g = (h - x).gcd(f)
        if g.degree > 0:
            out.append((d, g))
            f = f // g
            h = h % f
    if f.degree > 0:
        out.append((f.degree, f))
    return out


def irreducible_factors(f: Poly, seed: int = 0) -> list[Poly]:
    """Monic irreducible factors of a squarefree f over F_p, sorted by (degree, coefficients)."""
    rng = random.Random(seed)
    F = f.field
    out = []
    for d, g in distinct_degree_factors(f):
        stack = [g]
        half = (F.p**d - 1) // 2
        while stack:
            h = stack.pop()
            if h.degree == d:
                out.append(h.monic())
                continue
            while True:
                a = Poly(F, [rng.randrange(F.p) for _ in range(h.degree)])
                if a.degree <= 0:
                    continue
                s = a.powmod(half, h) - Poly(F, [1])
                e = s.gcd(h)
                if 0 < e.degree < h.degree:
                    stack.append(e)
                    stack.append((h // e).monic())
                    break
    out.sort(key=lambda q: (q.degree, q.c))
    return out


def norm_product(g: Poly, h: Poly):
    """Raw value of prod h(r) over the roots r of the monic polynomial g (a resultant)."""
    F = g.field
    g = g.monic()
    if g.degree <= 0:
        return F.one_raw
    r = h % g
    if not r.c:
        return F.zero_raw
    c = r.c[-1]
    out = F.pow(c, g.degree)
    if r.degree == 0:
        return out
    if (g.degree * r.degree) % 2:
        out = F.neg(out)
    return F.mul(out, norm_product(r.monic(), g))


def _split_with_trace(g: Poly, K: ExtField, rng: random.Random, first_only: bool = False) -> list:
    """Roots in K of g over F_p, where g is squarefree and splits completely in K.

    Equal-degree splitting driven by T(X) = Tr_{K/F_p}(c X) + b mod g: at every root r,
    T(r) lies in F_p, so gcd(g, T^((p-1)/2) - 1) separates roots by the quadratic
    character of Tr(c r) + b.  Only an exponent of size p is needed.
    """
    F = g.field
    p, k = F.p, K.k
    gK = g.lift(K)
    x_pows = [Poly.x(F) % g]
    for _ in range(1, k):
        x_pows.append(x_pows[-1].powmod(p, g))
    x_pows = [xp.lift(K) for xp in x_pows]
    roots = []
    stack = [(gK, x_pows)]
    half = (p - 1) // 2
    while stack:
        h, xp = stack.pop()
        if h.degree == 0:
            continue
        if h.degree == 1:
            h = h.monic()
            roots.append(FieldElem(K, K.neg(h.c[0])))
            continue
        while True:
            c = K.random_raw(rng)
            if K.is_zero(c):
                continue
            T = Poly(K, [])
            ci = c
            for i in range(k):
                T = T + xp[i].scale(FieldElem(K, ci))
                ci = K.frobenius(ci, 1)
            # the shift matters when roots lie in F_p, where T is linear in X
            T = (T + Poly(K, [K.embed(rng.randrange(p))])) % h
            if T.degree <= 0:
                continue
            s = T.powmod(half, h) - Poly(K, [K.one_raw])
            d = s.gcd(h)
            if 0 < d.degree < h.degree:
                e = (h // d).monic()
                if first_only:
                    # keep only the smaller piece
                    d = d if d.degree <= e.degree else e
                    stack.append((d, [v % d for v in xp]))
                else:
                    stack.append((d, [v % d for v in xp]))
                    stack.append((e, [v % e for v in xp]))
                break
        if first_only and roots:
            break
    return roots


def one_root(g: Poly, K: ExtField, seed: int = 0) -> FieldElem:
    """Some root in K of a squarefree g over F_p that splits completely in K."""
    roots = _split_with_trace(g.monic(), K, random.Random(seed), first_only=True)
    if not roots:
        raise ArithError(f"{g} has no root in {K}")
    return roots[0]


def _split_generic(h: Poly, rng: random.Random) -> list:
    """Cantor-Zassenhaus equal-degree splitting of a product of distinct linear factors."""
    K = h.field
    roots = []
    stack = [h.monic()]
    half = (K.order - 1) // 2
    while stack:
        g = stack.pop()
        if g.degree == 0:
            continue
        if g.degree == 1:
            roots.append(FieldElem(K, K.neg(g.c[0])))
            continue
        while True:
            a = Poly(K, [K.random_raw(rng), K.one_raw])
            s = a.powmod(half, g) - Poly(K, [K.one_raw])
            d = s.gcd(g)
            if 0 < d.degree < g.degree:
                stack.append(d)
                stack.append((g // d).monic())
                break
    return roots


def _multiplicity(f: Poly, r: FieldElem) -> int:
    lin = Poly(f.field, [f.field.neg(r.raw), f.field.one_raw])
    m = 0
    while f.degree >= 1:
        q, rem = f.divmod(lin)
        if rem.c:
            break
        m += 1
        f = q
    return m


def poly_roots(f: Poly, field=None, seed: int = 0, method: str = "auto") -> list[FieldElem]:
    """All roots of f in ``field`` (default: f's field), with multiplicity, sorted by encoding.

    ``field`` may be an extension of f's coefficient field.  ``method`` is
    "auto", "scan" or "split"; auto scans only tiny fields.
    """
    if not f.c:
        raise ArithError("roots of the zero polynomial are undefined")
    K = f.field if field is None else field
    if f.degree == 0:
        return []
    rng = random.Random(seed)
    base_coeffs = f.field.is_prime_field and K != f.field
    fK = f.lift(K) if base_coeffs else f
    if method == "auto":
        method = "scan" if K.order <= EXHAUSTIVE_LIMIT and K.order * f.degree <= _SCAN_WORK_LIMIT else "split"
    if method == "scan":
        distinct = [r for r in K.elements() if not fK(r)]
    elif base_coeffs:
        # g = product of the F_p-irreducible factors of f whose roots lie in K
        F = f.field
        fm = f.monic()
        x = Poly.x(F)
        h = x % fm
        for _ in range(K.k):
            h = h.powmod(F.p, fm)
        g = (h - x).gcd(fm)
        distinct = _split_with_trace(g, K, rng) if g.degree > 0 else []
    else:
        fm = fK.monic()
        x = Poly.x(K)
        g = (x.powmod(K.order, fm) - x).gcd(fm)
        distinct = _split_generic(g, rng) if g.degree > 0 else []
    out = []
    for r in sorted(distinct, key=lambda e: e.raw):
        out.extend([r] * _multiplicity(fK, r))
    return out
