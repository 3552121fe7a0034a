"""Exact sparse multivariate polynomial arithmetic over QQ and prime fields.

A polynomial is a dictionary mapping monomials to nonzero coefficients.
Monomials are dense exponent tuples (one slot per variable of the owning
``VariableTable``), so two equal polynomials always have identical term maps.
Coefficients are ``fractions.Fraction`` over the rationals and plain ints in
``[0, q)`` over a prime field ``GF(q)``; arithmetic never rounds.

Monomial orders are represented as short stacks of nonnegative integer weight
rows compared lexicographically.  Every order packs a monomial into a single
integer sort key, and the packing is additive: ``key(a*b) == key(a) + key(b)``.
That makes the orders multiplicative by construction and keeps leading-term
searches cheap inside the Groebner machinery.

The text format round-trips exactly: terms joined by ``+``/``-``, coefficients
written as ``n`` or ``n/d``, variables named ``p<i><j>`` with ``i <= j`` (zero
padded to two digits each once the matrix size reaches 10), ``*`` for products
and ``^`` for powers, e.g. ``p12*p34 - p13*p24``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping


class DomainError(ValueError):
    """Raised when an operation's arguments fall outside its domain."""


# ---------------------------------------------------------------------------
# coefficient fields


class RationalField:
    """The field of rationals; coefficients are Fraction instances."""

    name = "QQ"

    def coerce(self, x):
        return Fraction(x)

    zero = Fraction(0)
    one = Fraction(1)

    def inv(self, a):
        return 1 / Fraction(a)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


class PrimeField:
    """GF(q) for a prime q < 2**31; coefficients are ints in [0, q)."""

    def __init__(self, q: int):
        if not (2 <= q < 2**31):
            raise DomainError(f"prime field modulus out of range: {q}")
        if not _is_prime(q):
            raise DomainError(f"modulus {q} is not prime")
        self.q = q
        self.name = f"GF({q})"
        self.zero = 0
        self.one = 1 % q

    def coerce(self, x):
        if isinstance(x, Fraction):
            den = x.denominator % self.q
            if den == 0:
                raise DomainError(f"denominator of {x} vanishes mod {self.q}")
            return x.numerator * pow(den, self.q - 2, self.q) % self.q
        return int(x) % self.q

    def inv(self, a):
        a %= self.q
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in " + self.name)
        return pow(a, self.q - 2, self.q)

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self):
        return hash(("GF", self.q))


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    # deterministic Miller-Rabin for n < 3.3e24
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


QQ = RationalField()


# ---------------------------------------------------------------------------
# variable tables


def psi_name(i: int, j: int, p: int) -> str:
    """Text-format name of the covariance entry (i, j), 1-based, i <= j."""
    if i > j:
        i, j = j, i
    if p >= 10:
        return f"p{i:02d}{j:02d}"
    return f"p{i}{j}"


class VariableTable:
    """Ordered list of variable names with the covariance-entry bookkeeping.

    For a symmetric p x p matrix the table holds the p diagonal entry symbols
    first, then the p(p-1)/2 off-diagonal symbols in row-major order, then any
    auxiliary symbols (slice parameters, resultant coefficients, deformation
    parameters).
    """

    def __init__(self, names: Iterable[str], p: int | None = None,
                 diagonal: Iterable[int] = (), offdiagonal: Iterable[int] = ()):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise DomainError("duplicate variable names")
        self.index = {name: k for k, name in enumerate(self.names)}
        self.p = p
        self.diagonal = tuple(diagonal)
        self.offdiagonal = tuple(offdiagonal)
        self.nvars = len(self.names)
        self._psi = {}
        if p is not None:
            for i in range(1, p + 1):
                for j in range(i, p + 1):
                    name = psi_name(i, j, p)
                    if name in self.index:
                        self._psi[(i, j)] = self.index[name]

    @classmethod
    def covariance(cls, p: int, aux: Iterable[str] = ()) -> "VariableTable":
        """Table for the p x p symmetric matrix: diagonal block, then off-diagonal."""
        if p < 1:
            raise DomainError("matrix size must be at least 1")
        diag = [psi_name(i, i, p) for i in range(1, p + 1)]
        off = [psi_name(i, j, p) for i in range(1, p + 1) for j in range(i + 1, p + 1)]
        names = diag + off + list(aux)
        return cls(names, p=p,
                   diagonal=range(len(diag)),
                   offdiagonal=range(len(diag), len(diag) + len(off)))

    @classmethod
    def plain(cls, names: Iterable[str]) -> "VariableTable":
        return cls(names)

    def psi(self, i: int, j: int) -> int:
        """Variable index of the covariance entry (i, j); order-insensitive."""
        if i > j:
            i, j = j, i
        try:
            return self._psi[(i, j)]
        except KeyError:
            raise DomainError(f"no covariance symbol ({i},{j}) in table") from None

    def var_index(self, v) -> int:
        if isinstance(v, int):
            if not 0 <= v < self.nvars:
                raise DomainError(f"variable index {v} out of range")
            return v
        try:
            return self.index[v]
        except KeyError:
            raise DomainError(f"unknown variable {v!r}") from None

    def __len__(self):
        return self.nvars

    def __eq__(self, other):
        return isinstance(other, VariableTable) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"VariableTable({len(self.names)} vars, p={self.p})"


# ---------------------------------------------------------------------------
# monomials


class Monomial(tuple):
    """Dense exponent tuple; the empty product has all slots zero."""

    __slots__ = ()

    @property
    def degree(self) -> int:
        return sum(self)

    @property
    def exponents(self) -> dict:
        """Sparse view {variable index: positive exponent}."""
        return {i: e for i, e in enumerate(self) if e}

    def mul(self, other: "Monomial") -> "Monomial":
        return Monomial(a + b for a, b in zip(self, other))

    def divides(self, other: "Monomial") -> bool:
        return all(a <= b for a, b in zip(self, other))

    def div(self, other: "Monomial") -> "Monomial":
        out = tuple(a - b for a, b in zip(self, other))
        if any(e < 0 for e in out):
            raise DomainError("monomial division is not exact")
        return Monomial(out)

    def lcm(self, other: "Monomial") -> "Monomial":
        return Monomial(max(a, b) for a, b in zip(self, other))

    def coprime(self, other: "Monomial") -> bool:
        return all(a == 0 or b == 0 for a, b in zip(self, other))

    @classmethod
    def unit(cls, nvars: int) -> "Monomial":
        return cls((0,) * nvars)

    @classmethod
    def variable(cls, k: int, nvars: int, power: int = 1) -> "Monomial":
        return cls(power if i == k else 0 for i in range(nvars))


# ---------------------------------------------------------------------------
# monomial orders

_KEY_SHIFT = 64  # bits per weight row in the packed key; rows stay far below 2**64


class MonomialOrder:
    """Total multiplicative monomial order, packed into additive integer keys.

    ``rows`` is a matrix of nonnegative integer weights; monomials compare by
    the lexicographic order of their weight vectors.  ``block`` names the
    variable indices eliminated first when this is an elimination order.
    kind is one of lex, grevlex, block-elimination, circular-lex.
    """

    def __init__(self, table: VariableTable, rows, kind: str,
                 block: Iterable[int] = (), spec: str | None = None):
        self.table = table
        self.rows = tuple(tuple(r) for r in rows)
        if any(w < 0 for row in self.rows for w in row):
            raise DomainError("order weight rows must be nonnegative")
        self.kind = kind
        self.block = frozenset(block)
        self._spec = spec or kind
        self._cache: dict = {}

    def key(self, mono) -> int:
        """Packed integer key; key(a.mul(b)) == key(a) + key(b)."""
        k = self._cache.get(mono)
        if k is None:
            k = 0
            for row in self.rows:
                k = (k << _KEY_SHIFT) + sum(w * e for w, e in zip(row, mono) if e)
            self._cache[mono] = k
        return k

    def compare(self, a, b) -> int:
        """-1, 0 or 1 as a <, =, > b in this order."""
        ka, kb = self.key(a), self.key(b)
        return (ka > kb) - (ka < kb)

    def sort_terms(self, terms: Mapping) -> list:
        """Terms of a polynomial as (monomial, coeff) pairs, leading first."""
        return sorted(terms.items(), key=lambda t: self.key(t[0]), reverse=True)

    def leading_monomial(self, poly: "Polynomial") -> Monomial:
        if not poly.terms:
            raise DomainError("the zero polynomial has no leading term")
        return max(poly.terms, key=self.key)

    def spec_string(self) -> str:
        return self._spec

    def __repr__(self):
        return f"MonomialOrder({self._spec})"

    # -- factories ----------------------------------------------------------

    @classmethod
    def lex(cls, table: VariableTable, priority: Iterable = None) -> "MonomialOrder":
        """Lexicographic order; ``priority`` lists variables, highest first."""
        n = table.nvars
        if priority is None:
            perm = list(range(n))
        else:
            perm = [table.var_index(v) for v in priority]
            if sorted(perm) != list(range(n)):
                raise DomainError("priority list must be a permutation of the table")
        rows = [[1 if j == v else 0 for j in range(n)] for v in perm]
        return cls(table, rows, "lex", spec="lex")

    @classmethod
    def grevlex(cls, table: VariableTable, priority: Iterable = None) -> "MonomialOrder":
        """Graded reverse lexicographic order over the whole table."""
        n = table.nvars
        if priority is None:
            perm = list(range(n))
        else:
            perm = [table.var_index(v) for v in priority]
            if sorted(perm) != list(range(n)):
                raise DomainError("priority list must be a permutation of the table")
        rows = [[1] * n]
        # ties: smallest exponent on the lowest-priority variable wins, encoded
        # as the nonnegative functional deg - e_v so rows stay additive
        for v in reversed(perm[1:]):
            rows.append([0 if j == v else 1 for j in range(n)])
        return cls(table, rows, "grevlex", spec="grevlex")

    @classmethod
    def block_elimination(cls, table: VariableTable, first_block: Iterable,
                          inner: "MonomialOrder" = None) -> "MonomialOrder":
        """Eliminates ``first_block``: block degree first, then the inner order."""
        blk = sorted({table.var_index(v) for v in first_block})
        if not blk:
            raise DomainError("elimination block must be nonempty")
        if inner is None:
            inner = cls.grevlex(table)
        head = [[1 if j in set(blk) else 0 for j in range(table.nvars)]]
        names = ",".join(table.names[v] for v in blk)
        spec = f"block({names};{inner.spec_string()})"
        return cls(table, head + list(inner.rows), "block-elimination",
                   block=blk, spec=spec)

    @classmethod
    def circular_lex(cls, table: VariableTable) -> "MonomialOrder":
        """Lex order ranking covariance entries by circular index distance.

        The entry (i, j) outranks (k, l) when the circular distance between i
        and j (indices placed equally spaced on a circle) is smaller; distance
        ties go to the smaller row index, and remaining ties to the smaller
        column index.  Diagonal entries have distance 0, so they form the top
        block and the order also eliminates them.
        """
        p = table.p
        if p is None:
            raise DomainError("circular-lex needs a covariance table")
        entry_of = {idx: ij for ij, idx in table._psi.items()}

        def rank(v):
            ij = entry_of.get(v)
            if ij is None:
                return (1, v, 0, 0)  # auxiliary symbols rank below all entries
            i, j = ij
            d = min(abs(i - j), p - abs(i - j))
            return (0, d, i, j)

        perm = sorted(range(table.nvars), key=rank)
        order = cls.lex(table, priority=perm)
        order.kind = "circular-lex"
        order._spec = f"circular-lex(p={p})"
        order.block = frozenset(table.diagonal)
        return order


def compare_monomials(order: MonomialOrder, a: Monomial, b: Monomial) -> int:
    """-1, 0 or 1 as a <, =, > b under the order."""
    return order.compare(a, b)


def leading_term(poly: "Polynomial", order: MonomialOrder):
    """The maximal (monomial, coefficient) pair of ``poly`` under ``order``."""
    m = order.leading_monomial(poly)
    return m, poly.terms[m]


# ---------------------------------------------------------------------------
# polynomials


class Polynomial:
    """Immutable sparse polynomial over a VariableTable and coefficient field."""

    __slots__ = ("table", "field", "terms")

    def __init__(self, table: VariableTable, terms: Mapping, field=QQ,
                 _canonical: bool = False):
        self.table = table
        self.field = field
        if _canonical:
            self.terms = dict(terms)
        else:
            clean = {}
            for mono, coeff in terms.items():
                c = field.coerce(coeff)
                if c != field.zero:
                    if not isinstance(mono, Monomial):
                        mono = Monomial(mono)
                    if len(mono) != table.nvars:
                        raise DomainError("monomial length does not match table")
                    clean[mono] = clean.get(mono, field.zero) + c
            self.terms = {m: c for m, c in clean.items() if c != field.zero}

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, table: VariableTable, field=QQ) -> "Polynomial":
        return cls(table, {}, field, _canonical=True)

    @classmethod
    def constant(cls, table: VariableTable, value, field=QQ) -> "Polynomial":
        return cls(table, {Monomial.unit(table.nvars): value}, field)

    @classmethod
    def variable(cls, table: VariableTable, v, field=QQ) -> "Polynomial":
        k = table.var_index(v)
        return cls(table, {Monomial.variable(k, table.nvars): field.one}, field)

    @classmethod
    def psi(cls, table: VariableTable, i: int, j: int, field=QQ) -> "Polynomial":
        """The covariance-entry variable (i, j) as a polynomial."""
        return cls.variable(table, table.psi(i, j), field)

    # -- basic queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def total_degree(self) -> int:
        """Total degree; the zero polynomial reports -1."""
        if not self.terms:
            return -1
        return max(m.degree for m in self.terms)

    def is_homogeneous(self) -> bool:
        if not self.terms:
            return True
        degs = {m.degree for m in self.terms}
        return len(degs) == 1

    def variables(self) -> set:
        """Indices of variables that actually occur."""
        out = set()
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    out.add(i)
        return out

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (self.table == other.table and self.field == other.field
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.table, self.field, frozenset(self.terms.items())))

    # -- ring operations ----------------------------------------------------

    def _check_compatible(self, other: "Polynomial"):
        if self.table != other.table:
            raise DomainError("polynomials over different variable tables")
        if self.field != other.field:
            raise DomainError(
                f"coefficient field mismatch: {self.field} vs {other.field}")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.table, other, self.field)
        self._check_compatible(other)
        out = dict(self.terms)
        zero = self.field.zero
        if isinstance(self.field, PrimeField):
            q = self.field.q
            for m, c in other.terms.items():
                s = (out.get(m, 0) + c) % q
                if s:
                    out[m] = s
                elif m in out:
                    del out[m]
        else:
            for m, c in other.terms.items():
                s = out.get(m, zero) + c
                if s:
                    out[m] = s
                elif m in out:
                    del out[m]
        return Polynomial(self.table, out, self.field, _canonical=True)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        if isinstance(self.field, PrimeField):
            q = self.field.q
            return Polynomial(self.table, {m: (-c) % q for m, c in self.terms.items()},
                              self.field, _canonical=True)
        return Polynomial(self.table, {m: -c for m, c in self.terms.items()},
                          self.field, _canonical=True)

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.table, other, self.field)
        return self.__add__(other.__neg__())

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check_compatible(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: dict = {}
        modq = self.field.q if isinstance(self.field, PrimeField) else None
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = Monomial(x + y for x, y in zip(ma, mb))
                prod = ca * cb
                s = out.get(m)
                s = prod if s is None else s + prod
                if modq is not None:
                    s %= modq
                out[m] = s
        zero = self.field.zero
        return Polynomial(self.table,
                          {m: c for m, c in out.items() if c != zero},
                          self.field, _canonical=True)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "Polynomial":
        c = self.field.coerce(c)
        if c == self.field.zero:
            return Polynomial.zero(self.table, self.field)
        if isinstance(self.field, PrimeField):
            q = self.field.q
            return Polynomial(self.table, {m: v * c % q for m, v in self.terms.items()},
                              self.field, _canonical=True)
        return Polynomial(self.table, {m: v * c for m, v in self.terms.items()},
                          self.field, _canonical=True)

    def __pow__(self, n: int):
        if n < 0:
            raise DomainError("negative polynomial power")
        out = Polynomial.constant(self.table, 1, self.field)
        base = self
        while n:
            if n & 1:
                out = out * base
            base_needed = n >> 1
            if base_needed:
                base = base * base
            n >>= 1
        return out

    def mul_term(self, mono: Monomial, coeff) -> "Polynomial":
        """Multiply by a single term coeff * mono."""
        c = self.field.coerce(coeff)
        if c == self.field.zero:
            return Polynomial.zero(self.table, self.field)
        modq = self.field.q if isinstance(self.field, PrimeField) else None
        out = {}
        for m, v in self.terms.items():
            prod = v * c
            if modq is not None:
                prod %= modq
            out[Monomial(x + y for x, y in zip(m, mono))] = prod
        return Polynomial(self.table, out, self.field, _canonical=True)

    # -- calculus -----------------------------------------------------------

    def differentiate(self, v) -> "Polynomial":
        """Formal partial derivative with respect to a table variable."""
        k = self.table.var_index(v)
        out = {}
        modq = self.field.q if isinstance(self.field, PrimeField) else None
        for m, c in self.terms.items():
            e = m[k]
            if not e:
                continue
            dm = Monomial(x - 1 if i == k else x for i, x in enumerate(m))
            dc = c * e
            if modq is not None:
                dc %= modq
                if not dc:
                    continue
            out[dm] = out.get(dm, 0) + dc
        zero = self.field.zero
        return Polynomial(self.table, {m: c for m, c in out.items() if c != zero},
                          self.field, _canonical=True)

    def gradient(self) -> dict:
        """Nonzero partials as {variable index: Polynomial}."""
        return {v: g for v in sorted(self.variables())
                if (g := self.differentiate(v))}

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, assignment: Mapping, mode: str = "exact"):
        """Evaluate at a point.

        ``assignment`` maps variable names or indices to scalars and must cover
        every variable occurring in the polynomial.  Modes:

        - ``exact``: Fraction arithmetic, exact result;
        - ``float``: float64 term-wise sums; the absolute error is at most
          #terms * machine epsilon * max partial product magnitude;
        - ``gf``: arithmetic in the polynomial's prime field.
        """
        values = {}
        for k, v in assignment.items():
            values[self.table.var_index(k)] = v
        needed = self.variables()
        missing = needed - set(values)
        if missing:
            names = ", ".join(self.table.names[i] for i in sorted(missing))
            raise DomainError(f"assignment missing variables: {names}")

        if mode == "exact":
            conv = Fraction
            acc = Fraction(0)
        elif mode == "float":
            conv = float
            acc = 0.0
        elif mode == "gf":
            if not isinstance(self.field, PrimeField):
                raise DomainError("gf evaluation requires a prime-field polynomial")
            q = self.field.q
            acc = 0
            pows = {}
            for m, c in self.terms.items():
                t = c
                for i, e in enumerate(m):
                    if e:
                        t = t * pow(int(values[i]) % q, e, q) % q
                acc = (acc + t) % q
            return acc
        else:
            raise DomainError(f"unknown evaluation mode {mode!r}")

        pow_cache: dict = {}
        for m, c in self.terms.items():
            t = conv(c)
            for i, e in enumerate(m):
                if e:
                    key = (i, e)
                    pw = pow_cache.get(key)
                    if pw is None:
                        pw = conv(values[i]) ** e
                        pow_cache[key] = pw
                    t = t * pw
            acc = acc + t
        return acc

    def substitute(self, mapping: Mapping) -> "Polynomial":
        """Substitute polynomials (over any table/field) for every variable.

        ``mapping`` must cover all occurring variables; values are Polynomial
        instances over one common target table.
        """
        values = {self.table.var_index(k): v for k, v in mapping.items()}
        needed = self.variables()
        missing = needed - set(values)
        if missing:
            names = ", ".join(self.table.names[i] for i in sorted(missing))
            raise DomainError(f"substitution missing variables: {names}")
        if not self.terms:
            if values:
                any_poly = next(iter(values.values()))
                return Polynomial.zero(any_poly.table, any_poly.field)
            return Polynomial.zero(self.table, self.field)
        if values:
            target = next(iter(values.values()))
            ttable, tfield = target.table, target.field
        else:
            ttable, tfield = self.table, self.field
        acc = Polynomial.zero(ttable, tfield)
        pow_cache: dict = {}
        for m, c in self.terms.items():
            t = Polynomial.constant(ttable, tfield.coerce(c), tfield)
            for i, e in enumerate(m):
                if e:
                    key = (i, e)
                    pw = pow_cache.get(key)
                    if pw is None:
                        pw = values[i] ** e
                        pow_cache[key] = pw
                    t = t * pw
            acc = acc + t
        return acc

    # -- normalization --------------------------------------------------------

    def leading(self, order: MonomialOrder):
        return leading_term(self, order)

    def monic(self, order: MonomialOrder) -> "Polynomial":
        """Scale so the leading coefficient under ``order`` is one."""
        if not self.terms:
            return self
        _, c = leading_term(self, order)
        return self.scale(self.field.inv(c))

    def primitive(self) -> "Polynomial":
        """Over QQ: clear denominators and divide by the integer content."""
        if isinstance(self.field, PrimeField) or not self.terms:
            return self
        from math import gcd
        den = 1
        for c in self.terms.values():
            den = den * c.denominator // gcd(den, c.denominator)
        g = 0
        for c in self.terms.values():
            g = gcd(g, abs(c.numerator * (den // c.denominator)))
        return self.scale(Fraction(den, g))

    def exact_div(self, divisor: "Polynomial", order: MonomialOrder = None) -> "Polynomial":
        """Exact quotient self / divisor; raises DomainError if not divisible."""
        self._check_compatible(divisor)
        if not divisor.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        if order is None:
            order = _default_order(self.table)
        lt_m, lt_c = leading_term(divisor, order)
        rem = dict(self.terms)
        quot: dict = {}
        inv = self.field.inv(lt_c)
        modq = self.field.q if isinstance(self.field, PrimeField) else None
        while rem:
            m = max(rem, key=order.key)
            c = rem[m]
            if not lt_m.divides(m):
                raise DomainError("polynomial division is not exact")
            qm = m.div(lt_m)
            qc = c * inv
            if modq is not None:
                qc %= modq
            quot[qm] = qc
            for dm, dc in divisor.terms.items():
                t = Monomial(x + y for x, y in zip(qm, dm))
                s = rem.get(t, self.field.zero) - qc * dc
                if modq is not None:
                    s %= modq
                if s:
                    rem[t] = s
                elif t in rem:
                    del rem[t]
        return Polynomial(self.table, quot, self.field, _canonical=True)

    # -- text format -----------------------------------------------------------

    def to_text(self, order: MonomialOrder = None) -> str:
        """Render in the exact round-trip text format, leading term first."""
        if not self.terms:
            return "0"
        if order is None:
            order = _default_order(self.table)
        parts = []
        for mono, coeff in order.sort_terms(self.terms):
            if isinstance(self.field, PrimeField):
                sign, mag = "+", str(coeff)
            else:
                sign = "-" if coeff < 0 else "+"
                mag = str(abs(coeff))
            factors = []
            for i, e in enumerate(mono):
                if not e:
                    continue
                name = self.table.names[i]
                factors.append(name if e == 1 else f"{name}^{e}")
            if not factors:
                body = mag
            elif mag == "1":
                body = "*".join(factors)
            else:
                body = mag + "*" + "*".join(factors)
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    @classmethod
    def parse(cls, text: str, table: VariableTable, field=QQ) -> "Polynomial":
        """Parse the text format produced by :meth:`to_text`."""
        return _parse_polynomial(text, table, field)

    def __repr__(self):
        return f"Polynomial({self.to_text()})"


_DEFAULT_ORDERS: dict = {}


def _default_order(table: VariableTable) -> MonomialOrder:
    order = _DEFAULT_ORDERS.get(table.names)
    if order is None:
        order = MonomialOrder.grevlex(table)
        _DEFAULT_ORDERS[table.names] = order
    return order


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


def _tokenize(text: str):
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise DomainError(f"cannot tokenize polynomial text at: {text[pos:pos+20]!r}")
            break
        pos = m.end()
        if m.group("int") is not None:
            out.append(("int", int(m.group("int"))))
        elif m.group("name") is not None:
            out.append(("name", m.group("name")))
        else:
            out.append(("op", m.group("op")))
    return out


def _parse_polynomial(text: str, table: VariableTable, field) -> Polynomial:
    tokens = _tokenize(text)
    n = table.nvars
    terms: dict = {}
    i = 0

    def parse_term(i, sign):
        coeff = Fraction(sign)
        expo = [0] * n
        expect_factor = True
        saw_factor = False
        while i < len(tokens):
            kind, val = tokens[i]
            if kind == "op" and val in "+-" and not expect_factor:
                break
            if kind == "int":
                num = val
                i += 1
                if i < len(tokens) and tokens[i] == ("op", "/"):
                    i += 1
                    if i >= len(tokens) or tokens[i][0] != "int":
                        raise DomainError("malformed rational coefficient")
                    coeff *= Fraction(num, tokens[i][1])
                    i += 1
                else:
                    coeff *= num
                saw_factor = True
            elif kind == "name":
                k = table.var_index(val)
                i += 1
                power = 1
                if i < len(tokens) and tokens[i] == ("op", "^"):
                    i += 1
                    if i >= len(tokens) or tokens[i][0] != "int":
                        raise DomainError("malformed exponent")
                    power = tokens[i][1]
                    i += 1
                expo[k] += power
                saw_factor = True
            elif kind == "op" and val == "*":
                i += 1
                expect_factor = True
                continue
            elif kind == "op" and val == "-" and expect_factor:
                coeff = -coeff
                i += 1
                continue
            elif kind == "op" and val == "+" and expect_factor:
                i += 1
                continue
            else:
                raise DomainError(f"unexpected token {val!r} in polynomial text")
            expect_factor = False
        if not saw_factor:
            raise DomainError("empty term in polynomial text")
        return i, Monomial(expo), coeff

    if not tokens:
        raise DomainError("empty polynomial text")
    if tokens == [("int", 0)]:
        return Polynomial.zero(table, field)
    while i < len(tokens):
        kind, val = tokens[i]
        sign = 1
        while kind == "op" and val in "+-":
            if val == "-":
                sign = -sign
            i += 1
            if i >= len(tokens):
                raise DomainError("dangling sign in polynomial text")
            kind, val = tokens[i]
        i, mono, coeff = parse_term(i, sign)
        terms[mono] = terms.get(mono, Fraction(0)) + coeff
    return Polynomial(table, terms, field)


# ---------------------------------------------------------------------------
# symbolic determinants


def sym_determinant(matrix, method: str = "cofactor"):
    """Exact determinant of a square matrix of ring elements.

    ``cofactor`` expands along the first row with memoization on column
    subsets (best for sparse symbolic entries); ``fraction-free`` runs the
    Bareiss elimination, using exact polynomial division for Polynomial
    entries.  Both produce the same result.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise DomainError("determinant of a non-square matrix")
    if n == 0:
        raise DomainError("determinant of an empty matrix")
    if method == "cofactor":
        return _det_cofactor(matrix)
    if method == "fraction-free":
        return _det_bareiss(matrix)
    raise DomainError(f"unknown determinant method {method!r}")


def _det_cofactor(matrix):
    n = len(matrix)
    memo: dict = {}

    def minor(cols):
        if len(cols) == 1:
            return matrix[n - 1][cols[0]]
        got = memo.get(cols)
        if got is not None:
            return got
        r = n - len(cols)
        acc = None
        for k, c in enumerate(cols):
            entry = matrix[r][c]
            if _is_zero_entry(entry):
                continue
            sub = minor(cols[:k] + cols[k + 1:])
            term = entry * sub
            if k % 2:
                term = -term
            acc = term if acc is None else acc + term
        if acc is None:
            acc = _zero_like(matrix[r][cols[0]])
        memo[cols] = acc
        return acc

    return minor(tuple(range(n)))


def _det_bareiss(matrix):
    n = len(matrix)
    m = [list(row) for row in matrix]
    sample = m[0][0]
    poly_mode = isinstance(sample, Polynomial)
    sign = 1
    prev = None
    for k in range(n - 1):
        if _is_zero_entry(m[k][k]):
            for i in range(k + 1, n):
                if not _is_zero_entry(m[i][k]):
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return _zero_like(sample)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                elt = m[k][k] * m[i][j] - m[i][k] * m[k][j]
                if prev is not None:
                    if poly_mode:
                        elt = elt.exact_div(prev)
                    else:
                        elt = elt / prev
                m[i][j] = elt
        prev = m[k][k]
    out = m[n - 1][n - 1]
    return -out if sign < 0 else out


def _is_zero_entry(x):
    if isinstance(x, Polynomial):
        return x.is_zero()
    return x == 0


def _zero_like(x):
    if isinstance(x, Polynomial):
        return Polynomial.zero(x.table, x.field)
    return type(x)(0)
