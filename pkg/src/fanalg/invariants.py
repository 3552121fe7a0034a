"""Construction of the model invariants of hidden-factor covariance structure.

Everything here produces polynomials in the off-diagonal entries of a
symmetric p x p matrix that vanish whenever the matrix splits as a positive
diagonal plus a rank-m part:

- tetrads: the degree-2 invariants of the one-factor structure;
- off-diagonal (m+1)-minors;
- linear eliminants: one diagonal entry eliminated from two overlapping
  (m+1)-minors, degree 2m+1; those with matching support are the (2m+1)-ads
  (pentads for m=2, septads for m=3);
- multilinear-resultant invariants for n = 1, 2, 3 eliminated diagonal
  entries, with determinantal evaluation for the degrees too large to expand.

Symbolic invariants are normalized so the leading coefficient is +1; tetrads
use the circular-lex leading term (which matches their classical display),
everything else graded-reverse-lex over the row-major variable list.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from . import exactla
from .polyring import (
    QQ,
    DomainError,
    Monomial,
    MonomialOrder,
    Polynomial,
    VariableTable,
    leading_term,
    sym_determinant,
)

DEFAULT_TERM_CAP = 10**6


class ExpansionCapError(DomainError):
    """Raised when a symbolic expansion would exceed the term cap."""

    def __init__(self, estimate: int, cap: int):
        super().__init__(
            f"symbolic expansion refused: about {estimate} terms exceeds the "
            f"cap of {cap}; use the evaluable mode")
        self.estimate = estimate
        self.cap = cap


@dataclass(frozen=True)
class InvariantRecord:
    """A model invariant with its provenance metadata.

    ``poly`` is the expanded polynomial when available; large resultant
    invariants carry ``poly=None`` plus an exact ``evaluator`` closure that
    computes f(Psi) from the determinantal formula without expansion.
    """

    kind: str                   # tetrad | offdiag-minor | linear-eliminant | k-ad | resultant
    indices: tuple
    degree: int
    table: VariableTable = field(compare=False)
    poly: Optional[Polynomial] = None
    normalization: str = "leading+1"
    evaluator: Optional[Callable] = field(default=None, compare=False, repr=False)

    def evaluate(self, psi, mode: str = "exact"):
        """Evaluate at a symmetric matrix given as nested lists, 0-indexed."""
        if self.poly is not None:
            assignment = _psi_assignment(self.table, psi)
            return self.poly.evaluate(assignment, mode=mode)
        if self.evaluator is None:
            raise DomainError("invariant has neither polynomial nor evaluator")
        value = self.evaluator(psi)
        return float(value) if mode == "float" else value

    def gradient_polys(self) -> dict:
        if self.poly is None:
            raise DomainError("gradient needs an expanded polynomial")
        return self.poly.gradient()

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "indices": _indices_to_json(self.indices),
            "degree": self.degree,
            "poly": None if self.poly is None else self.poly.to_text(),
            "normalization": self.normalization,
        }


def _indices_to_json(obj):
    if isinstance(obj, (tuple, list)):
        return [_indices_to_json(x) for x in obj]
    return obj


def _psi_assignment(table: VariableTable, psi) -> dict:
    p = table.p
    out = {}
    for i in range(1, p + 1):
        for j in range(i, p + 1):
            if (i, j) in table._psi:
                out[table._psi[(i, j)]] = psi[i - 1][j - 1]
    return out


def _entry(table, i, j):
    return Polynomial.psi(table, i, j)


def _grevlex_monic(poly: Polynomial) -> Polynomial:
    order = MonomialOrder.grevlex(poly.table)
    return poly.monic(order)


# ---------------------------------------------------------------------------
# tetrads


def tetrads(p: int, table: VariableTable = None) -> list:
    """The 2*binom(p, 4) degree-2 one-factor invariants; empty for p <= 3.

    For each i<j<k<l the two polynomials are psi_ij psi_kl - psi_ik psi_jl and
    psi_il psi_jk - psi_ik psi_jl, already monic on their circular-lex leading
    term.
    """
    if p < 1:
        raise DomainError("p must be positive")
    table = table or VariableTable.covariance(p)
    out = []
    for (i, j, k, l) in itertools.combinations(range(1, p + 1), 4):
        cross = _entry(table, i, k) * _entry(table, j, l)
        out.append(InvariantRecord(
            kind="tetrad", indices=((i, j), (k, l)), degree=2, table=table,
            poly=_entry(table, i, j) * _entry(table, k, l) - cross,
            normalization="classical"))
        out.append(InvariantRecord(
            kind="tetrad", indices=((i, l), (j, k)), degree=2, table=table,
            poly=_entry(table, i, l) * _entry(table, j, k) - cross,
            normalization="classical"))
    return out


# ---------------------------------------------------------------------------
# off-diagonal minors


def off_diagonal_minors(p: int, m: int, table: VariableTable = None) -> list:
    """All off-diagonal (m+1)x(m+1) minors; empty when p < 2(m+1).

    One record per unordered pair of disjoint row/column sets (the symmetric
    matrix makes det(R x C) and det(C x R) equal).
    """
    if m < 1:
        raise DomainError("m must be at least 1")
    size = m + 1
    if p < 2 * size:
        return []
    table = table or VariableTable.covariance(p)
    out = []
    for support in itertools.combinations(range(1, p + 1), 2 * size):
        lowest = support[0]
        rest = support[1:]
        for others in itertools.combinations(rest, size - 1):
            R = (lowest,) + others
            C = tuple(x for x in support if x not in R)
            M = [[_entry(table, i, j) for j in C] for i in R]
            det = sym_determinant(M)
            out.append(InvariantRecord(
                kind="offdiag-minor", indices=(R, C), degree=size, table=table,
                poly=_grevlex_monic(det)))
    return out


# ---------------------------------------------------------------------------
# linear eliminants and (2m+1)-ads


def _zeroed_diagonal_matrix(table, i, rows, cols):
    """Submatrix of the zero-diagonal copy, rows (i, *rows), cols (i, *cols)."""
    zero = Polynomial.zero(table)
    head = [zero] + [_entry(table, i, c) for c in cols]
    out = [head]
    for r in rows:
        out.append([_entry(table, r, i)] +
                   [(zero if r == c else _entry(table, r, c)) for c in cols])
    return out


def linear_eliminant(i: int, R, C, Rb, Cb, p: int, m: int,
                     table: VariableTable = None) -> InvariantRecord:
    """The degree-(2m+1) invariant eliminating the diagonal entry (i, i).

    Built from two pairs of disjoint m-sets in [p] minus {i}: the product of
    det over (R, C) with the zero-diagonal minor over (i+Rb, i+Cb), minus the
    same with the pairs swapped.  Flagged a k-ad when both pairs share their
    support.
    """
    R, C, Rb, Cb = (tuple(sorted(S)) for S in (R, C, Rb, Cb))
    if m < 1:
        raise DomainError("m must be at least 1")
    if not (1 <= i <= p):
        raise DomainError("pivot index out of range")
    for S in (R, C, Rb, Cb):
        if len(S) != m:
            raise DomainError("index sets must have cardinality m")
        if i in S or any(not 1 <= x <= p for x in S):
            raise DomainError("index sets must live in [p] minus the pivot")
    if set(R) & set(C) or set(Rb) & set(Cb):
        raise DomainError("row and column sets must be disjoint")
    table = table or VariableTable.covariance(p)

    det_RC = sym_determinant([[_entry(table, r, c) for c in C] for r in R])
    det_RbCb = sym_determinant([[_entry(table, r, c) for c in Cb] for r in Rb])
    det0_b = sym_determinant(_zeroed_diagonal_matrix(table, i, Rb, Cb))
    det0 = sym_determinant(_zeroed_diagonal_matrix(table, i, R, C))
    f = det_RC * det0_b - det_RbCb * det0
    kind = "k-ad" if set(R) | set(C) == set(Rb) | set(Cb) else "linear-eliminant"
    if f.is_zero():
        return InvariantRecord(kind=kind, indices=(i, R, C, Rb, Cb),
                               degree=2 * m + 1, table=table, poly=f,
                               normalization="zero")
    return InvariantRecord(kind=kind, indices=(i, R, C, Rb, Cb),
                           degree=2 * m + 1, table=table,
                           poly=_grevlex_monic(f))


def k_ads(p: int, m: int, table: VariableTable = None) -> list:
    """One (2m+1)-ad per pivot and 2m-support, deduplicated up to sign.

    For each pivot i and each 2m-subset of the remaining indices, the first
    two splits into disjoint m-sets (lexicographic, smallest element kept in
    the row set) define the representative eliminant; records equal after
    sign normalization count once.  Empty for m < 2, where the construction
    collapses to zero.
    """
    if m < 2 or p < 2 * m + 1:
        return []
    table = table or VariableTable.covariance(p)
    seen = {}
    out = []
    for i in range(1, p + 1):
        others = [x for x in range(1, p + 1) if x != i]
        for support in itertools.combinations(others, 2 * m):
            lowest = support[0]
            rest = support[1:]
            splits = []
            for extra in itertools.combinations(rest, m - 1):
                R = (lowest,) + extra
                C = tuple(x for x in support if x not in R)
                splits.append((R, C))
                if len(splits) == 2:
                    break
            rec = linear_eliminant(i, splits[0][0], splits[0][1],
                                   splits[1][0], splits[1][1], p, m, table)
            if rec.poly.is_zero():
                continue
            sig = frozenset(rec.poly.terms.items())
            if sig in seen:
                continue
            seen[sig] = rec
            out.append(rec)
    return out


# ---------------------------------------------------------------------------
# multilinear resultants


@dataclass
class MultilinearSystem:
    """n+1 multilinear polynomials in n unknowns, given by their coefficients.

    ``coeffs[j][bits]`` is the coefficient of x1^i1 ... xn^in in f_j, where
    ``bits`` is the exponent tuple (i1, ..., in) in {0,1}^n.  Values may be
    numbers or Polynomial instances; there are exactly (n+1) * 2^n slots.
    """

    n: int
    coeffs: list

    def __post_init__(self):
        if len(self.coeffs) != self.n + 1:
            raise DomainError(f"need {self.n + 1} polynomials, got {len(self.coeffs)}")
        want = set(itertools.product((0, 1), repeat=self.n))
        for j, c in enumerate(self.coeffs):
            if set(c) != want:
                raise DomainError(f"coefficient slots of f_{j} are incomplete")

    def coeff(self, j: int, bits) -> object:
        return self.coeffs[j][tuple(bits)]


def _det_generic(rows):
    """Cofactor determinant usable for numbers and Polynomial entries alike."""
    return sym_determinant(rows, method="cofactor")


# Bracket layout for the three-unknown resultant: [ijkl] is the 4x4 minor of
# the 4x8 coefficient matrix on columns i,j,k,l, where column c carries the
# exponent bits (c>>2 & 1, c>>1 & 1, c & 1).  Each matrix entry below is a
# signed sum of brackets.
_N3_MATRIX = [
    [["+0124"], ["+0234"], ["+0146", "-0245"], ["+0346", "-0247"],
     ["+0456"], ["+0467"]],
    [["+0125", "+0134"], ["+1234", "+0235"],
     ["+0147", "+0156", "-0345", "-1245"],
     ["-1247", "+0356", "-0257", "+1346"],
     ["+1456", "+0457"], ["+1467", "+0567"]],
    [["+0135"], ["+1235"], ["+0157", "-1345"], ["-1257", "+1356"],
     ["+1457"], ["+1567"]],
    [["+0126"], ["+0236"], ["-1246", "+0256"], ["+2346", "-0267"],
     ["+2456"], ["+2467"]],
    [["+0136", "+0127"], ["+1236", "+0237"],
     ["-1247", "-1346", "+0257", "+0356"],
     ["-0367", "-1267", "+2356", "+2347"],
     ["+3456", "+2457"], ["+2567", "+3467"]],
    [["+0137"], ["+1237"], ["-1347", "+0357"], ["-1367", "+2357"],
     ["+3457"], ["+3567"]],
]


def multilinear_resultant(n: int, system: MultilinearSystem):
    """The resultant of n+1 multilinear polynomials in n unknowns, n in {1,2,3}.

    Returns an element of the coefficient ring: degree n! in the coefficients
    of each input polynomial, vanishing exactly when the system has a common
    root (over the algebraic closure).
    """
    if system.n != n:
        raise DomainError("system size does not match n")
    if n == 1:
        a0, a1 = system.coeffs
        return a0[(0,)] * a1[(1,)] - a0[(1,)] * a1[(0,)]
    if n == 2:
        cols = {
            "A": [(0, 0), (1, 0), (0, 1)],
            "B": [(1, 0), (0, 1), (1, 1)],
            "C": [(0, 0), (0, 1), (1, 1)],
            "D": [(0, 0), (1, 0), (1, 1)],
        }
        def det3(cs):
            rows = [[system.coeff(j, b) for b in cols[cs]] for j in range(3)]
            return _det_generic(rows)
        return det3("A") * det3("B") - det3("C") * det3("D")
    if n == 3:
        col_bits = [((c >> 2) & 1, (c >> 1) & 1, c & 1) for c in range(8)]
        A = [[system.coeff(j, col_bits[c]) for c in range(8)] for j in range(4)]
        brackets = {}
        for cols4 in itertools.combinations(range(8), 4):
            rows = [[A[j][c] for c in cols4] for j in range(4)]
            brackets["".join(map(str, cols4))] = _det_generic(rows)
        big = []
        for row in _N3_MATRIX:
            out_row = []
            for cell in row:
                acc = None
                for signed in cell:
                    term = brackets[signed[1:]]
                    if signed[0] == "-":
                        term = -term
                    acc = term if acc is None else acc + term
                out_row.append(acc)
            big.append(out_row)
        return _det_generic(big)
    raise DomainError("multilinear resultants are implemented for n in {1, 2, 3}")


def expected_degree(n: int, m: int) -> int:
    """Total degree (m - n/2 + 1)(n+1)! of a nonzero resultant invariant."""
    if n < 1 or m < 1:
        raise DomainError("n and m must be positive")
    num = (2 * m - n + 2) * _factorial(n + 1)
    if num <= 0 or num % 2:
        raise DomainError(f"degree formula is not a positive integer for n={n}, m={m}")
    return num // 2


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


@dataclass(frozen=True)
class ResultantSelection:
    """Index data for a resultant invariant: n eliminated diagonal entries.

    ``D`` lists the diagonal positions treated as unknowns; ``rows[k]`` and
    ``cols[k]`` are the (m+1-n)-sets bordering D in the k-th minor.
    """

    D: tuple
    rows: tuple  # n+1 tuples
    cols: tuple  # n+1 tuples

    def validate(self, p: int, m: int) -> int:
        n = len(self.D)
        if n not in (1, 2, 3):
            raise DomainError("only 1, 2 or 3 eliminated diagonal entries supported")
        if len(self.rows) != n + 1 or len(self.cols) != n + 1:
            raise DomainError(f"need {n + 1} row sets and column sets")
        if p < n + 2 * (m + 1 - n):
            raise DomainError(f"p={p} too small for n={n}, m={m}: "
                              f"need p >= {n + 2 * (m + 1 - n)}")
        dset = set(self.D)
        if len(dset) != n or any(not 1 <= d <= p for d in self.D):
            raise DomainError("D must be n distinct indices in [p]")
        for k in range(n + 1):
            R, C = set(self.rows[k]), set(self.cols[k])
            if len(self.rows[k]) != m + 1 - n or len(self.cols[k]) != m + 1 - n:
                raise DomainError("row/column sets must have cardinality m+1-n")
            if R & C:
                raise DomainError("row and column sets must be disjoint")
            if (R | C) & dset:
                raise DomainError("row/column sets must avoid D")
            if any(not 1 <= x <= p for x in R | C):
                raise DomainError("row/column indices out of range")
        return n


def _bordered_matrix_symbolic(table, D, R, C):
    """Rows D+R, columns D+C of the symmetric matrix, diagonal D entries live."""
    rows = list(D) + list(R)
    cols = list(D) + list(C)
    out = []
    for r in rows:
        line = []
        for c in cols:
            line.append(_entry(table, r, c) if r != c
                        else Polynomial.variable(table, table.psi(r, r)))
        out.append(line)
    return out


def _collect_by_diagonal(det: Polynomial, table, D) -> dict:
    """Split det into coefficients of the multilinear diagonal unknowns."""
    dvars = [table.psi(d, d) for d in D]
    buckets: dict = {}
    for mono, coeff in det.terms.items():
        bits = tuple(mono[v] for v in dvars)
        if any(b > 1 for b in bits):
            raise DomainError("minor is not multilinear in the diagonal unknowns")
        stripped = Monomial(0 if i in dvars else e for i, e in enumerate(mono))
        buckets.setdefault(bits, {})[stripped] = coeff
    out = {}
    for bits in itertools.product((0, 1), repeat=len(D)):
        out[bits] = Polynomial(table, buckets.get(bits, {}), det.field)
    return out


def _numeric_bordered_det(psi, D, R, C, bits):
    """Minor with the D-diagonal entries replaced by 0/1 values."""
    rows = list(D) + list(R)
    cols = list(D) + list(C)
    mat = []
    for r in rows:
        line = []
        for c in cols:
            if r == c:
                line.append(Fraction(bits[D.index(r)]))
            else:
                line.append(Fraction(psi[r - 1][c - 1]))
        mat.append(line)
    return exactla.mat_det(mat)


def _numeric_multilinear_coeffs(psi, D, R, C, n):
    """Exact multilinear coefficients of the minor in the diagonal unknowns."""
    values = {}
    for bits in itertools.product((0, 1), repeat=n):
        values[bits] = _numeric_bordered_det(psi, D, R, C, bits)
    coeffs = {}
    for bits in values:
        support = [i for i, b in enumerate(bits) if b]
        acc = Fraction(0)
        for sub in itertools.product(*[((0, 1) if i in support else (0,))
                                       for i in range(n)]):
            sign = (-1) ** (sum(bits) - sum(sub))
            acc += sign * values[sub]
        coeffs[bits] = acc
    return coeffs


def resultant_invariant(sel: ResultantSelection, p: int, m: int,
                        mode: str = "evaluable",
                        table: VariableTable = None,
                        term_cap: int = DEFAULT_TERM_CAP) -> InvariantRecord:
    """Resultant invariant for the selection; symbolic or evaluable.

    Symbolic mode expands the polynomial fully and refuses (with a term-count
    estimate) above ``term_cap``.  Evaluable mode returns a record whose
    evaluator computes f(Psi) exactly through the determinantal formula.
    """
    n = sel.validate(p, m)
    degree = expected_degree(n, m)
    table = table or VariableTable.covariance(p)
    D = tuple(sel.D)

    if mode == "symbolic":
        systems = []
        for k in range(n + 1):
            det = sym_determinant(
                _bordered_matrix_symbolic(table, D, sel.rows[k], sel.cols[k]))
            systems.append(_collect_by_diagonal(det, table, D))
        estimate = _estimate_terms(n, systems)
        if estimate > term_cap:
            raise ExpansionCapError(estimate, term_cap)
        res = multilinear_resultant(n, MultilinearSystem(n, systems))
        if res.is_zero():
            return InvariantRecord(kind="resultant", indices=(D, sel.rows, sel.cols),
                                   degree=0, table=table, poly=res,
                                   normalization="zero")
        return InvariantRecord(kind="resultant", indices=(D, sel.rows, sel.cols),
                               degree=degree, table=table,
                               poly=_grevlex_monic(res))
    if mode == "evaluable":
        rows, cols = sel.rows, sel.cols

        def evaluator(psi):
            systems = [_numeric_multilinear_coeffs(psi, D, rows[k], cols[k], n)
                       for k in range(n + 1)]
            return multilinear_resultant(n, MultilinearSystem(n, systems))

        return InvariantRecord(kind="resultant", indices=(D, rows, cols),
                               degree=degree, table=table, poly=None,
                               evaluator=evaluator)
    raise DomainError(f"unknown mode {mode!r}")


def _estimate_terms(n: int, systems: list) -> int:
    """Crude upper bound on the expanded term count of the resultant."""
    sizes = [max(len(c.terms) for c in sysk.values()) for sysk in systems]
    worst = max(sizes)
    if n == 1:
        return 2 * worst * worst
    if n == 2:
        return 4 * (6 * worst**3) ** 2 // 10
    return 720 * (24 * worst**4) ** 6 // 10**6


# ---------------------------------------------------------------------------
# restriction to a line, gcd scheme


def restrict_to_line(record: InvariantRecord, base, direction,
                     degree: int = None) -> list:
    """Coefficients (ascending in t) of f(base + t * direction), exact.

    Evaluates at degree+1 integer points and interpolates; raises DomainError
    when the restriction vanishes identically (degenerate line).
    """
    d = degree if degree is not None else record.degree
    p = record.table.p
    xs = list(range(d + 1))
    ys = []
    for t in xs:
        psi_t = [[Fraction(base[i][j]) + t * Fraction(direction[i][j])
                  for j in range(p)] for i in range(p)]
        ys.append(record.evaluate(psi_t, mode="exact"))
    if all(y == 0 for y in ys):
        raise DomainError("restriction vanishes on the whole line; "
                          "choose another direction")
    return exactla.newton_interpolate(xs, ys)


def gcd_of_restrictions(inv_a: InvariantRecord, inv_b: InvariantRecord,
                        base, direction) -> list:
    """Monic gcd (ascending coefficients) of two line restrictions.

    Restricts both invariants to the same rational line by exact evaluation
    and interpolation, then takes the exact univariate gcd over the rationals.
    """
    ca = restrict_to_line(inv_a, base, direction)
    cb = restrict_to_line(inv_b, base, direction)
    return _univariate_gcd(ca, cb)


def _univariate_gcd(ca: list, cb: list) -> list:
    import sympy

    t = sympy.Symbol("t")
    pa = sympy.Poly(list(reversed(exactla.clear_denominators(ca))), t, domain="ZZ")
    pb = sympy.Poly(list(reversed(exactla.clear_denominators(cb))), t, domain="ZZ")
    g = pa.gcd(pb)
    coeffs = [Fraction(int(c)) for c in reversed(g.all_coeffs())]
    lead = coeffs[exactla.poly_degree(coeffs)]
    return [c / lead for c in coeffs]
