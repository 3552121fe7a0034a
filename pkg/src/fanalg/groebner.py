"""Buchberger's algorithm, normal forms, block elimination, degree by slicing.

The public entry points work on :class:`~fanalg.polyring.Polynomial` values.
Internally the engine strips rational polynomials to primitive integer
coefficient dictionaries and runs fraction-free reductions (content is
stripped after every reduction), which keeps intermediate coefficients small
without ever leaving exact arithmetic.  Prime-field inputs run the same loops
with monic generators mod q.

Pair management follows the Gebauer-Moeller update (chain and coprimality
criteria applied as pairs are created), and pair selection is the normal
strategy: smallest lcm degree first, ties broken by the monomial order.
"""

from __future__ import annotations

import itertools
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from heapq import heapify, heappop, heappush
from math import gcd
from typing import Iterable, Optional

from .polyring import (
    QQ,
    DomainError,
    Monomial,
    MonomialOrder,
    Polynomial,
    PrimeField,
    VariableTable,
    leading_term,
)


# ---------------------------------------------------------------------------
# results and configuration


@dataclass
class Limits:
    """Resource caps for basis computations; hits are reported, never silent."""

    max_degree: int = 12
    max_pairs: int = 2_000_000
    timeout_secs: Optional[float] = None


@dataclass
class LimitReport:
    pairs_processed: int = 0
    degree_skips: int = 0
    pair_cap_hit: bool = False
    timed_out: bool = False
    elapsed_secs: float = 0.0

    @property
    def complete(self) -> bool:
        return not (self.degree_skips or self.pair_cap_hit or self.timed_out)

    def to_dict(self) -> dict:
        return {
            "pairs_processed": self.pairs_processed,
            "degree_skips": self.degree_skips,
            "pair_cap_hit": self.pair_cap_hit,
            "timed_out": self.timed_out,
            "elapsed_secs": round(self.elapsed_secs, 3),
            "complete": self.complete,
        }


@dataclass
class Basis:
    """A generator list with its monomial order and certification status."""

    generators: list
    order: MonomialOrder
    status: str = "raw"  # raw | groebner | reduced-groebner
    limit_report: Optional[LimitReport] = None

    def __post_init__(self):
        if self.status not in ("raw", "groebner", "reduced-groebner"):
            raise DomainError(f"unknown basis status {self.status!r}")

    def leading_monomials(self) -> list:
        return [self.order.leading_monomial(g) for g in self.generators]

    def to_text(self) -> str:
        lines = [f"# order: {self.order.spec_string()}", f"# status: {self.status}"]
        lines += [g.to_text(self.order) for g in self.generators]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, table: VariableTable, field=QQ) -> "Basis":
        order = None
        status = "raw"
        gens = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("order:"):
                    order = parse_order_spec(body[len("order:"):].strip(), table)
                elif body.startswith("status:"):
                    status = body[len("status:"):].strip()
                continue
            gens.append(Polynomial.parse(line, table, field))
        if order is None:
            order = MonomialOrder.grevlex(table)
        return cls(gens, order, status)


def parse_order_spec(spec: str, table: VariableTable) -> MonomialOrder:
    """Inverse of MonomialOrder.spec_string for the orders this package emits."""
    spec = spec.strip()
    if spec == "grevlex":
        return MonomialOrder.grevlex(table)
    if spec == "lex":
        return MonomialOrder.lex(table)
    if spec.startswith("circular-lex"):
        return MonomialOrder.circular_lex(table)
    if spec.startswith("block(") and spec.endswith(")"):
        body = spec[len("block("):-1]
        names, _, inner = body.partition(";")
        blk = [n.strip() for n in names.split(",") if n.strip()]
        inner_order = parse_order_spec(inner, table) if inner else None
        return MonomialOrder.block_elimination(table, blk, inner_order)
    raise DomainError(f"cannot parse order spec {spec!r}")


# ---------------------------------------------------------------------------
# internal integer-coefficient engine


class _Gen:
    __slots__ = ("terms", "lt", "ltc", "mask", "key")

    def __init__(self, terms, lt, ltc, mask, key):
        self.terms = terms
        self.lt = lt
        self.ltc = ltc
        self.mask = mask
        self.key = key


def _mono_mask(m) -> int:
    mask = 0
    for i, e in enumerate(m):
        if e:
            mask |= 1 << i
    return mask


class _Engine:
    """Fraction-free (QQ) or mod-q (GF) polynomial reduction engine."""

    def __init__(self, order: MonomialOrder, modulus: Optional[int] = None):
        self.order = order
        self.key = order.key
        self.q = modulus

    # -- conversions --------------------------------------------------------

    def from_polynomial(self, poly: Polynomial) -> dict:
        if self.q is None:
            den = 1
            for c in poly.terms.values():
                den = den * c.denominator // gcd(den, c.denominator)
            out = {m: int(c * den) for m, c in poly.terms.items()}
            return self.strip_content(out)
        return {m: c % self.q for m, c in poly.terms.items() if c % self.q}

    def to_polynomial(self, d: dict, table, fld, monic: bool = True) -> Polynomial:
        if not d:
            return Polynomial.zero(table, fld)
        if self.q is None:
            if monic:
                lc = d[max(d, key=self.key)]
                return Polynomial(table, {m: Fraction(c, lc) for m, c in d.items()},
                                  fld, _canonical=True)
            return Polynomial(table, {m: Fraction(c) for m, c in d.items()},
                              fld, _canonical=True)
        if monic:
            inv = pow(d[max(d, key=self.key)], self.q - 2, self.q)
            return Polynomial(table, {m: c * inv % self.q for m, c in d.items()},
                              fld, _canonical=True)
        return Polynomial(table, dict(d), fld, _canonical=True)

    def make_gen(self, d: dict) -> _Gen:
        lt = max(d, key=self.key)
        return _Gen(d, lt, d[lt], _mono_mask(lt), self.key(lt))

    # -- coefficient normalization -------------------------------------------

    def strip_content(self, d: dict) -> dict:
        if self.q is not None or not d:
            return d
        g = 0
        for c in d.values():
            g = gcd(g, c)
            if g == 1:
                break
        if g > 1:
            d = {m: c // g for m, c in d.items()}
        # fix the sign so the leading coefficient is positive
        if d[max(d, key=self.key)] < 0:
            d = {m: -c for m, c in d.items()}
        return d

    # -- reduction ------------------------------------------------------------

    def reduce_full(self, f: dict, gens: list) -> dict:
        """Full normal form of f modulo gens (tails reduced too)."""
        if not f:
            return f
        key = self.key
        q = self.q
        f = dict(f)
        heap = [(-key(m), m) for m in f]
        heapify(heap)
        done = set()
        steps = 0
        while heap:
            _, m = heappop(heap)
            c = f.get(m)
            if not c or m in done:
                continue
            mmask = _mono_mask(m)
            reducer = None
            for g in gens:
                if g.mask & mmask == g.mask and g.lt.divides(m):
                    reducer = g
                    break
            if reducer is None:
                done.add(m)
                continue
            if q is None:
                d = gcd(c, reducer.ltc)
                scale_f = reducer.ltc // d
                scale_g = c // d
                if scale_f != 1:
                    for k in f:
                        f[k] *= scale_f
                if scale_f < 0:
                    scale_g = -scale_g
            else:
                scale_g = c * pow(reducer.ltc, q - 2, q) % q
            qm = m.div(reducer.lt)
            for gm, gc in reducer.terms.items():
                t = Monomial(x + y for x, y in zip(qm, gm))
                old = f.get(t)
                v = (0 if old is None else old) - scale_g * gc
                if q is not None:
                    v %= q
                if v:
                    if old is None and t not in done:
                        heappush(heap, (-key(t), t))
                    f[t] = v
                else:
                    f.pop(t, None)
            steps += 1
            if q is None and steps % 64 == 0 and f:
                f = dict(self.strip_content(f))
        return self.strip_content(f)

    def spoly(self, a: _Gen, b: _Gen) -> dict:
        l = a.lt.lcm(b.lt)
        qa = l.div(a.lt)
        qb = l.div(b.lt)
        q = self.q
        if q is None:
            d = gcd(a.ltc, b.ltc)
            ca, cb = b.ltc // d, a.ltc // d
        else:
            ca = pow(a.ltc, q - 2, q)
            cb = pow(b.ltc, q - 2, q)
        out: dict = {}
        for m, c in a.terms.items():
            t = Monomial(x + y for x, y in zip(qa, m))
            out[t] = c * ca
        for m, c in b.terms.items():
            t = Monomial(x + y for x, y in zip(qb, m))
            v = out.get(t, 0) - c * cb
            if q is not None:
                v %= q
            if v:
                out[t] = v
            elif t in out:
                del out[t]
        if q is not None:
            out = {m: c % q for m, c in out.items() if c % q}
        return out


# ---------------------------------------------------------------------------
# pair bookkeeping (Gebauer-Moeller)


def _gm_update(G: list, P: dict, f: _Gen, engine: _Engine) -> None:
    """Append f to G, pruning and creating S-pairs in place.

    P maps (i, j) index pairs to their lcm monomial.  The update applies the
    chain criterion to surviving old pairs and the minimal-lcm plus
    coprimality criteria to the new ones.
    """
    t = len(G)
    lmf = f.lt

    stale = []
    for (i, j), l in P.items():
        if lmf.divides(l) and l != G[i].lt.lcm(lmf) and l != G[j].lt.lcm(lmf):
            stale.append((i, j))
    for p in stale:
        del P[p]

    lcm_buckets: dict = {}
    for i, g in enumerate(G):
        lcm_buckets.setdefault(g.lt.lcm(lmf), []).append(i)
    kept = []
    for L in sorted(lcm_buckets, key=engine.key):
        if not any(Lk.divides(L) for Lk in kept):
            kept.append(L)
    for L in kept:
        bucket = lcm_buckets[L]
        if any(G[i].lt.coprime(lmf) for i in bucket):
            continue
        P[(min(bucket), t)] = L
    G.append(f)


# ---------------------------------------------------------------------------
# public operations


def buchberger(gens: Iterable[Polynomial], order: MonomialOrder,
               limits: Limits = None) -> Basis:
    """Compute a reduced Groebner basis, or a flagged partial basis on limits.

    The returned basis has status ``reduced-groebner`` when the pair queue was
    exhausted within the limits, and ``raw`` with a limit report otherwise.
    """
    gens = [g for g in gens]
    if not gens:
        raise DomainError("buchberger requires a nonempty generator list")
    table = gens[0].table
    fld = gens[0].field
    for g in gens:
        g._check_compatible(gens[0])
    limits = limits or Limits()
    modulus = fld.q if isinstance(fld, PrimeField) else None
    engine = _Engine(order, modulus)
    report = LimitReport()
    start = time.monotonic()

    dicts = []
    seen = set()
    for g in gens:
        d = engine.from_polynomial(g)
        if not d:
            continue
        fs = frozenset(d.items())
        if fs not in seen:
            seen.add(fs)
            dicts.append(d)
    if not dicts:
        return Basis([], order, "reduced-groebner", report)

    G: list = []
    P: dict = {}
    for d in sorted(dicts, key=lambda d: engine.key(max(d, key=engine.key))):
        d = engine.reduce_full(d, G)
        if d:
            _gm_update(G, P, engine.make_gen(d), engine)

    while P:
        report.elapsed_secs = time.monotonic() - start
        if limits.timeout_secs is not None and report.elapsed_secs > limits.timeout_secs:
            report.timed_out = True
            break
        if report.pairs_processed >= limits.max_pairs:
            report.pair_cap_hit = True
            break
        pair, lcm_mono = min(P.items(), key=lambda kv: (kv[1].degree, engine.key(kv[1])))
        del P[pair]
        report.pairs_processed += 1
        if lcm_mono.degree > limits.max_degree:
            report.degree_skips += 1
            continue
        s = engine.spoly(G[pair[0]], G[pair[1]])
        r = engine.reduce_full(s, G)
        if r:
            _gm_update(G, P, engine.make_gen(r), engine)

    report.elapsed_secs = time.monotonic() - start
    if not report.complete:
        out = [engine.to_polynomial(g.terms, table, fld, monic=False) for g in G]
        return Basis(out, order, "raw", report)

    # minimalize: drop generators whose leading term another one divides
    G_sorted = sorted(G, key=lambda g: g.key)
    minimal: list = []
    for g in G_sorted:
        if not any(h.lt.divides(g.lt) for h in minimal):
            minimal.append(g)
    # interreduce tails for the reduced basis
    reduced = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        r = engine.reduce_full(dict(g.terms), others)
        reduced.append(engine.make_gen(r))
    out = [engine.to_polynomial(g.terms, table, fld, monic=True) for g in reduced]
    return Basis(out, order, "reduced-groebner", report)


def reduce_polynomial(f: Polynomial, basis: Basis):
    """Normal form and quotients: f == sum(q_i * g_i) + normal_form exactly."""
    order = basis.order
    table, fld = f.table, f.field
    gens = basis.generators
    for g in gens:
        f._check_compatible(g)
    lead = [leading_term(g, order) for g in gens]
    masks = [_mono_mask(lm) for lm, _ in lead]
    key = order.key

    rem = dict(f.terms)
    quotients = [dict() for _ in gens]
    nf: dict = {}
    heap = [(-key(m), m) for m in rem]
    heapify(heap)
    done = set()
    while heap:
        _, m = heappop(heap)
        c = rem.get(m)
        if not c or m in done:
            continue
        mmask = _mono_mask(m)
        hit = None
        for idx, (lm, lc) in enumerate(lead):
            if masks[idx] & mmask == masks[idx] and lm.divides(m):
                hit = (idx, lm, lc)
                break
        if hit is None:
            done.add(m)
            nf[m] = c
            continue
        idx, lm, lc = hit
        qm = m.div(lm)
        qc = c * fld.inv(lc)
        if isinstance(fld, PrimeField):
            qc %= fld.q
        quotients[idx][qm] = quotients[idx].get(qm, fld.zero) + qc
        for gm, gc in gens[idx].terms.items():
            t = Monomial(x + y for x, y in zip(qm, gm))
            old = rem.get(t)
            v = (fld.zero if old is None else old) - qc * gc
            if isinstance(fld, PrimeField):
                v %= fld.q
            if v:
                if old is None and t not in done:
                    heappush(heap, (-key(t), t))
                rem[t] = v
            else:
                rem.pop(t, None)
    normal_form = Polynomial(table, nf, fld)
    quots = [Polynomial(table, qd, fld) for qd in quotients]
    return normal_form, quots


def is_groebner_basis(basis: Basis):
    """Buchberger's criterion: (passes, certificate of failing pairs).

    Pairs with coprime leading terms are skipped; their S-polynomials reduce
    to zero by the product criterion.
    """
    gens = [g for g in basis.generators if g]
    if len(gens) != len(basis.generators):
        raise DomainError("basis contains a zero generator")
    if not gens:
        return True, []
    fld = gens[0].field
    modulus = fld.q if isinstance(fld, PrimeField) else None
    engine = _Engine(basis.order, modulus)
    internal = [engine.make_gen(engine.from_polynomial(g)) for g in gens]
    failing = []
    for i, j in itertools.combinations(range(len(internal)), 2):
        a, b = internal[i], internal[j]
        if a.lt.coprime(b.lt):
            continue
        r = engine.reduce_full(engine.spoly(a, b), internal)
        if r:
            failing.append((i, j))
    return not failing, failing


def ideal_membership(f: Polynomial, basis: Basis) -> bool:
    """Whether f lies in the ideal; requires a certified Groebner basis."""
    if basis.status == "raw":
        raise DomainError("membership test needs a Groebner basis, got a raw basis")
    if not basis.generators:
        return f.is_zero()
    fld = f.field
    modulus = fld.q if isinstance(fld, PrimeField) else None
    engine = _Engine(basis.order, modulus)
    internal = [engine.make_gen(engine.from_polynomial(g))
                for g in basis.generators if g]
    return not engine.reduce_full(engine.from_polynomial(f), internal)


@dataclass
class EliminationResult:
    generators: list             # basis elements free of the eliminated block
    basis: Basis                 # the full Groebner basis that was computed
    block: frozenset

    @property
    def complete(self) -> bool:
        return self.basis.status != "raw"

    def as_basis(self) -> Basis:
        """The elimination generators as a basis of the elimination ideal."""
        return Basis(self.generators, self.basis.order, self.basis.status,
                     self.basis.limit_report)


def eliminate(gens: Iterable[Polynomial], first_block, limits: Limits = None,
              inner: MonomialOrder = None) -> EliminationResult:
    """Generators of the elimination ideal dropping ``first_block`` variables."""
    gens = list(gens)
    if not gens:
        raise DomainError("eliminate requires a nonempty generator list")
    table = gens[0].table
    order = MonomialOrder.block_elimination(table, first_block, inner)
    basis = buchberger(gens, order, limits)
    block = order.block
    free = []
    for g in basis.generators:
        if not any(i in block for i in g.variables()):
            free.append(g)
    return EliminationResult(free, basis, block)


# ---------------------------------------------------------------------------
# degree by slicing over a finite field


@dataclass
class SliceSpec:
    """Random affine slice configuration for finite-field degree counting."""

    codim: int
    q: int = 101
    seed: int = 0


@dataclass
class SliceTrial:
    status: str                # ok | degenerate | non-zero-dimensional | limit
    degree: Optional[int] = None
    substitution: Optional[dict] = None


@dataclass
class SliceReport:
    modal_degree: Optional[int]
    trials: list = field(default_factory=list)

    def degrees(self) -> list:
        return [t.degree for t in self.trials if t.status == "ok"]


def degree_by_slicing(gens: Iterable[Polynomial], codim: int, spec: SliceSpec,
                      trials: int = 5, limits: Limits = None) -> SliceReport:
    """Degree of the variety by counting a random affine slice over GF(q).

    Each trial substitutes an independent random affine-linear form in
    ``codim`` parameters for every variable, computes a Groebner basis of the
    now zero-dimensional system over GF(q), and returns the vector-space
    dimension of the quotient ring.  Unlucky slices are discarded and
    reported; the modal value across trials is the degree estimate.
    """
    gens = list(gens)
    if not gens:
        raise DomainError("degree_by_slicing requires generators")
    if codim != spec.codim:
        raise DomainError("codim argument disagrees with the slice spec")
    table = gens[0].table
    gf = PrimeField(spec.q)
    utable = VariableTable.plain([f"u{k + 1}" for k in range(codim)])
    uorder = MonomialOrder.grevlex(utable)
    limits = limits or Limits(max_degree=60)

    used_vars = set()
    for g in gens:
        used_vars |= g.variables()

    report = SliceReport(modal_degree=None)
    for t in range(trials):
        rng = random.Random((spec.seed, t))
        substitution = {}
        mapping = {}
        for v in sorted(used_vars):
            coeffs = [rng.randrange(spec.q) for _ in range(codim + 1)]
            substitution[table.names[v]] = coeffs
            terms = {Monomial.unit(codim): coeffs[0]}
            for k in range(codim):
                terms[Monomial.variable(k, codim)] = coeffs[k + 1]
            mapping[v] = Polynomial(utable, terms, gf)
        sliced = []
        for g in gens:
            s = g.substitute(mapping)
            if s:
                sliced.append(s)
        if not sliced:
            report.trials.append(SliceTrial("degenerate", substitution=substitution))
            continue
        basis = buchberger(sliced, uorder, limits)
        if basis.status == "raw":
            report.trials.append(SliceTrial("limit", substitution=substitution))
            continue
        if not basis.generators:
            report.trials.append(SliceTrial("degenerate", substitution=substitution))
            continue
        lts = basis.leading_monomials()
        dim = _quotient_dimension(lts, codim)
        if dim is None:
            report.trials.append(
                SliceTrial("non-zero-dimensional", substitution=substitution))
            continue
        report.trials.append(SliceTrial("ok", degree=dim, substitution=substitution))

    degrees = report.degrees()
    if degrees:
        report.modal_degree = Counter(degrees).most_common(1)[0][0]
    return report


def _quotient_dimension(lts: list, nvars: int) -> Optional[int]:
    """Number of standard monomials, or None if the ideal is not 0-dimensional."""
    if any(lt.degree == 0 for lt in lts):
        return 0
    bounds = [None] * nvars
    for lt in lts:
        nz = [(i, e) for i, e in enumerate(lt) if e]
        if len(nz) == 1:
            i, e = nz[0]
            if bounds[i] is None or e < bounds[i]:
                bounds[i] = e
    if any(b is None for b in bounds):
        return None
    total = 1
    for b in bounds:
        total *= b
    if total > 2_000_000:
        return None
    count = 0
    for expo in itertools.product(*[range(b) for b in bounds]):
        if not any(all(l <= e for l, e in zip(lt, expo)) for lt in lts):
            count += 1
    return count
