"""Products of nilpotent 2x2 matrices: censuses, counting formula,
certified decompositions, sharpness witnesses.

The census routes are independent by construction: ``product_set`` builds
the exact set of s-fold products bottom-up over the packed encoding, while
``formula_count`` evaluates the closed-form count and ``orbit_union``
measures the conjugation-orbit union.  Agreement between them is what the
verification suites assert; nothing here short-circuits one route through
another.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from time import perf_counter

import numpy as np

from .chain_ring import Ring, RingElem, format_ring_spec
from .mat2 import (Mat2, MatrixSpace, format_matrix, identity, top_row,
                   zero_matrix)
from .orbits import locate_in_orbit_union, orbit_union

# Any fixed constant works; this one is frozen so seeded runs reproduce.
DEFAULT_SEED = 218184014

_BULK_PAIR_BLOCK = 2_000_000


class DecompositionError(ValueError):
    """Base class for structured decomposition refusals."""


class TraceObstructionError(DecompositionError):
    """No product of two nilpotents can reach the target."""


class NotInOrbitUnionError(DecompositionError):
    """The target is outside the top-row orbit union."""


class NotNilpotentError(DecompositionError):
    """A single-factor decomposition needs a nilpotent target."""


# ---------------------------------------------------------------------------
# counting
# ---------------------------------------------------------------------------

def _is_odd_prime_power(q: int) -> bool:
    if q < 3 or q % 2 == 0:
        return False
    p = 3
    while p * p <= q:
        if q % p == 0:
            break
        p += 2
    else:
        p = q
    while q % p == 0:
        q //= p
    return q == 1


def formula_count(q: int, n: int, s: int) -> int:
    """Closed-form size of the set of s-fold nilpotent products in M2(R)
    for a chain ring with residue field GF(q) and nilpotency degree n.

    Valid for s >= 2n - 1.  The fraction in the general branch is exact;
    the assertion guards the divisibility for every admissible q.
    """
    if not _is_odd_prime_power(q):
        raise ValueError(f"q must be an odd prime power, got {q}")
    if n < 1 or s < 1:
        raise ValueError("n and s must both be at least 1")
    if s < 2 * n - 1:
        raise ValueError(f"formula needs s >= 2n - 1 = {2 * n - 1}")
    if n == 1 and s == 1:
        return q * q
    if n == 1 and s == 2:
        return q ** 3 - q + 1
    num = (q + 2) * q ** (3 * n + 1) + q ** 3 + q ** 2 + 1
    den = q * q + q + 1
    assert num % den == 0, "the fraction is integral for every odd prime power"
    return q ** (2 * n) - q ** (n + 1) + num // den - 1


def _formula_or_none(q: int, n: int, s: int) -> int | None:
    if s < 2 * n - 1:
        return None
    return formula_count(q, n, s)


def nilpotent_count_check(space: MatrixSpace) -> tuple[int, int, bool]:
    """(enumerated nilpotents, q^(2(2n-1)), agreement flag)."""
    enumerated = int(space.nilpotent_mask.sum())
    q, n = space.ring.q, space.ring.n
    formula = q ** (2 * (2 * n - 1))
    return enumerated, formula, enumerated == formula


def gl2_count(q: int, n: int) -> int:
    """|GL2(R)| = q^(4(n-1)) (q^2 - 1)(q^2 - q)."""
    return q ** (4 * (n - 1)) * (q * q - 1) * (q * q - q)


# ---------------------------------------------------------------------------
# exact product sets
# ---------------------------------------------------------------------------

def _multiply_sets(space: MatrixSpace, left: np.ndarray, right: np.ndarray,
                   threads: int = 1) -> np.ndarray:
    """Sorted packed indices of {L * R : L in left, R in right}."""
    r = space.unpack(right)
    r = tuple(x[None, :] for x in r)

    def fill(mask: np.ndarray, lo: int, hi: int):
        block = max(1, _BULK_PAIR_BLOCK // max(len(right), 1))
        for start in range(lo, hi, block):
            l = space.unpack(left[start:min(start + block, hi)])
            l = tuple(x[:, None] for x in l)
            prod = space.matmul(l, r)
            mask[space.pack(*prod).ravel()] = True

    if threads <= 1 or len(left) < 2 * threads:
        mask = np.zeros(space.count, dtype=bool)
        fill(mask, 0, len(left))
        return np.flatnonzero(mask)
    bounds = np.linspace(0, len(left), threads + 1).astype(int)
    masks = [np.zeros(space.count, dtype=bool) for _ in range(threads)]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        futures = [ex.submit(fill, masks[i], bounds[i], bounds[i + 1])
                   for i in range(threads)]
        for f in futures:
            f.result()
    mask = masks[0]
    for m in masks[1:]:
        mask |= m
    return np.flatnonzero(mask)


def product_set(space: MatrixSpace, s: int, threads: int = 1) -> np.ndarray:
    """Sorted packed indices of every product of exactly s nilpotents.

    Each multiplicity is recomputed from the full previous set; the sets
    are not monotone in s, so no frontier shortcut applies.
    """
    if s < 1:
        raise ValueError("s must be at least 1")
    cur = space.nilpotent_indices
    for _ in range(s - 1):
        cur = _multiply_sets(space, cur, space.nilpotent_indices, threads)
    return cur


@dataclass
class CensusReport:
    ring: str
    q: int
    n: int
    s: int
    brute_count: int | None
    formula_count: int | None
    match: bool | None
    method: str
    elapsed_ms: float

    def to_dict(self, stable: bool = False) -> dict:
        d = {"ring": self.ring, "q": self.q, "n": self.n, "s": self.s,
             "brute_count": self.brute_count,
             "formula_count": self.formula_count,
             "match": self.match, "method": self.method}
        if not stable:
            d["elapsed_ms"] = round(self.elapsed_ms, 3)
        return d


def census_set_product(space: MatrixSpace, s: int,
                       threads: int = 1) -> CensusReport:
    """Count s-fold nilpotent products exactly and compare with the
    closed-form count (absent when s < 2n - 1)."""
    ring = space.ring
    t0 = perf_counter()
    brute = len(product_set(space, s, threads))
    elapsed = (perf_counter() - t0) * 1000.0
    formula = _formula_or_none(ring.q, ring.n, s)
    return CensusReport(ring=format_ring_spec(ring.spec), q=ring.q, n=ring.n,
                        s=s, brute_count=brute, formula_count=formula,
                        match=None if formula is None else brute == formula,
                        method="set-product", elapsed_ms=elapsed)


def stable_product_count(n: int) -> int:
    """Smallest s at which the product sets have provably stabilised."""
    return 2 * n - 1 if n >= 2 else 3


def census_orbit_union(space: MatrixSpace, s: int | None = None,
                       method: str = "auto") -> CensusReport:
    """Count the orbit union, which equals the s-fold product set for every
    s past the stabilisation point."""
    ring = space.ring
    floor = stable_product_count(ring.n)
    if s is None:
        s = floor
    if s < floor:
        raise ValueError(
            f"orbit-union census needs s >= {floor} for this ring")
    t0 = perf_counter()
    brute = int(orbit_union(space, method).sum())
    elapsed = (perf_counter() - t0) * 1000.0
    formula = _formula_or_none(ring.q, ring.n, s)
    return CensusReport(ring=format_ring_spec(ring.spec), q=ring.q, n=ring.n,
                        s=s, brute_count=brute, formula_count=formula,
                        match=None if formula is None else brute == formula,
                        method="orbit-union", elapsed_ms=elapsed)


def census_formula_only(ring: Ring, s: int) -> CensusReport:
    formula = _formula_or_none(ring.q, ring.n, s)
    return CensusReport(ring=format_ring_spec(ring.spec), q=ring.q, n=ring.n,
                        s=s, brute_count=None, formula_count=formula,
                        match=None, method="formula-only", elapsed_ms=0.0)


# ---------------------------------------------------------------------------
# certified factorizations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NilFactorization:
    """A checked equation: target equals the ordered product of factors.

    ``certified`` refuses to construct an unverified instance, so holding
    one is proof the factors are nilpotent and multiply out correctly.
    """

    target: Mat2
    factors: tuple[Mat2, ...]
    conjugator: Mat2

    @classmethod
    def certified(cls, target: Mat2, factors, conjugator: Mat2):
        factors = tuple(factors)
        assert factors, "a factorization needs at least one factor"
        for N in factors:
            assert N.is_nilpotent(), "every factor must be nilpotent"
        prod = factors[0]
        for N in factors[1:]:
            prod = prod * N
        assert prod == target, "factors must multiply to the target"
        return cls(target, factors, conjugator)

    def to_dict(self) -> dict:
        return {"target": format_matrix(self.target),
                "factors": [format_matrix(N) for N in self.factors],
                "conjugator": format_matrix(self.conjugator),
                "verified": True}


def _parity_filler(ring: Ring) -> Mat2:
    # a rank-one nilpotent with all-unit entries, used to shift parity
    one = ring.one
    return Mat2(-one, one, -one, one)


def _top_row_factors(ring: Ring, a: RingElem, b: RingElem,
                     s: int) -> list[Mat2]:
    """s nilpotent factors multiplying to ((a, b), (0, 0)), for s >= 3.

    Case split on which of a, b is a unit; each case has one odd-length and
    one even-length base chain, padded in front by (E F) pairs that act as
    the idempotent e11 on the chain's product.
    """
    z, one = ring.zero, ring.one
    E = top_row(z, one)
    F = Mat2(z, z, one, z)
    G = _parity_filler(ring)
    if not a.is_unit():
        odd = [top_row(a, b)]
        even = [E, G, F, top_row(a, b)]
    elif not b.is_unit():
        last = Mat2(z, z, a, b)
        odd = [E, G, last]
        even = [E, F, G, last]
    else:
        K = Mat2(one, a.inverse() * b, -(b.inverse() * a), -one)
        odd = [E, Mat2(z, z, a, z), K]
        even = [E, Mat2(z, z, -b, z), E, K]
    chain = odd if (s - len(odd)) % 2 == 0 else even
    assert s >= len(chain)
    return [E, F] * ((s - len(chain)) // 2) + chain


def _search_two_factors(space: MatrixSpace, A: Mat2):
    """First nilpotent pair (N1, N2) with N1 N2 = A in packed pair order,
    or None after exhausting all pairs."""
    nil = space.nilpotent_indices
    target = A.packed
    r = tuple(x[None, :] for x in space.unpack(nil))
    block = max(1, _BULK_PAIR_BLOCK // max(len(nil), 1))
    for start in range(0, len(nil), block):
        chunk = nil[start:start + block]
        l = tuple(x[:, None] for x in space.unpack(chunk))
        packed = space.pack(*space.matmul(l, r))
        hits = np.argwhere(packed == target)
        if len(hits):
            i, j = hits[0]
            return (space.matrix_from_packed(int(chunk[i])),
                    space.matrix_from_packed(int(nil[j])))
    return None


def _decompose_two(space: MatrixSpace, A: Mat2) -> NilFactorization:
    ring = space.ring
    E = top_row(ring.zero, ring.one)
    if A == zero_matrix(ring):
        return NilFactorization.certified(A, [E, E], identity(ring))
    f = ring.residue_field
    res = [ring.residue(e) for e in A.entries()]
    if any(res) and f.add(res[0], res[3]) == 0:
        # the residue would be a nonzero trace-zero product of two nilpotent
        # residues, which cannot exist over a field
        raise TraceObstructionError(
            "trace obstruction: no two nilpotent factors exist")
    cert = locate_in_orbit_union(space, A)
    if cert is not None:
        a, b, P = cert.a, cert.b, cert.conjugator
        if a.is_unit():
            second = Mat2(-b, -(a.inverse() * (b * b)), a, b)
        else:
            # a trace in J forces the certificate's b into J as well, so
            # ((0,0),(a,b)) is nilpotent and E * it recovers the top row
            second = Mat2(ring.zero, ring.zero, a, b)
        Pinv = P.inverse()
        return NilFactorization.certified(
            A, [Pinv * E * P, Pinv * second * P], P)
    pair = _search_two_factors(space, A)
    if pair is None:
        raise TraceObstructionError(
            "no product of two nilpotent matrices equals this matrix "
            "(exhaustive search)")
    return NilFactorization.certified(A, list(pair), identity(ring))


def decompose(space: MatrixSpace, A: Mat2, s: int) -> NilFactorization:
    """Express A as an ordered product of exactly s nilpotent factors.

    s = 1 needs A itself nilpotent; s = 2 is decided exactly (fast paths
    plus an exhaustive certified search); s >= 3 goes through the orbit
    union witness and the constructive factor chains.
    """
    ring = space.ring
    if s < 1:
        raise ValueError("s must be at least 1")
    if s == 1:
        if not A.is_nilpotent():
            raise NotNilpotentError("target is not nilpotent")
        return NilFactorization.certified(A, [A], identity(ring))
    if s == 2:
        return _decompose_two(space, A)
    cert = locate_in_orbit_union(space, A)
    if cert is None:
        raise NotInOrbitUnionError(
            "not in orbit union: no conjugate of a top-row matrix matches")
    factors = _top_row_factors(ring, cert.a, cert.b, s)
    P = cert.conjugator
    Pinv = P.inverse()
    return NilFactorization.certified(
        A, [Pinv * N * P for N in factors], P)


# ---------------------------------------------------------------------------
# sharpness of the 2n - 1 bound
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SharpnessCertificate:
    """A (2n - 2)-fold product that escapes the orbit union, witnessing
    that the 2n - 1 bound cannot be lowered."""

    target: Mat2
    factorization: NilFactorization
    in_orbit_union: bool

    def to_dict(self) -> dict:
        d = self.factorization.to_dict()
        d["in_orbit_union"] = self.in_orbit_union
        d["factor_count"] = len(self.factorization.factors)
        return d


def sharpness_example(space: MatrixSpace) -> SharpnessCertificate:
    """The canonical escape example, checked end to end.

    Needs n >= 2 and n - 1 a unit in R; otherwise the construction is
    inapplicable and a ValueError says so.
    """
    ring = space.ring
    n = ring.n
    if n < 2:
        raise ValueError("example inapplicable: needs n >= 2")
    nm1 = ring.from_int(n - 1)
    if not nm1.is_unit():
        raise ValueError("example inapplicable: n - 1 is not a unit")
    x = ring.uniformizer
    N1 = Mat2(x, ring.one, nm1 * x, ring.zero)
    N2 = Mat2(ring.zero, nm1.inverse(), x, ring.zero)
    xp = x ** (n - 1)
    target = Mat2(xp, xp, ring.zero, xp)
    fact = NilFactorization.certified(target, [N1, N2] * (n - 1),
                                      identity(ring))
    assert locate_in_orbit_union(space, target) is None, \
        "sharpness target must avoid every top-row orbit"
    return SharpnessCertificate(target=target, factorization=fact,
                                in_orbit_union=False)


# ---------------------------------------------------------------------------
# sampled valuation obstruction scan
# ---------------------------------------------------------------------------

@dataclass
class ScanReport:
    ring: str
    samples: int
    matched: int
    violations: list[int]
    note: str = ""

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"ring": self.ring, "samples": self.samples,
                "matched": self.matched, "violations": self.violations,
                "note": self.note}


def valuation_obstruction_scan(space: MatrixSpace, samples: int,
                               seed: int = DEFAULT_SEED) -> ScanReport:
    """Sample (2n - 3)-fold nilpotent products and check the valuation
    obstruction: if v(x21) >= n-1, v(x22) >= n-1 and v(x11) < v(x12) <= n-2
    then x22 must vanish exactly.

    The hypothesis needs 2n - 3 >= 1 and a valuation gap below n - 1, so
    the scan is vacuous for n <= 2.
    """
    ring = space.ring
    name = format_ring_spec(ring.spec)
    n = ring.n
    if n < 3:
        return ScanReport(ring=name, samples=0, matched=0, violations=[],
                          note=f"hypothesis unsatisfiable for n={n}")
    if samples <= 0:
        return ScanReport(ring=name, samples=0, matched=0, violations=[])
    k = 2 * n - 3
    rng = np.random.default_rng(seed)
    nil = space.nilpotent_indices
    picks = nil[rng.integers(0, len(nil), size=(samples, k))]
    cur = space.unpack(picks[:, 0])
    for t in range(1, k):
        cur = space.matmul(cur, space.unpack(picks[:, t]))
    val = ring.val_table
    v11, v12, v21, v22 = (val[c] for c in cur)
    hyp = (v21 >= n - 1) & (v22 >= n - 1) & (v11 < v12) & (v12 <= n - 2)
    bad = hyp & (cur[3] != 0)
    packed = space.pack(*cur)
    return ScanReport(ring=name, samples=samples, matched=int(hyp.sum()),
                      violations=[int(v) for v in np.unique(packed[bad])])
