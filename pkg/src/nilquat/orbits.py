"""Conjugation orbits of top-row matrices ((a, b), (0, 0)) under GL2(R).

The union of those orbits over all pairs (a, b) is the central object of
the factorization results: it is computed either by a direct sweep over
GL2 (small rings) or through the rank-one parametrisation

    union = { u * w^T : u a unimodular column, w in R^2 },

where u runs over canonical projective-line representatives (1, c) and
(j, 1) with j in J(R).  Both routes are exact; the test suites check them
against each other exhaustively wherever the sweep is feasible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain_ring import Ring, RingElem, format_ring_spec
from .mat2 import Mat2, MatrixSpace, top_row

# Above this many conjugations the sweep yields to the parametrised route.
_SWEEP_OP_LIMIT = 4_000_000

# Per-pair orbit arrays are only memoised for groups this small.
_ORBIT_CACHE_GL_LIMIT = 65536


def conjugate(A: Mat2, P: Mat2) -> Mat2:
    """P^-1 A P; the conjugator must be invertible."""
    if not P.is_invertible():
        raise ValueError("conjugator is not invertible")
    return P.inverse() * A * P


def shear(ring: Ring, t: RingElem) -> Mat2:
    """((1, t), (0, 1)); invertible for every t since its det is 1."""
    return Mat2(ring.one, t, ring.zero, ring.one)


def unit_diag(ring: Ring, alpha: RingElem) -> Mat2:
    """((1, 0), (0, alpha)) for a unit alpha."""
    if not alpha.is_unit():
        raise ValueError("alpha must be a unit")
    return Mat2(ring.one, ring.zero, ring.zero, alpha)


@dataclass(frozen=True)
class Orbit:
    representative: Mat2
    members: np.ndarray  # sorted packed indices

    @property
    def size(self) -> int:
        return len(self.members)


def orbit_of(space: MatrixSpace, A: Mat2) -> Orbit:
    """The full conjugation orbit of A, as sorted packed indices."""
    return Orbit(A, np.unique(space.conjugates_of(A)))


def _top_row_orbit_data(space: MatrixSpace, ia: int, ib: int):
    """(sorted members, per-P conjugates in ascending P order) for the
    orbit of ((a, b), (0, 0)); memoised on the space for small GL2."""
    cached = space._orbit_cache.get((ia, ib))
    if cached is not None:
        return cached
    ring = space.ring
    A = top_row(ring.from_index(ia), ring.from_index(ib))
    conj = space.conjugates_of(A)
    data = (np.unique(conj), conj)
    if len(space.gl_packed) <= _ORBIT_CACHE_GL_LIMIT:
        space._orbit_cache[(ia, ib)] = data
    return data


def _union_by_sweep(space: MatrixSpace) -> np.ndarray:
    mask = np.zeros(space.count, dtype=bool)
    Q = space.Q
    for ia in range(Q):
        for ib in range(Q):
            members, _ = _top_row_orbit_data(space, ia, ib)
            mask[members] = True
    return mask


def _union_by_rank1(space: MatrixSpace) -> np.ndarray:
    """Mark every product u * w^T with u a canonical unimodular column.

    Canonical representatives (1, c) for all c and (j, 1) for j in J cover
    every unimodular column up to unit scaling, and unit scales of u can be
    absorbed into w, so the union is unchanged."""
    ring = space.ring
    Q, q = ring.size, ring.q
    mul = ring.mul_table
    mask = np.zeros(space.count, dtype=bool)
    e = np.arange(Q * Q, dtype=np.int64)
    w1, w2 = e % Q, e // Q
    one = ring.one.idx
    columns = [(one, c) for c in range(Q)]
    columns += [(j * q, one) for j in range(Q // q)]
    for u1, u2 in columns:
        packed = space.pack(mul[u1, w1], mul[u1, w2], mul[u2, w1], mul[u2, w2])
        mask[packed] = True
    return mask


def orbit_union(space: MatrixSpace, method: str = "auto") -> np.ndarray:
    """Boolean membership mask of the orbit union over all packed indices.

    The returned array is cached on the space; treat it as read-only.
    """
    if method == "auto":
        cost = space.Q ** 2 * len(space.invertible_indices)
        method = "sweep" if cost <= _SWEEP_OP_LIMIT else "rank1"
    if method not in ("sweep", "rank1"):
        raise ValueError(f"unknown union method {method!r}")
    cached = space._union_cache.get(method)
    if cached is None:
        cached = (_union_by_sweep(space) if method == "sweep"
                  else _union_by_rank1(space))
        space._union_cache[method] = cached
    return cached


@dataclass(frozen=True)
class OrbitCertificate:
    """A verified witness that P^-1 ((a, b), (0, 0)) P equals the target."""

    a: RingElem
    b: RingElem
    conjugator: Mat2


def locate_in_orbit_union(space: MatrixSpace, A: Mat2) -> OrbitCertificate | None:
    """Smallest witness (a, b, P) putting A in a top-row orbit, or None.

    The trace is conjugation invariant, so a is forced to equal tr(A); the
    search then takes the smallest b in index order and the smallest P in
    packed order.
    """
    mask = orbit_union(space)
    target = A.packed
    if not mask[target]:
        return None
    ring = space.ring
    a = A.trace()
    for ib in range(ring.size):
        members, conj = _top_row_orbit_data(space, a.idx, ib)
        pos = int(np.searchsorted(members, target))
        if pos < len(members) and members[pos] == target:
            k = int(np.argmax(conj == target))
            P = space.matrix_from_packed(int(space.gl_packed[k]))
            cert = OrbitCertificate(a=a, b=ring.from_index(ib), conjugator=P)
            assert conjugate(top_row(cert.a, cert.b), P) == A
            return cert
    raise AssertionError("union mask disagrees with the orbit scan")


def union_summary(space: MatrixSpace) -> dict:
    """Summary dict {ring, union_size, orbit_count}; orbit_count counts the
    distinct orbits among all Q^2 top-row representatives."""
    mask = orbit_union(space)
    reps = set()
    for ia in range(space.Q):
        for ib in range(space.Q):
            members, _ = _top_row_orbit_data(space, ia, ib)
            reps.add(int(members[0]))
    return {"ring": format_ring_spec(space.ring.spec),
            "union_size": int(mask.sum()),
            "orbit_count": len(reps)}


def save_union_bitset(space: MatrixSpace, path, method: str = "auto"):
    """Write the union mask as a bitset file: a text header line
    '<ring-spec> <bit-count>' followed by little-endian packed bits."""
    mask = orbit_union(space, method)
    with open(path, "wb") as fh:
        fh.write(f"{format_ring_spec(space.ring.spec)} {space.count}\n".encode())
        fh.write(np.packbits(mask, bitorder="little").tobytes())


def load_union_bitset(path) -> tuple[str, np.ndarray]:
    """Read a bitset file back as (ring spec string, boolean mask)."""
    with open(path, "rb") as fh:
        spec_text, nbits = fh.readline().decode().split()
        raw = np.frombuffer(fh.read(), dtype=np.uint8)
        bits = np.unpackbits(raw, count=int(nbits), bitorder="little")
    return spec_text, bits.astype(bool)
