"""2x2 matrices over a chain ring: arithmetic, invertibility, nilpotency.

Scalar matrices are small value objects built from ring elements.  The
counting work runs over a packed integer encoding instead: a matrix is the
integer

    idx(a11) + idx(a12)*Q + idx(a21)*Q^2 + idx(a22)*Q^3,   Q = q^n,

and MatrixSpace provides vectorised kernels over whole packed ranges.
Nilpotency uses the chain-ring criterion trace, det in J(R); the 2n-th
power oracle it is equivalent to lives in the test suites.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from .chain_ring import Ring, RingElem, format_ring_spec

DEFAULT_ENUMERATION_CAP = 2 ** 24

# Keeps each outer-product block in the bulk kernels around a few dozen MB.
_BULK_BLOCK = 2_000_000


class CapExceededError(ValueError):
    """A packed enumeration would exceed the configured cap."""


class Mat2:
    """An immutable 2x2 matrix with entries in one chain ring."""

    __slots__ = ("ring", "a11", "a12", "a21", "a22")

    def __init__(self, a11: RingElem, a12: RingElem, a21: RingElem,
                 a22: RingElem):
        ring = a11.ring
        for e in (a12, a21, a22):
            if not ring.same_ring(e.ring):
                raise ValueError("matrix entries from different rings")
        self.ring = ring
        self.a11 = a11
        self.a12 = a12
        self.a21 = a21
        self.a22 = a22

    def entries(self) -> tuple[RingElem, RingElem, RingElem, RingElem]:
        return (self.a11, self.a12, self.a21, self.a22)

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(*(x + y for x, y in zip(self.entries(), other.entries())))

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(*(x - y for x, y in zip(self.entries(), other.entries())))

    def __neg__(self) -> "Mat2":
        return Mat2(*(-x for x in self.entries()))

    def __mul__(self, other: "Mat2") -> "Mat2":
        a, b = self, other
        return Mat2(a.a11 * b.a11 + a.a12 * b.a21,
                    a.a11 * b.a12 + a.a12 * b.a22,
                    a.a21 * b.a11 + a.a22 * b.a21,
                    a.a21 * b.a12 + a.a22 * b.a22)

    def __pow__(self, k: int) -> "Mat2":
        if k < 0:
            raise ValueError("negative matrix powers are not supported")
        out = identity(self.ring)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return (isinstance(other, Mat2) and self.ring.same_ring(other.ring)
                and all(x.idx == y.idx
                        for x, y in zip(self.entries(), other.entries())))

    def __hash__(self):
        return hash((self.ring._key, self.packed))

    def __repr__(self):
        return (f"[[{self.a11!r},{self.a12!r}],"
                f"[{self.a21!r},{self.a22!r}]]")

    @property
    def packed(self) -> int:
        Q = self.ring.size
        return ((self.a22.idx * Q + self.a21.idx) * Q + self.a12.idx) * Q \
            + self.a11.idx

    def trace(self) -> RingElem:
        return self.a11 + self.a22

    def det(self) -> RingElem:
        return self.a11 * self.a22 - self.a12 * self.a21

    def is_invertible(self) -> bool:
        return self.det().is_unit()

    def inverse(self) -> "Mat2":
        d = self.det()
        if not d.is_unit():
            raise ValueError("matrix is not invertible")
        di = d.inverse()
        return Mat2(di * self.a22, di * (-self.a12),
                    di * (-self.a21), di * self.a11)

    def is_nilpotent(self) -> bool:
        """Chain-ring criterion: both trace and determinant lie in J(R)."""
        return not self.trace().is_unit() and not self.det().is_unit()


def identity(ring: Ring) -> Mat2:
    return Mat2(ring.one, ring.zero, ring.zero, ring.one)


def zero_matrix(ring: Ring) -> Mat2:
    return Mat2(ring.zero, ring.zero, ring.zero, ring.zero)


def top_row(a: RingElem, b: RingElem) -> Mat2:
    """The matrix ((a, b), (0, 0))."""
    ring = a.ring
    return Mat2(a, b, ring.zero, ring.zero)


# ---------------------------------------------------------------------------
# the four-class taxonomy of nilpotents
# ---------------------------------------------------------------------------

class NilTag(Enum):
    ZERO_ISH = 1
    UPPER_UNIT = 2
    LOWER_UNIT = 3
    UNIT_TRACE = 4


def _class_representative(ring: Ring, tag: NilTag, u, v) -> Mat2:
    z = ring.zero
    if tag is NilTag.ZERO_ISH:
        return zero_matrix(ring)
    if tag is NilTag.UPPER_UNIT:
        return Mat2(z, u, z, z)
    if tag is NilTag.LOWER_UNIT:
        return Mat2(z, z, u, z)
    return Mat2(u, -v, v.inverse() * (u * u), -u)


@dataclass(frozen=True)
class NilClass:
    """Which residue shape a nilpotent matrix has, plus the J-perturbation
    carrying it back to the classified matrix."""

    tag: NilTag
    u: RingElem | None
    v: RingElem | None
    perturbation: Mat2

    def representative(self) -> Mat2:
        return _class_representative(self.perturbation.ring, self.tag,
                                     self.u, self.v)

    def matrix(self) -> Mat2:
        return self.representative() + self.perturbation


def classify_nilpotent(A: Mat2) -> NilClass:
    """Sort a nilpotent matrix into exactly one of the four residue shapes.

    The witnesses are lifts of residues: u = lift(res(a11)) (or of the sole
    unit corner), v = lift(-res(a12)) in the unit-trace shape.
    """
    if not A.is_nilpotent():
        raise ValueError("matrix is not nilpotent")
    ring = A.ring
    f = ring.residue_field
    r11, r12, r21, r22 = (ring.residue(e) for e in A.entries())
    if r11 == 0 and r12 == 0 and r21 == 0 and r22 == 0:
        tag, u, v = NilTag.ZERO_ISH, None, None
    elif r11 == 0 and r21 == 0 and r22 == 0:
        tag, u, v = NilTag.UPPER_UNIT, ring.lift(r12), None
    elif r11 == 0 and r12 == 0 and r22 == 0:
        tag, u, v = NilTag.LOWER_UNIT, ring.lift(r21), None
    else:
        # residue is rank one with zero trace and no zero entry
        assert r11 and r12 and r21 and r22, "impossible nilpotent residue"
        tag, u, v = NilTag.UNIT_TRACE, ring.lift(r11), ring.lift(f.neg(r12))
    rep = _class_representative(ring, tag, u, v)
    pert = A - rep
    assert all(not e.is_unit() for e in pert.entries()), \
        "perturbation must lie in M2(J)"
    return NilClass(tag, u, v, pert)


# ---------------------------------------------------------------------------
# the packed matrix space
# ---------------------------------------------------------------------------

class MatrixSpace:
    """Vectorised kernels over all Q^4 packed matrices of one ring.

    Construction fails fast when q^(4n) exceeds the cap, so every bulk
    array below has a known bounded size.  Masks are built in fixed-size
    chunks to keep peak memory flat even near the cap.
    """

    def __init__(self, ring: Ring, cap: int = DEFAULT_ENUMERATION_CAP):
        count = ring.size ** 4
        if count > cap:
            raise CapExceededError(
                f"q^(4n) = {count} packed matrices exceed the enumeration "
                f"cap {cap}")
        self.ring = ring
        self.cap = cap
        self.Q = ring.size
        self.count = count
        self._orbit_cache: dict[tuple[int, int], tuple] = {}
        self._union_cache: dict[str, np.ndarray] = {}

    def __repr__(self):
        return f"MatrixSpace({format_ring_spec(self.ring.spec)})"

    # -- packing -----------------------------------------------------------

    def unpack(self, packed):
        Q = self.Q
        e = np.asarray(packed, dtype=np.int64)
        return (e % Q, (e // Q) % Q, (e // (Q * Q)) % Q, e // (Q * Q * Q))

    def pack(self, a11, a12, a21, a22):
        Q = self.Q
        return ((np.asarray(a22, dtype=np.int64) * Q + a21) * Q + a12) * Q + a11

    def matrix_from_packed(self, idx: int) -> Mat2:
        if not 0 <= idx < self.count:
            raise ValueError(f"packed index {idx} out of range")
        Q, r = self.Q, self.ring
        parts = []
        for _ in range(4):
            parts.append(r.from_index(idx % Q))
            idx //= Q
        return Mat2(*parts)

    # -- elementwise bulk operations ----------------------------------------

    def matmul(self, A, B):
        """Product of two matrices given as 4-tuples of index arrays
        (broadcasting; scalars allowed)."""
        add, mul = self.ring.add_table, self.ring.mul_table
        a11, a12, a21, a22 = A
        b11, b12, b21, b22 = B
        return (add[mul[a11, b11], mul[a12, b21]],
                add[mul[a11, b12], mul[a12, b22]],
                add[mul[a21, b11], mul[a22, b21]],
                add[mul[a21, b12], mul[a22, b22]])

    def trace_indices(self, entries):
        return self.ring.add_table[entries[0], entries[3]]

    def det_indices(self, entries):
        add, mul, neg = (self.ring.add_table, self.ring.mul_table,
                         self.ring.neg_table)
        return add[mul[entries[0], entries[3]], neg[mul[entries[1], entries[2]]]]

    # -- masks over the whole space -------------------------------------------

    def _mask_by(self, predicate) -> np.ndarray:
        mask = np.empty(self.count, dtype=bool)
        for start in range(0, self.count, _BULK_BLOCK):
            block = np.arange(start, min(start + _BULK_BLOCK, self.count),
                              dtype=np.int64)
            mask[start:start + len(block)] = predicate(self.unpack(block))
        return mask

    @cached_property
    def nilpotent_mask(self) -> np.ndarray:
        val = self.ring.val_table

        def pred(entries):
            return ((val[self.trace_indices(entries)] >= 1)
                    & (val[self.det_indices(entries)] >= 1))

        return self._mask_by(pred)

    @cached_property
    def nilpotent_indices(self) -> np.ndarray:
        return np.flatnonzero(self.nilpotent_mask)

    @cached_property
    def invertible_mask(self) -> np.ndarray:
        val = self.ring.val_table
        return self._mask_by(lambda e: val[self.det_indices(e)] == 0)

    @cached_property
    def invertible_indices(self) -> np.ndarray:
        return np.flatnonzero(self.invertible_mask)

    def enumerate_nilpotents(self) -> list[Mat2]:
        """All nilpotent matrices, ascending packed order."""
        return [self.matrix_from_packed(int(i)) for i in self.nilpotent_indices]

    def enumerate_invertibles(self) -> list[Mat2]:
        return [self.matrix_from_packed(int(i))
                for i in self.invertible_indices]

    # -- the general linear group ----------------------------------------------

    @cached_property
    def _gl_data(self):
        """(packed, entries, inverse entries) for GL2 in ascending packed
        order; inverses come from the adjugate scaled by det^-1."""
        g = self.invertible_indices
        e = self.unpack(g)
        mul, neg = self.ring.mul_table, self.ring.neg_table
        det = self.det_indices(e)
        idet = self.ring.inv_table[det]
        assert (idet >= 0).all(), "invertible mask must imply unit determinant"
        inv = (mul[idet, e[3]], mul[idet, neg[e[1]]],
               mul[idet, neg[e[2]]], mul[idet, e[0]])
        return g, e, inv

    @property
    def gl_packed(self) -> np.ndarray:
        return self._gl_data[0]

    def conjugates_of(self, A: Mat2) -> np.ndarray:
        """Packed P^-1 A P for every P in GL2, in ascending P order."""
        _, P, Pinv = self._gl_data
        a = tuple(x.idx for x in A.entries())
        return self.pack(*self.matmul(Pinv, self.matmul(a, P)))


_SPACE_CACHE: dict[tuple, MatrixSpace] = {}


def matrix_space(ring: Ring, cap: int = DEFAULT_ENUMERATION_CAP) -> MatrixSpace:
    key = (ring._key, cap)
    sp = _SPACE_CACHE.get(key)
    if sp is None:
        sp = MatrixSpace(ring, cap)
        _SPACE_CACHE[key] = sp
    return sp


# ---------------------------------------------------------------------------
# text and file forms
# ---------------------------------------------------------------------------

def _split_top_commas(s: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


def parse_matrix(ring: Ring, text: str) -> Mat2:
    """Parse '[[a,b],[c,d]]'; entries are digit tuples like (2,1) or plain
    integers taken as images of Z."""
    from .chain_ring import parse_element

    s = "".join(text.split())
    if not (s.startswith("[[") and s.endswith("]]")):
        raise ValueError("matrix text must look like [[a,b],[c,d]]")
    rows = s[1:-1].split("],[")
    if len(rows) != 2:
        raise ValueError("matrix text must have exactly two rows")
    toks = (_split_top_commas(rows[0].lstrip("["))
            + _split_top_commas(rows[1].rstrip("]")))
    if len(toks) != 4:
        raise ValueError("matrix text must have exactly four entries")
    return Mat2(*(parse_element(ring, t) for t in toks))


def format_matrix(A: Mat2) -> str:
    return repr(A)


def save_packed(path, indices, binary: bool = False):
    """Write packed matrix indices, one unsigned integer per matrix, as
    decimal text lines or little-endian 64-bit binary."""
    arr = np.asarray(indices, dtype=np.uint64)
    if binary:
        with open(path, "wb") as fh:
            fh.write(arr.astype("<u8").tobytes())
    else:
        with open(path, "w") as fh:
            fh.writelines(f"{int(v)}\n" for v in arr)


def load_packed(path, binary: bool = False) -> np.ndarray:
    if binary:
        with open(path, "rb") as fh:
            return np.frombuffer(fh.read(), dtype="<u8").astype(np.int64)
    with open(path) as fh:
        return np.array([int(line) for line in fh if line.strip()],
                        dtype=np.int64)
