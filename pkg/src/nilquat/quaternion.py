"""The quaternion ring H(R) over a chain ring and its 2x2 matrix model.

H(R) has basis 1, i, j, k with i^2 = j^2 = k^2 = ijk = -1 and ij = -ji = k.
For odd q the ring is isomorphic to M2(R); the isomorphism is built from
any pair (a, b) with a^2 + b^2 = -1 and a a unit via

    phi(i) = ((a, b), (b, -a)),   phi(j) = ((0, 1), (-1, 0)),
    phi(k) = phi(i) phi(j),

extended R-linearly.  The inverse direction solves the 4x4 linear system
whose columns are the vectorised basis images; its determinant is a unit,
which QuaternionIso checks at construction time.
"""

from __future__ import annotations

import numpy as np

from .chain_ring import Ring, RingElem, parse_element
from .mat2 import Mat2, identity


class Quaternion:
    """An element r1 + r2*i + r3*j + r4*k with coefficients in one ring."""

    __slots__ = ("ring", "r1", "r2", "r3", "r4")

    def __init__(self, r1: RingElem, r2: RingElem, r3: RingElem,
                 r4: RingElem):
        ring = r1.ring
        for e in (r2, r3, r4):
            if not ring.same_ring(e.ring):
                raise ValueError("coefficients from different rings")
        self.ring = ring
        self.r1 = r1
        self.r2 = r2
        self.r3 = r3
        self.r4 = r4

    def coefficients(self) -> tuple[RingElem, ...]:
        return (self.r1, self.r2, self.r3, self.r4)

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(*(x + y for x, y in
                            zip(self.coefficients(), other.coefficients())))

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(*(x - y for x, y in
                            zip(self.coefficients(), other.coefficients())))

    def __neg__(self) -> "Quaternion":
        return Quaternion(*(-x for x in self.coefficients()))

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        x1, x2, x3, x4 = self.coefficients()
        y1, y2, y3, y4 = other.coefficients()
        return Quaternion(
            x1 * y1 - x2 * y2 - x3 * y3 - x4 * y4,
            x1 * y2 + x2 * y1 + x3 * y4 - x4 * y3,
            x1 * y3 - x2 * y4 + x3 * y1 + x4 * y2,
            x1 * y4 + x2 * y3 - x3 * y2 + x4 * y1)

    def __eq__(self, other):
        return (isinstance(other, Quaternion)
                and self.ring.same_ring(other.ring)
                and all(x.idx == y.idx for x, y in
                        zip(self.coefficients(), other.coefficients())))

    def __hash__(self):
        return hash((self.ring._key,
                     tuple(x.idx for x in self.coefficients())))

    def __repr__(self):
        r1, r2, r3, r4 = self.coefficients()
        return f"{r1!r}+{r2!r}*i+{r3!r}*j+{r4!r}*k"


def basis(ring: Ring) -> tuple[Quaternion, Quaternion, Quaternion, Quaternion]:
    """(1, i, j, k) as quaternions over the given ring."""
    z, o = ring.zero, ring.one
    return (Quaternion(o, z, z, z), Quaternion(z, o, z, z),
            Quaternion(z, z, o, z), Quaternion(z, z, z, o))


def parse_quaternion(ring: Ring, text: str) -> Quaternion:
    """Parse 'r1+r2*i+r3*j+r4*k' with digit-tuple or integer coefficients."""
    s = "".join(text.split())
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "+" and depth == 0 and cur:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    if len(parts) != 4:
        raise ValueError("quaternion text must look like r1+r2*i+r3*j+r4*k")
    coeffs = []
    for part, mark in zip(parts, ("", "*i", "*j", "*k")):
        if mark and not part.endswith(mark):
            raise ValueError(f"expected a coefficient ending in {mark!r}")
        coeffs.append(parse_element(ring, part[:len(part) - len(mark)]))
    return Quaternion(*coeffs)


def format_quaternion(x: Quaternion) -> str:
    return repr(x)


def coeff_product_bulk(ring: Ring, x, y):
    """Hamilton product on 4-tuples of coefficient index arrays."""
    add, mul, neg = ring.add_table, ring.mul_table, ring.neg_table
    x1, x2, x3, x4 = x
    y1, y2, y3, y4 = y

    def sub(a, b):
        return add[a, neg[b]]

    t1 = sub(sub(sub(mul[x1, y1], mul[x2, y2]), mul[x3, y3]), mul[x4, y4])
    t2 = sub(add[add[mul[x1, y2], mul[x2, y1]], mul[x3, y4]], mul[x4, y3])
    t3 = add[add[sub(mul[x1, y3], mul[x2, y4]), mul[x3, y1]], mul[x4, y2]]
    t4 = add[sub(add[mul[x1, y4], mul[x2, y3]], mul[x3, y2]), mul[x4, y1]]
    return (t1, t2, t3, t4)


def _invert4(ring: Ring, rows):
    """Invert a 4x4 matrix of ring elements by unit-pivot elimination.

    Over a local ring the elimination can only stall when the matrix is
    not invertible.  Returns (inverse rows, determinant)."""
    k = 4
    aug = [list(r) + [ring.one if i == j else ring.zero for j in range(k)]
           for i, r in enumerate(rows)]
    det = ring.one
    for col in range(k):
        piv = next((i for i in range(col, k) if aug[i][col].is_unit()), None)
        if piv is None:
            raise ValueError("system matrix is not invertible")
        if piv != col:
            aug[col], aug[piv] = aug[piv], aug[col]
            det = -det
        pivot = aug[col][col]
        det = det * pivot
        inv_p = pivot.inverse()
        aug[col] = [e * inv_p for e in aug[col]]
        for i in range(k):
            if i != col and aug[i][col].idx:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
    return [row[k:] for row in aug], det


class QuaternionIso:
    """A concrete isomorphism H(R) -> M2(R) for one solved pair (a, b)."""

    def __init__(self, ring: Ring, pair: tuple[RingElem, RingElem] | None = None):
        if pair is None:
            pair = ring.solve_sum_of_squares()
        a, b = pair
        if not a.is_unit():
            raise ValueError("the pair's first coordinate must be a unit")
        if (a * a + b * b + ring.one).idx != 0:
            raise ValueError("pair does not satisfy a^2 + b^2 = -1")
        self.ring = ring
        self.a = a
        self.b = b
        z = ring.zero
        phi_i = Mat2(a, b, b, -a)
        phi_j = Mat2(z, ring.one, -ring.one, z)
        phi_k = phi_i * phi_j
        self.basis_mats = (identity(ring), phi_i, phi_j, phi_k)
        minus_id = -identity(ring)
        assert phi_i * phi_i == minus_id
        assert phi_j * phi_j == minus_id
        assert phi_k * phi_k == minus_id
        assert phi_i * phi_j == -(phi_j * phi_i)
        # rows of the 4x4 system: entry position x basis element
        rows = [[m.entries()[pos] for m in self.basis_mats] for pos in range(4)]
        self._functionals, self._system_det = _invert4(ring, rows)
        assert self._system_det.is_unit(), \
            "basis images must span M2(R) over R"

    # -- scalar maps ---------------------------------------------------------

    def to_mat(self, x: Quaternion) -> Mat2:
        coeffs = x.coefficients()
        entries = []
        for pos in range(4):
            acc = self.ring.zero
            for c, m in zip(coeffs, self.basis_mats):
                acc = acc + c * m.entries()[pos]
            entries.append(acc)
        return Mat2(*entries)

    def from_mat(self, A: Mat2) -> Quaternion:
        vec = A.entries()
        coeffs = []
        for row in self._functionals:
            acc = self.ring.zero
            for f, v in zip(row, vec):
                acc = acc + f * v
            coeffs.append(acc)
        return Quaternion(*coeffs)

    def is_nilpotent(self, x: Quaternion) -> bool:
        return self.to_mat(x).is_nilpotent()

    # -- bulk maps -------------------------------------------------------------

    def matrix_entries_bulk(self, coeffs):
        """Map 4-tuples of coefficient index arrays to entry index arrays."""
        add, mul = self.ring.add_table, self.ring.mul_table
        out = []
        for pos in range(4):
            cols = [m.entries()[pos].idx for m in self.basis_mats]
            acc = mul[coeffs[0], cols[0]]
            for t in range(1, 4):
                acc = add[acc, mul[coeffs[t], cols[t]]]
            out.append(acc)
        return tuple(out)

    def packed_matrices_of_all(self) -> np.ndarray:
        """Packed matrix image of every quaternion, indexed by the packed
        quaternion coordinate c1 + c2*Q + c3*Q^2 + c4*Q^3."""
        Q = self.ring.size
        e = np.arange(Q ** 4, dtype=np.int64)
        coeffs = (e % Q, (e // Q) % Q, (e // (Q * Q)) % Q, e // (Q * Q * Q))
        a11, a12, a21, a22 = self.matrix_entries_bulk(coeffs)
        return a11 + a12 * Q + a21 * Q * Q + a22 * Q ** 3


def build_iso(ring: Ring, pair=None) -> QuaternionIso:
    return QuaternionIso(ring, pair)
