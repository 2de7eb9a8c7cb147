import numpy as np
import pytest

from nilquat.chain_ring import ring_from_string
from nilquat.mat2 import identity, matrix_space, zero_matrix
from nilquat.quaternion import (Quaternion, QuaternionIso, basis, build_iso,
                                coeff_product_bulk, format_quaternion,
                                parse_quaternion)


@pytest.fixture(scope="module", params=["zmod:3^2", "polyq:3^2^1", "zmod:5^1"])
def ring(request):
    return ring_from_string(request.param)


def test_basis_relations(ring):
    one, i, j, k = basis(ring)
    minus_one = -one
    assert i * i == minus_one
    assert j * j == minus_one
    assert k * k == minus_one
    assert i * j == k
    assert j * i == -k
    assert i * j * k == minus_one
    assert j * k == i and k * j == -i
    assert k * i == j and i * k == -j


def test_parse_format_round_trip():
    r = ring_from_string("zmod:3^2")
    x = parse_quaternion(r, "1+2*i+0*j+5*k")
    assert x.coefficients() == (r.one, r.from_int(2), r.zero, r.from_int(5))
    assert format_quaternion(x) == "(1,0)+(2,0)*i+(0,0)*j+(2,1)*k"
    assert parse_quaternion(r, format_quaternion(x)) == x
    with pytest.raises(ValueError):
        parse_quaternion(r, "1+2*i")
    with pytest.raises(ValueError):
        parse_quaternion(r, "1+2*i+3*q+4*k")


def test_iso_matrix_relations(ring):
    iso = build_iso(ring)
    _, i, j, k = basis(ring)
    I2 = identity(ring)
    assert iso.to_mat(i) * iso.to_mat(i) == -I2
    assert iso.to_mat(j) * iso.to_mat(j) == -I2
    assert iso.to_mat(k) == iso.to_mat(i) * iso.to_mat(j)
    assert iso.to_mat(i) * iso.to_mat(j) == -(iso.to_mat(j) * iso.to_mat(i))


def test_iso_round_trip_exhaustive_gf3():
    r = ring_from_string("polyq:3^1^1")
    iso = build_iso(r)
    seen = set()
    for idx in range(r.size ** 4):
        c = [r.from_index((idx // r.size ** t) % r.size) for t in range(4)]
        x = Quaternion(*c)
        A = iso.to_mat(x)
        assert iso.from_mat(A) == x
        seen.add(A.packed)
    assert len(seen) == r.size ** 4  # bijective


def test_iso_is_ring_homomorphism(ring):
    rng = np.random.default_rng(23)
    iso = build_iso(ring)
    for _ in range(40):
        xs = [ring.from_index(int(t))
              for t in rng.integers(0, ring.size, size=4)]
        ys = [ring.from_index(int(t))
              for t in rng.integers(0, ring.size, size=4)]
        x, y = Quaternion(*xs), Quaternion(*ys)
        assert iso.to_mat(x * y) == iso.to_mat(x) * iso.to_mat(y)
        assert iso.to_mat(x + y) == iso.to_mat(x) + iso.to_mat(y)
    assert iso.to_mat(parse_quaternion(ring, "1+0*i+0*j+0*k")) == \
        identity(ring)


def test_bulk_hamilton_product_matches_scalar(ring):
    rng = np.random.default_rng(29)
    xs = tuple(rng.integers(0, ring.size, size=25) for _ in range(4))
    ys = tuple(rng.integers(0, ring.size, size=25) for _ in range(4))
    out = coeff_product_bulk(ring, xs, ys)
    for t in range(25):
        x = Quaternion(*[ring.from_index(int(c[t])) for c in xs])
        y = Quaternion(*[ring.from_index(int(c[t])) for c in ys])
        got = tuple(int(c[t]) for c in out)
        assert got == tuple(e.idx for e in (x * y).coefficients())


def test_nilpotent_quaternion_count_gf3():
    r = ring_from_string("polyq:3^1^1")
    iso = build_iso(r)
    count = 0
    for idx in range(r.size ** 4):
        c = [r.from_index((idx // r.size ** t) % r.size) for t in range(4)]
        if iso.is_nilpotent(Quaternion(*c)):
            count += 1
    assert count == 9  # same as the matrix-side census


def test_nilpotent_check_agrees_with_matrix_power(ring):
    iso = build_iso(ring)
    rng = np.random.default_rng(31)
    n = ring.n
    for _ in range(60):
        c = [ring.from_index(int(t))
             for t in rng.integers(0, ring.size, size=4)]
        x = Quaternion(*c)
        A = iso.to_mat(x)
        assert iso.is_nilpotent(x) == (A ** (2 * n) == zero_matrix(ring))


def test_packed_matrices_of_all_is_injective():
    r = ring_from_string("polyq:3^1^1")
    packed = build_iso(r).packed_matrices_of_all()
    assert len(np.unique(packed)) == r.size ** 4


def test_explicit_pair_must_satisfy_the_equation():
    r = ring_from_string("zmod:3^2")
    QuaternionIso(r, (r.from_int(4), r.from_int(1)))
    QuaternionIso(r, (r.from_int(2), r.from_int(2)))  # 4 + 4 = -1 mod 9
    with pytest.raises(ValueError):
        QuaternionIso(r, (r.from_int(2), r.from_int(1)))
    with pytest.raises(ValueError):
        QuaternionIso(r, (r.from_int(3), r.from_int(1)))
