import numpy as np
import pytest

from nilquat.chain_ring import (Ring, make_ring, parse_element,
                                parse_ring_spec, format_element,
                                format_ring_spec, ring_from_string,
                                smallest_irreducible)


def test_parse_ring_spec_round_trip():
    for text in ("zmod:3^2", "zmod:7^1", "polyq:3^2^1", "polyq:5^1^3"):
        assert format_ring_spec(parse_ring_spec(text)) == text


def test_parse_ring_spec_rejects_garbage():
    for text in ("zmod:3", "zmod:3^", "poly:3^1^1", "zmod:3^2^1", "3^2",
                 "polyq:3^2", ""):
        with pytest.raises(ValueError):
            parse_ring_spec(text)


def test_even_and_composite_characteristic_rejected():
    with pytest.raises(ValueError, match="odd"):
        ring_from_string("zmod:2^3")
    with pytest.raises(ValueError, match="prime"):
        ring_from_string("zmod:9^1")
    with pytest.raises(ValueError, match="prime"):
        ring_from_string("polyq:6^1^1")


def test_zmod_basic_arithmetic():
    r = ring_from_string("zmod:3^2")
    assert r.q == 3 and r.n == 2 and r.size == 9
    two = r.from_int(2)
    assert (two + two).idx == r.from_int(4).idx
    assert (two * two * two).idx == r.from_int(8).idx
    assert r.inverse(two) == r.from_int(5)
    assert (-r.one) == r.from_int(8)


def test_zmod_valuations_and_ideal():
    r = ring_from_string("zmod:3^2")
    assert [r.from_int(k).valuation() for k in range(9)] == \
        [2, 0, 0, 1, 0, 0, 1, 0, 0]
    assert [e.idx for e in r.enumerate_ideal(1)] == [0, 3, 6]
    assert [e.idx for e in r.enumerate_ideal(2)] == [0]
    assert len(r.units()) == 6
    assert r.uniformizer.idx == 3


def test_valuation_of_zero_is_n():
    for text in ("zmod:3^2", "polyq:3^1^3", "polyq:3^2^1"):
        r = ring_from_string(text)
        assert r.zero.valuation() == r.n


def test_smallest_irreducible_frozen():
    # ascending little-endian integer order over GF(p)
    assert smallest_irreducible(3, 2) == (1, 0, 1)
    assert smallest_irreducible(3, 3) == (1, 2, 0, 1)
    assert smallest_irreducible(5, 2) == (2, 0, 1)


def test_gf9_generator_square():
    r = ring_from_string("polyq:3^2^1")
    y = r.from_index(3)
    assert (y * y).idx == 2  # y^2 = -1 under the y^2 + 1 modulus


def test_truncated_polynomial_inverse():
    r = ring_from_string("polyq:3^1^2")
    one_plus_t = r.from_index(4)  # digits (1, 1)
    inv = r.inverse(one_plus_t)
    assert inv.idx == 7  # digits (1, 2), i.e. 1 - t
    assert (one_plus_t * inv) == r.one
    with pytest.raises(ZeroDivisionError):
        r.inverse(r.zero)
    with pytest.raises(ZeroDivisionError):
        r.inverse(r.uniformizer)


def test_element_parse_format():
    r = ring_from_string("zmod:3^2")
    e = parse_element(r, "(2,1)")
    assert e.idx == 5
    assert parse_element(r, "5") == e
    assert format_element(e) == "(2,1)"
    with pytest.raises(ValueError):
        parse_element(r, "(3,1)")
    with pytest.raises(ValueError):
        parse_element(r, "(1,1,1)")


def test_cross_ring_operations_rejected():
    a = ring_from_string("zmod:3^2").one
    b = ring_from_string("polyq:3^1^2").one
    with pytest.raises(ValueError):
        a + b


def test_tables_match_scalar_ops():
    rng = np.random.default_rng(7)
    for text in ("zmod:3^2", "polyq:3^2^1", "zmod:5^2", "polyq:3^1^3"):
        r = ring_from_string(text)
        add, mul, neg, val = (r.add_table, r.mul_table, r.neg_table,
                              r.val_table)
        for _ in range(200):
            i, j = (int(t) for t in rng.integers(0, r.size, size=2))
            x, y = r.from_index(i), r.from_index(j)
            assert add[i, j] == (x + y).idx
            assert mul[i, j] == (x * y).idx
            assert neg[i] == (-x).idx
            assert val[i] == x.valuation()


def test_inverse_table_sentinels():
    r = ring_from_string("zmod:3^2")
    inv = r.inv_table
    for i in range(9):
        x = r.from_index(i)
        if x.is_unit():
            assert (x * r.from_index(int(inv[i]))) == r.one
        else:
            assert inv[i] == -1


def test_sum_of_squares_frozen_pairs():
    a, b = ring_from_string("zmod:3^2").solve_sum_of_squares()
    assert (a.idx, b.idx) == (4, 1)  # 4^2 + 1^2 = 17 = -1 mod 9
    a, b = ring_from_string("polyq:3^1^1").solve_sum_of_squares()
    assert (a.idx, b.idx) == (1, 1)
    a, b = ring_from_string("zmod:5^1").solve_sum_of_squares()
    assert (a.idx, b.idx) == (2, 0)


SQUARES_SWEEP = [
    "zmod:3^1", "zmod:3^2", "zmod:3^3", "zmod:3^4", "zmod:3^5", "zmod:3^6",
    "zmod:5^1", "zmod:5^2", "zmod:5^3", "zmod:5^4",
    "zmod:7^1", "zmod:7^2", "zmod:7^3",
    "zmod:11^1", "zmod:11^2", "zmod:13^1", "zmod:13^2",
    "polyq:3^2^1", "polyq:3^3^1", "polyq:3^2^2", "polyq:3^2^3",
    "polyq:5^2^1", "polyq:5^2^2", "polyq:7^2^1", "polyq:3^1^5",
    "polyq:11^2^1", "polyq:13^2^1",
]


@pytest.mark.parametrize("text", SQUARES_SWEEP)
def test_sum_of_squares_invariant_sweep(text):
    r = ring_from_string(text)
    a, b = r.solve_sum_of_squares()
    assert a.is_unit()
    assert (a * a + b * b + r.one).is_zero()


def test_enumerate_ring_is_index_order():
    r = ring_from_string("polyq:3^2^1")
    assert [e.idx for e in r.enumerate_ring()] == list(range(9))
    assert all(r.from_index(k).idx == k for k in range(9))


def test_ring_cache_reuses_instances():
    assert make_ring(parse_ring_spec("zmod:3^2")) is \
        make_ring(parse_ring_spec("zmod:3^2"))


def test_repr_uses_digit_tuples():
    r = ring_from_string("zmod:3^2")
    assert repr(r.from_int(5)) == "(2,1)"
