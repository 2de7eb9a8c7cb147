"""Acceptance battery: nine end-to-end reproductions with pinned counts.

Every count is an exact integer (tolerance zero).  Spaces and rings are
constructed fresh inside each criterion so the timing bounds measure real
work, not cache hits.  Each criterion prints one ACCEPTANCE line.
"""

import json
from contextlib import contextmanager
from time import perf_counter

import numpy as np
import pytest

from nilquat.chain_ring import Ring, parse_ring_spec
from nilquat.cli import main
from nilquat.mat2 import DEFAULT_ENUMERATION_CAP, MatrixSpace
from nilquat.nilfactor import (NotInOrbitUnionError, census_orbit_union,
                               census_set_product, formula_count, product_set,
                               sharpness_example)
from nilquat.orbits import orbit_union
from nilquat.verify import run_suites


def fresh_space(text: str) -> MatrixSpace:
    return MatrixSpace(Ring(parse_ring_spec(text)), DEFAULT_ENUMERATION_CAP)


@contextmanager
def criterion(k: int, bound: float | None):
    t0 = perf_counter()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {k}: FAIL")
        raise
    elapsed = perf_counter() - t0
    if bound is not None and elapsed >= bound:
        print(f"ACCEPTANCE {k}: FAIL (elapsed {elapsed:.2f}s, bound {bound}s)")
        raise AssertionError(
            f"criterion {k} took {elapsed:.3f}s, bound {bound}s")
    print(f"ACCEPTANCE {k}: PASS ({elapsed:.2f}s)")


def test_criterion_1_z9_census():
    with criterion(1, 10.0):
        sp = fresh_space("zmod:3^2")
        assert len(sp.nilpotent_indices) == 729
        assert sp.count - len(sp.invertible_indices) == 2673
        brute = census_set_product(sp, 3).brute_count
        union = census_orbit_union(sp).brute_count
        assert brute == union == formula_count(3, 2, 3) == 897


def test_criterion_2_gf3_piecewise():
    with criterion(2, 1.0):
        sp = fresh_space("polyq:3^1^1")
        for s, expected in ((1, 9), (2, 25), (3, 33), (4, 33)):
            assert len(product_set(sp, s)) == expected
            assert formula_count(3, 1, s) == expected


def test_criterion_3_gf5_piecewise():
    with criterion(3, 30.0):
        sp = fresh_space("zmod:5^1")
        assert len(product_set(sp, 1)) == formula_count(5, 1, 1) == 25
        assert len(product_set(sp, 2)) == formula_count(5, 1, 2) == 121
        brute3 = len(product_set(sp, 3))
        assert brute3 == formula_count(5, 1, 3) == 145


def test_criterion_4_ring_independence():
    with criterion(4, 10.0):
        triples = []
        for text in ("zmod:3^2", "polyq:3^1^2"):
            sp = fresh_space(text)
            triples.append((len(sp.nilpotent_indices),
                            int(orbit_union(sp).sum()),
                            len(product_set(sp, 3))))
        assert triples[0] == triples[1] == (729, 897, 897)


def test_criterion_5_sharpness():
    with criterion(5, 5.0):
        for text in ("zmod:3^2", "polyq:3^1^2"):
            sp = fresh_space(text)
            cert = sharpness_example(sp)
            fact = cert.factorization
            assert len(fact.factors) == 2
            assert all(N.is_nilpotent() for N in fact.factors)
            assert fact.factors[0] * fact.factors[1] == fact.target
            assert not orbit_union(sp)[fact.target.packed]
            assert cert.in_orbit_union is False
            from nilquat.nilfactor import decompose
            with pytest.raises(NotInOrbitUnionError,
                               match="not in orbit union"):
                decompose(sp, fact.target, 3)


def test_criterion_6_bitset_equivalence():
    with criterion(6, 30.0):
        sp = fresh_space("zmod:3^2")
        got = np.zeros(sp.count, dtype=bool)
        got[product_set(sp, 3)] = True
        assert np.array_equal(got, orbit_union(sp))


def test_criterion_7_no_tracezero_two_products():
    with criterion(7, 5.0):
        for text in ("polyq:3^1^1", "zmod:5^1"):
            sp = fresh_space(text)
            nil = sp.nilpotent_indices
            left = tuple(x[:, None] for x in sp.unpack(nil))
            right = tuple(x[None, :] for x in sp.unpack(nil))
            prod = sp.matmul(left, right)
            tr = sp.trace_indices(prod)
            nonzero = ((prod[0] != 0) | (prod[1] != 0) | (prod[2] != 0)
                       | (prod[3] != 0))
            assert not bool((nonzero & (tr == 0)).any())


def test_criterion_8_property_suites():
    with criterion(8, None):
        for text in ("polyq:3^1^1", "zmod:3^2"):
            ring = Ring(parse_ring_spec(text))
            for result in run_suites(ring, ("all",), samples=100_000):
                assert result.passed, (text, result.suite, result.violations)
        scan_ring = Ring(parse_ring_spec("polyq:3^1^3"))
        scan = run_suites(scan_ring, ("lemma37",), samples=100_000)[0]
        assert scan.checks == 100_000
        assert scan.violations == 0


def test_criterion_9_determinism(tmp_path):
    with criterion(9, None):
        outputs = []
        for threads in ("1", "4"):
            path = tmp_path / f"run-{threads}.json"
            code = main(["census", "--ring", "zmod:3^2", "--s", "3",
                         "--stable-output", "--threads", threads,
                         "--out", str(path)])
            assert code == 0
            outputs.append(path.read_bytes())
        assert outputs[0] == outputs[1]
        payload = json.loads(outputs[0])
        assert payload["brute_count"] == 897
