"""Structured verification suites over one ring.

Each suite re-derives one structural fact from scratch (exhaustively on
small rings, by seeded sampling otherwise) and reports how many checks ran
and how many failed.  The suite tokens are part of the CLI contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain_ring import Ring, format_ring_spec
from .mat2 import (DEFAULT_ENUMERATION_CAP, Mat2, classify_nilpotent,
                   matrix_space, top_row, zero_matrix)
from .nilfactor import (DEFAULT_SEED, DecompositionError, NotInOrbitUnionError,
                        census_orbit_union, census_set_product, decompose,
                        formula_count, nilpotent_count_check, product_set,
                        sharpness_example, stable_product_count,
                        valuation_obstruction_scan)
from .orbits import conjugate, orbit_union, shear, unit_diag
from .quaternion import build_iso, coeff_product_bulk

SUITE_NAMES = ("axioms", "lemma33", "lemma34", "lemma35", "lemma36",
               "lemma37", "lemma311", "thm38", "cor310", "example39",
               "thm312")

_NEEDS_SPACE = frozenset(SUITE_NAMES) - {"axioms", "lemma35"}

# Exhaustive thresholds; beyond them the suites fall back to seeded samples.
_TRIPLE_LIMIT = 81
_PAIR_LIMIT = 1024
_MATRIX_LIMIT = 20000


@dataclass
class SuiteResult:
    suite: str
    ring: str
    checks: int
    violations: int
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {"suite": self.suite, "ring": self.ring, "checks": self.checks,
                "violations": self.violations, "passed": self.passed,
                "note": self.note}


def _result(name: str, ring: Ring, checks, violations, note="") -> SuiteResult:
    return SuiteResult(suite=name, ring=format_ring_spec(ring.spec),
                       checks=int(checks), violations=int(violations),
                       note=note)


# ---------------------------------------------------------------------------
# axioms: ring laws, valuation, filtration, sum of squares, the iso
# ---------------------------------------------------------------------------

def _ring_law_checks(ring: Ring, rng) -> tuple[int, int, str]:
    checks = viol = 0
    S = ring.size
    if S <= _TRIPLE_LIMIT:
        add, mul, neg = ring.add_table, ring.mul_table, ring.neg_table
        i = np.arange(S, dtype=np.int64)
        a, b, c = i[:, None, None], i[None, :, None], i[None, None, :]
        for lhs, rhs in (
                (add[add[a, b], c], add[a, add[b, c]]),
                (mul[mul[a, b], c], mul[a, mul[b, c]]),
                (mul[a, add[b, c]], add[mul[a, b], mul[a, c]]),
                (mul[add[a, b], c], add[mul[a, c], mul[b, c]])):
            checks += lhs.size
            viol += int((lhs != rhs).sum())
        pa, pb = i[:, None], i[None, :]
        for lhs, rhs in ((add[pa, pb], add[pb, pa]), (mul[pa, pb], mul[pb, pa])):
            checks += lhs.size
            viol += int((lhs != rhs).sum())
        checks += 3 * S
        viol += int((add[i, 0] != i).sum())
        viol += int((mul[i, 1] != i).sum())
        viol += int((add[i, neg[i]] != 0).sum())
        return checks, viol, "exhaustive laws"
    for _ in range(10_000):
        x, y, z = (ring.from_index(int(t))
                   for t in rng.integers(0, S, size=3))
        checks += 4
        viol += (x + y) + z != x + (y + z)
        viol += (x * y) * z != x * (y * z)
        viol += x * (y + z) != x * y + x * z
        viol += x * y != y * x
    return checks, viol, "sampled 10000 triples"


def _valuation_checks(ring: Ring, rng) -> tuple[int, int]:
    checks = viol = 0
    n, S = ring.n, ring.size
    if S <= _PAIR_LIMIT:
        val, add, mul = ring.val_table, ring.add_table, ring.mul_table
        va, vb = val[:, None], val[None, :]
        i = np.arange(S, dtype=np.int64)
        prod_v = val[mul[i[:, None], i[None, :]]]
        sum_v = val[add[i[:, None], i[None, :]]]
        checks += 3 * S * S
        viol += int((prod_v != np.minimum(va + vb, n)).sum())
        viol += int((sum_v < np.minimum(va, vb)).sum())
        # a unit plus a radical element stays a unit
        viol += int((((va == 0) & (vb >= 1)) & (sum_v != 0)).sum())
        return checks, viol
    for _ in range(5000):
        x, y = (ring.from_index(int(t)) for t in rng.integers(0, S, size=2))
        checks += 2
        viol += (x * y).valuation() != min(x.valuation() + y.valuation(), n)
        viol += (x + y).valuation() < min(x.valuation(), y.valuation())
    return checks, viol


def _filtration_checks(ring: Ring, rng) -> tuple[int, int]:
    checks = viol = 0
    for k in range(ring.n + 1):
        ideal = ring.enumerate_ideal(k)
        checks += 1
        viol += len(ideal) != ring.q ** (ring.n - k)
        pik = ring.pow(ring.uniformizer, k)
        want = [e.idx for e in ideal]
        checks += 1
        if ring.size <= 4096:
            got = sorted({(pik * e).idx for e in ring.enumerate_ring()})
            viol += got != want
        else:
            members = set(want)
            ok = all((pik * ring.from_index(int(t))).idx in members
                     for t in rng.integers(0, ring.size, size=200))
            viol += not ok
    return checks, viol


def _iso_checks(ring: Ring, rng, samples: int) -> tuple[int, int]:
    checks = viol = 0
    iso = build_iso(ring)  # construction itself asserts the relations
    S = ring.size
    count = S ** 4
    if count <= 1_000_000:
        packed = iso.packed_matrices_of_all()
        checks += 1
        viol += len(np.unique(packed)) != count
    from .quaternion import Quaternion
    for _ in range(min(2000, count)):
        coeffs = [ring.from_index(int(t))
                  for t in rng.integers(0, S, size=4)]
        x = Quaternion(*coeffs)
        checks += 2
        viol += iso.from_mat(iso.to_mat(x)) != x
        entries = [ring.from_index(int(t))
                   for t in rng.integers(0, S, size=4)]
        A = Mat2(*entries)
        viol += iso.to_mat(iso.from_mat(A)) != A
    if S <= _PAIR_LIMIT:
        add = ring.add_table
        mul = ring.mul_table
        m = min(samples, 100_000) if count ** 2 > 1_000_000 else None
        if m is None:
            e = np.arange(count, dtype=np.int64)
            grid = np.stack(np.meshgrid(e, e, indexing="ij")).reshape(2, -1)
            xs, ys = grid[0], grid[1]
        else:
            xs = rng.integers(0, count, size=m)
            ys = rng.integers(0, count, size=m)
        def coords(t):
            return (t % S, (t // S) % S, (t // (S * S)) % S,
                    t // (S * S * S))
        x, y = coords(xs), coords(ys)
        ax = iso.matrix_entries_bulk(x)
        by = iso.matrix_entries_bulk(y)
        lhs = iso.matrix_entries_bulk(coeff_product_bulk(ring, x, y))
        rhs = (add[mul[ax[0], by[0]], mul[ax[1], by[2]]],
               add[mul[ax[0], by[1]], mul[ax[1], by[3]]],
               add[mul[ax[2], by[0]], mul[ax[3], by[2]]],
               add[mul[ax[2], by[1]], mul[ax[3], by[3]]])
        checks += len(xs) * 2
        viol += int(sum((l != r).sum() for l, r in zip(lhs, rhs)))
        lhs_add = iso.matrix_entries_bulk(tuple(add[a, b]
                                                for a, b in zip(x, y)))
        rhs_add = tuple(add[a, b] for a, b in zip(ax, by))
        viol += int(sum((l != r).sum() for l, r in zip(lhs_add, rhs_add)))
    else:
        from .quaternion import Quaternion
        for _ in range(200):
            xs = [ring.from_index(int(t))
                  for t in rng.integers(0, S, size=4)]
            ys = [ring.from_index(int(t))
                  for t in rng.integers(0, S, size=4)]
            x, y = Quaternion(*xs), Quaternion(*ys)
            checks += 2
            viol += iso.to_mat(x * y) != iso.to_mat(x) * iso.to_mat(y)
            viol += iso.to_mat(x + y) != iso.to_mat(x) + iso.to_mat(y)
    return checks, viol


def _axioms(ring, space, samples, seed, threads):
    rng = np.random.default_rng(seed)
    checks, viol, note = _ring_law_checks(ring, rng)
    c, v = _valuation_checks(ring, rng)
    checks += c
    viol += v
    c, v = _filtration_checks(ring, rng)
    checks += c
    viol += v
    a, b = ring.solve_sum_of_squares()
    checks += 2
    viol += (a * a + b * b + ring.one).idx != 0
    viol += not a.is_unit()
    c, v = _iso_checks(ring, rng, samples)
    checks += c
    viol += v
    return _result("axioms", ring, checks, viol, note)


# ---------------------------------------------------------------------------
# the nilpotency equivalences
# ---------------------------------------------------------------------------

def _lemma33(ring, space, samples, seed, threads):
    n, q = ring.n, ring.q
    rng = np.random.default_rng(seed)
    if space.count <= _MATRIX_LIMIT:
        e = np.arange(space.count, dtype=np.int64)
        note = "exhaustive"
    else:
        e = np.unique(rng.integers(0, space.count,
                                   size=min(samples, 100_000)))
        note = f"sampled {len(e)}"
    ent = space.unpack(e)
    val = ring.val_table
    crit = ((val[space.trace_indices(ent)] >= 1)
            & (val[space.det_indices(ent)] >= 1))
    cur = ent
    for _ in range(2 * n - 1):
        cur = space.matmul(cur, ent)
    powmask = (cur[0] == 0) & (cur[1] == 0) & (cur[2] == 0) & (cur[3] == 0)
    # independent residue-shape route over GF(q)
    f = ring.residue_field
    mt, it, nt = f.mul_table, f.inv_table, f.neg_table
    r11, r12, r21, r22 = (x % q for x in ent)
    zero_sh = (r11 == 0) & (r12 == 0) & (r21 == 0) & (r22 == 0)
    upper = (r11 == 0) & (r12 != 0) & (r21 == 0) & (r22 == 0)
    lower = (r11 == 0) & (r12 == 0) & (r21 != 0) & (r22 == 0)
    u, v = r11, nt[r12]
    shape4 = ((r11 != 0) & (r12 != 0) & (r22 == nt[r11])
              & (r21 == mt[mt[it[v], u], u]))
    shape = zero_sh | upper | lower | shape4
    checks = 2 * len(e)
    viol = int((crit != powmask).sum()) + int((crit != shape).sum())
    # classification must reproduce its input exactly
    nil = e[crit]
    step = max(1, len(nil) // 1500)
    for idx in nil[::step]:
        A = space.matrix_from_packed(int(idx))
        checks += 1
        viol += classify_nilpotent(A).matrix() != A
    if note == "exhaustive":
        enumerated, formula, ok = nilpotent_count_check(space)
        checks += 1
        viol += not ok
    return _result("lemma33", ring, checks, viol, note)


def _lemma34(ring, space, samples, seed, threads):
    n, Q = ring.n, ring.size
    val = ring.val_table
    mask = orbit_union(space)
    Q2 = Q * Q
    checks = viol = 0
    jn1 = np.flatnonzero(val >= n - 1).astype(np.int64)
    for k in range(n):
        ts = np.flatnonzero(val == k).astype(np.int64)
        for l in range(k + 1, n + 1):
            j1s = np.flatnonzero(val == l).astype(np.int64)
            grid = (ts[:, None, None] + j1s[None, :, None] * Q
                    + jn1[None, None, :] * Q2).ravel()
            checks += grid.size
            viol += int((~mask[grid]).sum())
    grid2 = (jn1[:, None] * Q + jn1[None, :] * Q2 * Q).ravel()
    checks += grid2.size
    viol += int((~mask[grid2]).sum())
    return _result("lemma34", ring, checks, viol)


def _lemma35(ring, space, samples, seed, threads):
    rng = np.random.default_rng(seed)
    els = ring.enumerate_ring()
    units = ring.units()
    checks = viol = 0
    if ring.size ** 3 <= 729:
        triples = [(a, b, t) for a in els for b in els for t in els]
        note = "exhaustive"
    else:
        picks = rng.integers(0, ring.size, size=(2000, 3))
        triples = [(ring.from_index(int(i)), ring.from_index(int(j)),
                    ring.from_index(int(k))) for i, j, k in picks]
        note = "sampled 2000 triples"
    z = ring.zero
    for a, b, t in triples:
        # the shear identity holds for every t, not only units
        checks += 1
        viol += conjugate(top_row(a, b), shear(ring, t)) != top_row(a, b + a * t)
    if len(units) ** 2 <= 400:
        unit_pairs = [(u, v) for u in units for v in units]
    else:
        picks = rng.integers(0, len(units), size=(400, 2))
        unit_pairs = [(units[i], units[j]) for i, j in picks]
    for u, v in unit_pairs:
        A = Mat2(u, -v, v.inverse() * (u * u), -u)
        w = v.inverse() * (u * u)
        checks += 1
        viol += conjugate(A, shear(ring, v * u.inverse())) != Mat2(z, z, w, z)
    for alpha in units[:100]:
        checks += 1
        viol += not unit_diag(ring, alpha).is_invertible()
    return _result("lemma35", ring, checks, viol, note)


def _lemma36(ring, space, samples, seed, threads):
    mask = orbit_union(space)
    members = np.flatnonzero(mask)
    if len(members) * space.count <= 1_000_000:
        a = np.repeat(members, space.count)
        b = np.tile(np.arange(space.count, dtype=np.int64), len(members))
        note = "exhaustive"
    else:
        rng = np.random.default_rng(seed)
        m = min(samples, 100_000)
        a = members[rng.integers(0, len(members), size=m)]
        b = rng.integers(0, space.count, size=m)
        note = f"sampled {len(a)}"
    prod = space.matmul(space.unpack(a), space.unpack(b))
    viol = int((~mask[space.pack(*prod)]).sum())
    return _result("lemma36", ring, len(a), viol, note)


def _lemma37(ring, space, samples, seed, threads):
    report = valuation_obstruction_scan(space, samples, seed)
    note = report.note or f"matched hypothesis {report.matched} times"
    return _result("lemma37", ring, report.samples, len(report.violations),
                   note)


def _lemma311(ring, space, samples, seed, threads):
    if ring.n != 1:
        return _result("lemma311", ring, 0, 0, "requires a field (n = 1)")
    nil = space.nilpotent_indices
    l = tuple(x[:, None] for x in space.unpack(nil))
    r = tuple(x[None, :] for x in space.unpack(nil))
    prod = space.matmul(l, r)
    tr = space.trace_indices(prod)
    nonzero = (prod[0] != 0) | (prod[1] != 0) | (prod[2] != 0) | (prod[3] != 0)
    viol = int((nonzero & (tr == 0)).sum())
    return _result("lemma311", ring, len(nil) ** 2, viol, "exhaustive pairs")


def _thm38(ring, space, samples, seed, threads):
    n = ring.n
    mask = orbit_union(space)
    checks = viol = 0
    stable = None
    for s in range(2 * n - 1, 2 * n + 3):
        cur = product_set(space, s, threads)
        checks += 1
        viol += int((~mask[cur]).any())
        if s >= stable_product_count(n):
            if stable is None:
                stable = cur
            else:
                checks += 1
                viol += not np.array_equal(stable, cur)
    return _result("thm38", ring, checks, viol)


def _cor310(ring, space, samples, seed, threads):
    s0 = stable_product_count(ring.n)
    got = product_set(space, s0, threads)
    mask = orbit_union(space)
    full = np.zeros(space.count, dtype=bool)
    full[got] = True
    checks, viol = 1, int(not np.array_equal(full, mask))
    rng = np.random.default_rng(seed)
    members = np.flatnonzero(mask)
    for idx in members[rng.integers(0, len(members), size=25)]:
        A = space.matrix_from_packed(int(idx))
        checks += 1
        try:
            decompose(space, A, s0)
        except DecompositionError:
            viol += 1
    return _result("cor310", ring, checks, viol)


def _example39(ring, space, samples, seed, threads):
    n = ring.n
    if n < 2:
        return _result("example39", ring, 0, 0, "inapplicable: needs n >= 2")
    if not ring.from_int(n - 1).is_unit():
        return _result("example39", ring, 0, 0,
                       "inapplicable: n - 1 is not a unit")
    cert = sharpness_example(space)
    checks = viol = 0
    checks += 1
    viol += len(cert.factorization.factors) != 2 * n - 2
    checks += 1
    viol += cert.in_orbit_union
    checks += 1
    try:
        decompose(space, cert.target, 2 * n - 1)
        viol += 1
    except NotInOrbitUnionError:
        pass
    return _result("example39", ring, checks, viol)


def _thm312(ring, space, samples, seed, threads):
    n = ring.n
    checks = viol = 0
    for s in range(2 * n - 1, 2 * n + 3):
        rep = census_set_product(space, s, threads)
        checks += 1
        viol += rep.match is not True
    rep = census_orbit_union(space)
    checks += 1
    viol += rep.match is not True
    sign = "=" if rep.match else "!="
    note = f"census {rep.brute_count} {sign} {rep.formula_count}"
    # exact divisibility of the closed form across the small parameter grid
    for p in (3, 5, 7, 11, 13):
        for r in (1, 2, 3):
            for m in range(1, 7):
                checks += 1
                try:
                    formula_count(p ** r, m, max(2 * m - 1, 3))
                except (AssertionError, ValueError):
                    viol += 1
    return _result("thm312", ring, checks, viol, note)


_RUNNERS = {
    "axioms": _axioms,
    "lemma33": _lemma33,
    "lemma34": _lemma34,
    "lemma35": _lemma35,
    "lemma36": _lemma36,
    "lemma37": _lemma37,
    "lemma311": _lemma311,
    "thm38": _thm38,
    "cor310": _cor310,
    "example39": _example39,
    "thm312": _thm312,
}


def run_suites(ring: Ring, names=("all",), *,
               cap: int = DEFAULT_ENUMERATION_CAP, samples: int = 100_000,
               seed: int = DEFAULT_SEED, threads: int = 1) -> list[SuiteResult]:
    """Run the named suites (or all of them) against one ring."""
    if isinstance(names, str):
        names = (names,)
    expanded: list[str] = []
    for name in names:
        if name == "all":
            expanded.extend(SUITE_NAMES)
        elif name in _RUNNERS:
            expanded.append(name)
        else:
            raise ValueError(
                f"unknown suite {name!r}; valid: {', '.join(SUITE_NAMES)}, all")
    space = None
    results = []
    for name in expanded:
        if name in _NEEDS_SPACE and space is None:
            space = matrix_space(ring, cap)
        results.append(_RUNNERS[name](ring, space, samples, seed, threads))
    return results
