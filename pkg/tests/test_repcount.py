import time

import numpy as np
import pytest

from circleforge.errors import BudgetError, PreconditionError
from circleforge.exactconv import exact_convolve
from circleforge.repcount import (
    _cube_sixth_spectrum,
    pair_spectrum,
    read_spectrum,
    rep_count_range,
    rep_count_single,
    write_spectrum,
)

from oracles import rep_range_enumeration, rep_single_brute

# R(1..20), frozen from full brute-force enumeration
R_SMALL = [0, 0, 0, 0, 0, 1, 0, 0, 2, 0, 0, 1, 2, 2, 0, 4, 2, 0, 2, 1]


def test_pair_spectrum_examples():
    ps = pair_spectrum(6, 1)
    assert ps.counts[2] == 1 and ps.counts.sum() == 1
    ps = pair_spectrum(6, 2)
    nz = {m: int(c) for m, c in enumerate(ps.counts) if c}
    assert nz == {2: 1, 65: 2, 128: 1}
    ps = pair_spectrum(2, 3)
    nz = {m: int(c) for m, c in enumerate(ps.counts) if c}
    assert nz == {2: 1, 5: 2, 8: 1, 10: 2, 13: 2, 18: 1}
    assert ps.counts.sum() == 9


def test_pair_spectrum_invariants():
    for k, P in ((2, 40), (3, 12), (6, 4)):
        ps = pair_spectrum(k, P)
        assert int(ps.counts.sum()) == P * P
        assert ps.counts[0] == 0 and ps.counts[1] == 0
        assert ps.counts[2] == 1
        diagonal = {2 * x**k for x in range(1, P + 1)}
        for m, c in enumerate(ps.counts):
            if c and m not in diagonal:
                assert c % 2 == 0  # ordered pairs off the diagonal pair up


def test_pair_spectrum_budget_guard():
    with pytest.raises(BudgetError) as err:
        pair_spectrum(2, 10**6)
    assert "entries" in str(err.value)


def test_exact_convolve_matches_numpy():
    rng = np.random.default_rng(77)
    a = rng.integers(0, 50, 3000)
    b = rng.integers(0, 50, 4000)
    direct = np.convolve(a, b)
    assert np.array_equal(exact_convolve(a, b), direct)


def test_exact_convolve_transform_path():
    rng = np.random.default_rng(78)
    a = rng.integers(0, 100, 60000)
    b = rng.integers(0, 100, 50000)
    via_ntt = exact_convolve(a, b)
    # spot-check against direct dot products
    for idx in (0, 777, 44444, 109998):
        lo = max(0, idx - len(b) + 1)
        hi = min(idx, len(a) - 1)
        js = np.arange(lo, hi + 1)
        assert via_ntt[idx] == np.dot(a[js], b[idx - js])


def test_rep_count_single_examples():
    assert rep_count_single(5) == 0
    assert rep_count_single(6) == 1
    assert rep_count_single(7) == 0
    assert rep_count_single(9) == 2
    with pytest.raises(PreconditionError):
        rep_count_single(0)
    for n in range(1, 21):
        assert rep_count_single(n) == R_SMALL[n - 1]


def test_rep_count_single_against_brute():
    for n in (26, 53, 64, 100, 217, 300):
        assert rep_count_single(n) == rep_single_brute(n)


def test_rep_count_range_small():
    rc = rep_count_range(20)
    assert [int(v) for v in rc.values[1:]] == R_SMALL
    assert rc.values[0] == 0


def test_rep_count_range_matches_enumeration():
    X = 300
    rc = rep_count_range(X)
    oracle = rep_range_enumeration(X)
    assert np.array_equal(rc.values.astype(np.int64), oracle)


def test_range_total_is_tuple_count():
    X = 500
    rc = rep_count_range(X)
    oracle = rep_range_enumeration(X)
    assert int(rc.values.sum()) == int(oracle.sum())


def test_range_matches_single_path():
    X = 3000
    rc = rep_count_range(X)
    rng = np.random.default_rng(42)
    for n in rng.integers(1, X + 1, 25):
        assert int(rc.values[int(n)]) == rep_count_single(int(n))


def test_cube_sixth_spectrum_conservation():
    for P3, P6 in ((12, 3), (21, 4)):
        g = _cube_sixth_spectrum(P3, P6)
        assert int(g.sum()) == P3 * P3 * P6 * P6


def test_determinism():
    a = rep_count_range(800).values
    b = rep_count_range(800).values
    assert np.array_equal(a, b)


def test_spectrum_cache_roundtrip(tmp_path):
    ps = pair_spectrum(3, 30)
    path = tmp_path / "spec.bin"
    write_spectrum(ps, str(path))
    back = read_spectrum(str(path))
    assert back.k == 3 and back.P == 30
    assert np.array_equal(back.counts, ps.counts)
    # flip one byte: checksum must catch it
    raw = bytearray(path.read_bytes())
    raw[40] ^= 0xFF
    path.write_bytes(bytes(raw))
    with pytest.raises(ValueError):
        read_spectrum(str(path))


def test_range_uses_cache(tmp_path):
    rc1 = rep_count_range(400, cache_dir=str(tmp_path))
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    rc2 = rep_count_range(400, cache_dir=str(tmp_path))
    assert np.array_equal(rc1.values, rc2.values)


def test_scaling_guard():
    # doubling X across a transform-length boundary costs at most 2.6x
    def best_of_three(X):
        times = []
        for _ in range(3):
            t0 = time.perf_counter()
            rep_count_range(X)
            times.append(time.perf_counter() - t0)
        return min(times)

    rep_count_range(10**5)  # warm-up
    t1 = best_of_three(3 * 10**5)
    t2 = best_of_three(6 * 10**5)
    assert t2 <= 2.6 * t1
