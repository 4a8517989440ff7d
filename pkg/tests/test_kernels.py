import numpy as np
import pytest

from fitscape._kernels import (
    BACKEND,
    CLS_IMPROVABLE,
    CLS_OPTIMUM,
    CLS_PLATEAU,
    available_backends,
    get_backend,
    splitmix64,
)

from conftest import oracle_classify, random_complete_landscape, random_mixed_space

MASK = (1 << 64) - 1


def py_splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def space_arrays(space):
    return space.radices, space.place, space.kinds


def test_compiled_backend_is_available():
    # the build ships the extension; a numpy-only install would silently
    # lose the fast path, so fail loudly here
    assert BACKEND == "compiled"
    assert available_backends() == ["compiled", "numpy"]


def test_get_backend_validation():
    assert get_backend("numpy").__name__.endswith("numpy_backend")
    with pytest.raises(ValueError, match="unknown backend"):
        get_backend("gpu")


def test_splitmix64_matches_reference(rng):
    xs = rng.integers(0, 1 << 63, size=200, dtype=np.uint64)
    xs[:4] = [0, 1, MASK, 0x123456789ABCDEF0]
    got = splitmix64(xs)
    want = np.array([py_splitmix64(int(x)) for x in xs], dtype=np.uint64)
    np.testing.assert_array_equal(got, want)


@pytest.mark.skipif(len(available_backends()) < 2, reason="compiled backend missing")
def test_scan_best_backends_agree(rng):
    compiled = get_backend("compiled")
    numpy_b = get_backend("numpy")
    for _ in range(10):
        l = random_complete_landscape(rng, max_cardinality=3000, tie_fraction=0.35)
        g = l.dense_gain()
        radices, place, kinds = space_arrays(l.space)
        s1, c1 = compiled.scan_best(g, radices, place, kinds)
        s2, c2 = numpy_b.scan_best(g, radices, place, kinds)
        np.testing.assert_array_equal(s1, s2)
        np.testing.assert_array_equal(c1, c2)


@pytest.mark.skipif(len(available_backends()) < 2, reason="compiled backend missing")
def test_scan_first_backends_agree(rng):
    compiled = get_backend("compiled")
    numpy_b = get_backend("numpy")
    for seed in (0, 7, 0xDEADBEEF):
        l = random_complete_landscape(rng, max_cardinality=3000, tie_fraction=0.35)
        g = l.dense_gain()
        radices, place, kinds = space_arrays(l.space)
        s1, c1 = compiled.scan_first(g, radices, place, kinds, seed)
        s2, c2 = numpy_b.scan_first(g, radices, place, kinds, seed)
        np.testing.assert_array_equal(s1, s2)
        np.testing.assert_array_equal(c1, c2)


@pytest.mark.skipif(len(available_backends()) < 2, reason="compiled backend missing")
def test_walk_paths_backends_agree(rng):
    compiled = get_backend("compiled")
    numpy_b = get_backend("numpy")
    for _ in range(6):
        space = random_mixed_space(rng, max_cardinality=4096)
        radices, place, kinds = space_arrays(space)
        starts = rng.integers(0, space.cardinality, size=40).astype(np.int64)
        draws = rng.integers(0, MASK, size=(40, 80), dtype=np.uint64, endpoint=True)
        p1 = compiled.walk_paths(radices, place, kinds, starts, draws)
        p2 = numpy_b.walk_paths(radices, place, kinds, starts, draws)
        np.testing.assert_array_equal(p1, p2)


def test_scan_best_classification_matches_oracle(rng):
    backend = get_backend("numpy")
    for _ in range(5):
        l = random_complete_landscape(rng, max_cardinality=400, tie_fraction=0.4)
        g = l.dense_gain()
        radices, place, kinds = space_arrays(l.space)
        _, cls = backend.scan_best(g, radices, place, kinds)
        for cid in range(l.space.cardinality):
            assert cls[cid] == oracle_classify(l, cid)


def test_scan_best_successor_semantics(rng):
    # successor is the fittest strictly improving neighbor, ties to lowest
    # id; non-improvable configs point at themselves
    backend = get_backend("numpy")
    l = random_complete_landscape(rng, max_cardinality=500, tie_fraction=0.3)
    g = l.dense_gain()
    radices, place, kinds = space_arrays(l.space)
    succ, cls = backend.scan_best(g, radices, place, kinds)
    for cid in range(l.space.cardinality):
        nbrs = l.space.neighbors(cid)
        best = max(g[n] for n in nbrs)
        if best > g[cid]:
            want = min(n for n in nbrs if g[n] == best)
            assert succ[cid] == want
            assert cls[cid] == CLS_IMPROVABLE
        else:
            assert succ[cid] == cid
            assert cls[cid] in (CLS_OPTIMUM, CLS_PLATEAU)


def test_walk_paths_step_to_uniform_slot_neighbor(rng):
    # every step must land on a distance-1 neighbor of the previous id
    backend = get_backend("numpy")
    space = random_mixed_space(rng, max_cardinality=2000)
    radices, place, kinds = space_arrays(space)
    starts = rng.integers(0, space.cardinality, size=10).astype(np.int64)
    draws = rng.integers(0, MASK, size=(10, 50), dtype=np.uint64, endpoint=True)
    paths = backend.walk_paths(radices, place, kinds, starts, draws)
    assert paths.shape == (10, 51)
    for w in range(10):
        for t in range(50):
            a, b = int(paths[w, t]), int(paths[w, t + 1])
            assert b in space.neighbors(a)
