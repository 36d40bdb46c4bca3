import random

import numpy as np
import pytest

from caseminer import kernels
from oracles import dbscan_closure, lev_table

BACKENDS = kernels.available_backends()


def test_compiled_backend_is_built():
    # the editable install compiles the extension; fall back is exercised below either way
    assert "cython" in BACKENDS, "Cython extension missing; rebuild with pip install -e ."


@pytest.fixture(params=sorted(BACKENDS))
def impl(request):
    return BACKENDS[request.param]


def test_levenshtein_backends(impl):
    rng = random.Random(0)
    for _ in range(500):
        a = "".join(rng.choice("ab安c") for _ in range(rng.randint(0, 12)))
        b = "".join(rng.choice("ab安c") for _ in range(rng.randint(0, 12)))
        assert impl.levenshtein(a, b) == lev_table(a, b)


def test_levenshtein_astral_plane(impl):
    assert impl.levenshtein("𠀀𠀁", "𠀀𠀂") == 1


def test_pairwise_backends(impl):
    strings = ["", "a", "安全检查", "安全检测", "kitten", "sitting", "𠀀x"]
    out = impl.pairwise_levenshtein(strings)
    assert out.dtype == np.int64
    for i, a in enumerate(strings):
        for j, b in enumerate(strings):
            assert out[i, j] == lev_table(a, b)
    assert impl.pairwise_levenshtein([]).shape == (0, 0)


def test_dbscan_backends_match_oracle(impl):
    rng = np.random.default_rng(4)
    for _ in range(60):
        n = int(rng.integers(1, 30))
        pts = rng.random((n, 2))
        d = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))
        eps, min_pts = float(rng.uniform(0.05, 0.4)), int(rng.integers(2, 6))
        labels = impl.dbscan_labels(np.ascontiguousarray(d), eps, min_pts)
        clusters, noise = dbscan_closure(d, eps, min_pts)
        got = [sorted(np.flatnonzero(labels == k).tolist()) for k in range(labels.max() + 1)]
        assert got == clusters
        assert np.flatnonzero(labels == -1).tolist() == noise


def test_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("only one backend available")
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    strings = ["".join(random.Random(i).choice("安全检查不到位") for _ in range(i % 11)) for i in range(40)]
    assert np.array_equal(py.pairwise_levenshtein(strings), cy.pairwise_levenshtein(strings))
    d = np.ascontiguousarray(cy.pairwise_levenshtein(strings).astype(float))
    for eps in (0.5, 1, 2, 3, 5):
        assert np.array_equal(py.dbscan_labels(d, eps, 3), cy.dbscan_labels(d, eps, 3))


def test_env_var_forces_pure_python(monkeypatch):
    import importlib

    monkeypatch.setenv("CASEMINER_PURE_PYTHON", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("CASEMINER_PURE_PYTHON")
        importlib.reload(kernels)
