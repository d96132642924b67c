import json
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_network
from nsfeed import _backend, _pure
from nsfeed.network import compose, su3_template
from nsfeed.optimize import ChainConfig, _encode_branches, chain_problem

core = pytest.importorskip("nsfeed._core")


def unitary(seed, d=3):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_compiled_selected_by_default():
    if os.environ.get("NSFEED_PURE", "") in ("", "0"):
        assert _backend.COMPILED
        assert _backend.BACKEND == "cython"


def test_env_forces_pure():
    code = "import json, nsfeed; print(json.dumps([nsfeed.BACKEND, nsfeed.COMPILED]))"
    env = dict(os.environ, NSFEED_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert json.loads(out.stdout) == ["python", False]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_permanent_parity(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    assert core.permanent(m) == pytest.approx(_pure.permanent(m), rel=1e-10, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.lists(st.integers(0, 2), min_size=3, max_size=3))
def test_matrix_element_parity(seed, occ):
    lam = unitary(seed)
    out = list(np.random.default_rng(seed).permutation(occ))
    a = core.matrix_element(lam, out, occ)
    b = _pure.matrix_element(lam, out, occ)
    assert abs(a - b) < 1e-12


def test_conditional_amplitudes_parity(rng):
    for k in range(10):
        lam = compose(random_network(rng)).matrix
        for anc, pat in [((1, 0), (1, 0)), ((1, 0), (0, 0)), ((1, 1), (2, 0)), ((0, 2), (1, 1))]:
            a = core.conditional_amplitudes(lam, anc, pat, 3)
            b = _pure.conditional_amplitudes(lam, anc, pat, 3)
            assert np.allclose(a, b, atol=1e-12)


def test_compose_rotations_parity(rng):
    pairs = [(1, 2), (0, 1), (1, 2), (0, 2)]
    for _ in range(10):
        ang = rng.uniform(0, 6.3, len(pairs))
        assert np.allclose(core.compose_rotations(3, pairs, ang), _pure.compose_rotations(3, pairs, ang), atol=1e-14)


def test_rotations_match_network_compose(rng):
    ang = rng.uniform(0, 6.3, 3)
    net = su3_template(*ang)
    pairs = [(e.mode_a, e.mode_b) for e in net.elements]
    assert np.allclose(core.compose_rotations(3, pairs, ang), compose(net).matrix, atol=1e-14)


def test_branch_kernels_parity(rng):
    t = su3_template(0, 0, 0)
    prob = chain_problem(t, t, ChainConfig(), third_template=t)
    enc = _encode_branches(prob)
    for _ in range(10):
        x = rng.uniform(0, 6.3, prob.dim)
        mats = np.stack(prob.matrices(x))
        for br in enc:
            assert np.allclose(core.branch_composite(mats, *br), _pure.branch_composite(mats, *br), atol=1e-14)
        for w in (1.0, 1e4):
            a = core.penalized_objective(mats, enc, prob.target, w)
            b = _pure.penalized_objective(mats, enc, prob.target, w)
            assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


def test_photon_limit_enforced():
    lam = np.eye(3, dtype=complex)
    with pytest.raises(ValueError):
        core.matrix_element(lam, [30, 0, 0], [30, 0, 0])
