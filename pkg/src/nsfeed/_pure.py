"""Pure-Python versions of the compiled kernels in ``_core.pyx``."""

from __future__ import annotations

import math

import numpy as np

MAXK = 24
MAXFACT = 12
_FACT = [float(math.factorial(i)) for i in range(MAXFACT + 1)]


def _ryser(a: np.ndarray) -> complex:
    n = a.shape[0]
    if n == 0:
        return 1 + 0j
    rs = np.zeros(n, dtype=complex)
    total = 0j
    prev = 0
    nbits = 0
    for k in range(1, 1 << n):
        g = k ^ (k >> 1)
        diff = g ^ prev
        j = diff.bit_length() - 1
        if g & diff:
            nbits += 1
            rs += a[:, j]
        else:
            nbits -= 1
            rs -= a[:, j]
        prev = g
        prod = complex(np.prod(rs))
        total += -prod if nbits & 1 else prod
    return -total if n & 1 else total


def permanent(m) -> complex:
    """Permanent of a square complex matrix (Ryser, Gray-code order)."""
    a = np.ascontiguousarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {a.shape}")
    if a.shape[0] > MAXK:
        raise ValueError(f"matrix too large for exact permanent: {a.shape[0]} > {MAXK}")
    return _ryser(a)


def _element(lam: np.ndarray, out_occ, in_occ) -> complex:
    if sum(out_occ) != sum(in_occ):
        return 0j
    rows = [i for i, m in enumerate(out_occ) for _ in range(m)]
    cols = [j for j, n in enumerate(in_occ) for _ in range(n)]
    pref = 1.0
    for m in out_occ:
        pref *= _FACT[m]
    for n in in_occ:
        pref *= _FACT[n]
    return _ryser(lam[np.ix_(rows, cols)]) / math.sqrt(pref)


def matrix_element(lam, out_occ, in_occ) -> complex:
    """Fock-basis element <out|U|in> of the passive network with mode matrix ``lam``."""
    L = np.asarray(lam, dtype=complex)
    o = [int(x) for x in out_occ]
    n = [int(x) for x in in_occ]
    if len(o) != L.shape[0] or len(n) != L.shape[0]:
        raise ValueError("occupation vectors must have one entry per mode")
    if sum(o) > MAXFACT or sum(n) > MAXFACT:
        raise ValueError(f"photon number above {MAXFACT} is not supported")
    return _element(L, o, n)


def conditional_amplitudes(lam, ancilla_in, pattern, n_max: int) -> np.ndarray:
    """Amplitudes a_n = <n+delta, pattern|U|n, ancilla_in> for n = 0..n_max."""
    L = np.asarray(lam, dtype=complex)
    anc = [int(x) for x in ancilla_in]
    pat = [int(x) for x in pattern]
    d = L.shape[0]
    if len(anc) != d - 1 or len(pat) != d - 1:
        raise ValueError("ancilla and pattern need one entry per ancilla mode")
    delta = sum(anc) - sum(pat)
    if n_max + max(delta, 0) + max(sum(anc), sum(pat)) > MAXFACT:
        raise ValueError(f"photon number above {MAXFACT} is not supported")
    res = np.zeros(n_max + 1, dtype=complex)
    for n in range(n_max + 1):
        if n + delta < 0:
            continue
        res[n] = _element(L, [n + delta] + pat, [n] + anc)
    return res


def compose_rotations(num_modes: int, pairs, angles) -> np.ndarray:
    """Product of embedded real rotations; ``pairs[k]`` acts with ``angles[k]``, first acts first."""
    pr = np.asarray(pairs, dtype=int).reshape(-1, 2)
    th = np.asarray(angles, dtype=float)
    if pr.shape[0] != th.shape[0]:
        raise ValueError("one angle per mode pair is required")
    u = np.eye(num_modes, dtype=complex)
    for (a, b), t in zip(pr, th):
        if a < 0 or b < 0 or a >= num_modes or b >= num_modes or a == b:
            raise ValueError(f"bad mode pair ({a}, {b})")
        c, s = math.cos(t), math.sin(t)
        ra, rb = u[a].copy(), u[b].copy()
        u[a] = c * ra + s * rb
        u[b] = -s * ra + c * rb
    return u


def branch_composite(mats, nets, ancs, pats, prefix, prefix_delta: int) -> np.ndarray:
    """Composite amplitudes of a heralded branch (see the compiled version)."""
    mats = np.asarray(mats, dtype=complex)
    amps = np.array(prefix, dtype=complex)
    delta = int(prefix_delta)
    d = mats.shape[1]
    ancs = np.asarray(ancs, dtype=int).reshape(len(nets), -1)
    pats = np.asarray(pats, dtype=int).reshape(len(nets), -1)
    for s, k in enumerate(nets):
        anc, pat = list(ancs[s]), list(pats[s])
        dstep = sum(anc) - sum(pat)
        for n in range(len(amps)):
            m = n + delta
            if m < 0 or m + dstep < 0:
                amps[n] = 0
                continue
            if amps[n] == 0:
                continue
            amps[n] *= _element(mats[k], [m + dstep] + pat, [m] + anc)
        delta += dstep
    return amps


def penalized_objective(mats, branches, target, weight: float) -> float:
    """``-sum(mean |c_n / t_n|^2) + weight * sum(residual)`` over branches."""
    t = np.asarray(target, dtype=complex)
    tw = np.abs(t) ** 2
    nt = float(np.sum(tw))
    gain = pen = 0.0
    for nets, ancs, pats, prefix, pdelta in branches:
        c = branch_composite(mats, nets, ancs, pats, prefix, pdelta)
        p = np.abs(c) ** 2
        gain += float(np.mean(p / tw))
        na = float(np.sum(p))
        if na == 0.0:
            pen += 1.0
        else:
            pen += max(0.0, 1.0 - abs(np.vdot(t, c)) ** 2 / (na * nt))
    return -gain + weight * pen
