# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled permanent and Fock matrix-element kernels.

Mirrors :mod:`nsfeed._pure` function for function; the package picks one of
the two at import time.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, cos, sin, NAN

cnp.import_array()

cdef enum:
    MAXK = 24
    MAXFACT = 12

cdef double _FACT[MAXFACT + 1]
_FACT[0] = 1.0
for _i in range(1, MAXFACT + 1):
    _FACT[_i] = _FACT[_i - 1] * _i


cdef double complex _ryser(double complex* a, int n) noexcept nogil:
    # a is n x n, row major. Gray-code Ryser, O(2^n n).
    cdef double complex rs[MAXK]
    cdef double complex prod, total = 0
    cdef int i, j, sign = 1, nbits = 0
    cdef unsigned long k, g, prev = 0, diff
    if n == 0:
        return 1
    for i in range(n):
        rs[i] = 0
    for k in range(1, 1UL << n):
        g = k ^ (k >> 1)
        diff = g ^ prev
        j = 0
        while not (diff >> j) & 1:
            j += 1
        if g & diff:
            nbits += 1
            for i in range(n):
                rs[i] = rs[i] + a[i * n + j]
        else:
            nbits -= 1
            for i in range(n):
                rs[i] = rs[i] - a[i * n + j]
        prev = g
        prod = 1
        for i in range(n):
            prod = prod * rs[i]
        if nbits & 1:
            total = total - prod
        else:
            total = total + prod
    if n & 1:
        total = -total
    return total


def permanent(m):
    """Permanent of a square complex matrix (Ryser, Gray-code order)."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2, mode="c"] a = np.ascontiguousarray(m, dtype=np.complex128)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got {a.shape[0]}x{a.shape[1]}")
    cdef int n = a.shape[0]
    if n > MAXK:
        raise ValueError(f"matrix too large for exact permanent: {n} > {MAXK}")
    return complex(_ryser(<double complex*> a.data, n))


cdef double complex _element(double complex* lam, int d, long* out_occ, long* in_occ) noexcept nogil:
    # Returns nan when the photon total exceeds the factorial table.
    cdef int rows[MAXK]
    cdef int cols[MAXK]
    cdef double complex sub[MAXK * MAXK]
    cdef int i, j, r = 0, c = 0, k
    cdef double pref = 1.0
    for i in range(d):
        if out_occ[i] > MAXFACT or in_occ[i] > MAXFACT:
            return NAN
        for j in range(out_occ[i]):
            if r >= MAXFACT:
                return NAN
            rows[r] = i
            r += 1
        for j in range(in_occ[i]):
            if c >= MAXFACT:
                return NAN
            cols[c] = i
            c += 1
        pref *= _FACT[out_occ[i]] * _FACT[in_occ[i]]
    if r != c:
        return 0
    k = r
    for i in range(k):
        for j in range(k):
            sub[i * k + j] = lam[rows[i] * d + cols[j]]
    return _ryser(sub, k) / sqrt(pref)


def matrix_element(lam, out_occ, in_occ):
    """Fock-basis element <out|U|in> of the passive network with mode matrix ``lam``."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2, mode="c"] L = np.ascontiguousarray(lam, dtype=np.complex128)
    cdef cnp.ndarray[long, ndim=1, mode="c"] o = np.ascontiguousarray(out_occ, dtype=np.int_)
    cdef cnp.ndarray[long, ndim=1, mode="c"] n = np.ascontiguousarray(in_occ, dtype=np.int_)
    cdef int d = L.shape[0]
    if o.shape[0] != d or n.shape[0] != d:
        raise ValueError("occupation vectors must have one entry per mode")
    if o.sum() > MAXFACT or n.sum() > MAXFACT:
        raise ValueError(f"photon number above {MAXFACT} is not supported")
    return complex(_element(<double complex*> L.data, d, <long*> o.data, <long*> n.data))


def conditional_amplitudes(lam, ancilla_in, pattern, int n_max):
    """Amplitudes a_n = <n+delta, pattern|U|n, ancilla_in> for n = 0..n_max.

    Mode 0 is the signal mode; the remaining modes carry the ancillae.
    """
    cdef cnp.ndarray[cnp.complex128_t, ndim=2, mode="c"] L = np.ascontiguousarray(lam, dtype=np.complex128)
    cdef cnp.ndarray[long, ndim=1, mode="c"] anc = np.ascontiguousarray(ancilla_in, dtype=np.int_)
    cdef cnp.ndarray[long, ndim=1, mode="c"] pat = np.ascontiguousarray(pattern, dtype=np.int_)
    cdef int d = L.shape[0]
    if anc.shape[0] != d - 1 or pat.shape[0] != d - 1:
        raise ValueError("ancilla and pattern need one entry per ancilla mode")
    cdef long delta = anc.sum() - pat.sum()
    if n_max + max(delta, 0) + max(anc.sum(), pat.sum()) > MAXFACT:
        raise ValueError(f"photon number above {MAXFACT} is not supported")
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] res = np.zeros(n_max + 1, dtype=np.complex128)
    cdef long o[MAXK]
    cdef long inn[MAXK]
    cdef int i, n
    for i in range(d - 1):
        o[i + 1] = pat[i]
        inn[i + 1] = anc[i]
    for n in range(n_max + 1):
        if n + delta < 0:
            continue
        o[0] = n + delta
        inn[0] = n
        res[n] = _element(<double complex*> L.data, d, o, inn)
    return res


def compose_rotations(int num_modes, pairs, angles):
    """Product of embedded real rotations; ``pairs[k]`` acts with ``angles[k]``, first acts first."""
    cdef cnp.ndarray[long, ndim=2, mode="c"] pr = np.ascontiguousarray(pairs, dtype=np.int_).reshape(-1, 2)
    cdef cnp.ndarray[double, ndim=1, mode="c"] th = np.ascontiguousarray(angles, dtype=np.float64)
    if pr.shape[0] != th.shape[0]:
        raise ValueError("one angle per mode pair is required")
    cdef cnp.ndarray[cnp.complex128_t, ndim=2, mode="c"] u = np.eye(num_modes, dtype=np.complex128)
    cdef int k, j, a, b
    cdef double c, s
    cdef double complex ua, ub
    for k in range(pr.shape[0]):
        a = pr[k, 0]
        b = pr[k, 1]
        if a < 0 or b < 0 or a >= num_modes or b >= num_modes or a == b:
            raise ValueError(f"bad mode pair ({a}, {b})")
        c = cos(th[k])
        s = sin(th[k])
        # rows a, b of u <- [[c, s], [-s, c]] @ rows a, b
        for j in range(num_modes):
            ua = u[a, j]
            ub = u[b, j]
            u[a, j] = c * ua + s * ub
            u[b, j] = -s * ua + c * ub
    return u


cdef void _branch(double complex* mats, int d, long[:] nets, long[:, :] ancs, long[:, :] pats,
                  double complex* amps, int length, long delta) noexcept nogil:
    # amps (length n_max + 1) is updated in place with every heralded step.
    cdef long o[MAXK]
    cdef long inn[MAXK]
    cdef int s, i, n
    cdef long m, dstep, sa, sp
    cdef double complex b
    for s in range(nets.shape[0]):
        sa = 0
        sp = 0
        for i in range(d - 1):
            o[i + 1] = pats[s, i]
            inn[i + 1] = ancs[s, i]
            sa += ancs[s, i]
            sp += pats[s, i]
        dstep = sa - sp
        for n in range(length):
            m = n + delta
            if m < 0 or m + dstep < 0:
                amps[n] = 0
                continue
            if amps[n] == 0:
                continue
            o[0] = m + dstep
            inn[0] = m
            b = _element(mats + nets[s] * d * d, d, o, inn)
            amps[n] = amps[n] * b
        delta += dstep


def branch_composite(mats, nets, ancs, pats, prefix, long prefix_delta):
    """Composite amplitudes of a heralded branch.

    ``mats`` stacks the network mode matrices; step ``s`` uses network
    ``nets[s]`` with ancilla input ``ancs[s]`` and detection ``pats[s]``.
    ``prefix`` holds the amplitudes of a fixed map applied beforehand
    (all ones for none) and ``prefix_delta`` its photon shift.
    """
    cdef cnp.ndarray[cnp.complex128_t, ndim=3, mode="c"] M = np.ascontiguousarray(mats, dtype=np.complex128)
    cdef long[:] nv = np.ascontiguousarray(nets, dtype=np.int_)
    cdef long[:, :] av = np.ascontiguousarray(ancs, dtype=np.int_).reshape(len(nv), -1)
    cdef long[:, :] pv = np.ascontiguousarray(pats, dtype=np.int_).reshape(len(nv), -1)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] amps = np.array(prefix, dtype=np.complex128)
    _branch(<double complex*> M.data, M.shape[1], nv, av, pv, <double complex*> amps.data, amps.shape[0], prefix_delta)
    return amps


def penalized_objective(mats, branches, target, double weight):
    """``-sum(mean |c_n / t_n|^2) + weight * sum(residual)`` over branches.

    ``branches`` is a sequence of ``(nets, ancs, pats, prefix, prefix_delta)``.
    """
    cdef cnp.ndarray[cnp.complex128_t, ndim=3, mode="c"] M = np.ascontiguousarray(mats, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] t = np.ascontiguousarray(target, dtype=np.complex128)
    cdef int L = t.shape[0], n
    cdef double complex buf[MAXK]
    cdef double complex ov
    cdef double gain = 0, pen = 0, na, nt = 0, g
    cdef long[:] nv
    cdef long[:, :] av, pv
    cdef double complex[:] pre
    for n in range(L):
        nt += t[n].real * t[n].real + t[n].imag * t[n].imag
    for br in branches:
        nv = br[0]
        av = br[1]
        pv = br[2]
        pre = br[3]
        for n in range(L):
            buf[n] = pre[n]
        _branch(<double complex*> M.data, M.shape[1], nv, av, pv, buf, L, br[4])
        na = 0
        g = 0
        ov = 0
        for n in range(L):
            na += buf[n].real * buf[n].real + buf[n].imag * buf[n].imag
            g += (buf[n].real * buf[n].real + buf[n].imag * buf[n].imag) / (
                t[n].real * t[n].real + t[n].imag * t[n].imag)
            ov += t[n].conjugate() * buf[n]
        gain += g / L
        if na == 0:
            pen += 1.0
        else:
            g = 1.0 - (ov.real * ov.real + ov.imag * ov.imag) / (na * nt)
            pen += g if g > 0 else 0.0
    return -gain + weight * pen
