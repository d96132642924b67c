"""Permanents and Fock-basis matrix elements of passive linear networks.

``matrix_element`` goes through the permanent of a row/column-repeated
submatrix of the mode unitary.  ``brute_force_element`` evolves the Fock
state splitter by splitter with the two-mode binomial expansion and never
touches a permanent; it exists to check the former.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable

import numpy as np

from ._backend import kernels
from .fock import FockState, as_fock
from .network import ModeUnitary, NetworkSpec

MAX_PHOTONS = 12
NAIVE_MAX = 8


def _square(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {a.shape}")
    return a


def permanent_naive(m) -> complex:
    """Sum over all permutations; exponential in d!, kept as a reference."""
    a = _square(m)
    d = a.shape[0]
    if d > NAIVE_MAX:
        raise ValueError(f"naive permanent limited to d <= {NAIVE_MAX}")
    rows = range(d)
    return complex(sum(math.prod(a[i, s[i]] for i in rows) for s in itertools.permutations(rows)))


def permanent_ryser(m) -> complex:
    """Ryser inclusion-exclusion formula, run by the selected kernel backend."""
    return kernels.permanent(_square(m))


def permanent(m, method: str = "ryser") -> complex:
    """Permanent of a square complex matrix; the 0x0 permanent is 1."""
    if method == "ryser":
        return permanent_ryser(m)
    if method == "naive":
        return permanent_naive(m)
    raise ValueError(f"unknown permanent method {method!r}")


def _lam(lam) -> np.ndarray:
    if isinstance(lam, ModeUnitary):
        return lam.matrix
    if isinstance(lam, NetworkSpec):
        from .network import compose

        return compose(lam).matrix
    return _square(lam)


def _check_dims(lam: np.ndarray, *states: FockState) -> None:
    for s in states:
        if s.num_modes != lam.shape[0]:
            raise ValueError(f"{s} has {s.num_modes} modes, unitary has {lam.shape[0]}")


def expand_multi_index(lam, out_occ, in_occ) -> np.ndarray:
    """Submatrix with row i repeated out_occ[i] times and column j in_occ[j] times."""
    L = _lam(lam)
    o, n = as_fock(out_occ), as_fock(in_occ)
    _check_dims(L, o, n)
    if o.total_photons != n.total_photons:
        raise ValueError(f"photon numbers differ: {o} vs {n}")
    if o.total_photons == 0:
        raise ValueError("vacuum element has no multi-index matrix")
    rows = [i for i, k in enumerate(o) for _ in range(k)]
    cols = [j for j, k in enumerate(n) for _ in range(k)]
    return L[np.ix_(rows, cols)].copy()


def matrix_element(lam, out_occ, in_occ) -> complex:
    """<out|U|in> from the permanent formula; zero across photon-number sectors."""
    L = _lam(lam)
    o, n = as_fock(out_occ), as_fock(in_occ)
    _check_dims(L, o, n)
    if o.total_photons != n.total_photons:
        return 0j
    if o.total_photons > MAX_PHOTONS:
        raise ValueError(f"photon number above {MAX_PHOTONS} is not supported")
    return kernels.matrix_element(L, o.occupations, n.occupations)


def matrix_element_naive(lam, out_occ, in_occ) -> complex:
    """Same as :func:`matrix_element` but with the permutation-sum permanent."""
    L = _lam(lam)
    o, n = as_fock(out_occ), as_fock(in_occ)
    _check_dims(L, o, n)
    if o.total_photons != n.total_photons:
        return 0j
    if o.total_photons == 0:
        return 1 + 0j
    pref = math.prod(math.factorial(k) for k in (*o, *n))
    return permanent_naive(expand_multi_index(L, o, n)) / math.sqrt(pref)


def fock_basis(num_modes: int, photons: int) -> list[FockState]:
    """All occupation vectors with exactly ``photons`` photons, lexicographic."""
    out = [
        FockState(c)
        for c in itertools.product(range(photons + 1), repeat=num_modes)
        if sum(c) == photons
    ]
    return sorted(out)


# --- brute-force oracle -------------------------------------------------------


def _apply_splitter(state: dict, a: int, b: int, u: np.ndarray, cutoff: int) -> dict:
    # a_a^dag -> u00 a_a^dag + u10 a_b^dag ; a_b^dag -> u01 a_a^dag + u11 a_b^dag
    out: dict[tuple, complex] = {}
    for occ, amp in state.items():
        na, nb = occ[a], occ[b]
        norm = amp / math.sqrt(math.factorial(na) * math.factorial(nb))
        for k in range(na + 1):
            ck = math.comb(na, k) * u[0, 0] ** k * u[1, 0] ** (na - k)
            for l in range(nb + 1):
                cl = math.comb(nb, l) * u[0, 1] ** l * u[1, 1] ** (nb - l)
                p, q = k + l, (na - k) + (nb - l)
                new = list(occ)
                new[a], new[b] = p, q
                if sum(new) > cutoff:
                    continue
                key = tuple(new)
                out[key] = out.get(key, 0j) + norm * ck * cl * math.sqrt(
                    math.factorial(p) * math.factorial(q)
                )
    return out


def brute_force_evolve(network: NetworkSpec, in_occ, cutoff: int) -> dict[tuple, complex]:
    """Output amplitudes of ``U|in>`` on the truncated Fock basis."""
    n = as_fock(in_occ)
    if n.num_modes != network.num_modes:
        raise ValueError(f"{n} has {n.num_modes} modes, network has {network.num_modes}")
    if cutoff < n.total_photons:
        raise ValueError(f"cutoff {cutoff} below input photon number {n.total_photons}")
    state = {n.occupations: 1 + 0j}
    for el in network.elements:
        state = _apply_splitter(state, el.mode_a, el.mode_b, np.asarray(
            [[math.cos(el.theta), math.sin(el.theta)], [-math.sin(el.theta), math.cos(el.theta)]]
        ), cutoff)
    leak = abs(1.0 - sum(abs(v) ** 2 for v in state.values()))
    if leak > 1e-12:
        raise ValueError(f"cutoff {cutoff} leaks norm {leak:.3g}")
    return state


def brute_force_element(network: NetworkSpec, out_occ, in_occ, cutoff: int) -> complex:
    """<out|U|in> by explicit splitter-by-splitter Fock evolution."""
    o, n = as_fock(out_occ), as_fock(in_occ)
    if o.num_modes != network.num_modes:
        raise ValueError(f"{o} has {o.num_modes} modes, network has {network.num_modes}")
    if cutoff < max(o.total_photons, n.total_photons):
        raise ValueError(f"cutoff {cutoff} too small for {o} and {n}")
    return brute_force_evolve(network, n, cutoff).get(o.occupations, 0j)


def column_norms(lam, in_occ) -> float:
    """Sum of |<out|U|in>|^2 over the photon-number sector of ``in_occ``."""
    L = _lam(lam)
    n = as_fock(in_occ)
    return float(sum(abs(matrix_element(L, o, n)) ** 2 for o in fock_basis(n.num_modes, n.total_photons)))


def elements_iter(lam, photons: Iterable[int]):
    """Yield ``(out, in, element)`` for all pairs in the given photon sectors."""
    L = _lam(lam)
    d = L.shape[0]
    for k in photons:
        basis = fock_basis(d, k)
        for o in basis:
            for n in basis:
                yield o, n, matrix_element(L, o, n)
