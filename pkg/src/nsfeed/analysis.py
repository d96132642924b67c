"""Post-selection: conditional maps, outcome classification and failure statistics."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._backend import kernels
from .fock import ConditionalMap, FockState, as_fock
from .network import ModeUnitary, NetworkSpec, compose

NS_TARGET = (1.0, 1.0, -1.0)


class Outcome(enum.Enum):
    SUCCESS = "success"
    CORRECTABLE_PRESERVING = "correctable_preserving"
    CORRECTABLE_ADDING = "correctable_adding"
    IRRECOVERABLE = "irrecoverable"

    @property
    def correctable(self) -> bool:
        return self in (Outcome.CORRECTABLE_PRESERVING, Outcome.CORRECTABLE_ADDING)


def _matrix(network) -> np.ndarray:
    if isinstance(network, NetworkSpec):
        return compose(network).matrix
    if isinstance(network, ModeUnitary):
        return network.matrix
    return np.asarray(network, dtype=complex)


def conditional_map(network, ancilla_in, pattern, n_max: int = 2) -> ConditionalMap:
    """Signal map heralded by ``pattern`` given ancilla input ``ancilla_in``.

    ``network`` may be a :class:`NetworkSpec`, a :class:`ModeUnitary` or a
    raw mode matrix.  Mode 0 is the signal.
    """
    lam = _matrix(network)
    anc, pat = as_fock(ancilla_in), as_fock(pattern)
    d = lam.shape[0]
    if anc.num_modes != d - 1 or pat.num_modes != d - 1:
        raise ValueError(
            f"ancilla {anc} and pattern {pat} need {d - 1} entries for a {d}-mode network"
        )
    amps = kernels.conditional_amplitudes(lam, anc.occupations, pat.occupations, n_max)
    return ConditionalMap(anc.total_photons - pat.total_photons, amps, pat)


def ancilla_patterns(num_ancillae: int, max_photons: int) -> list[FockState]:
    """Every ancilla pattern with at most ``max_photons`` photons, sorted."""
    return sorted(
        FockState(c)
        for c in itertools.product(range(max_photons + 1), repeat=num_ancillae)
        if sum(c) <= max_photons
    )


@dataclass(frozen=True)
class OutcomeRecord:
    pattern: FockState
    map: ConditionalMap
    classification: Outcome

    @property
    def per_fock_probability(self) -> np.ndarray:
        return self.map.probabilities()

    @property
    def information_destroying(self) -> bool:
        """True when some input amplitude is annihilated outright."""
        return bool(np.any(np.abs(self.map.amplitudes) < 1e-14))


def classify(delta: int, is_success: bool) -> Outcome:
    if is_success:
        return Outcome.SUCCESS
    if delta < 0:
        return Outcome.IRRECOVERABLE
    if delta == 0:
        return Outcome.CORRECTABLE_PRESERVING
    return Outcome.CORRECTABLE_ADDING


def enumerate_outcomes(network, ancilla_in, success_pattern, n_max: int = 2) -> list[OutcomeRecord]:
    """Conditional maps and classes for every detection pattern that can occur."""
    lam = _matrix(network)
    anc, succ = as_fock(ancilla_in), as_fock(success_pattern)
    if succ.num_modes != anc.num_modes:
        raise ValueError(f"success pattern {succ} and ancilla {anc} differ in length")
    records = []
    for pat in ancilla_patterns(anc.num_modes, n_max + anc.total_photons):
        cmap = conditional_map(lam, anc, pat, n_max)
        records.append(OutcomeRecord(pat, cmap, classify(cmap.delta, pat == succ)))
    return records


def probability_table(records: Sequence[OutcomeRecord]) -> np.ndarray:
    """Rows: patterns, columns: Fock inputs n."""
    return np.array([r.per_fock_probability for r in records])


@dataclass(frozen=True)
class FailureStats:
    q_n: np.ndarray
    average_failure: float
    max_failure: float
    argmax_input: int


def failure_stats(records: Sequence[OutcomeRecord]) -> FailureStats:
    """Irrecoverable probability per Fock input, its uniform mean and its maximum.

    The mean weights every Fock input |n>, n = 0..n_max, equally.
    """
    if not records:
        raise ValueError("no outcome records")
    q = np.zeros(records[0].map.n_max + 1)
    for r in records:
        if r.classification is Outcome.IRRECOVERABLE:
            q += r.per_fock_probability
    k = int(np.argmax(q))
    return FailureStats(q, float(np.mean(q)), float(q[k]), k)


def ideal_recovery_bound(map_: ConditionalMap, target: Sequence[complex] = NS_TARGET) -> float:
    """Best worst-case probability of turning this branch into ``target``.

    Any physical correction can only shrink amplitudes, so the smallest
    ``|a_n / t_n|`` caps the uniform amplitude reachable for all inputs.
    """
    a = np.asarray(map_.amplitudes)
    t = np.asarray(target, dtype=complex)
    if a.shape != t.shape:
        raise ValueError(f"map has {a.size} amplitudes, target has {t.size}")
    if np.any(np.abs(a) < 1e-14):
        return 0.0
    return float(np.min(np.abs(a / t)) ** 2)


def success_probability(records: Sequence[OutcomeRecord]) -> float:
    """Worst-case probability of the success pattern."""
    for r in records:
        if r.classification is Outcome.SUCCESS:
            return float(np.min(r.per_fock_probability))
    return 0.0


def max_success_ceiling(
    records: Sequence[OutcomeRecord],
    target: Sequence[complex] = NS_TARGET,
    patterns: Iterable | None = None,
) -> float:
    """Success probability plus the ideal recovery bound of each correctable branch.

    ``patterns`` restricts which correctable branches are counted.
    """
    keep = None if patterns is None else {as_fock(p) for p in patterns}
    total = success_probability(records)
    for r in records:
        if not r.classification.correctable:
            continue
        if keep is not None and r.pattern not in keep:
            continue
        total += ideal_recovery_bound(r.map, target)
    return total


def find_record(records: Sequence[OutcomeRecord], pattern) -> OutcomeRecord:
    p = as_fock(pattern)
    for r in records:
        if r.pattern == p:
            return r
    raise KeyError(f"no record for pattern {p}")
