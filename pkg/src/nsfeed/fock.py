"""Fock states, truncated single-mode pure states and post-selected conditional maps."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

#: Default signal cutoff: inputs carry up to two photons and the vacuum
#: syndrome adds one more.
DEFAULT_CUTOFF = 3

#: Relative tolerance used for amplitude comparisons.
REL_TOL = 1e-9


@dataclass(frozen=True, order=True)
class FockState:
    """Occupation-number vector over a fixed set of optical modes."""

    occupations: tuple[int, ...]

    def __init__(self, occupations: Iterable[int]):
        occ = tuple(int(n) for n in occupations)
        if any(n < 0 for n in occ):
            raise ValueError(f"negative occupation in {occ}")
        object.__setattr__(self, "occupations", occ)

    @property
    def num_modes(self) -> int:
        return len(self.occupations)

    @property
    def total_photons(self) -> int:
        return sum(self.occupations)

    def __len__(self) -> int:
        return len(self.occupations)

    def __iter__(self):
        return iter(self.occupations)

    def __getitem__(self, i):
        return self.occupations[i]

    def __str__(self) -> str:
        return "|" + ",".join(str(n) for n in self.occupations) + ">"

    @classmethod
    def parse(cls, text: str) -> "FockState":
        """Parse ``"1,0"`` or ``"|1,0>"`` style strings."""
        body = text.strip().strip("|<>")
        return cls(int(tok) for tok in body.split(",") if tok.strip())


def as_fock(state: FockState | Iterable[int]) -> FockState:
    return state if isinstance(state, FockState) else FockState(state)


def total_photons(state: FockState | Iterable[int]) -> int:
    """Return the total number of photons in ``state``."""
    return as_fock(state).total_photons


@dataclass(frozen=True)
class PureState:
    """A finite superposition of Fock states with a photon-number cutoff.

    Amplitudes are kept in a plain dict keyed by :class:`FockState`; zero
    amplitudes are allowed but never required.
    """

    amplitudes: Mapping[FockState, complex]
    cutoff: int = DEFAULT_CUTOFF

    def __post_init__(self):
        amps = {as_fock(k): complex(v) for k, v in dict(self.amplitudes).items()}
        modes = {k.num_modes for k in amps}
        if len(modes) > 1:
            raise ValueError(f"mixed mode counts in pure state: {sorted(modes)}")
        for k in amps:
            if k.total_photons > self.cutoff:
                raise ValueError(f"{k} exceeds cutoff {self.cutoff}")
        object.__setattr__(self, "amplitudes", dict(sorted(amps.items())))

    @classmethod
    def single_mode(cls, coeffs: Iterable[complex], cutoff: int | None = None) -> "PureState":
        """Build ``sum_n c_n |n>`` on one mode from a coefficient list."""
        c = [complex(x) for x in coeffs]
        if cutoff is None:
            cutoff = max(DEFAULT_CUTOFF, len(c) - 1)
        return cls({FockState((n,)): cn for n, cn in enumerate(c)}, cutoff)

    @property
    def num_modes(self) -> int:
        if not self.amplitudes:
            return 1
        return next(iter(self.amplitudes)).num_modes

    def norm2(self) -> float:
        return float(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def normalized(self) -> "PureState":
        n2 = self.norm2()
        if n2 == 0.0:
            raise ValueError("cannot normalize the zero state")
        s = 1.0 / np.sqrt(n2)
        return PureState({k: a * s for k, a in self.amplitudes.items()}, self.cutoff)

    def is_normalized(self, tol: float = 1e-12) -> bool:
        return abs(self.norm2() - 1.0) <= tol

    def amplitude(self, state: FockState | Iterable[int]) -> complex:
        return self.amplitudes.get(as_fock(state), 0j)

    def coefficients(self, length: int | None = None) -> np.ndarray:
        """Single-mode coefficient vector ``c_0..c_{length-1}``."""
        if self.num_modes != 1:
            raise ValueError("coefficients() requires a single-mode state")
        if length is None:
            length = self.cutoff + 1
        c = np.zeros(length, dtype=complex)
        for k, a in self.amplitudes.items():
            if k[0] < length:
                c[k[0]] = a
            elif a != 0:
                raise ValueError(f"amplitude on {k} does not fit in length {length}")
        return c


@dataclass(frozen=True)
class ConditionalMap:
    """Effective signal-mode map of one ancilla detection pattern.

    The map sends ``|n> -> amplitudes[n] |n + delta>`` for ``n = 0..n_max``.
    """

    delta: int
    amplitudes: np.ndarray
    pattern: FockState = field(default_factory=lambda: FockState(()))

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex)
        a.setflags(write=False)
        for n in range(len(a)):
            if n + self.delta < 0 and a[n] != 0:
                raise ValueError(f"a_{n} must vanish: output |{n + self.delta}> does not exist")
        if np.any(np.abs(a) > 1.0 + 1e-9):
            raise ValueError("conditional amplitudes must satisfy |a_n| <= 1")
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "pattern", as_fock(self.pattern))

    @property
    def n_max(self) -> int:
        return len(self.amplitudes) - 1

    def probabilities(self) -> np.ndarray:
        """Per-Fock-input branch probabilities ``|a_n|^2``."""
        return np.abs(self.amplitudes) ** 2

    def phase_normalized(self) -> "ConditionalMap":
        """Copy with the first nonzero amplitude made real and positive."""
        a = canonical_phase(self.amplitudes)
        return ConditionalMap(self.delta, a, self.pattern)

    def then(self, other: "ConditionalMap") -> "ConditionalMap":
        """Compose: apply ``self`` first, then ``other`` on the shifted output."""
        out = np.zeros(len(self.amplitudes), dtype=complex)
        for n, a in enumerate(self.amplitudes):
            m = n + self.delta
            if a == 0 or m < 0:
                continue
            if m > other.n_max:
                raise ValueError(f"second map does not cover input |{m}>")
            out[n] = a * other.amplitudes[m]
        return ConditionalMap(self.delta + other.delta, out, other.pattern)


def canonical_phase(a: np.ndarray, tol: float = 1e-15) -> np.ndarray:
    """Rotate ``a`` so its first non-negligible entry is real and positive."""
    a = np.asarray(a, dtype=complex)
    nz = np.flatnonzero(np.abs(a) > tol)
    if nz.size == 0:
        return a.copy()
    ph = a[nz[0]] / abs(a[nz[0]])
    return a / ph


def _signal_coefficients(map_: ConditionalMap, signal: PureState) -> np.ndarray:
    if signal.num_modes != 1:
        raise ValueError(f"signal must be single-mode, got {signal.num_modes} modes")
    c = np.zeros(map_.n_max + 1, dtype=complex)
    for k, amp in signal.amplitudes.items():
        n = k[0]
        if n > map_.n_max:
            if amp != 0:
                raise ValueError(f"signal component |{n}> outside map range 0..{map_.n_max}")
            continue
        c[n] = amp
    return c


def apply_conditional(map_: ConditionalMap, signal: PureState) -> PureState:
    """Apply a conditional map to a single-mode signal; the result is unnormalized."""
    c = _signal_coefficients(map_, signal)
    out: dict[FockState, complex] = {}
    for n, (a, cn) in enumerate(zip(map_.amplitudes, c)):
        m = n + map_.delta
        if m < 0:
            continue
        out[FockState((m,))] = a * cn
    cutoff = max(signal.cutoff, map_.n_max + max(map_.delta, 0))
    return PureState(out, cutoff)


def branch_probability(map_: ConditionalMap, signal: PureState) -> float:
    """Probability of the detection pattern behind ``map_`` for ``signal``."""
    c = _signal_coefficients(map_, signal)
    return float(np.sum(np.abs(map_.amplitudes * c) ** 2))
