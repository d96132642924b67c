"""Beam-splitter networks and their mode unitaries.

Modes are indexed from 0; mode 0 carries the signal and the remaining modes
the ancillae.  A splitter acting on modes ``(a, b)`` with angle ``theta``
transforms creation operators with the real rotation returned by
:func:`bs_unitary`; elements listed first act first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

FORMAT_VERSION = 1


def bs_unitary(theta: float) -> np.ndarray:
    """2x2 real rotation ``[[cos, sin], [-sin, cos]]``; ``cos(theta)`` is the transmittivity."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]], dtype=complex)


@dataclass(frozen=True)
class BeamSplitter:
    mode_a: int
    mode_b: int
    theta: float

    def __post_init__(self):
        if self.mode_a == self.mode_b:
            raise ValueError(f"beam splitter needs two distinct modes, got {self.mode_a} twice")
        if self.mode_a < 0 or self.mode_b < 0:
            raise ValueError("mode indices must be non-negative")
        object.__setattr__(self, "theta", float(self.theta))

    def embedded(self, num_modes: int) -> np.ndarray:
        if max(self.mode_a, self.mode_b) >= num_modes:
            raise IndexError(
                f"splitter on modes ({self.mode_a}, {self.mode_b}) does not fit {num_modes} modes"
            )
        u = np.eye(num_modes, dtype=complex)
        b = bs_unitary(self.theta)
        ix = [self.mode_a, self.mode_b]
        u[np.ix_(ix, ix)] = b
        return u


@dataclass(frozen=True)
class ModeUnitary:
    """d x d matrix acting on the mode operators (column j: image of input mode j)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError(f"mode unitary must be square and non-empty, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def num_modes(self) -> int:
        return self.matrix.shape[0]

    def unitarity_error(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m.conj().T @ m - np.eye(self.num_modes))))


@dataclass(frozen=True)
class NetworkSpec:
    num_modes: int
    elements: tuple[BeamSplitter, ...] = ()

    def __post_init__(self):
        if self.num_modes < 1:
            raise ValueError("a network needs at least one mode")
        els = tuple(self.elements)
        for el in els:
            if max(el.mode_a, el.mode_b) >= self.num_modes:
                raise IndexError(
                    f"splitter on modes ({el.mode_a}, {el.mode_b}) does not fit {self.num_modes} modes"
                )
        object.__setattr__(self, "elements", els)

    @property
    def angles(self) -> np.ndarray:
        return np.array([el.theta for el in self.elements])

    def with_angles(self, angles: Sequence[float]) -> "NetworkSpec":
        """Same wiring, new angles."""
        if len(angles) != len(self.elements):
            raise ValueError(f"expected {len(self.elements)} angles, got {len(angles)}")
        return NetworkSpec(
            self.num_modes,
            tuple(BeamSplitter(el.mode_a, el.mode_b, t) for el, t in zip(self.elements, angles)),
        )

    def inverse(self) -> "NetworkSpec":
        """Reversed element order with negated angles."""
        return NetworkSpec(
            self.num_modes,
            tuple(BeamSplitter(el.mode_a, el.mode_b, -el.theta) for el in reversed(self.elements)),
        )

    def to_text(self) -> str:
        lines = [f"version {FORMAT_VERSION}", f"modes {self.num_modes}"]
        lines += [f"bs {el.mode_a} {el.mode_b} {el.theta:.17g}" for el in self.elements]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "NetworkSpec":
        num_modes = None
        elements = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, *args = line.split()
            if key == "version":
                if int(args[0]) != FORMAT_VERSION:
                    raise ValueError(f"unsupported network format version {args[0]}")
            elif key == "modes":
                num_modes = int(args[0])
            elif key == "bs":
                if num_modes is None:
                    raise ValueError(f"line {lineno}: 'bs' before 'modes' header")
                if len(args) != 3:
                    raise ValueError(f"line {lineno}: expected 'bs <a> <b> <theta>'")
                elements.append(BeamSplitter(int(args[0]), int(args[1]), float(args[2])))
            else:
                raise ValueError(f"line {lineno}: unknown directive {key!r}")
        if num_modes is None:
            raise ValueError("missing 'modes' header")
        return cls(num_modes, tuple(elements))


def compose(spec: NetworkSpec) -> ModeUnitary:
    """Mode unitary of the whole network; the first element acts first."""
    u = np.eye(spec.num_modes, dtype=complex)
    for el in spec.elements:
        u = el.embedded(spec.num_modes) @ u
    return ModeUnitary(u)


def network_from_pairs(num_modes: int, pairs: Iterable[tuple[int, int]], angles: Iterable[float]) -> NetworkSpec:
    return NetworkSpec(num_modes, tuple(BeamSplitter(a, b, t) for (a, b), t in zip(pairs, angles)))


# Fig.-2 style three-splitter wiring: A on the ancilla pair, B couples the
# signal to the first ancilla, C repeats A's pair.
SU3_PAIRS = ((1, 2), (0, 1), (1, 2))


def su3_template(theta_a: float, theta_b: float, theta_c: float) -> NetworkSpec:
    """Three-mode network A(1,2) -> B(0,1) -> C(1,2) with free angles."""
    return network_from_pairs(3, SU3_PAIRS, (theta_a, theta_b, theta_c))


def ns_angles() -> tuple[float, float]:
    """Angles with cos^2 t1 = 1/(4 - 2 sqrt 2) and cos^2 t2 = 3 - 2 sqrt 2.

    ``t2`` is taken on the branch with negative transmittivity amplitude,
    which is the one giving the sign flip on |2> in the A-B-A wiring.
    """
    r2 = math.sqrt(2.0)
    t1 = math.acos(math.sqrt(1.0 / (4.0 - 2.0 * r2)))
    t2 = math.pi - math.acos(math.sqrt(3.0 - 2.0 * r2))
    return t1, t2


def ns_canonical() -> NetworkSpec:
    """The three-mode nonlinear sign-shift network with its textbook angles.

    Splitter t1 on the ancilla pair, t2 between signal and first ancilla,
    then t1 again on the ancilla pair.  With ancilla |1,0> and detection
    |1,0> the signal picks up ``(1/2)(c0|0> + c1|1> - c2|2>)``.
    """
    t1, t2 = ns_angles()
    return su3_template(t1, t2, t1)
