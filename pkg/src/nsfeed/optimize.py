"""Beam-splitter angle optimization for heralded gates and feed-forward chains.

Every problem is a set of networks with free angles plus a list of
*branches*.  A branch is a run of detection events (network, ancilla input,
detected pattern), optionally preceded by a fixed conditional map; its
composed signal map must be proportional to the target transformation, and
its worst-case probability (the common ``|c_n / t_n|^2``) adds to the
objective.  Constraints enter through a quadratic penalty that is tightened
over several rounds of Nelder-Mead, restarted from many seeded points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import least_squares, minimize

from ._backend import kernels
from .analysis import NS_TARGET, ancilla_patterns, conditional_map, failure_stats, enumerate_outcomes
from .fock import ConditionalMap, FockState, as_fock
from .network import NetworkSpec, compose, su3_template

TWO_PI = 2.0 * math.pi
FEASIBLE_RESIDUAL = 1e-8
MIN_OBJECTIVE = 1e-10


class InfeasibleError(RuntimeError):
    """No restart reached a point satisfying the gate constraint."""

    def __init__(self, message: str, best: "OptimizationResult | None" = None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 64
    seed: int = 0
    penalty_schedule: tuple[float, ...] = (1e2, 1e4, 1e6, 1e8)
    maxiter: int = 400
    abandon_residual: float = 1e-2
    xatol: float = 1e-10
    fatol: float = 1e-15  # scaled by the penalty weight
    tolerance: float = FEASIBLE_RESIDUAL

    @classmethod
    def from_mapping(cls, values: dict) -> "OptimizerConfig":
        """Build from string key-value pairs such as ``{"restarts": "8"}``."""
        kw = {}
        for key, val in values.items():
            key = key.replace("-", "_")
            if key in ("restarts", "seed", "maxiter"):
                kw[key] = int(val)
            elif key in ("xatol", "fatol", "tolerance", "abandon_residual"):
                kw[key] = float(val)
            elif key == "penalty_schedule":
                if isinstance(val, str):
                    val = [float(v) for v in val.split(",")]
                kw[key] = tuple(float(v) for v in val)
            else:
                raise KeyError(f"unknown optimizer option {key!r}")
        return cls(**kw)


@dataclass(frozen=True)
class Step:
    network: int
    ancilla_in: FockState
    pattern: FockState

    def __post_init__(self):
        object.__setattr__(self, "ancilla_in", as_fock(self.ancilla_in))
        object.__setattr__(self, "pattern", as_fock(self.pattern))

    @property
    def delta(self) -> int:
        return self.ancilla_in.total_photons - self.pattern.total_photons


@dataclass(frozen=True)
class Branch:
    steps: tuple[Step, ...]
    prefix: ConditionalMap | None = None
    name: str = ""


@dataclass(frozen=True)
class OptimizationProblem:
    templates: tuple[NetworkSpec, ...]
    branches: tuple[Branch, ...]
    target: tuple[complex, ...] = NS_TARGET
    warm_starts: tuple[tuple[float, ...], ...] = ()

    def __post_init__(self):
        t = np.asarray(self.target, dtype=complex)
        if np.any(np.abs(t) == 0):
            raise ValueError("target entries must be nonzero")
        object.__setattr__(self, "templates", tuple(self.templates))
        object.__setattr__(self, "branches", tuple(self.branches))

    @property
    def n_max(self) -> int:
        return len(self.target) - 1

    @property
    def sizes(self) -> list[int]:
        return [len(t.elements) for t in self.templates]

    @property
    def dim(self) -> int:
        return sum(self.sizes)

    def networks(self, angles: Sequence[float]) -> list[NetworkSpec]:
        out, k = [], 0
        for t, n in zip(self.templates, self.sizes):
            out.append(t.with_angles(angles[k : k + n]))
            k += n
        return out

    def matrices(self, angles: Sequence[float]) -> list[np.ndarray]:
        out, k = [], 0
        for t, n in zip(self.templates, self.sizes):
            pairs = [(el.mode_a, el.mode_b) for el in t.elements]
            out.append(kernels.compose_rotations(t.num_modes, pairs, angles[k : k + n]))
            k += n
        return out


@dataclass(frozen=True)
class OptimizationResult:
    angles: np.ndarray
    objective_value: float
    constraint_residual: float
    restarts_used: int
    seed: int
    branch_values: tuple[float, ...] = ()
    average_value: float = 0.0
    pattern: FockState | None = None
    feasible: bool = True

    def networks(self, problem: OptimizationProblem) -> list[NetworkSpec]:
        return problem.networks(self.angles)


# --- objective pieces -----------------------------------------------------------


def proportionality_residual(map_, target: Sequence[complex]) -> float:
    """Distance of a map's amplitudes from the ray spanned by ``target``.

    Both vectors are scaled to unit norm and the best complex scale is
    projected out, so the value is insensitive to normalization and global
    phase: 0 means exactly proportional, 1 means orthogonal (or a zero map).
    """
    a = np.asarray(map_.amplitudes if isinstance(map_, ConditionalMap) else map_, dtype=complex)
    t = np.asarray(target, dtype=complex)
    if a.shape != t.shape:
        raise ValueError(f"map has {a.size} amplitudes, target has {t.size}")
    na = np.linalg.norm(a)
    if na == 0.0:
        return 1.0
    overlap = abs(np.vdot(t, a)) ** 2 / (na**2 * np.linalg.norm(t) ** 2)
    return float(max(0.0, 1.0 - overlap))


def branch_amplitudes(branch: Branch, matrices: Sequence[np.ndarray], n_max: int) -> np.ndarray:
    """Composite amplitudes ``c_n`` of a branch for signal inputs n = 0..n_max."""
    if branch.prefix is not None:
        amps = np.array(branch.prefix.amplitudes, dtype=complex)
        delta = branch.prefix.delta
    else:
        amps = np.ones(n_max + 1, dtype=complex)
        delta = 0
    for step in branch.steps:
        top = len(amps) - 1 + delta
        if top < 0:
            return np.zeros_like(amps)
        b = kernels.conditional_amplitudes(
            matrices[step.network], step.ancilla_in.occupations, step.pattern.occupations, top
        )
        for n in range(len(amps)):
            m = n + delta
            amps[n] = amps[n] * b[m] if m >= 0 else 0.0
        delta += step.delta
    return amps


def _evaluate(problem: OptimizationProblem, angles) -> tuple[list[np.ndarray], np.ndarray]:
    mats = problem.matrices(angles)
    return [branch_amplitudes(b, mats, problem.n_max) for b in problem.branches], mats


def measure(problem: OptimizationProblem, angles) -> dict:
    """Objective, residual and per-branch values at ``angles``."""
    t = np.asarray(problem.target, dtype=complex)
    comps, _ = _evaluate(problem, angles)
    worst = [float(np.min(np.abs(c / t) ** 2)) for c in comps]
    avg = [float(np.mean(np.abs(c) ** 2)) for c in comps]
    res = [proportionality_residual(c, t) for c in comps]
    return {
        "objective": sum(worst),
        "average": sum(avg),
        "residual": max(res) if res else 0.0,
        "branch_values": tuple(worst),
    }


def _encode_branches(problem: OptimizationProblem) -> list[tuple]:
    out = []
    for br in problem.branches:
        nets = np.array([s.network for s in br.steps], dtype=np.int_)
        ancs = np.array([s.ancilla_in.occupations for s in br.steps], dtype=np.int_)
        pats = np.array([s.pattern.occupations for s in br.steps], dtype=np.int_)
        if br.prefix is not None:
            pre, pd = np.array(br.prefix.amplitudes, dtype=complex), br.prefix.delta
        else:
            pre, pd = np.ones(problem.n_max + 1, dtype=complex), 0
        out.append((nets, ancs.reshape(len(nets), -1), pats.reshape(len(nets), -1), pre, int(pd)))
    return out


def _penalized(problem: OptimizationProblem, weight: float) -> Callable[[np.ndarray], float]:
    t = np.asarray(problem.target, dtype=complex)
    if len({tpl.num_modes for tpl in problem.templates}) == 1:
        enc = _encode_branches(problem)

        def fast(x):
            return kernels.penalized_objective(np.stack(problem.matrices(x)), enc, t, weight)

        return fast
    tw = 1.0 / np.abs(t) ** 2

    def f(x):
        comps, _ = _evaluate(problem, x)
        gain = 0.0
        pen = 0.0
        for c in comps:
            gain += float(np.mean(np.abs(c) ** 2 * tw))
            pen += proportionality_residual(c, t)
        return -gain + weight * pen

    return f


def _local(problem: OptimizationProblem, x0: np.ndarray, cfg: OptimizerConfig) -> np.ndarray:
    x = np.array(x0, dtype=float)
    for w in cfg.penalty_schedule:
        r = minimize(
            _penalized(problem, w),
            x,
            method="Nelder-Mead",
            options={
                "maxiter": cfg.maxiter * problem.dim,
                "xatol": cfg.xatol,
                "fatol": cfg.fatol * max(1.0, w),
                "adaptive": problem.dim > 3,
            },
        )
        x = r.x
        # a start stuck on an infeasible plateau after the first round is dropped
        if measure(problem, x)["residual"] > cfg.abandon_residual:
            break
    return np.mod(x, TWO_PI)


def _better(a: tuple, b: tuple | None) -> bool:
    # (objective, angles); higher objective wins, ties -> lexicographically smaller angles
    if b is None:
        return True
    if a[0] > b[0] + 1e-12:
        return True
    if abs(a[0] - b[0]) <= 1e-12:
        return tuple(np.round(a[1], 12)) < tuple(np.round(b[1], 12))
    return False


def solve(problem: OptimizationProblem, config: OptimizerConfig | None = None) -> OptimizationResult:
    """Multi-start penalty optimization; raises :class:`InfeasibleError` if nothing is feasible."""
    cfg = config or OptimizerConfig()
    rng = np.random.default_rng(cfg.seed)
    starts = [np.asarray(w, dtype=float) for w in problem.warm_starts]
    starts += [rng.uniform(0.0, TWO_PI, problem.dim) for _ in range(cfg.restarts)]
    best_feasible = None
    best_any = None
    for x0 in starts:
        x = _local(problem, x0, cfg)
        m = measure(problem, x)
        cand = (m["objective"], x, m)
        if m["residual"] <= cfg.tolerance and m["objective"] > MIN_OBJECTIVE:
            if _better(cand, best_feasible):
                best_feasible = cand
        score = (-m["residual"], x, m)
        if _better(score, best_any):
            best_any = score
    chosen = best_feasible or best_any
    _, x, m = chosen
    result = OptimizationResult(
        angles=x,
        objective_value=m["objective"],
        constraint_residual=m["residual"],
        restarts_used=len(starts),
        seed=cfg.seed,
        branch_values=m["branch_values"],
        average_value=m["average"],
        feasible=best_feasible is not None,
    )
    if best_feasible is None:
        raise InfeasibleError(
            f"no feasible point after {len(starts)} starts (best residual {m['residual']:.3g})", result
        )
    return result


# --- problem builders -------------------------------------------------------------


def single_problem(
    template: NetworkSpec,
    ancilla_in,
    success_pattern,
    target: Sequence[complex] = NS_TARGET,
    warm_starts: Sequence[Sequence[float]] = (),
) -> OptimizationProblem:
    return OptimizationProblem(
        (template,),
        (Branch((Step(0, ancilla_in, success_pattern),), name="success"),),
        tuple(target),
        tuple(tuple(w) for w in warm_starts),
    )


def optimize_single(
    template: NetworkSpec,
    ancilla_in,
    success_pattern=None,
    target: Sequence[complex] = NS_TARGET,
    config: OptimizerConfig | None = None,
    warm_starts: Sequence[Sequence[float]] = (),
) -> OptimizationResult:
    """Maximize the heralded success probability subject to map ∝ target.

    With ``success_pattern=None`` every pattern that keeps the photon number
    is tried and the best one is returned.
    """
    anc = as_fock(ancilla_in)
    if success_pattern is None:
        candidates = [p for p in ancilla_patterns(anc.num_modes, anc.total_photons)
                      if p.total_photons == anc.total_photons]
    else:
        candidates = [as_fock(success_pattern)]
    return _best_over_patterns(
        lambda p: single_problem(template, anc, p, target, warm_starts), candidates, config
    )


def _best_over_patterns(build, candidates, config) -> OptimizationResult:
    best = None
    last_err = None
    for pat in candidates:
        try:
            r = replace(solve(build(pat), config), pattern=pat)
        except InfeasibleError as err:
            last_err = err
            continue
        if best is None or r.objective_value > best.objective_value + 1e-12:
            best = r
    if best is None:
        raise InfeasibleError(f"infeasible for every candidate pattern: {last_err}", last_err.best if last_err else None)
    return best


def correction_problem(
    syndrome: ConditionalMap,
    template: NetworkSpec,
    ancilla_in,
    pattern,
    target: Sequence[complex] = NS_TARGET,
    warm_starts: Sequence[Sequence[float]] = (),
) -> OptimizationProblem:
    return OptimizationProblem(
        (template,),
        (Branch((Step(0, ancilla_in, pattern),), prefix=syndrome, name="corrected"),),
        tuple(target),
        tuple(tuple(w) for w in warm_starts),
    )


def correction_patterns(syndrome: ConditionalMap, ancilla_in) -> list[FockState]:
    """Detection patterns that undo the syndrome's photon-number shift."""
    anc = as_fock(ancilla_in)
    need = anc.total_photons + syndrome.delta
    if need < 0:
        return []
    return [p for p in ancilla_patterns(anc.num_modes, need) if p.total_photons == need]


def optimize_correction(
    syndrome: ConditionalMap,
    template: NetworkSpec,
    ancilla_in,
    candidate_patterns=None,
    target: Sequence[complex] = NS_TARGET,
    config: OptimizerConfig | None = None,
    warm_starts: Sequence[Sequence[float]] = (),
) -> OptimizationResult:
    """Best correction network for a syndrome branch.

    The objective is the probability the corrected branch adds to the gate:
    the common ``|syndrome_n * correction_n|^2`` once their composition is
    proportional to the target.
    """
    if np.any(np.abs(syndrome.amplitudes) < 1e-14):
        raise ValueError("syndrome map destroys information; nothing to correct")
    if candidate_patterns is None:
        candidate_patterns = correction_patterns(syndrome, ancilla_in)
    cands = [as_fock(p) for p in candidate_patterns]
    if not cands:
        raise InfeasibleError("no detection pattern can restore the photon number")
    return _best_over_patterns(
        lambda p: correction_problem(syndrome, template, ancilla_in, p, target, warm_starts),
        cands,
        config,
    )


@dataclass(frozen=True)
class ChainConfig:
    """Layout of a feed-forward chain.

    The first network heralds on ``success_pattern``; the branch heralded by
    ``preserving_pattern`` is corrected by a second network and, when
    ``correct_adding`` is set, the ``adding_pattern`` branch by a third.
    """

    ancilla_in: FockState = FockState((1, 0))
    success_pattern: FockState = FockState((1, 0))
    preserving_pattern: FockState = FockState((0, 1))
    adding_pattern: FockState = FockState((0, 0))
    second_success: FockState = FockState((1, 0))
    third_success: FockState = FockState((2, 0))
    use_second: bool = True
    correct_adding: bool = True
    target: tuple[complex, ...] = NS_TARGET


def chain_problem(
    first_template: NetworkSpec,
    second_template: NetworkSpec,
    config: ChainConfig = ChainConfig(),
    third_template: NetworkSpec | None = None,
    warm_starts: Sequence[Sequence[float]] = (),
) -> OptimizationProblem:
    c = config
    templates = [first_template]
    branches = [Branch((Step(0, c.ancilla_in, c.success_pattern),), name="success")]
    if c.use_second:
        templates.append(second_template)
        branches.append(
            Branch(
                (Step(0, c.ancilla_in, c.preserving_pattern), Step(1, c.ancilla_in, c.second_success)),
                name="preserving_corrected",
            )
        )
        if c.correct_adding:
            templates.append(third_template or second_template)
            branches.append(
                Branch(
                    (Step(0, c.ancilla_in, c.adding_pattern), Step(2, c.ancilla_in, c.third_success)),
                    name="adding_corrected",
                )
            )
    return OptimizationProblem(tuple(templates), tuple(branches), tuple(c.target),
                               tuple(tuple(w) for w in warm_starts))


def optimize_chain(
    first_template: NetworkSpec,
    second_template: NetworkSpec,
    config: ChainConfig = ChainConfig(),
    optimizer: OptimizerConfig | None = None,
    third_template: NetworkSpec | None = None,
    warm_starts: Sequence[Sequence[float]] = (),
) -> OptimizationResult:
    """Jointly optimize all angles of a feed-forward chain.

    With ``correct_adding`` the search is staged: the two-network chain is
    solved first, the photon-adding branch of its first network gets its own
    best correction, and the concatenated angles seed a joint refinement.
    Random restarts are spent only on the first stage.
    """
    opt = optimizer or OptimizerConfig()
    problem = chain_problem(first_template, second_template, config, third_template, warm_starts)
    if not (config.use_second and config.correct_adding):
        return solve(problem, opt)
    third = third_template or second_template
    stage1 = solve(chain_problem(first_template, second_template, replace(config, correct_adding=False)), opt)
    k1 = len(first_template.elements)
    used = stage1.restarts_used
    seeds = [tuple(w) for w in warm_starts]
    syndrome = conditional_map(first_template.with_angles(stage1.angles[:k1]), config.ancilla_in,
                               config.adding_pattern, len(config.target) - 1)
    try:
        corr = solve(correction_problem(syndrome, third, config.ancilla_in, config.third_success,
                                        config.target), opt)
        used += corr.restarts_used
        seeds.insert(0, tuple(stage1.angles) + tuple(corr.angles))
    except InfeasibleError:
        pass
    if not seeds:
        return solve(problem, opt)
    joint = solve(replace(problem, warm_starts=tuple(seeds)), replace(opt, restarts=0))
    return replace(joint, restarts_used=used + joint.restarts_used)


def chain_failure(problem: OptimizationProblem, angles) -> np.ndarray:
    """Irrecoverable probability of the whole feed-forward tree, per Fock input.

    Every network application contributes the detection patterns that leave
    the signal with fewer photons than it started with (net shift < 0),
    weighted by the probability of the events that led to it.
    """
    mats = problem.matrices(angles)
    n_max = problem.n_max
    q = np.zeros(n_max + 1)
    seen = set()
    for br in problem.branches:
        for i, step in enumerate(br.steps):
            key = (id(br.prefix), br.steps[:i], step.network, step.ancilla_in)
            if key in seen:
                continue
            seen.add(key)
            amps = branch_amplitudes(Branch(br.steps[:i], br.prefix), mats, n_max)
            shift = (br.prefix.delta if br.prefix is not None else 0) + sum(s.delta for s in br.steps[:i])
            top = n_max + max(shift, 0)
            for pat in ancilla_patterns(step.ancilla_in.num_modes, top + step.ancilla_in.total_photons):
                d = step.ancilla_in.total_photons - pat.total_photons
                if shift + d >= 0:
                    continue
                b = kernels.conditional_amplitudes(
                    mats[step.network], step.ancilla_in.occupations, pat.occupations, top
                )
                for n in range(n_max + 1):
                    m = n + shift
                    if m >= 0:
                        q[n] += abs(amps[n]) ** 2 * abs(b[m]) ** 2
    return q


def chain_two_network_failure(problem: OptimizationProblem, angles) -> np.ndarray:
    """Irrecoverable probability of the first network plus its |0,1>-correction only.

    This is the tree spanned by the first two branches of a chain problem,
    i.e. the chain whose success is ``p1 + p01 * p2``.
    """
    sub = replace(problem, templates=problem.templates[:2], branches=problem.branches[:2])
    return chain_failure(sub, np.asarray(angles)[: sum(sub.sizes)])


@dataclass(frozen=True)
class SecondRound:
    """Exploratory corrections of the syndromes left by the correction networks."""

    base_total: float
    added: float
    corrections: tuple[tuple[str, FockState, OptimizationResult], ...]

    @property
    def total(self) -> float:
        return self.base_total + self.added

    @property
    def relative_change(self) -> float:
        return self.added / self.base_total if self.base_total else math.inf


def second_round(
    problem: OptimizationProblem,
    result: OptimizationResult,
    template: NetworkSpec,
    ancilla_in=FockState((1, 0)),
    config: OptimizerConfig | None = None,
) -> SecondRound:
    """Correct the information-preserving syndromes of every correction step.

    For each multi-step branch of ``problem`` the last network's other
    detection patterns with the same photon count as its success pattern
    are composed with the preceding events; each resulting syndrome that
    keeps all amplitudes gets its own best correction network.
    """
    mats = problem.matrices(result.angles)
    found = []
    added = 0.0
    for br in problem.branches:
        if len(br.steps) < 2:
            continue
        last = br.steps[-1]
        head = Branch(br.steps[:-1], br.prefix)
        pre = branch_amplitudes(head, mats, problem.n_max)
        shift = (br.prefix.delta if br.prefix is not None else 0) + sum(s.delta for s in head.steps)
        alts = [p for p in ancilla_patterns(last.ancilla_in.num_modes, last.pattern.total_photons)
                if p.total_photons == last.pattern.total_photons and p != last.pattern]
        for pat in alts:
            step = Step(last.network, last.ancilla_in, pat)
            amps = branch_amplitudes(Branch((step,), ConditionalMap(shift, tuple(pre))), mats, problem.n_max)
            if np.any(np.abs(amps) < 1e-12):
                continue
            syndrome = ConditionalMap(shift + step.delta, tuple(amps))
            try:
                corr = optimize_correction(syndrome, template, ancilla_in, target=problem.target, config=config)
            except InfeasibleError:
                continue
            found.append((br.name, pat, corr))
            added += corr.objective_value
    return SecondRound(result.objective_value, added, tuple(found))


# --- trade-off scan ----------------------------------------------------------------


@dataclass(frozen=True)
class ConstrainedFamily:
    """One-parameter family of a template anchored at a point where the success map ∝ target.

    ``free_index`` selects the angle that is scanned.  With ``resolve`` the
    remaining angles are re-solved from the constraint at every grid point
    (continuing from ``anchor``) and points where that fails are dropped;
    without it they stay at their anchor values.
    """

    template: NetworkSpec
    anchor: tuple[float, ...]
    free_index: int = 2
    ancilla_in: FockState = FockState((1, 0))
    success_pattern: FockState = FockState((1, 0))
    other_pattern: FockState = FockState((0, 1))
    target: tuple[complex, ...] = NS_TARGET
    resolve: bool = False


def _constraint_vec(fam: ConstrainedFamily, angles) -> np.ndarray:
    m = conditional_map(fam.template.with_angles(angles), fam.ancilla_in, fam.success_pattern,
                        len(fam.target) - 1).amplitudes
    t = np.asarray(fam.target, dtype=complex)
    r = m[1:] * t[0] - m[0] * t[1:]
    return np.concatenate([r.real, r.imag])


def _solve_family_point(fam: ConstrainedFamily, free_value: float, guess: np.ndarray) -> np.ndarray:
    idx = [i for i in range(len(guess)) if i != fam.free_index]

    def fun(y):
        x = np.array(guess, dtype=float)
        x[idx] = y
        x[fam.free_index] = free_value
        return _constraint_vec(fam, x)

    sol = least_squares(fun, np.asarray(guess)[idx], xtol=1e-15, ftol=1e-15, gtol=1e-15)
    x = np.array(guess, dtype=float)
    x[idx] = sol.x
    x[fam.free_index] = free_value
    return x


def tradeoff_scan(fam: ConstrainedFamily, grid: Sequence[float], tol: float = 1e-9) -> list[dict]:
    """Success and other-pattern probabilities along a family, one row per grid angle.

    ``p_success`` and ``p_other`` are uniform averages over the Fock inputs;
    the per-input values are kept alongside.  A family whose anchor violates
    the constraint raises ``ValueError``.
    """
    n_max = len(fam.target) - 1
    anchor = np.asarray(fam.anchor, dtype=float)
    m0 = conditional_map(fam.template.with_angles(anchor), fam.ancilla_in, fam.success_pattern, n_max)
    if proportionality_residual(m0, fam.target) > tol or np.all(np.abs(m0.amplitudes) < 1e-12):
        raise ValueError("anchor angles do not satisfy the gate constraint")
    grid = np.asarray(grid, dtype=float)
    start = int(np.argmin(np.abs(grid - anchor[fam.free_index])))
    rows: dict[int, dict] = {}
    for order in (range(start, len(grid)), range(start - 1, -1, -1)):
        guess = anchor.copy()
        for i in order:
            if fam.resolve:
                x = _solve_family_point(fam, grid[i], guess)
            else:
                x = anchor.copy()
                x[fam.free_index] = grid[i]
            net = fam.template.with_angles(x)
            s = conditional_map(net, fam.ancilla_in, fam.success_pattern, n_max)
            res = proportionality_residual(s, fam.target)
            if fam.resolve:
                if res > tol or np.max(np.abs(s.amplitudes)) < 1e-9:
                    continue
                guess = x
            o = conditional_map(net, fam.ancilla_in, fam.other_pattern, n_max)
            recs = enumerate_outcomes(net, fam.ancilla_in, fam.success_pattern, n_max)
            rows[i] = {
                "angle": float(grid[i]),
                "angles": x,
                "p_success": float(np.mean(s.probabilities())),
                "p_other": float(np.mean(o.probabilities())),
                "p_success_per_input": s.probabilities(),
                "p_other_per_input": o.probabilities(),
                "residual": res,
                "completeness": np.sum([r.per_fock_probability for r in recs], axis=0),
            }
    return [rows[i] for i in sorted(rows)]
