"""Sparse multi-directional scanning plans and constant-modulus beams."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .arrays import ArrayConfig, cascade_dictionary, dft_dictionary
from .errors import InvalidParameterError

IDEAL_SPARSE = "ideal-sparse"
CONSTANT_MODULUS = "constant-modulus"


@dataclass(frozen=True)
class CMResult:
    """Outcome of the unit-modulus beam optimization."""

    v: np.ndarray
    objectives: np.ndarray
    converged: bool


@dataclass(frozen=True)
class RoundEncoding:
    """One full-coverage round: two index partitions plus amplitudes.

    c_supports partitions {0..M-1} into U sets of size Q; a_supports
    partitions {0..N_t-1} into V sets of size R. row_bin/col_bin are the
    inverse maps used by the decoder (row i is sensed by IRS bin
    row_bin[i], column j by precoder col_bin[j]). c_mat/a_mat hold the
    beamspace coefficient vectors so a round of measurements is
    |c_mat^H Lambda a_mat + N|; v_beams/f_beams are the physical beams.
    """

    c_supports: tuple[np.ndarray, ...]
    a_supports: tuple[np.ndarray, ...]
    c_design: tuple[np.ndarray, ...]
    beta: float
    gamma: float
    row_bin: np.ndarray
    col_bin: np.ndarray
    c_mat: np.ndarray = field(repr=False)
    a_mat: np.ndarray = field(repr=False)
    v_beams: np.ndarray = field(repr=False)
    f_beams: np.ndarray = field(repr=False)

    @property
    def u(self) -> int:
        return len(self.c_supports)

    @property
    def v(self) -> int:
        return len(self.a_supports)


@dataclass(frozen=True)
class ScanPlan:
    """L independently randomized rounds of full-coverage scanning."""

    cfg: ArrayConfig
    q: int
    mode: str
    seed: int | None
    rounds: tuple[RoundEncoding, ...]

    @property
    def l(self) -> int:
        return len(self.rounds)

    @property
    def total_measurements(self) -> int:
        return sum(r.u * r.v for r in self.rounds)


def _random_partition(n: int, size: int, rng: np.random.Generator):
    perm = rng.permutation(n)
    return tuple(np.sort(perm[k : k + size]) for k in range(0, n, size))


def _project_unit(v: np.ndarray) -> np.ndarray:
    # repeated renormalization drives every |v_i| to exactly 1.0 in floats
    for _ in range(4):
        a = np.abs(v)
        if np.all(a == 1.0):
            break
        v = v / a
    return v


def optimize_constant_modulus(
    selected: np.ndarray,
    max_iters: int = 200,
    tol: float = 1e-6,
    step0: float = 1.0,
) -> CMResult:
    """Maximize sum_q log2(1 + |v^H p_q|^2) over unit-modulus v.

    `selected` is the M x Q matrix of target dictionary columns. Projected
    gradient ascent on the per-entry unit circle with backtracking: compute
    the Euclidean gradient, remove its radial component, step, renormalize
    every entry to unit modulus. The accepted objective sequence is
    non-decreasing; init is the phase of the summed columns.
    """
    p = np.asarray(selected)
    m = p.shape[0]
    s = p.sum(axis=1)
    v = np.where(np.abs(s) > 0, np.exp(1j * np.angle(s)), 1.0 + 0j)

    def objective(v):
        return float(np.sum(np.log2(1.0 + np.abs(p.conj().T @ v) ** 2)))

    objs = [objective(v)]
    converged = False
    step = step0 * m
    for _ in range(max_iters):
        inner = p.conj().T @ v  # (Q,)
        # Wirtinger gradient of the objective w.r.t. conj(v).
        egrad = p @ (inner / (1.0 + np.abs(inner) ** 2))
        rgrad = egrad - np.real(egrad * np.conj(v)) * v
        gnorm = np.linalg.norm(rgrad)
        if gnorm == 0:
            converged = True
            break
        accepted = False
        trial_step = step
        for _ in range(30):
            cand = v + trial_step * rgrad
            cand = np.where(np.abs(cand) > 0, cand / np.abs(cand), v)
            obj = objective(cand)
            if obj > objs[-1]:
                accepted = True
                break
            trial_step *= 0.5
        if not accepted:
            converged = True
            break
        v = cand
        step = trial_step * 2.0
        objs.append(obj)
        if obj - objs[-2] < tol * max(1.0, abs(objs[-2])):
            converged = True
            break
    return CMResult(v=_project_unit(v), objectives=np.array(objs), converged=converged)


def effective_support(v: np.ndarray, q: int, bar_d: np.ndarray) -> np.ndarray:
    """Indices of the q largest |barD_R^H v| entries, lowest index on ties."""
    c = np.abs(bar_d.conj().T @ v)
    # stable sort on (-magnitude, index) gives lowest-index tie-breaks
    order = np.argsort(-c, kind="stable")
    return np.sort(order[:q])


def _assign_bins(c_mat: np.ndarray, supports: tuple[np.ndarray, ...]) -> np.ndarray:
    """Map each row index to the bin whose support claims it.

    Effective supports of optimized beams need not partition the grid;
    contested or orphaned indices go to the bin sensing them most strongly.
    """
    m, u = c_mat.shape
    mag = np.abs(c_mat)
    owner = np.full(m, -1, dtype=int)
    claims = np.zeros(m, dtype=int)
    for ui, sup in enumerate(supports):
        claims[sup] += 1
        owner[sup] = ui
    contested = claims != 1
    if np.any(contested):
        owner[contested] = np.argmax(mag[contested], axis=1)
    return owner


def build_round(
    cfg: ArrayConfig,
    q: int,
    rng: np.random.Generator,
    mode: str = IDEAL_SPARSE,
) -> RoundEncoding:
    """One uniformly random full-coverage round of U x V measurements."""
    m, n_t, r = cfg.m, cfg.n_t, cfg.r
    if q < 1 or m % q != 0:
        raise InvalidParameterError(f"bin size q={q} must divide M={m}")
    if n_t % r != 0:
        raise InvalidParameterError(f"RF chains r={r} must divide N_t={n_t}")
    if mode not in (IDEAL_SPARSE, CONSTANT_MODULUS):
        raise InvalidParameterError(f"unknown plan mode {mode!r}")

    c_design = _random_partition(m, q, rng)
    a_supports = _random_partition(n_t, r, rng)
    beta = np.sqrt(m / q)
    gamma = 1.0 / np.sqrt(r)

    a_mat = np.zeros((n_t, len(a_supports)), dtype=complex)
    for vi, sup in enumerate(a_supports):
        a_mat[sup, vi] = gamma
    f_beams = dft_dictionary(n_t) @ a_mat

    bar_d = cascade_dictionary(cfg)
    if mode == IDEAL_SPARSE:
        c_supports = c_design
        c_mat = np.zeros((m, len(c_supports)), dtype=complex)
        for ui, sup in enumerate(c_supports):
            c_mat[sup, ui] = beta
        v_beams = bar_d @ c_mat
    else:
        v_beams = np.empty((m, len(c_design)), dtype=complex)
        for ui, sup in enumerate(c_design):
            v_beams[:, ui] = optimize_constant_modulus(bar_d[:, sup]).v
        c_mat = bar_d.conj().T @ v_beams
        c_supports = tuple(
            effective_support(v_beams[:, ui], q, bar_d)
            for ui in range(v_beams.shape[1])
        )
    row_bin = _assign_bins(c_mat, c_supports)

    col_bin = _assign_bins(a_mat, a_supports)
    return RoundEncoding(
        c_supports=c_supports,
        a_supports=a_supports,
        c_design=c_design,
        beta=float(beta),
        gamma=float(gamma),
        row_bin=row_bin,
        col_bin=col_bin,
        c_mat=c_mat,
        a_mat=a_mat,
        v_beams=v_beams,
        f_beams=f_beams,
    )


def build_scan_plan(
    cfg: ArrayConfig,
    q: int,
    l: int,
    mode: str = IDEAL_SPARSE,
    rng: np.random.Generator | int | None = None,
) -> ScanPlan:
    """L independently randomized rounds; total budget T = U*V*L."""
    if l < 1:
        raise InvalidParameterError("at least one round is required")
    seed = rng if isinstance(rng, int) else None
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    rounds = tuple(build_round(cfg, q, rng, mode) for _ in range(l))
    return ScanPlan(cfg=cfg, q=q, mode=mode, seed=seed, rounds=rounds)


def plan_to_json(plan: ScanPlan) -> str:
    """Serialize the plan; supports, amplitudes, mode and seed are enough
    to reproduce the physical beams exactly (the beam solver is
    deterministic given a support set)."""
    doc = {
        "n_t": plan.cfg.n_t,
        "m_y": plan.cfg.m_y,
        "m_z": plan.cfg.m_z,
        "r": plan.cfg.r,
        "spacing_ratio": plan.cfg.spacing_ratio,
        "q": plan.q,
        "mode": plan.mode,
        "seed": plan.seed,
        "rounds": [
            {
                "c_design": [s.tolist() for s in rnd.c_design],
                "c_supports": [s.tolist() for s in rnd.c_supports],
                "a_supports": [s.tolist() for s in rnd.a_supports],
                "beta": rnd.beta,
                "gamma": rnd.gamma,
            }
            for rnd in plan.rounds
        ],
    }
    return json.dumps(doc, indent=2)


def plan_from_json(text: str) -> ScanPlan:
    """Rebuild a plan (including physical beams) from its serialized form."""
    doc = json.loads(text)
    cfg = ArrayConfig(
        n_t=doc["n_t"], m_y=doc["m_y"], m_z=doc["m_z"], r=doc["r"],
        spacing_ratio=doc["spacing_ratio"],
    )
    q, mode = doc["q"], doc["mode"]
    bar_d = cascade_dictionary(cfg)
    d_nt = dft_dictionary(cfg.n_t)
    rounds = []
    for rnd in doc["rounds"]:
        a_supports = tuple(np.asarray(s, dtype=int) for s in rnd["a_supports"])
        gamma = rnd["gamma"]
        a_mat = np.zeros((cfg.n_t, len(a_supports)), dtype=complex)
        for vi, sup in enumerate(a_supports):
            a_mat[sup, vi] = gamma
        c_design = tuple(np.asarray(s, dtype=int) for s in rnd["c_design"])
        beta = rnd["beta"]
        if mode == IDEAL_SPARSE:
            c_supports = c_design
            c_mat = np.zeros((cfg.m, len(c_supports)), dtype=complex)
            for ui, sup in enumerate(c_supports):
                c_mat[sup, ui] = beta
            v_beams = bar_d @ c_mat
        else:
            v_beams = np.empty((cfg.m, len(c_design)), dtype=complex)
            for ui, sup in enumerate(c_design):
                v_beams[:, ui] = optimize_constant_modulus(bar_d[:, sup]).v
            c_mat = bar_d.conj().T @ v_beams
            c_supports = tuple(
                effective_support(v_beams[:, ui], q, bar_d)
                for ui in range(v_beams.shape[1])
            )
        rounds.append(
            RoundEncoding(
                c_supports=c_supports,
                a_supports=a_supports,
                c_design=c_design,
                beta=beta,
                gamma=gamma,
                row_bin=_assign_bins(c_mat, c_supports),
                col_bin=_assign_bins(a_mat, a_supports),
                c_mat=c_mat,
                a_mat=a_mat,
                v_beams=v_beams,
                f_beams=d_nt @ a_mat,
            )
        )
    return ScanPlan(cfg=cfg, q=q, mode=mode, seed=doc["seed"], rounds=tuple(rounds))
