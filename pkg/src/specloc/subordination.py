"""p-subordination: ratios, the minimal bound b, and sampling verification.

S is p-subordinate to G with bound b when

    ||S u|| <= b ||u||^(1-p) ||G u||^p        for all u,  0 <= p < 1,

and ``subordination_bound`` estimates the minimal such b as the supremum of
the ratio over the unit sphere, by vectorized multi-start projected ascent.
For dimension <= 3 the result is cross-checked against an independent dense
sampling oracle on the sphere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import ConvergenceError, InputError

#: relative agreement required between ascent and the sampling oracle (n<=3)
ORACLE_RTOL = 1e-4

#: minimum number of oracle sample points
ORACLE_POINTS = 120_000


def _check_pair(s, g):
    g = numerics.as_matrix(g)
    s = np.array(s, dtype=complex)
    if s.ndim != 2 or s.shape[1] != g.shape[0]:
        raise InputError("S must have %d columns, got shape %r" % (g.shape[0], s.shape))
    if s.size and not np.all(np.isfinite(s)):
        raise InputError("S contains non-finite entries")
    return s, g


def subordination_ratio(s, g, p: float, u) -> float:
    """||S u|| / (||u||^(1-p) ||G u||^p) with the 0/0 -> 0 convention.

    Returns inf when p > 0, G u = 0 and S u != 0 (the bound cannot hold).
    """
    s, g = _check_pair(s, g)
    p = float(p)
    if not (0.0 <= p < 1.0):
        raise InputError("p must lie in [0, 1)")
    u = np.asarray(u, dtype=complex).reshape(-1)
    nu = float(np.linalg.norm(u))
    if nu == 0.0:
        raise InputError("u must be nonzero")
    su = float(np.linalg.norm(s @ u))
    if p == 0.0:
        return su / nu
    gu = float(np.linalg.norm(g @ u))
    if gu == 0.0:
        return 0.0 if su == 0.0 else math.inf
    return su / (nu ** (1.0 - p) * gu**p)


@dataclass(frozen=True)
class SubordinationResult:
    p: float
    bound: float
    witness: np.ndarray | None
    restarts: int
    converged: bool


def _column_ratios(s, g, p, u):
    """Ratio for each unit column of u (columns assumed normalized)."""
    su = np.linalg.norm(s @ u, axis=0)
    if p == 0.0:
        return su
    gu = np.linalg.norm(g @ u, axis=0)
    out = np.full(u.shape[1], np.inf)
    ok = gu > 0.0
    out[ok] = su[ok] / gu[ok] ** p
    out[(~ok) & (su == 0.0)] = 0.0
    return out


def _normalize_columns(u):
    norms = np.linalg.norm(u, axis=0)
    norms[norms == 0.0] = 1.0
    return u / norms


def _ascent(s, g, p, starts, tol, max_iter):
    """Vectorized multi-start projected gradient ascent of the ratio.

    Returns (best_ratio, best_vector, converged) where converged means the
    winning start stalled below tolerance rather than hitting the cap.
    """
    sh = s.conj().T
    gh = g.conj().T
    u = _normalize_columns(starts.copy())
    r = _column_ratios(s, g, p, u)
    step = np.full(u.shape[1], 0.1)
    stall = np.zeros(u.shape[1], dtype=int)
    hit_cap = True
    for _ in range(max_iter):
        active = (stall < 8) & (step > 1e-16) & (r > 0.0)
        if not np.any(active):
            hit_cap = False
            break
        ua = u[:, active]
        su = s @ ua
        nsu2 = np.linalg.norm(su, axis=0) ** 2
        nsu2[nsu2 == 0.0] = 1e-300
        grad = (sh @ su) / nsu2 - (1.0 - p) * ua
        if p > 0.0:
            gu = g @ ua
            ngu2 = np.linalg.norm(gu, axis=0) ** 2
            ngu2[ngu2 == 0.0] = 1e-300
            grad = grad - p * (gh @ gu) / ngu2
        cand = _normalize_columns(ua + step[active] * grad)
        rc = _column_ratios(s, g, p, cand)
        ra = r[active]
        better = rc > ra
        improved = rc > ra * (1.0 + tol)
        idx = np.flatnonzero(active)
        upd = idx[better]
        u[:, upd] = cand[:, better]
        r[upd] = rc[better]
        step[idx[better]] *= 1.5
        step[idx[~better]] *= 0.5
        st = stall[idx]
        st[improved] = 0
        st[~improved] += 1
        stall[idx] = st
    k = int(np.argmax(r))
    return float(r[k]), u[:, k].copy(), (not hit_cap) or stall[k] >= 8


def _sphere_oracle(s, g, p, n, seed, total=ORACLE_POINTS, rounds=8):
    """Derivative-free sampling oracle: dense random sphere sampling with
    shrinking local refinement around the incumbent."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(77,)))
    batch = max(total // (rounds + 1), 1)

    def sample(center=None, radius=1.0):
        z = rng.standard_normal((n, batch)) + 1j * rng.standard_normal((n, batch))
        if center is not None:
            z = center[:, None] + radius * z
        return _normalize_columns(z)

    u = sample()
    r = _column_ratios(s, g, p, u)
    k = int(np.argmax(r))
    best_r, best_u = float(r[k]), u[:, k].copy()
    radius = 1.0
    for _ in range(rounds):
        u = sample(best_u, radius)
        r = _column_ratios(s, g, p, u)
        k = int(np.argmax(r))
        if r[k] > best_r:
            best_r, best_u = float(r[k]), u[:, k].copy()
        radius *= 0.4
    return best_r, best_u


def _canonical_starts(s, g, n):
    """Informed starting vectors: top right singular vector of S, coordinate
    vectors, and extreme singular vectors of G."""
    cols = []
    if n:
        _, _, vh = np.linalg.svd(s)
        cols.append(vh[0].conj())
        _, _, vgh = np.linalg.svd(g)
        cols.append(vgh[0].conj())
        cols.append(vgh[-1].conj())
        for i in range(min(n, 8)):
            e = np.zeros(n, dtype=complex)
            e[i] = 1.0
            cols.append(e)
    return np.array(cols).T if cols else np.zeros((n, 0), dtype=complex)


def subordination_bound(
    s,
    g,
    p: float,
    restarts: int = 64,
    tol: float = 1e-10,
    seed: int = 0,
    max_iter: int = 500,
    cross_check: bool | None = None,
) -> SubordinationResult:
    """Estimate the minimal subordination constant b = sup ratio(u).

    p = 0 reduces to the exact operator norm of S.  When p > 0 and G has a
    numerical kernel that S does not annihilate, the bound is infinite.
    """
    s, g = _check_pair(s, g)
    p = float(p)
    if not (0.0 <= p < 1.0):
        raise InputError("p must lie in [0, 1)")
    n = g.shape[0]
    if n == 0:
        return SubordinationResult(p, 0.0, None, 0, True)
    if not np.any(s):
        e = np.zeros(n, dtype=complex)
        e[0] = 1.0
        return SubordinationResult(p, 0.0, e, 0, True)

    if p == 0.0:
        _, sv, vh = np.linalg.svd(s)
        witness = vh[0].conj()
        return SubordinationResult(p, float(sv[0]), witness, 0, True)

    # unboundedness: S must vanish on ker G when p > 0
    ug, sg, vgh = np.linalg.svd(g)
    kernel = sg <= 1e-12 * max(sg[0], 1.0)
    if np.any(kernel):
        kvecs = vgh[kernel].conj().T
        if numerics.opnorm(s @ kvecs) > 1e-10 * max(numerics.opnorm(s), 1.0):
            return SubordinationResult(p, math.inf, None, 0, True)

    rng = np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(1,)))
    canon = _canonical_starts(s, g, n)
    n_random = max(int(restarts) - canon.shape[1], 1)
    randoms = rng.standard_normal((n, n_random)) + 1j * rng.standard_normal((n, n_random))
    starts = np.hstack([canon, randoms])
    bound, witness, converged = _ascent(s, g, p, starts, tol, max_iter)

    if cross_check is None:
        cross_check = n <= 3
    if cross_check and math.isfinite(bound):
        oracle, ou = _sphere_oracle(s, g, p, n, seed)
        scale = max(bound, oracle, 1e-300)
        if abs(bound - oracle) > ORACLE_RTOL * scale:
            raise ConvergenceError(
                "ascent bound %.10e and sampling oracle %.10e disagree beyond %g relative"
                % (bound, oracle, ORACLE_RTOL),
                residual=abs(bound - oracle) / scale,
            )
        if oracle > bound:
            bound, witness = oracle, ou
    return SubordinationResult(p, bound, witness, int(starts.shape[1]), bool(converged))


def verify_bound(s, g, p: float, b: float, sample_count: int = 1000, seed: int = 0):
    """Sample unit vectors and report any with ratio > b (1 + 1e-9).

    Returns a list of {'index', 'ratio', 'vector'} dicts; empty list means no
    sampled violation.
    """
    s, g = _check_pair(s, g)
    if sample_count < 0:
        raise InputError("sample_count must be non-negative")
    n = g.shape[0]
    rng = np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(2,)))
    u = _normalize_columns(rng.standard_normal((n, sample_count)) + 1j * rng.standard_normal((n, sample_count)))
    r = _column_ratios(s, g, float(p), u)
    bad = np.flatnonzero(r > float(b) * (1.0 + 1e-9))
    return [{"index": int(i), "ratio": float(r[i]), "vector": u[:, i].copy()} for i in bad]
