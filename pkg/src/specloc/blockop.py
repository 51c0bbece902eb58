"""Block operator matrices T = [[A, B], [C, D]] with normal diagonal part,
and the Hamiltonian special case T = [[A, B], [C, A]] with A skew-adjoint.

The off-diagonal part S = [[0, B], [C, 0]] is p-subordinate to G = diag(A, D)
with constant max of the individual subordination constants of B relative to
D and C relative to A.  For the Hamiltonian case (p = 0) the spectrum is
symmetric about the imaginary axis, confined to discs |z - i r_k| <= b, and
kept away from the imaginary axis by the positivity floor gamma of B and C.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import numerics
from .errors import DimensionError, InputError
from .operators import MAX_DIMENSION, PerturbedSystem, Ray, RaySpectrumSpec

_TWO_PI = 2.0 * np.pi


def _require_normal(m: np.ndarray, name: str):
    norm = numerics.opnorm(m)
    residual = numerics.opnorm(m @ m.conj().T - m.conj().T @ m)
    if residual > 1e-10 * max(norm**2, 1.0):
        raise InputError("%s is not normal (commutator norm %.3e)" % (name, residual))


def _rays_from_values(values: np.ndarray, tol_angle: float = 1e-8) -> RaySpectrumSpec:
    """Cluster eigenvalue angles into rays; every eigenvalue must sit on its
    ray within 1e-10 (relative)."""
    nonzero = values[np.abs(values) > 0.0]
    n_zero = int(np.sum(np.abs(values) == 0.0))
    reps: list[float] = []
    for a in np.sort(np.mod(np.angle(nonzero), _TWO_PI)):
        if not reps:
            reps.append(float(a))
            continue
        d = min(min(abs(a - r), _TWO_PI - abs(a - r)) for r in reps)
        if d > tol_angle:
            reps.append(float(a))
    if not reps:
        reps = [0.0]
    buckets: dict[float, list[float]] = {r: [] for r in reps}
    for z in nonzero:
        a = float(np.mod(np.angle(z), _TWO_PI))
        rep = min(reps, key=lambda r: min(abs(a - r), _TWO_PI - abs(a - r)))
        offset = abs(z) * min(abs(a - rep), _TWO_PI - abs(a - rep))
        if offset > 1e-10 * (1.0 + abs(z)):
            raise InputError("eigenvalue %r is not on any spectral ray" % (complex(z),))
        buckets[rep].append(float(abs(z)))
    buckets[reps[0]].extend([0.0] * n_zero)
    rays = tuple(Ray(theta=r, radii=tuple(sorted(buckets[r]))) for r in reps)
    return RaySpectrumSpec(rays=rays)


def assemble_block(a, b, c, d, p: float) -> PerturbedSystem:
    """Assemble T = [[A, B], [C, D]] as a perturbed system (G diagonal part).

    A and D must be normal with ray-localized spectra.  Note G is block
    diagonal (not necessarily diagonal), so the returned system carries the
    derived ray spectrum explicitly.
    """
    a = numerics.as_matrix(a)
    d = numerics.as_matrix(d)
    b = np.array(b, dtype=complex)
    c = np.array(c, dtype=complex)
    if b.ndim != 2 or c.ndim != 2:
        raise DimensionError("off-diagonal blocks must be matrices")
    if not (np.all(np.isfinite(b.real)) and np.all(np.isfinite(b.imag))
            and np.all(np.isfinite(c.real)) and np.all(np.isfinite(c.imag))):
        raise InputError("off-diagonal blocks must be finite")
    n1, n2 = a.shape[0], d.shape[0]
    if b.shape != (n1, n2) or c.shape != (n2, n1):
        raise DimensionError("off-diagonal blocks do not match A (%d) and D (%d)" % (n1, n2))
    if n1 + n2 > MAX_DIMENSION:
        raise DimensionError("dimension %d exceeds cap %d" % (n1 + n2, MAX_DIMENSION))
    p = float(p)
    if not (0.0 <= p < 1.0):
        raise InputError("p must lie in [0, 1)")
    _require_normal(a, "A")
    _require_normal(d, "D")
    g = scipy.linalg.block_diag(a, d).astype(complex)
    s = np.zeros_like(g)
    s[:n1, n1:] = b
    s[n1:, :n1] = c
    values = np.concatenate([np.linalg.eigvals(a), np.linalg.eigvals(d)])
    ray_spec = _rays_from_values(values)
    return PerturbedSystem(g=g, s=s, t=g + s, p=p, ray_spec=ray_spec)


# ---------------------------------------------------------------------------
# Hamiltonian case


@dataclass(frozen=True)
class HamiltonianModel:
    """T = [[A, B], [C, A]] with A = i diag(r_seq), B, C self-adjoint >= gamma.

    ``l`` is the half-gap: r_{k+1} - r_k >= 2 l > 2 b with b = max(||B||,||C||).
    """

    r_seq: tuple[float, ...]
    b_mat: np.ndarray
    c_mat: np.ndarray
    gamma: float
    l: float

    def __post_init__(self):
        r = tuple(float(x) for x in self.r_seq)
        if not r or any(y <= x for x, y in zip(r, r[1:])):
            raise InputError("r_seq must be nonempty and strictly increasing")
        bm = numerics.as_matrix(self.b_mat)
        cm = numerics.as_matrix(self.c_mat)
        n = len(r)
        if bm.shape != (n, n) or cm.shape != (n, n):
            raise DimensionError("B and C must be %dx%d" % (n, n))
        for name, m in (("B", bm), ("C", cm)):
            if numerics.opnorm(m - m.conj().T) > 1e-12 * max(numerics.opnorm(m), 1.0):
                raise InputError("%s must be self-adjoint" % name)
            low = float(np.min(np.linalg.eigvalsh(m)))
            if low < float(self.gamma) - 1e-12:
                raise InputError("%s has eigenvalue %.6g below gamma=%.6g" % (name, low, self.gamma))
        if float(self.gamma) <= 0.0:
            raise InputError("gamma must be positive")
        bound = max(numerics.opnorm(bm), numerics.opnorm(cm))
        if not (float(self.l) > bound):
            raise InputError("need l > max(||B||, ||C||) = %.6g" % bound)
        offenders = [k for k in range(n - 1) if r[k + 1] - r[k] < 2.0 * float(self.l) - 1e-12]
        if offenders:
            raise InputError("gap condition r_{k+1}-r_k >= 2l fails at k in %r" % offenders)
        object.__setattr__(self, "r_seq", r)
        object.__setattr__(self, "b_mat", bm)
        object.__setattr__(self, "c_mat", cm)

    @property
    def n(self) -> int:
        return len(self.r_seq)

    @property
    def subordination_norm(self) -> float:
        return max(numerics.opnorm(self.b_mat), numerics.opnorm(self.c_mat))


def fundamental_symmetries(n: int):
    """J1 = [[0, -iI], [iI, 0]] and J2 = [[0, I], [I, 0]] on C^{2n}."""
    ident = np.eye(n, dtype=complex)
    zero = np.zeros((n, n), dtype=complex)
    j1 = np.block([[zero, -1j * ident], [1j * ident, zero]])
    j2 = np.block([[zero, ident], [ident, zero]])
    return j1, j2


def build_hamiltonian(model: HamiltonianModel) -> PerturbedSystem:
    """Assemble the Hamiltonian block system (p = 0)."""
    n = model.n
    if 2 * n > MAX_DIMENSION:
        raise DimensionError("dimension %d exceeds cap %d" % (2 * n, MAX_DIMENSION))
    a = 1j * np.diag(np.asarray(model.r_seq, dtype=float)).astype(complex)
    system = assemble_block(a, model.b_mat, model.c_mat, a, p=0.0)
    system.b = model.subordination_norm
    return system


@dataclass(frozen=True)
class SymmetryReport:
    j1_skew_residual: float
    pairing_defects: tuple[complex, ...]
    real_part_floor_violations: tuple[complex, ...]
    disc_violations: tuple[complex, ...]
    per_disc_counts: tuple[int, ...]
    disc_simple: tuple[bool, ...]
    eigenvector_condition: float

    @property
    def clean(self) -> bool:
        return (not self.pairing_defects and not self.real_part_floor_violations
                and not self.disc_violations)


def verify_hamiltonian(system: PerturbedSystem, model: HamiltonianModel,
                       tol: float = 1e-8) -> SymmetryReport:
    """Check the structural spectral properties of the Hamiltonian system.

    - T is skew-adjoint for the indefinite product J1 (residual reported);
    - spectrum symmetric about the imaginary axis (z <-> -conj(z) pairing);
    - |Re z| >= gamma for every eigenvalue;
    - every eigenvalue lies in some disc |z - i r_k| <= b, counted per disc.
    """
    n = model.n
    j1, _ = fundamental_symmetries(n)
    m = j1 @ system.t
    j1_res = numerics.opnorm(m + m.conj().T)
    dec = numerics.eig(system.t)
    values = dec.values
    # pairing z <-> -conj(z) by greedy matching
    unmatched = list(range(len(values)))
    defects = []
    scale = max(float(np.max(np.abs(values), initial=0.0)), 1.0)
    while unmatched:
        i = unmatched.pop(0)
        target = -np.conj(values[i])
        if abs(values[i] - target) <= tol * scale:
            continue  # on the imaginary axis, self-paired
        best = None
        for j in unmatched:
            d = abs(values[j] - target)
            if best is None or d < best[1]:
                best = (j, d)
        if best is not None and best[1] <= tol * scale:
            unmatched.remove(best[0])
        else:
            defects.append(complex(values[i]))
    floor = tuple(complex(z) for z in values if abs(z.real) < float(model.gamma) - tol * scale)
    b = model.subordination_norm
    centers = 1j * np.asarray(model.r_seq, dtype=float)
    dist = np.abs(values[:, None] - centers[None, :])
    inside = dist <= b + tol * scale
    disc_violations = tuple(complex(z) for z, row in zip(values, inside) if not row.any())
    counts = tuple(int(x) for x in inside.sum(axis=0))
    simple = []
    for k in range(len(centers)):
        members = values[inside[:, k]]
        sep_ok = True
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                if abs(members[i] - members[j]) <= tol * scale:
                    sep_ok = False
        simple.append(sep_ok)
    return SymmetryReport(
        j1_skew_residual=float(j1_res),
        pairing_defects=tuple(defects),
        real_part_floor_violations=floor,
        disc_violations=disc_violations,
        per_disc_counts=counts,
        disc_simple=tuple(simple),
        eigenvector_condition=dec.condition_estimate,
    )
