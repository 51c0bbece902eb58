"""Riesz projections by contour quadrature, and projection families.

P = (i / 2 pi) * sum_j w_j (T - z_j)^-1 over a positively oriented contour,
with node doubling until ||P^2 - P|| meets tolerance.  An eigendecomposition
route (``spectral_projector_oracle``) provides the independent cross-check
used throughout the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import contours as contours_mod
from . import numerics
from .errors import AmbiguousClusterError, ContourSpectrumError, ConvergenceError, InputError

#: margin gate: contour nodes must keep sigma_min(T - z) above this
MARGIN_GATE = 1e-8

#: total node cap for adaptive doubling
MAX_TOTAL_NODES = 2**20


def riesz_projection(t_mat, contour: contours_mod.Contour, tol: float = 1e-8) -> np.ndarray:
    """Contour-quadrature Riesz projection with adaptive node doubling."""
    t_mat = numerics.as_matrix(t_mat)
    margin = contours_mod.min_resolvent_margin(t_mat, contour)
    if margin <= MARGIN_GATE:
        raise ContourSpectrumError(
            "contour margin %.3e below gate %.1e" % (margin, MARGIN_GATE), margin=margin
        )
    n = t_mat.shape[0]
    ident = np.eye(n, dtype=complex)
    residual = np.inf
    while True:
        acc = np.zeros((n, n), dtype=complex)
        for z, w in zip(contour.nodes, contour.weights):
            acc += w * np.linalg.solve(t_mat - z * ident, ident)
        proj = (1j / (2.0 * np.pi)) * acc
        residual = numerics.opnorm(proj @ proj - proj)
        if residual <= tol:
            return proj
        if contour.total_nodes * 2 > MAX_TOTAL_NODES:
            raise ConvergenceError(
                "projection residual %.3e at node cap %d" % (residual, MAX_TOTAL_NODES),
                residual=residual,
            )
        contour = contour.refined(2)


def spectral_projector_oracle(t_mat, region_predicate, cluster_tol: float = 1e-8) -> np.ndarray:
    """Eigendecomposition route: sum of spectral projectors of the eigenvalue
    clusters inside the region.

    Eigenvalues within ``cluster_tol`` of each other are clustered; a cluster
    whose members disagree about membership raises AmbiguousClusterError.
    """
    dec = numerics.eig(t_mat)
    values = dec.values
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= cluster_tol:
                parent[find(i)] = find(j)
    indicator = np.zeros(n)
    clusters: dict[int, list[int]] = {}
    for i in range(n):
        clusters.setdefault(find(i), []).append(i)
    for members in clusters.values():
        flags = {bool(region_predicate(values[i])) for i in members}
        if len(flags) > 1:
            raise AmbiguousClusterError(
                "eigenvalue cluster %r straddles the region boundary"
                % ([complex(values[i]) for i in members],)
            )
        if flags.pop():
            indicator[members] = 1.0
    v = dec.vectors
    return v @ (indicator[:, None] * np.linalg.inv(v))


def rank_of_projection(p_mat) -> int:
    """Numerical rank: singular values above 1/2 (valid for near-idempotents)."""
    s = np.linalg.svd(np.asarray(p_mat, dtype=complex), compute_uv=False)
    return int(np.sum(s > 0.5))


@dataclass(frozen=True)
class ProjectionEntry:
    label: str
    matrix: np.ndarray
    idempotency_residual: float
    rank: int


@dataclass(frozen=True)
class ProjectionFamily:
    entries: tuple[ProjectionEntry, ...]
    #: max over j != k of ||P_j P_k||
    cross_talk: float
    #: ||sum_k P_k - I|| (only meaningful for intentionally complete families)
    sum_residual: float

    @property
    def matrices(self) -> list[np.ndarray]:
        return [e.matrix for e in self.entries]


def make_family(labelled_projections) -> ProjectionFamily:
    """Assemble diagnostics for a list of (label, matrix) pairs."""
    entries = []
    for label, mat in labelled_projections:
        mat = numerics.as_matrix(mat)
        entries.append(
            ProjectionEntry(
                label=str(label),
                matrix=mat,
                idempotency_residual=numerics.opnorm(mat @ mat - mat),
                rank=rank_of_projection(mat),
            )
        )
    mats = [e.matrix for e in entries]
    cross = 0.0
    for i in range(len(mats)):
        for j in range(len(mats)):
            if i != j:
                cross = max(cross, numerics.opnorm(mats[i] @ mats[j]))
    if mats:
        n = mats[0].shape[0]
        sum_res = numerics.opnorm(sum(mats) - np.eye(n, dtype=complex))
    else:
        sum_res = 0.0
    return ProjectionFamily(entries=tuple(entries), cross_talk=cross, sum_residual=sum_res)


def family_from_gaps(t_mat, gap_abscissae, alpha: float, p: float, theta: float = 0.0,
                     tol: float = 1e-8, nodes_per_segment: int = 32) -> ProjectionFamily:
    """Riesz projections for the gap contours between consecutive abscissae.

    Each contour is gated on its resolvent margin before any quadrature; a
    failing gate raises ContourSpectrumError naming the abscissa pair.
    """
    t_mat = numerics.as_matrix(t_mat)
    xs = [float(x) for x in gap_abscissae]
    if len(xs) < 2 or any(b <= a for a, b in zip(xs, xs[1:])):
        raise InputError("need at least two strictly increasing gap abscissae")
    labelled = []
    for xl, xr in zip(xs, xs[1:]):
        contour = contours_mod.gap_contour(xl, xr, alpha, p, theta=theta,
                                           nodes_per_segment=nodes_per_segment)
        margin = contours_mod.min_resolvent_margin(t_mat, contour)
        if margin <= MARGIN_GATE:
            raise ContourSpectrumError(
                "gap contour (%g, %g) margin %.3e below gate" % (xl, xr, margin),
                margin=margin, abscissae=(xl, xr),
            )
        labelled.append(("gap[%g,%g]" % (xl, xr), riesz_projection(t_mat, contour, tol=tol)))
    return make_family(labelled)


def projection_sum_bound(family: ProjectionFamily, probe_count: int = 256, seed: int = 0):
    """Probe estimate and norm upper bound for C = sup sum_k |(P_k x | y)|.

    Returns (c_hat, c_upper) with c_hat <= c_upper = sum_k ||P_k||.
    """
    mats = family.matrices
    if not mats:
        return 0.0, 0.0
    n = mats[0].shape[0]
    rng = np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(3,)))

    def unit(shape):
        z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        return z / np.linalg.norm(z, axis=0)

    x = unit((n, probe_count))
    y = unit((n, probe_count))
    total = np.zeros(probe_count)
    for mat in mats:
        total += np.abs(np.einsum("ij,ij->j", y.conj(), mat @ x))
    c_upper = float(sum(numerics.opnorm(m) for m in mats))
    c_hat = min(float(total.max()), c_upper)
    return c_hat, c_upper


@dataclass(frozen=True)
class RankComparison:
    index: int
    label_left: str
    label_right: str
    rank_left: int
    rank_right: int
    equal: bool


def compare_ranks(left: ProjectionFamily, right: ProjectionFamily) -> list[RankComparison]:
    """Pairwise rank comparison of two equally long projection families."""
    if len(left.entries) != len(right.entries):
        raise InputError("families have different lengths")
    out = []
    for k, (a, b) in enumerate(zip(left.entries, right.entries)):
        out.append(RankComparison(index=k, label_left=a.label, label_right=b.label,
                                  rank_left=a.rank, rank_right=b.rank, equal=a.rank == b.rank))
    return out
