"""Quadrature contours: circles and closed gap contours between parabolas.

Every contour carries explicit nodes z_j and weights w_j such that

    integral_Gamma f(z) dz  ~  sum_j w_j f(z_j),

with positive (counterclockwise) orientation.  Circles use the periodic
trapezoid rule (spectrally accurate).  Gap contours consist of four open
segments (lower parabola arc left->right, right vertical up, upper parabola
arc right->left, left vertical down) joined at corners; each segment is
parametrized through a corner-clustered map whose derivative vanishes at the
endpoints, so the composite trapezoid rule converges at high order despite
the corners.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import InputError

#: minimum trapezoid nodes per segment
MIN_NODES_PER_SEGMENT = 16

#: order of the corner-clustering parameter map
_CLUSTER_ORDER = 8


@dataclass(frozen=True)
class Segment:
    kind: str
    nodes: np.ndarray
    weights: np.ndarray
    start: complex
    end: complex


@dataclass(frozen=True)
class Contour:
    """Closed quadrature contour; ``refined(factor)`` rebuilds with more
    nodes for adaptive doubling."""

    kind: str
    params: dict
    segments: tuple[Segment, ...]
    nodes_per_segment: int

    @property
    def nodes(self) -> np.ndarray:
        return np.concatenate([s.nodes for s in self.segments])

    @property
    def weights(self) -> np.ndarray:
        return np.concatenate([s.weights for s in self.segments])

    @property
    def total_nodes(self) -> int:
        return sum(len(s.nodes) for s in self.segments)

    def refined(self, factor: int = 2) -> "Contour":
        return _build(self.kind, self.params, self.nodes_per_segment * int(factor))


def _check_closure(segments):
    pts = [(s.start, s.end) for s in segments]
    scale = max(max(abs(a), abs(b)) for a, b in pts) + 1.0
    for (_, end), (start, _) in zip(pts, pts[1:] + pts[:1]):
        if abs(end - start) > 1e-12 * scale:
            raise InputError("contour segments do not close up")


def _cluster_map(t: np.ndarray):
    """Map [0,1]->[0,1] with derivative vanishing to high order at both ends."""
    a = _CLUSTER_ORDER
    ta = t**a
    ua = (1.0 - t) ** a
    den = ta + ua
    w = ta / den
    dw = a * t ** (a - 1) * (1.0 - t) ** (a - 1) / den**2
    return w, dw


def _open_segment(kind, z_of, dz_of, m):
    """Composite trapezoid on a clustered parameter for one open segment."""
    t = np.linspace(0.0, 1.0, m + 1)
    w, dw = _cluster_map(t)
    h = 1.0 / m
    factors = np.full(m + 1, h)
    factors[0] *= 0.5
    factors[-1] *= 0.5
    nodes = z_of(w)
    weights = dz_of(w) * dw * factors
    return Segment(kind=kind, nodes=nodes, weights=weights,
                   start=complex(z_of(np.array([0.0]))[0]),
                   end=complex(z_of(np.array([1.0]))[0]))


def _build(kind, params, m):
    if m < MIN_NODES_PER_SEGMENT:
        raise InputError("need at least %d nodes per segment" % MIN_NODES_PER_SEGMENT)
    if kind == "circle":
        c, r = complex(params["center"]), float(params["radius"])
        t = 2.0 * np.pi * np.arange(m) / m
        e = np.exp(1j * t)
        seg = Segment(kind="circle", nodes=c + r * e,
                      weights=1j * r * e * (2.0 * np.pi / m),
                      start=c + r, end=c + r)
        return Contour(kind=kind, params=dict(params), segments=(seg,), nodes_per_segment=m)
    if kind == "gap":
        xl, xr = float(params["x_left"]), float(params["x_right"])
        alpha, p = float(params["alpha"]), float(params["p"])
        theta = float(params["theta"])
        hl = alpha * xl**p
        hr = alpha * xr**p

        def arc(sign, a, b):
            def z_of(s):
                x = a + (b - a) * s
                return x + sign * 1j * alpha * x**p

            def dz_of(s):
                x = a + (b - a) * s
                slope = alpha * p * x ** (p - 1.0) if p > 0.0 else np.zeros_like(x)
                return (1.0 + sign * 1j * slope) * (b - a)

            return z_of, dz_of

        def vertical(x0, y_from, y_to):
            def z_of(s):
                return x0 + 1j * (y_from + (y_to - y_from) * s)

            def dz_of(s):
                return 1j * (y_to - y_from) * np.ones_like(s)

            return z_of, dz_of

        pieces = [
            ("arc_lower", arc(-1.0, xl, xr)),
            ("side_right", vertical(xr, -hr, hr)),
            ("arc_upper", arc(+1.0, xr, xl)),
            ("side_left", vertical(xl, hl, -hl)),
        ]
        rot = np.exp(1j * theta)
        segments = []
        for name, (z_of, dz_of) in pieces:
            seg = _open_segment(name, z_of, dz_of, m)
            segments.append(Segment(kind=name, nodes=seg.nodes * rot,
                                    weights=seg.weights * rot,
                                    start=seg.start * rot, end=seg.end * rot))
        segments = tuple(segments)
        _check_closure(segments)
        return Contour(kind=kind, params=dict(params), segments=segments, nodes_per_segment=m)
    raise InputError("unknown contour kind %r" % kind)


def circle(center: complex, radius: float, node_count: int = 64) -> Contour:
    """Positively oriented circle."""
    if radius <= 0.0:
        raise InputError("radius must be positive")
    return _build("circle", {"center": complex(center), "radius": float(radius)}, int(node_count))


def gap_contour(x_left: float, x_right: float, alpha: float, p: float,
                theta: float = 0.0, nodes_per_segment: int = 32) -> Contour:
    """Closed contour between two parabola cross-cuts, rotated by theta.

    In ray coordinates it bounds { x_left <= x <= x_right, |y| <= alpha x^p },
    traversed counterclockwise.
    """
    if not (0.0 < x_left < x_right):
        raise InputError("need 0 < x_left < x_right")
    if alpha < 0.0 or not (0.0 <= float(p) < 1.0):
        raise InputError("need alpha >= 0 and p in [0, 1)")
    if alpha == 0.0:
        raise InputError("alpha must be positive for a non-degenerate contour")
    return _build("gap", {"x_left": float(x_left), "x_right": float(x_right),
                          "alpha": float(alpha), "p": float(p), "theta": float(theta)},
                  int(nodes_per_segment))


def winding_number(contour: Contour, w: complex) -> complex:
    """Quadrature estimate of the winding number about w."""
    z = contour.nodes
    return complex(np.sum(contour.weights / (z - w)) / (2j * np.pi))


def min_resolvent_margin(t_mat, contour: Contour) -> float:
    """min over contour nodes of sigma_min(T - z)."""
    t_mat = numerics.as_matrix(t_mat)
    n = t_mat.shape[0]
    ident = np.eye(n, dtype=complex)
    margins = [
        np.linalg.svd(t_mat - z * ident, compute_uv=False)[-1] for z in contour.nodes
    ]
    return float(min(margins))
