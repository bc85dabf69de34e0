"""Optimal steering functions and their costs.

Dubins paths (forward-only, bounded curvature) are used for heading-bearing
poses and straight lines for translation-only poses.  Dubins words are
computed in closed form following the standard normalised-frame
construction: the query is translated/rotated so the start is at the
origin, distances are scaled by the turning radius and each of the six
words yields three segment parameters ``(t, p, q)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .pose import Pose

TWO_PI = 2.0 * math.pi

# Tie-break order among equal-cost words.
WORDS = ("LSL", "RSR", "LSR", "RSL", "RLR", "LRL")

# slack for degenerate (zero-length straight / tangent circle) cases
_EPS = 1e-10


def mod2pi(a: float) -> float:
    r = math.fmod(a, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    # fold values that are 2*pi up to rounding back to zero
    if TWO_PI - r < 1e-12:
        r = 0.0
    return r


@dataclass(frozen=True)
class DubinsPath:
    """An optimal Dubins path in world coordinates.

    ``params`` are the three segment lengths normalised by ``radius``
    (arc angles for curved segments).
    """

    start: tuple[float, float, float]
    word: str
    params: tuple[float, float, float]
    radius: float

    @property
    def length(self) -> float:
        return sum(self.params) * self.radius

    def sample(self, n: int) -> np.ndarray:
        """``n`` points evenly spaced in path parameter, shape (n, 3)."""
        if n < 2:
            raise ValueError("need at least two samples")
        total = sum(self.params)
        taus = np.linspace(0.0, total, n)
        return _sample_normalised(self.start, self.word, self.params, self.radius, taus)


def _segment(word: str, alpha: float, beta: float, d: float) -> Optional[tuple[float, float, float]]:
    sa, sb = math.sin(alpha), math.sin(beta)
    ca, cb = math.cos(alpha), math.cos(beta)
    c_ab = math.cos(alpha - beta)
    d_sq = d * d
    if word == "LSL":
        p_sq = 2.0 + d_sq - 2.0 * c_ab + 2.0 * d * (sa - sb)
        if p_sq < -_EPS:
            return None
        p_sq = max(p_sq, 0.0)
        tmp = math.atan2(cb - ca, d + sa - sb)
        return mod2pi(tmp - alpha), math.sqrt(p_sq), mod2pi(beta - tmp)
    if word == "RSR":
        p_sq = 2.0 + d_sq - 2.0 * c_ab + 2.0 * d * (sb - sa)
        if p_sq < -_EPS:
            return None
        p_sq = max(p_sq, 0.0)
        tmp = math.atan2(ca - cb, d - sa + sb)
        return mod2pi(alpha - tmp), math.sqrt(p_sq), mod2pi(tmp - beta)
    if word == "LSR":
        p_sq = -2.0 + d_sq + 2.0 * c_ab + 2.0 * d * (sa + sb)
        if p_sq < -_EPS:
            return None
        p_sq = max(p_sq, 0.0)
        p = math.sqrt(p_sq)
        tmp = math.atan2(-ca - cb, d + sa + sb) - math.atan2(-2.0, p)
        return mod2pi(tmp - alpha), p, mod2pi(tmp - beta)
    if word == "RSL":
        p_sq = -2.0 + d_sq + 2.0 * c_ab - 2.0 * d * (sa + sb)
        if p_sq < -_EPS:
            return None
        p_sq = max(p_sq, 0.0)
        p = math.sqrt(p_sq)
        tmp = math.atan2(ca + cb, d - sa - sb) - math.atan2(2.0, p)
        return mod2pi(alpha - tmp), p, mod2pi(beta - tmp)
    if word == "RLR":
        tmp = (6.0 - d_sq + 2.0 * c_ab + 2.0 * d * (sa - sb)) / 8.0
        if abs(tmp) > 1.0 + _EPS:
            return None
        tmp = min(1.0, max(-1.0, tmp))
        phi = math.atan2(ca - cb, d - sa + sb)
        p = mod2pi(TWO_PI - math.acos(tmp))
        t = mod2pi(alpha - phi + mod2pi(p / 2.0))
        return t, p, mod2pi(alpha - beta - t + p)
    if word == "LRL":
        tmp = (6.0 - d_sq + 2.0 * c_ab + 2.0 * d * (sb - sa)) / 8.0
        if abs(tmp) > 1.0 + _EPS:
            return None
        tmp = min(1.0, max(-1.0, tmp))
        phi = math.atan2(ca - cb, d + sa - sb)
        p = mod2pi(TWO_PI - math.acos(tmp))
        t = mod2pi(-alpha - phi + p / 2.0)
        return t, p, mod2pi(beta - alpha - t + p)
    raise ValueError(f"unknown Dubins word {word!r}")


def dubins_path(q0: tuple[float, float, float], q1: tuple[float, float, float], radius: float) -> DubinsPath:
    """Shortest Dubins path between two ``(x, y, theta)`` configurations."""
    if radius <= 0.0:
        raise ValueError("turning radius must be positive")
    dx, dy = q1[0] - q0[0], q1[1] - q0[1]
    dist = math.hypot(dx, dy)
    d = dist / radius
    theta = mod2pi(math.atan2(dy, dx)) if dist > 0.0 else 0.0
    alpha = mod2pi(q0[2] - theta)
    beta = mod2pi(q1[2] - theta)
    best: Optional[tuple[float, str, tuple[float, float, float]]] = None
    for word in WORDS:
        seg = _segment(word, alpha, beta, d)
        if seg is None:
            continue
        total = seg[0] + seg[1] + seg[2]
        # strict improvement beyond rounding keeps the fixed word order on ties
        if best is None or total < best[0] - 1e-12:
            best = (total, word, seg)
    assert best is not None  # CSC words always cover some case
    return DubinsPath((q0[0], q0[1], q0[2]), best[1], best[2], radius)


def _sample_normalised(start, word, params, radius, taus: np.ndarray) -> np.ndarray:
    """Evaluate the path at normalised arc lengths ``taus``."""
    out = np.empty((len(taus), 3))
    x, y, th = start[0] / radius, start[1] / radius, start[2]
    # segment start states, in normalised units
    states = [(x, y, th)]
    for kind, length in zip(word, params):
        states.append(_advance(states[-1], kind, length))
    bounds = np.cumsum((0.0,) + tuple(params))
    for k, kind in enumerate(word):
        lo, hi = bounds[k], bounds[k + 1]
        if k == 2:
            mask = taus >= lo
        else:
            mask = (taus >= lo) & (taus < hi)
        s = taus[mask] - lo
        x0, y0, t0 = states[k]
        if kind == "S":
            out[mask, 0] = x0 + s * math.cos(t0)
            out[mask, 1] = y0 + s * math.sin(t0)
            out[mask, 2] = t0
        elif kind == "L":
            out[mask, 0] = x0 + np.sin(t0 + s) - math.sin(t0)
            out[mask, 1] = y0 - np.cos(t0 + s) + math.cos(t0)
            out[mask, 2] = t0 + s
        else:
            out[mask, 0] = x0 - np.sin(t0 - s) + math.sin(t0)
            out[mask, 1] = y0 + np.cos(t0 - s) - math.cos(t0)
            out[mask, 2] = t0 - s
    out[:, 0] *= radius
    out[:, 1] *= radius
    out[:, 2] = np.mod(out[:, 2], TWO_PI)
    return out


def _advance(state, kind, s):
    x0, y0, t0 = state
    if kind == "S":
        return x0 + s * math.cos(t0), y0 + s * math.sin(t0), t0
    if kind == "L":
        return x0 + math.sin(t0 + s) - math.sin(t0), y0 - math.cos(t0 + s) + math.cos(t0), t0 + s
    return x0 - math.sin(t0 - s) + math.sin(t0), y0 + math.cos(t0 - s) - math.cos(t0), t0 - s


@dataclass(frozen=True)
class Steering:
    """Steering function description.

    ``kind`` is ``"dubins"`` (requires ``radius > 0`` and heading poses)
    or ``"euclidean"``.
    """

    kind: str = "euclidean"
    radius: float = 1.0
    n_headings: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("dubins", "euclidean"):
            raise ValueError(f"unknown steering kind {self.kind!r}")
        if self.kind == "dubins":
            if self.radius <= 0.0:
                raise ValueError("Dubins steering needs a positive radius")
            if not self.n_headings:
                raise ValueError("Dubins steering needs a heading table")

    def _xyt(self, q: Pose) -> tuple[float, float, float]:
        if q.heading is None:
            raise ValueError("Dubins steering needs heading-bearing poses")
        return (q.x, q.y, q.angle(self.n_headings))

    def path(self, q0: Pose, q1: Pose) -> DubinsPath:
        return dubins_path(self._xyt(q0), self._xyt(q1), self.radius)

    def cost(self, q0: Pose, q1: Pose) -> float:
        return steering_cost(self, q0, q1)

    def sample(self, q0: Pose, q1: Pose, n: int) -> list[Pose]:
        return steering_sample(self, q0, q1, n)

    def sample_xy(self, q0: Pose, q1: Pose, n: int) -> np.ndarray:
        """Positions of ``n`` samples along the steering path, shape (n, d)."""
        if self.kind == "euclidean":
            a = np.asarray(q0.position(), dtype=float)
            b = np.asarray(q1.position(), dtype=float)
            taus = np.linspace(0.0, 1.0, n)[:, None]
            return a + taus * (b - a)
        return self.path(q0, q1).sample(n)[:, :2]


def steering_cost(steer: Steering, q0: Pose, q1: Pose) -> float:
    if steer.kind == "euclidean":
        return math.dist(q0.position(), q1.position())
    if q0 == q1:
        return 0.0
    return steer.path(q0, q1).length


def steering_sample(steer: Steering, q0: Pose, q1: Pose, n: int) -> list[Pose]:
    """``n`` poses ``u(m/(n-1))`` along the steering path; endpoints exact."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if q0 == q1:
        return [q0]
    if steer.kind == "euclidean":
        pts = steer.sample_xy(q0, q1, n)
        out = [
            Pose(float(p[0]), float(p[1]) if len(p) > 1 else 0.0, float(p[2]) if len(p) > 2 else None, None)
            for p in pts
        ]
    else:
        # intermediate samples carry the nearest table heading
        pts = steer.path(q0, q1).sample(n)
        H = steer.n_headings
        out = [Pose(float(p[0]), float(p[1]), None, int(round(p[2] / TWO_PI * H)) % H) for p in pts]
    out[0], out[-1] = q0, q1
    return out


def n_samples(length: float, per_unit: int = 50, minimum: int = 10) -> int:
    return max(minimum, int(math.ceil(per_unit * length)) + 1)
