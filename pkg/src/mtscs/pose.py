"""Group elements and concatenation.

Two groups are supported: planar poses with a discrete heading
(SE(2) restricted to ``H`` equally spaced angles) and pure translations
in 1, 2 or 3 dimensions.  Headings are integer indices; the angle of
index ``h`` is ``2*pi*h/H``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True, order=True)
class Pose:
    x: float
    y: float = 0.0
    z: Optional[float] = None
    heading: Optional[int] = None

    def angle(self, n_headings: int) -> float:
        if self.heading is None:
            return 0.0
        return 2.0 * math.pi * self.heading / n_headings

    def position(self) -> tuple[float, ...]:
        if self.z is None:
            return (self.x, self.y)
        return (self.x, self.y, self.z)

    def to_list(self) -> list:
        out: list = [self.x, self.y]
        if self.z is not None:
            out.append(self.z)
        if self.heading is not None:
            out.append(self.heading)
        return out


IDENTITY = Pose(0.0, 0.0, None, 0)


def identity(n_headings: Optional[int], dim: int = 2) -> Pose:
    """Identity element of the group described by ``n_headings``/``dim``."""
    if n_headings is None:
        return Pose(0.0, 0.0, 0.0 if dim == 3 else None, None)
    return Pose(0.0, 0.0, None, 0)


def heading_table(n_headings: int) -> list[float]:
    return [2.0 * math.pi * h / n_headings for h in range(n_headings)]


def _rot(h: int, n_headings: int) -> tuple[float, float]:
    # exact values on the quarter turns keep integer lattices integral
    if (4 * h) % n_headings == 0:
        quarter = (4 * h // n_headings) % 4
        return ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))[quarter]
    a = 2.0 * math.pi * h / n_headings
    return math.cos(a), math.sin(a)


def concat(i: Pose, p: Pose, n_headings: Optional[int] = None) -> Pose:
    """Return ``i . p``: execute motion ``p`` starting from configuration ``i``."""
    if i.heading is None or p.heading is None:
        if (i.heading is None) != (p.heading is None):
            raise ValueError("cannot concatenate poses from different groups")
        z = None if i.z is None else i.z + (p.z or 0.0)
        return Pose(i.x + p.x, i.y + p.y, z, None)
    if n_headings is None:
        raise ValueError("heading poses need n_headings")
    c, s = _rot(i.heading, n_headings)
    return Pose(
        i.x + c * p.x - s * p.y,
        i.y + s * p.x + c * p.y,
        None,
        (i.heading + p.heading) % n_headings,
    )


def inverse(p: Pose, n_headings: Optional[int] = None) -> Pose:
    if p.heading is None:
        return Pose(-p.x, -p.y, None if p.z is None else -p.z, None)
    h = (-p.heading) % n_headings
    c, s = _rot(h, n_headings)
    return Pose(-(c * p.x - s * p.y), -(s * p.x + c * p.y), None, h)


def relative(i: Pose, j: Pose, n_headings: Optional[int] = None) -> Pose:
    """Motion ``p`` with ``i . p == j``."""
    return concat(inverse(i, n_headings), j, n_headings)


def key(p: Pose, eps: float = 1e-9) -> tuple:
    """Hashable key that identifies poses equal within ``eps``."""
    q = tuple(int(round(v / eps)) for v in p.position())
    return q + ((p.heading,) if p.heading is not None else ())
