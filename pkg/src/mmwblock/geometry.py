"""Blockage-zone geometry for a single Tx-Rx link.

A walking blocker occludes the line of sight only while its centre is
inside a rectangle anchored at the receiver and pointing at the
transmitter.  The rectangle has width ``d_m`` (the blocker footprint
diameter) and length ``r`` set by the height triangle between Tx, Rx and
blocker.  The exact disc-swept (stadium) region is handled only by the
simulator's exact mode; everywhere else the rectangle is the model.

Coordinate convention: the Tx sits at P = (0, w_s) on the inner sidewalk
edge and the Rx at O = (r_0 sin(alpha), w_s - r_0 cos(alpha)), with
``alpha`` measured from the Y axis to the Tx-Rx segment.  Blockers walk
parallel to the X axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError


@dataclass(frozen=True)
class LinkGeometry:
    """Heights, blocker size and placement of one Tx-Rx link.

    w_s is the sidewalk width and is only meaningful for the sidewalk
    scenarios; pass None for open-area deployments.
    """

    h_t: float
    h_r: float
    h_b: float
    d_m: float
    r_0: float
    w_s: float | None = None
    alpha: float = 0.0

    def __post_init__(self):
        if not (self.h_r > 0):
            raise GeometryError("receiver height must be positive")
        if not (self.h_t > self.h_b):
            raise GeometryError("transmitter must be above blocker tops")
        if not (self.h_b >= self.h_r):
            raise GeometryError("blockers must reach at least receiver height")
        if self.d_m <= 0:
            raise GeometryError("blocker diameter must be positive")
        if self.r_0 <= 0:
            raise GeometryError("Tx-Rx distance must be positive")
        if not (0.0 <= self.alpha < math.pi / 2):
            raise GeometryError("alpha must lie in [0, pi/2)")
        if self.w_s is not None and self.w_s <= 0:
            raise GeometryError("sidewalk width must be positive")


@dataclass(frozen=True)
class BlockageZone:
    """Rectangle ABCD in which a blocker centre occludes the LoS."""

    r: float
    d_m: float
    a: tuple[float, float]
    b: tuple[float, float]
    c: tuple[float, float]
    d: tuple[float, float]
    w_e: float
    alpha: float

    @property
    def vertices(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d], dtype=float)

    @property
    def y_a(self) -> float:
        return self.a[1]

    @property
    def y_c(self) -> float:
        return self.c[1]


def zone_length(link: LinkGeometry) -> float:
    """Length of the blockage zone along the Tx-Rx direction.

    The similar-triangle projection of the blocker top onto the link gives
    r = r_0 (h_b - h_r) / (h_t - h_r), extended by half a footprint so a
    blocker centred at the far tip still occludes.
    """
    gap = link.h_t - link.h_r
    if gap <= 0:
        raise GeometryError("transmitter must be above the receiver")
    return link.r_0 * (link.h_b - link.h_r) / gap + link.d_m / 2.0


def tx_rx_positions(link: LinkGeometry) -> tuple[np.ndarray, np.ndarray]:
    """2-D positions of Tx (P) and Rx (O) in sidewalk coordinates."""
    w_s = link.w_s if link.w_s is not None else 0.0
    p = np.array([0.0, w_s])
    o = np.array([link.r_0 * math.sin(link.alpha), w_s - link.r_0 * math.cos(link.alpha)])
    return p, o


def build_zone(link: LinkGeometry) -> BlockageZone:
    """Construct the rectangle ABCD and its Y-axis projection w_e."""
    r = zone_length(link)
    _, o = tx_rx_positions(link)
    sin_a, cos_a = math.sin(link.alpha), math.cos(link.alpha)
    half = link.d_m / 2.0
    a = (o[0] - half * cos_a, o[1] - half * sin_a)
    b = (o[0] + half * cos_a, o[1] + half * sin_a)
    c = (b[0] - r * sin_a, b[1] + r * cos_a)
    d = (a[0] - r * sin_a, a[1] + r * cos_a)
    ys = (a[1], b[1], c[1], d[1])
    return BlockageZone(r=r, d_m=link.d_m, a=a, b=b, c=c, d=d,
                        w_e=max(ys) - min(ys), alpha=link.alpha)
