"""Probability distribution tables: a CDF on a grid plus explicit atoms.

The table is the currency passed between the residence-time, renewal and
conditional-probability layers.  Atoms (point masses) are first class
because full-width zone crossings leave strictly positive mass at the
maximal chord length; smearing that mass onto the grid would corrupt the
busy-period solution downstream.

Conventions:
  * ``cdf[k]`` is the right-continuous value at ``grid[k]`` and already
    includes any atom located at that node.
  * atoms sit exactly on grid nodes.
  * between nodes the continuous part is linear.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import DomainError

_ATOL = 1e-9


@dataclass(frozen=True)
class DistributionTable:
    grid: np.ndarray
    cdf: np.ndarray
    atoms: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        cdf = np.asarray(self.cdf, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "cdf", cdf)
        object.__setattr__(self, "atoms", tuple((float(a), float(m)) for a, m in self.atoms))
        self._validate()

    def _validate(self):
        g, f = self.grid, self.cdf
        if g.ndim != 1 or f.ndim != 1 or g.shape != f.shape or g.size < 1:
            raise DomainError("grid and cdf must be 1-D arrays of equal length")
        if g.size > 1 and not np.all(np.diff(g) > 0):
            raise DomainError("grid must be strictly increasing")
        if f[0] < -_ATOL:
            raise DomainError("cdf must start at or above 0")
        if abs(f[-1] - 1.0) > _ATOL:
            raise DomainError(f"cdf must end at 1 (got {f[-1]!r})")
        if np.any(np.diff(f) < -_ATOL):
            raise DomainError("cdf must be non-decreasing")
        total_atom = 0.0
        for loc, mass in self.atoms:
            if not (0.0 < mass <= 1.0 + _ATOL):
                raise DomainError(f"atom mass {mass} outside (0, 1]")
            k = int(np.argmin(np.abs(g - loc)))
            if abs(g[k] - loc) > _ATOL * max(1.0, abs(loc)):
                raise DomainError(f"atom at {loc} does not sit on a grid node")
            total_atom += mass
        if total_atom > 1.0 + _ATOL:
            raise DomainError("atom masses sum above 1")

    # -- basic queries ---------------------------------------------------

    @property
    def support_max(self) -> float:
        return float(self.grid[-1])

    @property
    def h(self) -> float:
        """Uniform grid step; raises if the grid is not uniform."""
        d = np.diff(self.grid)
        if d.size == 0:
            raise DomainError("single-point grid has no step")
        if not np.allclose(d, d[0], rtol=1e-9, atol=1e-12 * max(1.0, self.support_max)):
            raise DomainError("grid is not uniform")
        return float(d[0])

    def atom_masses_on_nodes(self) -> np.ndarray:
        """Mass of the atom sitting at each grid node (0 where none)."""
        m = np.zeros_like(self.cdf)
        for loc, mass in self.atoms:
            k = int(np.argmin(np.abs(self.grid - loc)))
            m[k] += mass
        return m

    def eval(self, x) -> np.ndarray:
        """Right-continuous CDF value at x (scalar or array)."""
        scalar = np.isscalar(x) or np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        g, f = self.grid, self.cdf
        m = self.atom_masses_on_nodes()
        idx = np.searchsorted(g, x, side="right") - 1
        out = np.empty(x.shape, dtype=float)
        below = idx < 0
        above = idx >= g.size - 1
        mid = ~(below | above)
        out[below] = 0.0
        # at/above the last node the cdf is flat at its final value
        out[above] = f[-1]
        k = idx[mid]
        left = f[k]
        right_cont = f[k + 1] - m[k + 1]
        w = (x[mid] - g[k]) / (g[k + 1] - g[k])
        out[mid] = left + w * (right_cont - left)
        return float(out[0]) if scalar else out

    def eval_left(self, x) -> np.ndarray:
        """Left limit of the CDF at x."""
        scalar = np.isscalar(x) or np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.atleast_1d(np.asarray(self.eval(x), dtype=float)).copy()
        for loc, mass in self.atoms:
            hit = np.isclose(x, loc, rtol=0.0, atol=_ATOL * max(1.0, abs(loc)))
            out[hit] -= mass
        # left limit at or below the first node is 0
        out[x <= self.grid[0]] = 0.0
        return float(out[0]) if scalar else out

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Inverse-transform sampling honouring atoms."""
        m = self.atom_masses_on_nodes()
        f_left = self.cdf - m
        # interleave (left limit, right value) at each node so that atoms
        # appear as flat spots of the quantile function
        fs = np.column_stack([f_left, self.cdf]).ravel()
        xs = np.repeat(self.grid, 2)
        fs = np.maximum.accumulate(fs)
        u = rng.random(n) * self.cdf[-1]
        return np.interp(u, fs, xs)

    def scale(self, factor: float) -> "DistributionTable":
        """Table of factor*X: abscissae and atom locations scaled."""
        if factor <= 0:
            raise DomainError("scale factor must be positive")
        return DistributionTable(
            grid=self.grid * factor,
            cdf=self.cdf.copy(),
            atoms=tuple((a * factor, m) for a, m in self.atoms),
        )

    def to_csv(self, fp) -> None:
        """Write ``x,cdf`` rows; atoms go into a leading comment line."""
        if self.atoms:
            parts = ";".join(f"{a:.12g}:{m:.12g}" for a, m in self.atoms)
            fp.write(f"# atoms: {parts}\n")
        fp.write("x,cdf\n")
        for x, f in zip(self.grid, self.cdf):
            fp.write(f"{x:.12g},{f:.12g}\n")

    def to_csv_string(self) -> str:
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()


# -- constructors ---------------------------------------------------------


def make_table(grid, cont_cdf, atoms=(), tail_tol: float = 1e-4) -> DistributionTable:
    """Build a table from a continuous-part CDF and an atom list.

    ``cont_cdf`` excludes atom masses; they are added onto the nodes here.
    Any residual mass below 1 at the last node (at most ``tail_tol``) is
    closed off as a terminal atom so the table satisfies cdf[-1] = 1.
    """
    grid = np.asarray(grid, dtype=float)
    cdf = np.asarray(cont_cdf, dtype=float).copy()
    cdf = np.clip(cdf, 0.0, 1.0)
    np.maximum.accumulate(cdf, out=cdf)
    atom_list = [(float(a), float(m)) for a, m in atoms if m > 1e-12]
    for loc, mass in atom_list:
        k = int(np.argmin(np.abs(grid - loc)))
        cdf[k:] += mass
    cdf = np.clip(cdf, 0.0, None)
    np.maximum.accumulate(cdf, out=cdf)
    residual = 1.0 - cdf[-1]
    if residual > tail_tol + _ATOL:
        raise DomainError(f"table leaves {residual:.3g} unassigned mass")
    if residual > 1e-12:
        atom_list.append((float(grid[-1]), float(residual)))
        cdf[-1] = 1.0
    else:
        cdf /= cdf[-1]
    return DistributionTable(grid=grid, cdf=cdf, atoms=tuple(atom_list))


def exponential_table(rate: float, *, h: float | None = None,
                      n_points: int = 8000, tail: float = 1e-6) -> DistributionTable:
    """Exponential CDF tabulated out to the 1-tail quantile.

    The truncated tail mass is folded into a terminal atom so the table
    closes at 1; the induced mean bias is O(tail/rate) and far below the
    tolerances used anywhere downstream.
    """
    if rate <= 0:
        raise DomainError("exponential rate must be positive")
    support = -np.log(tail) / rate
    if h is not None:
        n = max(int(np.ceil(support / h)), 2)
        grid = np.arange(n + 1) * h
    else:
        grid = np.linspace(0.0, support, n_points)
    cdf = -np.expm1(-rate * grid)
    return make_table(grid, cdf, tail_tol=max(tail * 2, 1e-9))


def empirical_table(samples: np.ndarray) -> DistributionTable:
    """Empirical CDF of a sample, deduplicated to a strictly increasing grid."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise DomainError("cannot build an empirical table from no samples")
    vals, counts = np.unique(x, return_counts=True)
    cdf = np.cumsum(counts) / x.size
    cdf[-1] = 1.0
    return DistributionTable(grid=vals, cdf=cdf)


# -- operations -----------------------------------------------------------


def mean_of(table: DistributionTable) -> float:
    """E[X] = integral of the survival function, atoms handled exactly.

    Assumes a non-negative variable; any gap between 0 and grid[0]
    contributes with survival 1.
    """
    s = 1.0 - table.cdf
    m = table.atom_masses_on_nodes()
    d = np.diff(table.grid)
    # within a cell the survival ramps linearly down to its left limit at
    # the right node, which sits ``atom mass`` above the stored value
    core = float(np.sum(d * (s[:-1] + s[1:] + m[1:]) / 2.0))
    lead = float(table.grid[0]) if table.grid[0] > 0 else 0.0
    return core + lead


def _half_lattice_masses(table: DistributionTable) -> np.ndarray:
    """Masses on the h/2 lattice: atoms on even indices (nodes), cell
    masses on odd indices (cell midpoints)."""
    m = table.atom_masses_on_nodes()
    cont = np.diff(table.cdf) - m[1:]
    cont = np.clip(cont, 0.0, None)
    out = np.zeros(2 * (table.grid.size - 1) + 1)
    out[::2] = m
    out[1::2] = cont
    return out


def convolve(a: DistributionTable, b: DistributionTable) -> DistributionTable:
    """CDF of the sum of independent variables with matching uniform grids.

    Continuous parts are convolved as midpoint cell masses on the half-step
    lattice (second-order accurate in the grid step); atom pairs are
    convolved exactly and reported in the output atom list.
    """
    ha, hb = a.h, b.h
    if not np.isclose(ha, hb, rtol=1e-9, atol=0.0):
        raise DomainError(f"grid mismatch: steps {ha} and {hb}")
    if abs(a.grid[0]) > _ATOL or abs(b.grid[0]) > _ATOL:
        raise DomainError("convolve expects grids starting at 0")
    h = ha
    ma = _half_lattice_masses(a)
    mb = _half_lattice_masses(b)
    if min(ma.size, mb.size) < 256 or ma.size * mb.size < 4_000_000:
        full = np.convolve(ma, mb)
    else:
        full = fftconvolve(ma, mb)
        full = np.clip(full, 0.0, None)
    n_out = (a.grid.size - 1) + (b.grid.size - 1) + 1
    grid = np.arange(n_out) * h
    csum = np.cumsum(full)
    cdf = csum[0 : 2 * n_out : 2].copy()
    cdf[-1] = csum[-1]
    # exact atoms: products of atom pairs, merged per node
    merged: dict[int, float] = {}
    for la, msa in a.atoms:
        for lb, msb in b.atoms:
            k = int(round((la + lb) / h))
            merged[k] = merged.get(k, 0.0) + msa * msb
    atoms = tuple((k * h, ms) for k, ms in sorted(merged.items()) if ms > 1e-12)
    cdf = np.clip(cdf, 0.0, 1.0)
    np.maximum.accumulate(cdf, out=cdf)
    cdf[-1] = 1.0
    return DistributionTable(grid=grid, cdf=cdf, atoms=atoms)


def ks_statistic(samples: np.ndarray, table: DistributionTable) -> float:
    """One-sample Kolmogorov-Smirnov distance of a sample against a table."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise DomainError("KS distance needs at least one sample")
    f_right = np.asarray(table.eval(x), dtype=float)
    f_left = np.asarray(table.eval_left(x), dtype=float)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f_right)
    d_minus = np.max(f_left - (i - 1) / n)
    return float(max(d_plus, d_minus, 0.0))
