"""Physical parameters, graphene conductivity, damping profiles and sources.

Includes the separable exact solution used by the convergence harness: a
time-periodic field on the unit square whose magnetic part differs above
and below the horizontal interface y = 0.5, together with the volume
source terms that make it satisfy the interface model exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import CellTag, Mesh

EPSILON_0 = 8.8541878128e-12   # F/m
MU_0 = 1.25663706212e-6        # H/m


@dataclass(frozen=True)
class MaterialParams:
    """Vacuum constants plus the graphene relaxation time and conductivity."""

    eps0: float = EPSILON_0
    mu0: float = MU_0
    tau0: float = 1.2e-12      # s
    sigma0: float = 0.0        # S

    def __post_init__(self):
        if self.eps0 <= 0 or self.mu0 <= 0 or self.tau0 <= 0:
            raise ValueError("eps0, mu0 and tau0 must be positive")
        if self.sigma0 < 0:
            raise ValueError("sigma0 must be nonnegative")

    @property
    def c_v(self) -> float:
        """Wave propagation speed 1/sqrt(eps0 mu0)."""
        return 1.0 / np.sqrt(self.eps0 * self.mu0)

    @classmethod
    def unit(cls) -> "MaterialParams":
        return cls(eps0=1.0, mu0=1.0, tau0=1.0, sigma0=1.0)


@dataclass(frozen=True)
class KuboParams:
    """Inputs of the intraband surface-conductivity formula."""

    mu_c_ev: float                 # chemical potential, eV
    tau0: float = 1.2e-12          # relaxation time, s
    temperature: float = 300.0     # K
    q: float = 1.6022e-19          # C
    k_b: float = 1.3806e-23        # J/K
    hbar: float = 1.0546e-34       # J s

    def __post_init__(self):
        for name in ("mu_c_ev", "tau0", "temperature", "q", "k_b", "hbar"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def kubo_sigma0(params: KuboParams) -> float:
    """Intraband surface conductivity magnitude in siemens.

    The printed closed form carries a leading minus and evaluates negative
    for positive chemical potential; the model requires a positive surface
    conductivity, so the magnitude is returned.
    """
    kbt = params.k_b * params.temperature
    x = params.mu_c_ev * params.q / kbt
    bracket = x + 2.0 * np.log(np.exp(-x) + 1.0)
    prefactor = params.q ** 2 * kbt * params.tau0 / (np.pi * params.hbar ** 2)
    return float(prefactor * bracket)


@dataclass(frozen=True)
class PmlSpec:
    """Quartic damping profile of the absorbing collar.

    `bounds` is the physical rectangle (xmin, xmax, ymin, ymax); dd_x and
    dd_y are the collar thicknesses.  sigma_max follows the polynomial
    grading rule with natural logarithm of the reflection target.
    """

    bounds: tuple
    dd_x: float
    dd_y: float
    err: float = 1e-7
    eta: float = 377.0

    def __post_init__(self):
        if self.dd_x <= 0 or self.dd_y <= 0:
            raise ValueError("collar thickness must be positive")
        if not 0 < self.err < 1:
            raise ValueError("reflection target must lie in (0, 1)")

    @property
    def sigma_max_x(self) -> float:
        return -np.log(self.err) * 5.0 / (2.0 * self.dd_x * self.eta)

    @property
    def sigma_max_y(self) -> float:
        return -np.log(self.err) * 5.0 / (2.0 * self.dd_y * self.eta)

    @classmethod
    def for_mesh(cls, mesh: Mesh, pml_layers: int, err: float = 1e-7,
                 eta: float = 377.0) -> "PmlSpec":
        return cls(bounds=mesh.physical_bounds,
                   dd_x=pml_layers * mesh.h_x,
                   dd_y=pml_layers * mesh.h_y,
                   err=err, eta=eta)


def damping_profile(coord, spec: PmlSpec, axis: str) -> np.ndarray:
    """Quartic damping ramp: zero on the physical region, sigma_max at depth dd."""
    coord = np.asarray(coord, dtype=float)
    if axis == "x":
        lo, hi, dd, smax = spec.bounds[0], spec.bounds[1], spec.dd_x, spec.sigma_max_x
    elif axis == "y":
        lo, hi, dd, smax = spec.bounds[2], spec.bounds[3], spec.dd_y, spec.sigma_max_y
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    out = np.zeros_like(coord)
    above = coord >= hi
    below = coord <= lo
    out[above] = smax * ((coord[above] - hi) / dd) ** 4
    out[below] = smax * ((coord[below] - lo) / dd) ** 4
    return out


def damping_at_centroids(mesh: Mesh, spec: PmlSpec):
    """(sigma_x, sigma_y) sampled at cell centroids."""
    return (damping_profile(mesh.centroids[:, 0], spec, "x"),
            damping_profile(mesh.centroids[:, 1], spec, "y"))


@dataclass(frozen=True)
class SourceSpec:
    """Point dipole drive K_s = sign * sin(2 pi f0 t) / h_norm per source cell.

    `n_cycles` optionally gates the drive off after that many periods.
    """

    points: tuple                 # ((x, y, sign), ...)
    f0: float
    h_norm: float
    n_cycles: float | None = None

    def __post_init__(self):
        if self.f0 <= 0 or self.h_norm <= 0:
            raise ValueError("f0 and h_norm must be positive")

    def amplitude(self, t: float) -> float:
        if self.n_cycles is not None and t * self.f0 >= self.n_cycles:
            return 0.0
        return np.sin(2.0 * np.pi * self.f0 * t) / self.h_norm


def locate_cell(mesh: Mesh, point) -> int:
    """Lowest-index cell containing `point` (deterministic on shared edges)."""
    p = np.asarray(point, dtype=float)
    tris = mesh.vertices[mesh.triangles]
    d1 = tris[:, 1] - tris[:, 0]
    d2 = tris[:, 2] - tris[:, 0]
    rel = p[None, :] - tris[:, 0]
    det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    l1 = (rel[:, 0] * d2[:, 1] - rel[:, 1] * d2[:, 0]) / det
    l2 = (d1[:, 0] * rel[:, 1] - d1[:, 1] * rel[:, 0]) / det
    tol = 1e-12
    inside = (l1 >= -tol) & (l2 >= -tol) & (l1 + l2 <= 1.0 + tol)
    hits = np.flatnonzero(inside)
    if len(hits) == 0:
        raise ValueError(f"point {tuple(p)} lies outside the mesh")
    return int(hits[0])


def dipole_source_cells(mesh: Mesh, spec: SourceSpec) -> list:
    """Map each dipole point to its containing physical cell, as (cell, sign)."""
    out = []
    for x, y, sign in spec.points:
        cell = locate_cell(mesh, (x, y))
        if mesh.cell_tags[cell] != CellTag.PHYSICAL:
            raise ValueError(f"dipole source at ({x}, {y}) lies in the absorbing collar")
        out.append((cell, float(sign)))
    return out


def eval_source(spec: SourceSpec, t: float, source_cells, n_cells: int) -> np.ndarray:
    """Per-cell K_s values at time t (zero away from the source cells)."""
    ks = np.zeros(n_cells)
    amp = spec.amplitude(t)
    for cell, sign in source_cells:
        ks[cell] += sign * amp
    return ks


class ManufacturedCase:
    """Exact solution and source terms for the convergence study.

    The electric field is globally smooth; the magnetic field takes
    different closed forms above (branch 1) and below (branch 2) the
    interface y = 0.5.  On the interface both branches and the tangential
    electric field vanish, so the interface terms drop out exactly.

    The volume sources are defined so the pair satisfies the interface
    model with sources: f_vec = eps0 dE/dt - curl H and
    f_sca = mu0 dH/dt + curl E per subdomain; the scheme consumes them as
    ks = -f_sca (cell means) and the edge load f_vec + tau0 d(f_vec)/dt.
    """

    interface_y = 0.5

    def __init__(self, params: MaterialParams | None = None):
        self.params = params or MaterialParams.unit()
        self._a = 1.0 / (1.0 + 4.0 * np.pi ** 2)

    # -- trigonometric building blocks ------------------------------------

    @staticmethod
    def _sc(pts):
        x, y = pts[:, 0], pts[:, 1]
        w = 2.0 * np.pi
        return np.sin(w * x), np.cos(w * x), np.sin(w * y), np.cos(w * y)

    def _upper(self, pts):
        return pts[:, 1] > self.interface_y

    # -- exact fields -------------------------------------------------------

    def e_field(self, pts, t):
        sx, cx, sy, cy = self._sc(pts)
        st = np.sin(2.0 * np.pi * t)
        return np.column_stack([sx * sy * st, cx * cy * st])

    def dt_e_field(self, pts, t):
        sx, cx, sy, cy = self._sc(pts)
        ct = 2.0 * np.pi * np.cos(2.0 * np.pi * t)
        return np.column_stack([sx * sy * ct, cx * cy * ct])

    def dtt_e_field(self, pts, t):
        sx, cx, sy, cy = self._sc(pts)
        stt = -(2.0 * np.pi) ** 2 * np.sin(2.0 * np.pi * t)
        return np.column_stack([sx * sy * stt, cx * cy * stt])

    def curl_e(self, pts, t):
        sx, cx, sy, cy = self._sc(pts)
        st = np.sin(2.0 * np.pi * t)
        return -4.0 * np.pi * sx * cy * st

    def _g(self, t):
        return 2.0 * np.pi * (np.cos(2.0 * np.pi * t) - np.exp(-t))

    def _dg(self, t):
        return -(2.0 * np.pi) ** 2 * np.sin(2.0 * np.pi * t) + 2.0 * np.pi * np.exp(-t)

    def h_field(self, pts, t):
        sx, _, sy, _ = self._sc(pts)
        st = np.sin(2.0 * np.pi * t)
        upper = self._upper(pts)
        return self._a * sx * sy * np.where(upper, st, self._g(t))

    def dt_h_field(self, pts, t):
        sx, _, sy, _ = self._sc(pts)
        ct = 2.0 * np.pi * np.cos(2.0 * np.pi * t)
        upper = self._upper(pts)
        return self._a * sx * sy * np.where(upper, ct, self._dg(t))

    def _curl_h(self, pts, t):
        """(dH/dy, -dH/dx) with the subdomain dispatch."""
        sx, cx, sy, cy = self._sc(pts)
        upper = self._upper(pts)
        amp = np.where(upper, np.sin(2.0 * np.pi * t), self._g(t))
        w = 2.0 * np.pi
        return np.column_stack([self._a * w * sx * cy * amp,
                                -self._a * w * cx * sy * amp])

    def _dt_curl_h(self, pts, t):
        sx, cx, sy, cy = self._sc(pts)
        upper = self._upper(pts)
        damp = np.where(upper, 2.0 * np.pi * np.cos(2.0 * np.pi * t), self._dg(t))
        w = 2.0 * np.pi
        return np.column_stack([self._a * w * sx * cy * damp,
                                -self._a * w * cx * sy * damp])

    # -- source terms --------------------------------------------------------

    def f_vector(self, pts, t):
        """eps0 dE/dt - curl H, dispatched per subdomain."""
        return self.params.eps0 * self.dt_e_field(pts, t) - self._curl_h(pts, t)

    def dt_f_vector(self, pts, t):
        return self.params.eps0 * self.dtt_e_field(pts, t) - self._dt_curl_h(pts, t)

    def f_scalar(self, pts, t):
        """mu0 dH/dt + curl E, dispatched per subdomain."""
        return self.params.mu0 * self.dt_h_field(pts, t) + self.curl_e(pts, t)

    def ks(self, pts, t):
        """Magnetic drive consumed by the scheme: K_s = -f_scalar."""
        return -self.f_scalar(pts, t)

    def e_load_field(self, pts, t):
        """Electric drive of the reformulated equation: f + tau0 df/dt."""
        return self.f_vector(pts, t) + self.params.tau0 * self.dt_f_vector(pts, t)

    def dt_e0(self, pts):
        """Consistent initial electric velocity (the model-side value of IC2)."""
        return self.dt_e_field(pts, 0.0)
