"""Unified leapfrog time stepper for the graphene/absorber field equations.

Each step first updates the two split magnetic components cell by cell
(the P0 mass is diagonal, so those solves are exact divisions), then
solves one symmetric positive definite edge system for the new electric
field.  Subdomain indicator coefficients merge the interface scheme in
the physical region with the split-field damping scheme in the collar;
with the damping off and every cell physical the update reduces exactly
to the plain interface scheme.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assembly import OperatorSet, apply_pec
from .elements import interpolate_hcurl, project_l2_p0
from .mesh import Mesh
from .physics import MaterialParams
from .sparse_solve import SolverConfig, solve_spd


class BlowUpError(RuntimeError):
    """Field norms exceeded the divergence guard (CFL violation or bad setup)."""

    def __init__(self, message, step):
        super().__init__(message)
        self.step = step


@dataclass(frozen=True)
class CflConstants:
    """Inverse-estimate and trace constants entering the time-step bound."""

    c_in: float = 1.0
    c_tr: float = 1.0

    def __post_init__(self):
        if self.c_in <= 0 or self.c_tr <= 0:
            raise ValueError("CFL constants must be positive")


@dataclass
class FieldState:
    """Electric edge DoFs at two levels plus split magnetic cell DoFs.

    e_curr lives at t_n, e_prev at t_{n-1}, hzx/hzy at t_{n-1/2}.
    """

    e_prev: np.ndarray
    e_curr: np.ndarray
    hzx: np.ndarray
    hzy: np.ndarray
    step: int
    tau: float

    @property
    def hz(self) -> np.ndarray:
        return self.hzx + self.hzy


@dataclass(frozen=True)
class EnergyReport:
    """One evaluation of the discrete energy, split into its terms."""

    step: int
    time: float
    kinetic: float
    curl: float
    magnetic: float
    interface: float
    curl_extra: float

    @property
    def total(self) -> float:
        return (self.kinetic + self.curl + self.magnetic
                + self.interface + self.curl_extra)


@dataclass
class Snapshot:
    step: int
    time: float
    e: np.ndarray
    hz: np.ndarray


@dataclass
class SimulationResult:
    snapshots: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    state: FieldState | None = None


def cfl_max_timestep(params: MaterialParams, mesh: Mesh,
                     consts: CflConstants = CflConstants()) -> float:
    """Largest stable time step of the explicit scheme.

    Minimum of one second, the wave-speed bound, the interface bound and
    the two relaxation bounds, evaluated with h = min(h_x, h_y).
    """
    h = min(mesh.h_x, mesh.h_y)
    if h <= 0:
        raise ValueError("mesh sizes must be positive")
    cv = params.c_v
    terms = [
        1.0,
        h / (2.0 * consts.c_in * cv),
        h * np.sqrt(params.tau0) / (np.sqrt(2.0) * consts.c_in * cv),
        h * params.tau0 / (consts.c_in * cv),
    ]
    if params.sigma0 > 0:
        terms.append(h * np.sqrt(params.eps0 * params.tau0)
                     / (2.0 * consts.c_tr * np.sqrt(params.sigma0)))
    return float(min(terms))


def init_state(mesh: Mesh, ops: OperatorSet, params: MaterialParams,
               e0=None, h0=None, ks0_cells=None, tau: float = 0.0,
               dt_e0=None, zero_boundary: bool = True):
    """Discretise the initial conditions.

    Returns (state, velocity) where velocity carries the edge interpolant
    of the initial electric velocity used to eliminate the fictitious
    pre-initial level at the first step.  By default that velocity is the
    model value eps0^-1 curl(H0); pass `dt_e0` when volume sources make
    the consistent initial velocity differ (the manufactured runs do).

    The magnetic start value is the cell projection of
    H0 + (tau / 2 mu0)(curl(E0) + Ks(., 0)); the cell means of curl(E0)
    are recovered exactly from the interpolated edge DoFs via Stokes.
    """
    e_curr = interpolate_hcurl(e0, mesh) if e0 is not None else np.zeros(mesh.n_edges)
    if zero_boundary:
        e_curr[ops.pec_mask] = 0.0

    h0_cells = project_l2_p0(h0, mesh) if h0 is not None else np.zeros(mesh.n_triangles)
    ks0 = np.zeros(mesh.n_triangles) if ks0_cells is None else np.asarray(ks0_cells)
    curl_e0 = (ops.c @ e_curr) / ops.areas
    h_half = h0_cells + tau / (2.0 * params.mu0) * (curl_e0 + ks0)

    if dt_e0 is None and h0 is not None:
        dt_e0 = _default_velocity_field(h0, params, min(mesh.h_x, mesh.h_y))
    velocity = (interpolate_hcurl(dt_e0, mesh) if dt_e0 is not None
                else np.zeros(mesh.n_edges))

    state = FieldState(e_prev=np.zeros(mesh.n_edges), e_curr=e_curr,
                       hzx=0.5 * h_half, hzy=0.5 * h_half, step=0, tau=tau)
    return state, velocity


def _default_velocity_field(h0, params: MaterialParams, h: float):
    """eps0^-1 curl(H0) = eps0^-1 (dH0/dy, -dH0/dx), by central differences."""
    step = 1e-5 * h

    def field(pts):
        up = pts.copy(); up[:, 1] += step
        dn = pts.copy(); dn[:, 1] -= step
        rt = pts.copy(); rt[:, 0] += step
        lt = pts.copy(); lt[:, 0] -= step
        dh_dy = (np.asarray(h0(up)) - np.asarray(h0(dn))) / (2.0 * step)
        dh_dx = (np.asarray(h0(rt)) - np.asarray(h0(lt))) / (2.0 * step)
        return np.column_stack([dh_dy, -dh_dx]) / params.eps0

    return field


class LeapfrogStepper:
    """Precomputed matrices and coefficients of the merged update."""

    def __init__(self, ops: OperatorSet, params: MaterialParams, tau: float,
                 solver: SolverConfig | None = None):
        if tau <= 0:
            raise ValueError("time step must be positive")
        self.ops = ops
        self.params = params
        self.tau = tau
        self.solver = solver or SolverConfig()

        eps0, mu0, tau0 = params.eps0, params.mu0, params.tau0
        m_lead = (eps0 / tau ** 2) * ops.m_e
        m_damp = (1.0 / (2.0 * tau)) * ops.m_d1 + (eps0 / (2.0 * tau * tau0)) * ops.m_e_phys
        self.a_raw = (m_lead + m_damp).tocsr()
        self.b_raw = (m_lead - m_damp).tocsr()
        # First step: the pre-initial level is eliminated through the initial
        # velocity, which turns the system matrix into a_raw + b_raw.
        self.first_raw = (2.0 * m_lead).tocsr()
        self.a_pec = apply_pec(self.a_raw, ops.pec_mask)
        self.first_pec = apply_pec(self.first_raw, ops.pec_mask)
        self.ct = ops.c.T.tocsr()

        # Split-field magnetic update coefficients per cell.
        self._hx_num = mu0 / tau - mu0 * ops.sigma_x / (2.0 * eps0)
        self._hx_den = mu0 / tau + mu0 * ops.sigma_x / (2.0 * eps0)
        self._hy_num = mu0 / tau - mu0 * ops.sigma_y / (2.0 * eps0)
        self._hy_den = mu0 / tau + mu0 * ops.sigma_y / (2.0 * eps0)

    def step_h(self, state: FieldState, ks_cells: np.ndarray):
        """Advance the split magnetic components by one half-shifted step."""
        ops = self.ops
        half_ks = 0.5 * ks_cells
        drive_x = (ops.dx @ state.e_curr) / ops.areas + half_ks
        drive_y = (ops.dy @ state.e_curr) / ops.areas - half_ks
        hzx = (self._hx_num * state.hzx - drive_x) / self._hx_den
        hzy = (self._hy_num * state.hzy + drive_y) / self._hy_den
        return hzx, hzy

    def step_e(self, state: FieldState, hzx_new, hzy_new, ks_cells,
               extra_load=None, bc_values=None, first_step_velocity=None):
        """Solve the edge system for the next electric field."""
        ops, params, tau = self.ops, self.params, self.tau
        mu0, tau0, sigma0 = params.mu0, params.tau0, params.sigma0

        h_sum = hzx_new + state.hzx + hzy_new + state.hzy
        h_diff = hzx_new - state.hzx + hzy_new - state.hzy
        h_term = (ops.c1 / (2.0 * tau0)) * h_sum + (ops.c2 / tau) * h_diff

        rhs = (-(1.0 / mu0) * (ops.s_phys @ state.e_curr)
               + self.ct @ (h_term - (1.0 / mu0) * (ops.c1 * ks_cells)))
        if sigma0 != 0.0:
            rhs -= (sigma0 / tau0) * (ops.g @ state.e_curr)
        if extra_load is not None:
            rhs += extra_load

        if state.step == 0:
            if first_step_velocity is None:
                first_step_velocity = np.zeros_like(state.e_curr)
            rhs += self.first_raw @ state.e_curr + 2.0 * tau * (self.b_raw @ first_step_velocity)
            a_raw, a_pec = self.first_raw, self.first_pec
        else:
            rhs += self.first_raw @ state.e_curr - self.b_raw @ state.e_prev
            a_raw, a_pec = self.a_raw, self.a_pec

        return self._solve_constrained(a_raw, a_pec, rhs, bc_values, state.e_curr)

    def _solve_constrained(self, a_raw, a_pec, rhs, bc_values, warm):
        mask = self.ops.pec_mask
        x0 = np.array(warm, dtype=float)
        if bc_values is None:
            rhs = np.array(rhs, dtype=float)
            rhs[mask] = 0.0
            x0[mask] = 0.0
        else:
            lifted = np.zeros_like(rhs)
            lifted[mask] = bc_values[mask]
            rhs = rhs - a_raw @ lifted
            rhs[mask] = bc_values[mask]
            x0[mask] = bc_values[mask]
        return solve_spd(a_pec, rhs, self.solver, x0=x0)

    def advance(self, state: FieldState, ks_cells, extra_load=None,
                bc_values=None, first_step_velocity=None) -> FieldState:
        """One full leapfrog step; mutates and returns `state`."""
        hzx_new, hzy_new = self.step_h(state, ks_cells)
        e_next = self.step_e(state, hzx_new, hzy_new, ks_cells,
                             extra_load=extra_load, bc_values=bc_values,
                             first_step_velocity=first_step_velocity)
        state.e_prev = state.e_curr
        state.e_curr = e_next
        state.hzx = hzx_new
        state.hzy = hzy_new
        state.step += 1
        return state


def discrete_energy(state: FieldState, ops: OperatorSet,
                    params: MaterialParams) -> EnergyReport:
    """Discrete energy of the interface scheme evaluated on the state.

    Uses e_prev/e_curr as the two electric levels and hz as the magnetic
    half level sitting between them; every term is a nonnegative
    quadratic form of the assembled matrices.
    """
    e_new, e_old = state.e_curr, state.e_prev
    tau = state.tau
    diff = (e_new - e_old) / tau
    s_new = float(e_new @ (ops.s @ e_new))
    s_old = float(e_old @ (ops.s @ e_old))
    g_new = float(e_new @ (ops.g @ e_new))
    g_old = float(e_old @ (ops.g @ e_old))
    hz = state.hz
    return EnergyReport(
        step=state.step,
        time=state.step * tau,
        kinetic=params.eps0 * float(diff @ (ops.m_e @ diff)),
        curl=(s_new + s_old) / (2.0 * params.mu0),
        magnetic=params.mu0 * float(ops.areas @ hz ** 2),
        interface=params.sigma0 / (2.0 * params.tau0) * (g_new + g_old),
        curl_extra=tau / (4.0 * params.mu0 * params.tau0) * (s_new + s_old),
    )


def run_simulation(mesh: Mesh, ops: OperatorSet, params: MaterialParams,
                   tau: float, n_steps: int, source=None, e0=None, h0=None,
                   dt_e0=None, extra_load=None, bc_values=None,
                   snapshot_every: int = 0, energy_every: int = 1,
                   solver: SolverConfig | None = None,
                   blowup_factor: float = 1e12) -> SimulationResult:
    """Run the leapfrog scheme for `n_steps` steps.

    source     : callable (step, t) -> per-cell K_s values, or None.
    extra_load : callable t -> edge load vector added to the electric step.
    bc_values  : callable t -> full edge vector carrying Dirichlet data on
                 the outer boundary; None imposes the conducting boundary.
    Snapshots include the initial state; the energy log starts after the
    first step.  Raises BlowUpError when a field norm passes the guard.
    """
    n_cells = mesh.n_triangles
    ks0 = source(0, 0.0) if source is not None else None
    state, velocity = init_state(mesh, ops, params, e0=e0, h0=h0,
                                 ks0_cells=ks0, tau=tau, dt_e0=dt_e0,
                                 zero_boundary=bc_values is None)
    stepper = LeapfrogStepper(ops, params, tau, solver=solver)
    result = SimulationResult(state=state)

    if snapshot_every > 0:
        result.snapshots.append(Snapshot(0, 0.0, state.e_curr.copy(), state.hz))

    scale = max(np.max(np.abs(state.e_curr), initial=0.0),
                np.max(np.abs(state.hz), initial=0.0))

    for n in range(n_steps):
        t_n = n * tau
        ks = source(n, t_n) if source is not None else np.zeros(n_cells)
        load = extra_load(t_n) if extra_load is not None else None
        bc = bc_values((n + 1) * tau) if bc_values is not None else None
        stepper.advance(state, ks, extra_load=load, bc_values=bc,
                        first_step_velocity=velocity if n == 0 else None)

        peak = max(np.max(np.abs(state.e_curr)), np.max(np.abs(state.hz)))
        if not np.isfinite(peak):
            raise BlowUpError(f"non-finite field at step {state.step}", state.step)
        if state.step <= 10:
            scale = max(scale, peak)
        elif peak > blowup_factor * max(scale, np.finfo(float).tiny):
            raise BlowUpError(
                f"field magnitude {peak:.3e} exceeded {blowup_factor:.0e} x "
                f"initial scale at step {state.step}", state.step)

        if energy_every > 0 and state.step % energy_every == 0:
            result.energy.append(discrete_energy(state, ops, params))
        if snapshot_every > 0 and state.step % snapshot_every == 0:
            result.snapshots.append(
                Snapshot(state.step, state.step * tau, state.e_curr.copy(), state.hz))

    return result
