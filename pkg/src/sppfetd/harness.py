"""Scenario library, convergence study, error norms and file output."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .assembly import build_operator_set
from .dynamics import (CflConstants, FieldState, SimulationResult, Snapshot,
                       run_simulation)
from .elements import (cell_basis_data, eval_edge_field, quad_points_physical,
                       segment_quadrature, triangle_quadrature)
from .mesh import (Arc, InterfaceSpec, Mesh, Segment,
                   generate_rect_mesh, load_mesh, snap_interface)
from .physics import (KuboParams, ManufacturedCase, MaterialParams, PmlSpec,
                      SourceSpec, damping_at_centroids, dipole_source_cells,
                      eval_source, kubo_sigma0)
from .sparse_solve import SolverConfig

MICRON = 1e-6
CONFIG_VERSION = 1


class ConfigError(ValueError):
    """Invalid simulation configuration."""


@dataclass(frozen=True)
class SimulationConfig:
    """Complete description of one simulation run."""

    name: str = "custom"
    bounds: tuple | None = None
    nx: int | None = None
    ny: int | None = None
    pml_layers: int = 0
    mesh_file: str | None = None
    interface: InterfaceSpec | None = None
    material: MaterialParams = field(default_factory=MaterialParams)
    kubo: KuboParams | None = None
    pml_err: float = 1e-7
    pml_eta: float = 377.0
    source: SourceSpec | None = None
    tau: float = 1e-16
    n_steps: int = 0
    snapshot_every: int = 0
    out_dir: str = "out"
    cfl: CflConstants = field(default_factory=CflConstants)
    solver: SolverConfig = field(default_factory=SolverConfig)
    manufactured: bool = False

    def __post_init__(self):
        if self.tau <= 0:
            raise ConfigError("tau must be positive")
        if self.n_steps < 0:
            raise ConfigError("n_steps must be nonnegative")
        if self.snapshot_every < 0:
            raise ConfigError("snapshot cadence must be nonnegative")

    def resolved_material(self) -> MaterialParams:
        if self.kubo is not None:
            return replace(self.material, tau0=self.kubo.tau0,
                           sigma0=kubo_sigma0(self.kubo))
        return self.material


@dataclass
class ErrorTable:
    """Mesh sizes, L2 errors and observed halving rates."""

    hs: list
    e_errors: list
    h_errors: list

    def rates(self, errors) -> list:
        out = [None]
        for prev, cur in zip(errors[:-1], errors[1:]):
            out.append(float(np.log2(prev / cur)))
        return out

    @property
    def e_rates(self):
        return self.rates(self.e_errors)

    @property
    def h_rates(self):
        return self.rates(self.h_errors)

    def __str__(self):
        lines = [f"{'h':>10} {'E error':>14} {'rate':>9} {'H error':>14} {'rate':>9}"]
        for h, ee, re_, eh, rh in zip(self.hs, self.e_errors, self.e_rates,
                                      self.h_errors, self.h_rates):
            re_s = f"{re_:9.6f}" if re_ is not None else " " * 9
            rh_s = f"{rh:9.6f}" if rh is not None else " " * 9
            lines.append(f"{h:10.6f} {ee:14.6e} {re_s} {eh:14.6e} {rh_s}")
        return "\n".join(lines)


def l2_errors(state: FieldState, case: ManufacturedCase, mesh: Mesh,
              t: float, degree: int = 3):
    """L2 errors of the electric and magnetic fields against the exact case.

    The electric field is compared at time t; the magnetic cell values live
    half a step earlier and are compared at t - tau/2.
    """
    rule = triangle_quadrature(degree)
    pts = quad_points_physical(mesh, rule)
    e_h = eval_edge_field(mesh, state.e_curr, rule)

    flat = pts.reshape(-1, 2)
    e_ex = case.e_field(flat, t).reshape(e_h.shape)
    diff2 = np.sum((e_ex - e_h) ** 2, axis=2)
    err_e = np.sqrt(2.0 * np.sum(mesh.areas[:, None] * diff2 * rule.weights[None, :]))

    t_h = t - 0.5 * state.tau
    h_ex = case.h_field(flat, t_h).reshape(pts.shape[:2])
    dh2 = (h_ex - state.hz[:, None]) ** 2
    err_h = np.sqrt(2.0 * np.sum(mesh.areas[:, None] * dh2 * rule.weights[None, :]))
    return float(err_e), float(err_h)


class ManufacturedDrivers:
    """Per-step source closures of the manufactured problem on one mesh.

    Precomputes quadrature geometry so the time loop only evaluates the
    closed-form fields.  Provides the cell drive (ks), the electric load
    of the reformulated equation, and the Dirichlet data carried by the
    exact solution on the outer boundary.
    """

    def __init__(self, mesh: Mesh, case: ManufacturedCase, pec_mask: np.ndarray,
                 degree: int = 3):
        self.mesh = mesh
        self.case = case
        rule = triangle_quadrature(degree)
        self.weights = rule.weights
        self.pts = quad_points_physical(mesh, rule)
        self.flat = self.pts.reshape(-1, 2)
        phi, _, _ = cell_basis_data(mesh, rule)
        self.phi = phi
        self.tau0 = case.params.tau0

        seg = segment_quadrature(degree)
        bd = np.flatnonzero(pec_mask)
        self.bd_edges = bd
        p0 = mesh.vertices[mesh.edges[bd, 0]]
        p1 = mesh.vertices[mesh.edges[bd, 1]]
        self.bd_pts = p0[:, None, :] + seg.points[None, :, None] * (p1 - p0)[:, None, :]
        self.bd_tangents = mesh.edge_tangents[bd]
        self.bd_lengths = mesh.edge_lengths[bd]
        self.bd_weights = seg.weights
        self.n_edges = mesh.n_edges

    def source(self, step: int, t: float) -> np.ndarray:
        vals = self.case.ks(self.flat, t).reshape(self.pts.shape[:2])
        return 2.0 * vals @ self.weights

    def extra_load(self, t: float) -> np.ndarray:
        vals = self.case.e_load_field(self.flat, t).reshape(self.pts.shape)
        local = 2.0 * self.mesh.areas[:, None] * np.einsum(
            "q,tqd,tqkd->tk", self.weights, vals, self.phi)
        out = np.zeros(self.n_edges)
        np.add.at(out, self.mesh.tri_edges.ravel(), local.ravel())
        return out / self.tau0

    def bc_values(self, t: float) -> np.ndarray:
        shape = self.bd_pts.shape[:2]
        vals = self.case.e_field(self.bd_pts.reshape(-1, 2), t).reshape(shape + (2,))
        moments = np.einsum("q,eqd,ed->e", self.bd_weights, vals, self.bd_tangents)
        out = np.zeros(self.n_edges)
        out[self.bd_edges] = moments * self.bd_lengths
        return out


def build_manufactured_problem(h: float, params: MaterialParams | None = None):
    """Unit-square mesh with the midline interface plus assembled operators."""
    n = round(1.0 / h)
    if abs(n * h - 1.0) > 1e-12:
        raise ConfigError(f"1/h must be an integer, got h={h}")
    if n % 2 != 0:
        raise ConfigError("ny must be even so the interface lies on a grid line")
    mesh = generate_rect_mesh((0.0, 1.0, 0.0, 1.0), n, n, 0)
    snap_interface(mesh, InterfaceSpec([Segment((0.0, 0.5), (1.0, 0.5))]))
    ops = build_operator_set(mesh)
    case = ManufacturedCase(params or MaterialParams.unit())
    return mesh, ops, case


def _convergence_single(h: float, mode: str, tau: float, n_steps: int,
                        final_time: float, tau_ratio: float,
                        solver: SolverConfig):
    mesh, ops, case = build_manufactured_problem(h)
    if mode == "fixed":
        step_tau, steps = tau, n_steps
    else:
        step_tau = h / tau_ratio
        steps = round(final_time / step_tau)
    drivers = ManufacturedDrivers(mesh, case, ops.pec_mask)
    result = run_simulation(
        mesh, ops, case.params, step_tau, steps,
        source=drivers.source, e0=None, h0=None, dt_e0=case.dt_e0,
        extra_load=drivers.extra_load, bc_values=drivers.bc_values,
        snapshot_every=0, energy_every=0, solver=solver)
    return l2_errors(result.state, case, mesh, steps * step_tau)


def run_convergence_study(mode: str, h_list, tau: float = 1e-4,
                          n_steps: int = 1000, final_time: float = 0.01,
                          tau_ratio: float = 200.0,
                          solver: SolverConfig | None = None) -> ErrorTable:
    """Manufactured-solution study over a halving sequence of mesh sizes.

    mode "fixed" runs every mesh with the same small time step for
    `n_steps` steps; mode "coupled" ties tau to h via `tau_ratio` and runs
    to `final_time`.  Worker threads are capped by SPPFETD_THREADS.
    """
    if mode not in ("fixed", "coupled"):
        raise ConfigError(f"unknown convergence mode '{mode}'")
    h_list = list(h_list)
    for prev, cur in zip(h_list[:-1], h_list[1:]):
        if abs(prev / cur - 2.0) > 1e-9:
            raise ConfigError("mesh sizes must halve between rows")
    solver = solver or SolverConfig()

    threads = int(os.environ.get("SPPFETD_THREADS", "1") or 1)
    args = [(h, mode, tau, n_steps, final_time, tau_ratio, solver) for h in h_list]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=min(threads, len(h_list))) as pool:
            errors = list(pool.map(lambda a: _convergence_single(*a), args))
    else:
        errors = [_convergence_single(*a) for a in args]
    return ErrorTable(hs=h_list,
                      e_errors=[e for e, _ in errors],
                      h_errors=[h for _, h in errors])


# -- scenario library ---------------------------------------------------------

_WIDE = (-30 * MICRON, 30 * MICRON, -10 * MICRON, 10 * MICRON)
_SQUARE = (-20 * MICRON, 20 * MICRON, -20 * MICRON, 20 * MICRON)


def _um_segment(p0, p1) -> Segment:
    return Segment((p0[0] * MICRON, p0[1] * MICRON),
                   (p1[0] * MICRON, p1[1] * MICRON))


def _um_arc(center, radius, a0, a1) -> Arc:
    return Arc((center[0] * MICRON, center[1] * MICRON), radius * MICRON, a0, a1)


def _dipole_pair(x, y_top, y_bot):
    return ((x * MICRON, y_top * MICRON, 1.0), (x * MICRON, y_bot * MICRON, -1.0))


def _adjacent_arcs():
    hy = 0.2
    up0, up1 = np.arctan2(4.5, -6.0), np.arctan2(4.5, 6.0)
    dn0, dn1 = np.arctan2(-4.5, -6.0), np.arctan2(-4.5, 6.0)
    return [
        _um_arc((-18.0, -4.5), 7.5, up0, up1),
        _um_arc((-6.0, 4.5 - 2 * hy), 7.5, dn0, dn1),
        _um_arc((6.0, -4.5), 7.5, up0, up1),
        _um_arc((18.0, 4.5 - 2 * hy), 7.5, dn0, dn1),
    ]


def _spiral_primitives():
    w = 4.0
    prims = []
    for k in range(1, 8):
        if k % 2 == 1:  # upper half turns centred on the origin
            prims.append(_um_arc((0.0, 0.0), (k + 1) / 2 * w, np.pi, 0.0))
        else:           # lower half turns centred on (-w/2, 0)
            prims.append(_um_arc((-w / 2, 0.0), (k + 2) / 2 * w, 0.0, -np.pi))
    r = np.sqrt(290.0)
    prims.append(_um_arc((-1.0, -1.0), r, np.arctan2(1.0, 17.0), np.arctan2(-17.0, 1.0)))
    prims.append(_um_segment((0.0, -4.5 * w), (-4.5 * w, -4.5 * w)))
    return prims


_BULB_ARC = (np.arctan2(2.0, -4.8), -np.arctan2(2.0, -4.8))

SCENARIO_NAMES = ("bifurcated-straight", "bifurcated-curved", "adjacent-arcs",
                  "bulb", "ring-resonator", "spiral", "convergence")


def scenario(name: str) -> SimulationConfig:
    """Fully populated configuration for one of the published setups."""
    kubo = KuboParams(mu_c_ev=1.5)
    common = dict(pml_layers=12, tau=8.3e-17, kubo=kubo, snapshot_every=1000)
    src_f0 = 1e13

    if name == "bifurcated-straight":
        iface = InterfaceSpec([
            _um_segment((-30, 0), (-15, 0)),
            _um_segment((-15, 0), (0, 5)),
            _um_segment((0, 5), (15, 5)),
            _um_segment((-15, 0), (0, -5)),
            _um_segment((0, -5), (15, -5)),
        ])
        return SimulationConfig(
            name=name, bounds=_WIDE, nx=100, ny=100, interface=iface,
            source=SourceSpec(_dipole_pair(-27, 1.0, -1.0), src_f0, 0.2 * MICRON),
            n_steps=20000, **common)

    if name == "bifurcated-curved":
        iface = InterfaceSpec([
            _um_segment((-28, 0), (0, 0)),
            _um_arc((7, 0), 7.0, np.pi / 2, 3 * np.pi / 2),
            _um_segment((7, 7), (15, 7)),
            _um_segment((7, -7), (15, -7)),
        ])
        return SimulationConfig(
            name=name, bounds=_WIDE, nx=100, ny=100, interface=iface,
            source=SourceSpec(_dipole_pair(-27, 1.0, -1.0), src_f0, 0.2 * MICRON),
            n_steps=20000, **common)

    if name == "adjacent-arcs":
        return SimulationConfig(
            name=name, bounds=_WIDE, nx=100, ny=100,
            interface=InterfaceSpec(_adjacent_arcs()),
            source=SourceSpec(_dipole_pair(-18, 3.5, 2.5), src_f0, 0.2 * MICRON),
            n_steps=20000, **common)

    if name == "bulb":
        iface = InterfaceSpec([
            _um_segment((-15, 2), (0, 2)),
            _um_segment((-15, -2), (0, -2)),
            _um_arc((4.8, 0.0), 5.2, _BULB_ARC[0], _BULB_ARC[1]),
        ])
        pair_top = _dipole_pair(-15, 2.5, 1.5)
        pair_bot = _dipole_pair(-15, -1.5, -2.5)
        return SimulationConfig(
            name=name, bounds=_WIDE, nx=100, ny=100, interface=iface,
            source=SourceSpec(pair_top + pair_bot, src_f0, 0.2 * MICRON),
            n_steps=10000, **common)

    if name == "ring-resonator":
        iface = InterfaceSpec([
            _um_arc((0.0, 0.0), 11.0, 0.0, 2 * np.pi),
            _um_segment((-15, 13), (15, 13)),
            _um_segment((-15, -13), (15, -13)),
        ])
        return SimulationConfig(
            name=name, bounds=_SQUARE, nx=400, ny=400, interface=iface,
            source=SourceSpec(_dipole_pair(-13, 13.5, 12.5), src_f0, 0.1 * MICRON),
            n_steps=20000, **common)

    if name == "spiral":
        return SimulationConfig(
            name=name, bounds=_SQUARE, nx=400, ny=400,
            interface=InterfaceSpec(_spiral_primitives()),
            source=SourceSpec(_dipole_pair(-16, -17.5, -18.5), src_f0, 0.1 * MICRON),
            n_steps=100000, pml_layers=12, tau=8.3e-17,
            kubo=KuboParams(mu_c_ev=0.8), snapshot_every=2000)

    if name == "convergence":
        return SimulationConfig(
            name=name, bounds=(0.0, 1.0, 0.0, 1.0), nx=20, ny=20, pml_layers=0,
            interface=InterfaceSpec([Segment((0.0, 0.5), (1.0, 0.5))]),
            material=MaterialParams.unit(), tau=1e-4, n_steps=1000,
            manufactured=True)

    raise ConfigError(f"unknown scenario '{name}'; valid names: "
                      + ", ".join(SCENARIO_NAMES))


# -- runner -------------------------------------------------------------------

def build_mesh_for(config: SimulationConfig) -> Mesh:
    if config.mesh_file is not None:
        mesh = load_mesh(config.mesh_file)
    else:
        if config.bounds is None or config.nx is None or config.ny is None:
            raise ConfigError("config needs either a mesh file or bounds/nx/ny")
        mesh = generate_rect_mesh(config.bounds, config.nx, config.ny,
                                  config.pml_layers)
    if config.interface is not None:
        snap_interface(mesh, config.interface)
    return mesh


def run(config: SimulationConfig, out_dir: str | None = None) -> SimulationResult:
    """Execute a configured run and write snapshots plus the energy log."""
    mesh = build_mesh_for(config)
    params = config.resolved_material()

    sigma_x = sigma_y = None
    if config.pml_layers > 0:
        pml = PmlSpec.for_mesh(mesh, config.pml_layers,
                               err=config.pml_err, eta=config.pml_eta)
        sigma_x, sigma_y = damping_at_centroids(mesh, pml)
    ops = build_operator_set(mesh, sigma_x, sigma_y)

    source = extra_load = bc_values = dt_e0 = None
    if config.manufactured:
        case = ManufacturedCase(params)
        drivers = ManufacturedDrivers(mesh, case, ops.pec_mask)
        source, extra_load = drivers.source, drivers.extra_load
        bc_values, dt_e0 = drivers.bc_values, case.dt_e0
    elif config.source is not None:
        cells = dipole_source_cells(mesh, config.source)
        spec = config.source

        def source(step, t, _cells=cells, _spec=spec):
            return eval_source(_spec, t, _cells, mesh.n_triangles)

    result = run_simulation(
        mesh, ops, params, config.tau, config.n_steps, source=source,
        dt_e0=dt_e0, extra_load=extra_load, bc_values=bc_values,
        snapshot_every=config.snapshot_every,
        energy_every=max(config.snapshot_every, 1) if config.n_steps else 0,
        solver=config.solver)

    out = out_dir or config.out_dir
    if out:
        os.makedirs(out, exist_ok=True)
        for snap in result.snapshots:
            write_snapshot(snap, mesh, os.path.join(out, f"snap_{snap.step:06d}.vtk"))
        write_energy_log(result.energy, os.path.join(out, "energy.csv"))
    return result


# -- output -------------------------------------------------------------------

def write_snapshot(snap, mesh: Mesh, path) -> None:
    """Legacy ASCII VTK unstructured grid with cell data Hz and E."""
    if isinstance(snap, FieldState):
        snap = Snapshot(snap.step, snap.step * snap.tau, snap.e_curr, snap.hz)
    rule = triangle_quadrature(1)
    e_cells = eval_edge_field(mesh, snap.e, rule)[:, 0, :]
    try:
        with open(path, "w") as f:
            f.write("# vtk DataFile Version 2.0\n")
            f.write(f"sppfetd step {snap.step} time {snap.time:.9e}\n")
            f.write("ASCII\nDATASET UNSTRUCTURED_GRID\n")
            f.write(f"POINTS {mesh.n_vertices} double\n")
            for x, y in mesh.vertices:
                f.write(f"{x:.9e} {y:.9e} 0.0\n")
            f.write(f"CELLS {mesh.n_triangles} {4 * mesh.n_triangles}\n")
            for i, j, k in mesh.triangles:
                f.write(f"3 {i} {j} {k}\n")
            f.write(f"CELL_TYPES {mesh.n_triangles}\n")
            f.writelines("5\n" for _ in range(mesh.n_triangles))
            f.write(f"CELL_DATA {mesh.n_triangles}\n")
            f.write("SCALARS Hz double\nLOOKUP_TABLE default\n")
            for v in snap.hz:
                f.write(f"{v:.9e}\n")
            f.write("VECTORS E double\n")
            for ex, ey in e_cells:
                f.write(f"{ex:.9e} {ey:.9e} 0.0\n")
    except OSError as exc:
        raise OSError(f"failed to write snapshot {path}: {exc}") from exc


def write_energy_log(series, path) -> None:
    """CSV with one row per logged step: the energy terms and their total."""
    try:
        with open(path, "w") as f:
            f.write("step,time,kinetic,curl,magnetic,interface,curl_extra,total\n")
            for rep in series:
                f.write(f"{rep.step},{rep.time:.12e},{rep.kinetic:.12e},"
                        f"{rep.curl:.12e},{rep.magnetic:.12e},{rep.interface:.12e},"
                        f"{rep.curl_extra:.12e},{rep.total:.12e}\n")
    except OSError as exc:
        raise OSError(f"failed to write energy log {path}: {exc}") from exc


# -- JSON configuration -------------------------------------------------------

def _interface_to_json(spec: InterfaceSpec | None):
    if spec is None:
        return None
    out = []
    for prim in spec.primitives:
        if isinstance(prim, Segment):
            out.append({"type": "segment", "p0": list(prim.p0), "p1": list(prim.p1)})
        elif isinstance(prim, Arc):
            out.append({"type": "arc", "center": list(prim.center),
                        "radius": prim.radius, "angle_start": prim.angle_start,
                        "angle_end": prim.angle_end})
        else:
            raise ConfigError(f"unknown primitive {type(prim).__name__}")
    return out


def _interface_from_json(items):
    if items is None:
        return None
    prims = []
    for item in items:
        kind = item.get("type")
        if kind == "segment":
            prims.append(Segment(tuple(item["p0"]), tuple(item["p1"])))
        elif kind == "arc":
            prims.append(Arc(tuple(item["center"]), item["radius"],
                             item["angle_start"], item["angle_end"]))
        else:
            raise ConfigError(f"unknown interface primitive type {kind!r}")
    return InterfaceSpec(prims)


def config_to_json(config: SimulationConfig) -> dict:
    data = {
        "version": CONFIG_VERSION,
        "name": config.name,
        "mesh": ({"file": config.mesh_file} if config.mesh_file else
                 {"bounds": list(config.bounds), "nx": config.nx, "ny": config.ny,
                  "pml_layers": config.pml_layers}),
        "interface": _interface_to_json(config.interface),
        "material": {"eps0": config.material.eps0, "mu0": config.material.mu0,
                     "tau0": config.material.tau0, "sigma0": config.material.sigma0},
        "pml": {"err": config.pml_err, "eta": config.pml_eta},
        "tau": config.tau,
        "steps": config.n_steps,
        "snapshot_every": config.snapshot_every,
        "out_dir": config.out_dir,
        "cfl": {"c_in": config.cfl.c_in, "c_tr": config.cfl.c_tr},
        "solver": {"tol": config.solver.tol, "max_iter": config.solver.max_iter,
                   "preconditioner": config.solver.preconditioner},
        "manufactured": config.manufactured,
    }
    if config.kubo is not None:
        data["kubo"] = {"mu_c_ev": config.kubo.mu_c_ev, "tau0": config.kubo.tau0,
                        "temperature": config.kubo.temperature}
    if config.source is not None:
        data["source"] = {
            "points": [{"position": [x, y], "sign": s}
                       for x, y, s in config.source.points],
            "f0": config.source.f0, "h_norm": config.source.h_norm,
            "n_cycles": config.source.n_cycles}
    return data


def config_from_json(data: dict) -> SimulationConfig:
    if data.get("version") != CONFIG_VERSION:
        raise ConfigError(f"unsupported config version {data.get('version')!r}")
    try:
        mesh_spec = data["mesh"]
        kwargs = dict(
            name=data.get("name", "custom"),
            interface=_interface_from_json(data.get("interface")),
            tau=data["tau"],
            n_steps=data["steps"],
            snapshot_every=data.get("snapshot_every", 0),
            out_dir=data.get("out_dir", "out"),
            manufactured=data.get("manufactured", False),
        )
        if "file" in mesh_spec:
            kwargs["mesh_file"] = mesh_spec["file"]
        else:
            kwargs.update(bounds=tuple(mesh_spec["bounds"]), nx=mesh_spec["nx"],
                          ny=mesh_spec["ny"],
                          pml_layers=mesh_spec.get("pml_layers", 0))
        if "material" in data:
            kwargs["material"] = MaterialParams(**data["material"])
        if "kubo" in data:
            kwargs["kubo"] = KuboParams(**data["kubo"])
        if "pml" in data:
            kwargs["pml_err"] = data["pml"].get("err", 1e-7)
            kwargs["pml_eta"] = data["pml"].get("eta", 377.0)
        if "source" in data and data["source"] is not None:
            src = data["source"]
            points = tuple((p["position"][0], p["position"][1], p["sign"])
                           for p in src["points"])
            kwargs["source"] = SourceSpec(points, src["f0"], src["h_norm"],
                                          src.get("n_cycles"))
        if "cfl" in data:
            kwargs["cfl"] = CflConstants(**data["cfl"])
        if "solver" in data:
            kwargs["solver"] = SolverConfig(**data["solver"])
        return SimulationConfig(**kwargs)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid configuration: {exc}") from exc


def load_config(path) -> SimulationConfig:
    try:
        with open(path) as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_json(data)
