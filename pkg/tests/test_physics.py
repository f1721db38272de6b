import numpy as np
import pytest

from sppfetd.mesh import generate_rect_mesh
from sppfetd.physics import (KuboParams, ManufacturedCase, MaterialParams,
                             PmlSpec, SourceSpec, damping_profile,
                             dipole_source_cells, eval_source, kubo_sigma0,
                             locate_cell)

UM = 1e-6

# Evaluated with a 60-digit decimal oracle of the printed closed form
# (magnitude) at the published constants; see test_kubo_decimal_oracle.
KUBO_SIGMA0_REFERENCE = 0.211883569473406053190721902469109720355647452668


def _decimal_kubo(mu_c_ev="1.5", tau0="1.2e-12"):
    from decimal import Decimal, getcontext
    getcontext().prec = 60
    q = Decimal("1.6022e-19")
    temp = Decimal("300")
    hbar = Decimal("1.0546e-34")
    k_b = Decimal("1.3806e-23")
    pi = Decimal("3.14159265358979323846264338327950288419716939937510582097")
    kbt = k_b * temp
    x = Decimal(mu_c_ev) * q / kbt
    bracket = x + 2 * ((-x).exp() + 1).ln()
    return float(q * q * kbt * Decimal(tau0) / (pi * hbar * hbar) * bracket)


def test_kubo_decimal_oracle():
    assert _decimal_kubo() == pytest.approx(KUBO_SIGMA0_REFERENCE, rel=1e-15)
    got = kubo_sigma0(KuboParams(mu_c_ev=1.5))
    assert got == pytest.approx(KUBO_SIGMA0_REFERENCE, rel=1e-12)


def test_kubo_small_chemical_potential_limit():
    kp = KuboParams(mu_c_ev=1e-12)
    pref = kp.q ** 2 * kp.k_b * kp.temperature * kp.tau0 / (np.pi * kp.hbar ** 2)
    assert kubo_sigma0(kp) == pytest.approx(pref * 2.0 * np.log(2.0), rel=1e-6)


def test_kubo_linear_in_relaxation_time():
    base = kubo_sigma0(KuboParams(mu_c_ev=1.5, tau0=1.2e-12))
    double = kubo_sigma0(KuboParams(mu_c_ev=1.5, tau0=2.4e-12))
    assert double == pytest.approx(2.0 * base, rel=1e-14)


def test_kubo_monotone():
    mus = [0.5, 0.8, 1.5, 2.0]
    vals = [kubo_sigma0(KuboParams(mu_c_ev=m)) for m in mus]
    assert np.all(np.diff(vals) > 0)


def test_damping_profile_values():
    spec = PmlSpec(bounds=(0.0, 1e-5, 0.0, 1e-5), dd_x=1.2e-6, dd_y=1.2e-6)
    assert spec.sigma_max_x == pytest.approx(-np.log(1e-7) * 5 / (2 * 1.2e-6 * 377))
    assert spec.sigma_max_x == pytest.approx(8.907e4, rel=1e-3)
    xs = np.array([0.0, 5e-6, 1e-5, 1e-5 + 1.2e-6])
    vals = damping_profile(xs, spec, "x")
    assert vals[0] == 0.0 and vals[1] == 0.0
    assert vals[2] == 0.0  # ramp starts at zero
    assert vals[3] == pytest.approx(spec.sigma_max_x)
    # continuity across the ramp start
    eps = 1e-12
    near = damping_profile(np.array([1e-5 + eps]), spec, "x")[0]
    assert near < 1e-18
    assert np.all(damping_profile(np.linspace(-5e-6, 2e-5, 200), spec, "x") >= 0)


def test_damping_profile_symmetric_sides():
    spec = PmlSpec(bounds=(-1e-5, 1e-5, -1e-5, 1e-5), dd_x=2e-6, dd_y=2e-6)
    left = damping_profile(np.array([-1e-5 - 1e-6]), spec, "x")[0]
    right = damping_profile(np.array([1e-5 + 1e-6]), spec, "x")[0]
    assert left == pytest.approx(right)
    assert left == pytest.approx(spec.sigma_max_x * 0.5 ** 4)


def test_material_params_validation():
    with pytest.raises(ValueError):
        MaterialParams(eps0=0.0)
    with pytest.raises(ValueError):
        MaterialParams(sigma0=-1.0)
    MaterialParams(sigma0=0.0)  # comparison runs switch the sheet off
    assert MaterialParams().c_v == pytest.approx(2.99792458e8, rel=1e-9)


def test_dipole_source_cells():
    mesh = generate_rect_mesh((0, 1, 0, 1), 4, 4, 1)
    cell = int(np.flatnonzero(mesh.cell_tags == 0)[3])
    centroid = mesh.centroids[cell]
    spec = SourceSpec(((centroid[0], centroid[1], 1.0),), 1e13, 0.25)
    assert dipole_source_cells(mesh, spec) == [(cell, 1.0)]


def test_dipole_pair_straddles_interface():
    mesh = generate_rect_mesh((-30 * UM, 30 * UM, -10 * UM, 10 * UM), 50, 50, 4)
    spec = SourceSpec(((-27 * UM, 1 * UM, 1.0), (-27 * UM, -1 * UM, -1.0)),
                      1e13, 0.4 * UM)
    cells = dipole_source_cells(mesh, spec)
    assert cells[0][0] != cells[1][0]
    assert mesh.centroids[cells[0][0], 1] > 0 > mesh.centroids[cells[1][0], 1]


def test_point_on_shared_diagonal_takes_lower_cell():
    mesh = generate_rect_mesh((0, 1, 0, 1), 1, 1, 0)
    # the diagonal runs (0,0)-(1,1); its midpoint belongs to both triangles
    assert locate_cell(mesh, (0.5, 0.5)) == 0


def test_source_in_collar_rejected():
    mesh = generate_rect_mesh((0, 1, 0, 1), 4, 4, 2)
    spec = SourceSpec(((-0.2, 0.5, 1.0),), 1e13, 0.25)
    with pytest.raises(ValueError):
        dipole_source_cells(mesh, spec)


def test_eval_source_waveform():
    mesh = generate_rect_mesh((0, 1, 0, 1), 4, 4, 0)
    spec = SourceSpec(((0.6, 0.6, 1.0), (0.6, 0.4, -1.0)), 1e13, 0.2 * UM)
    cells = dipole_source_cells(mesh, spec)
    assert np.all(eval_source(spec, 0.0, cells, mesh.n_triangles) == 0.0)
    quarter = 1.0 / (4.0 * spec.f0)
    ks = eval_source(spec, quarter, cells, mesh.n_triangles)
    assert ks[cells[0][0]] == pytest.approx(1.0 / (0.2 * UM))
    assert ks[cells[1][0]] == pytest.approx(-1.0 / (0.2 * UM))
    assert np.abs(ks).max() == pytest.approx(5e6)


def test_source_gating():
    spec = SourceSpec(((0.5, 0.5, 1.0),), 1e13, 1.0, n_cycles=2.0)
    assert spec.amplitude(1.3e-13) != 0.0
    assert spec.amplitude(2.1e-13) == 0.0


@pytest.fixture
def case():
    return ManufacturedCase()


def test_manufactured_zero_slices(case):
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 1, size=(50, 2))
    assert np.abs(case.e_field(pts, 0.0)).max() <= 1e-15
    assert np.abs(case.h_field(pts, 0.0)).max() <= 1e-15
    edge = np.column_stack([np.zeros(20), rng.uniform(0, 1, 20)])
    assert np.abs(case.e_field(edge, 0.37)[:, 0]).max() <= 1e-15
    assert np.abs(case.h_field(edge, 0.37)).max() <= 1e-15


def test_manufactured_interface_compatibility(case):
    rng = np.random.default_rng(1)
    x = rng.uniform(0, 1, 100)
    above = np.column_stack([x, np.full(100, 0.5 + 1e-13)])
    below = np.column_stack([x, np.full(100, 0.5 - 1e-13)])
    t = 0.29
    assert np.abs(case.h_field(above, t) - case.h_field(below, t)).max() <= 1e-12
    on = np.column_stack([x, np.full(100, 0.5)])
    assert np.abs(case.e_field(on, t)[:, 0]).max() <= 1e-12


def _fd_time(f, pts, t, dt=1e-6):
    return (f(pts, t + dt) - f(pts, t - dt)) / (2.0 * dt)


def _fd_curl_h(case, pts, t, dx=1e-6):
    ex = np.zeros((len(pts), 2))
    up = pts.copy(); up[:, 1] += dx
    dn = pts.copy(); dn[:, 1] -= dx
    ex[:, 0] = (case.h_field(up, t) - case.h_field(dn, t)) / (2.0 * dx)
    rt = pts.copy(); rt[:, 0] += dx
    lt = pts.copy(); lt[:, 0] -= dx
    ex[:, 1] = -(case.h_field(rt, t) - case.h_field(lt, t)) / (2.0 * dx)
    return ex


def _fd_curl_e(case, pts, t, dx=1e-6):
    rt = pts.copy(); rt[:, 0] += dx
    lt = pts.copy(); lt[:, 0] -= dx
    dy_up = pts.copy(); dy_up[:, 1] += dx
    dy_dn = pts.copy(); dy_dn[:, 1] -= dx
    d_ey_dx = (case.e_field(rt, t)[:, 1] - case.e_field(lt, t)[:, 1]) / (2.0 * dx)
    d_ex_dy = (case.e_field(dy_up, t)[:, 0] - case.e_field(dy_dn, t)[:, 0]) / (2.0 * dx)
    return d_ey_dx - d_ex_dy


def manufactured_residuals(case, n_points=100, seed=2):
    """Finite-difference residuals of the sourced field equations."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.05, 0.95, size=(n_points, 2))
    pts = pts[np.abs(pts[:, 1] - 0.5) > 0.01]
    ts = rng.uniform(0.05, 1.0, size=len(pts))
    res_e = res_h = 0.0
    p = case.params
    for i, t in enumerate(ts):
        pt = pts[i:i + 1]
        r1 = (p.eps0 * _fd_time(case.e_field, pt, t)
              - _fd_curl_h(case, pt, t) - case.f_vector(pt, t))
        r2 = (p.mu0 * _fd_time(case.h_field, pt, t)
              + _fd_curl_e(case, pt, t) - case.f_scalar(pt, t))
        res_e = max(res_e, np.abs(r1).max())
        res_h = max(res_h, np.abs(r2).max())
    return res_e, res_h


def test_manufactured_source_fd_oracle(case):
    res_e, res_h = manufactured_residuals(case)
    assert res_e <= 1e-6
    assert res_h <= 1e-6


def test_manufactured_dt_consistency(case):
    rng = np.random.default_rng(3)
    pts = rng.uniform(0.1, 0.9, size=(30, 2))
    fd = _fd_time(case.f_vector, pts, 0.4)
    assert np.abs(fd - case.dt_f_vector(pts, 0.4)).max() <= 1e-6
    assert np.abs(case.dt_e0(pts) - _fd_time(case.e_field, pts, 0.0)).max() <= 1e-6
