"""Sparse operator assembly for the leapfrog schemes.

All bilinear forms are integrated cell by cell with a fixed degree-3
quadrature (exact for every lowest-order integrand) and scattered into
CSR matrices.  Per-cell coefficients are sampled at cell centroids, so
the matrices stay time independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .elements import cell_basis_data, quad_points_physical, triangle_quadrature
from .mesh import CellTag, EdgeTag, Mesh

ASSEMBLY_DEGREE = 3


@dataclass
class OperatorSet:
    """Assembled operators for the merged graphene/absorber step.

    m_e        : edge mass
    m_e_phys   : edge mass restricted to physical cells (C1 weight)
    m_d1       : edge mass weighted by diag(sigma_y, sigma_x)
    s          : curl-curl (grad-curl inner product)
    s_phys     : curl-curl restricted to physical cells
    c          : cells x edges mixed matrix, entry = integral of curl(phi_e)
    dx, dy     : cells x edges partial-derivative matrices for the split field
    g          : interface mass on the graphene curve (tangential traces)
    areas      : cell areas (diagonal of the P0 mass)
    sigma_x/y  : damping samples at cell centroids
    c1, c2     : physical / absorber indicator per cell (c2 = 1 - c1)
    pec_mask   : boolean mask of constrained edge DoFs
    """

    mesh: Mesh
    m_e: sp.csr_matrix
    m_e_phys: sp.csr_matrix
    m_d1: sp.csr_matrix
    s: sp.csr_matrix
    s_phys: sp.csr_matrix
    c: sp.csr_matrix
    dx: sp.csr_matrix
    dy: sp.csr_matrix
    g: sp.csr_matrix
    areas: np.ndarray
    sigma_x: np.ndarray
    sigma_y: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    pec_mask: np.ndarray

    @property
    def m_h(self) -> np.ndarray:
        """Diagonal of the P0 cell mass."""
        return self.areas

    @property
    def m_h_sx(self) -> np.ndarray:
        return self.areas * self.sigma_x

    @property
    def m_h_sy(self) -> np.ndarray:
        return self.areas * self.sigma_y


def _cell_coeff(mesh: Mesh, coeff) -> np.ndarray:
    """Normalise a coefficient spec to an (nt, 2) diagonal-weight array."""
    nt = mesh.n_triangles
    if coeff is None:
        return np.ones((nt, 2))
    arr = np.asarray(coeff, dtype=float)
    if arr.ndim == 0:
        return np.full((nt, 2), float(arr))
    if arr.shape == (nt,):
        return np.repeat(arr[:, None], 2, axis=1)
    if arr.shape == (nt, 2):
        return arr
    raise ValueError(f"coefficient shape {arr.shape} does not match {nt} cells")


def _scatter_edges(mesh: Mesh, local: np.ndarray) -> sp.csr_matrix:
    """Accumulate (nt, 3, 3) local matrices into an edge-by-edge CSR."""
    ne = mesh.n_edges
    rows = np.repeat(mesh.tri_edges, 3, axis=1).ravel()
    cols = np.tile(mesh.tri_edges, (1, 3)).ravel()
    mat = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(ne, ne))
    out = mat.tocsr()
    out.sum_duplicates()
    return out


def assemble_edge_mass(mesh: Mesh, coeff=None) -> sp.csr_matrix:
    """Edge mass with scalar or 2x2-diagonal per-cell coefficient.

    Entry (e, e') = sum_K integral of w1 phi_e,x phi_e',x + w2 phi_e,y phi_e',y.
    """
    w = _cell_coeff(mesh, coeff)
    if np.any(w < 0.0) or not np.all(np.isfinite(w)):
        raise ValueError("edge-mass coefficient must be finite and nonnegative")
    rule = triangle_quadrature(ASSEMBLY_DEGREE)
    phi, _, _ = cell_basis_data(mesh, rule)  # (nt, nq, 3, 2)
    weighted = phi * w[:, None, None, :]
    local = 2.0 * mesh.areas[:, None, None] * np.einsum(
        "q,tqkd,tqld->tkl", rule.weights, weighted, phi)
    return _scatter_edges(mesh, local)


def assemble_curl_curl(mesh: Mesh, coeff=None) -> sp.csr_matrix:
    """Curl-curl matrix; curls are constant per cell."""
    w = _cell_coeff(mesh, coeff)[:, 0]
    rule = triangle_quadrature(1)
    _, curls, _ = cell_basis_data(mesh, rule)  # (nt, 3)
    local = (w * mesh.areas)[:, None, None] * curls[:, :, None] * curls[:, None, :]
    return _scatter_edges(mesh, local)


def _scatter_cells_edges(mesh: Mesh, local: np.ndarray) -> sp.csr_matrix:
    rows = np.repeat(np.arange(mesh.n_triangles), 3)
    cols = mesh.tri_edges.ravel()
    mat = sp.coo_matrix((local.ravel(), (rows, cols)),
                        shape=(mesh.n_triangles, mesh.n_edges))
    out = mat.tocsr()
    out.sum_duplicates()
    return out


def assemble_mixed_curl(mesh: Mesh) -> sp.csr_matrix:
    """Cells x edges matrix with entry (K, e) = integral over K of curl(phi_e)."""
    rule = triangle_quadrature(1)
    _, curls, _ = cell_basis_data(mesh, rule)
    return _scatter_cells_edges(mesh, mesh.areas[:, None] * curls)


def assemble_partial(mesh: Mesh, axis: str) -> sp.csr_matrix:
    """Cells x edges matrix of the TEz split derivatives.

    axis "x": entry (K, e) = integral of d/dx (phi_e)_y;
    axis "y": entry (K, e) = integral of d/dy (phi_e)_x.
    """
    if axis not in ("x", "y"):
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    rule = triangle_quadrature(1)
    _, curls, g = cell_basis_data(mesh, rule)
    # For Whitney fields d/dx (phi)_y = -d/dy (phi)_x = curl(phi) / 2 pointwise.
    local = mesh.areas[:, None] * curls / 2.0
    if axis == "y":
        local = -local
    return _scatter_cells_edges(mesh, local)


def assemble_interface_mass(mesh: Mesh, interface_edges=None) -> sp.csr_matrix:
    """Tangential-trace mass on the graphene curve.

    The Whitney tangential trace along an edge is 1/length on its own edge
    and vanishes on every other edge, so the matrix is diagonal with entry
    1/length for each interface edge.
    """
    if interface_edges is None:
        interface_edges = mesh.interface_edges()
    interface_edges = np.asarray(interface_edges, dtype=np.int64)
    ne = mesh.n_edges
    if len(interface_edges) == 0:
        return sp.csr_matrix((ne, ne))
    data = 1.0 / mesh.edge_lengths[interface_edges]
    return sp.coo_matrix((data, (interface_edges, interface_edges)),
                         shape=(ne, ne)).tocsr()


def assemble_edge_load(mesh: Mesh, field, degree: int = ASSEMBLY_DEGREE) -> np.ndarray:
    """Load vector b_e = integral of field . phi_e over the mesh.

    `field` maps an (n, 2) point array to (n, 2) vector values.
    """
    rule = triangle_quadrature(degree)
    phi, _, _ = cell_basis_data(mesh, rule)
    pts = quad_points_physical(mesh, rule)
    flat = pts.reshape(-1, 2)
    vals = np.asarray(field(flat), dtype=float).reshape(pts.shape)
    local = 2.0 * mesh.areas[:, None] * np.einsum(
        "q,tqd,tqkd->tk", rule.weights, vals, phi)
    out = np.zeros(mesh.n_edges)
    np.add.at(out, mesh.tri_edges.ravel(), local.ravel())
    return out


def boundary_dof_mask(mesh: Mesh) -> np.ndarray:
    """Boolean mask of PEC-constrained edge DoFs."""
    return mesh.edge_tags == EdgeTag.OUTER_BOUNDARY


def apply_pec(matrix: sp.spmatrix, mask: np.ndarray) -> sp.csr_matrix:
    """Zero constrained rows and columns and place a unit diagonal.

    Keeps the matrix symmetric positive definite and the DoF numbering
    intact, so states and right-hand sides need no renumbering.
    """
    mask = np.asarray(mask, dtype=bool)
    free = sp.diags((~mask).astype(float))
    out = (free @ matrix @ free + sp.diags(mask.astype(float))).tocsr()
    out.eliminate_zeros()
    return out


def constrain_rhs(rhs: np.ndarray, mask: np.ndarray, values=None) -> np.ndarray:
    """Force constrained entries of a right-hand side to their Dirichlet values."""
    out = np.array(rhs, dtype=float)
    out[mask] = 0.0 if values is None else values[mask]
    return out


def build_operator_set(mesh: Mesh, sigma_x=None, sigma_y=None) -> OperatorSet:
    """Assemble every operator needed by the merged time step.

    sigma_x, sigma_y are damping values sampled at cell centroids (zero
    inside the physical region); omitted means no absorbing collar.
    """
    nt = mesh.n_triangles
    sigma_x = np.zeros(nt) if sigma_x is None else np.asarray(sigma_x, dtype=float)
    sigma_y = np.zeros(nt) if sigma_y is None else np.asarray(sigma_y, dtype=float)
    c1 = (mesh.cell_tags == CellTag.PHYSICAL).astype(float)
    c2 = 1.0 - c1

    # D1 = diag(sigma_y, sigma_x): E_x is damped by sigma_y, E_y by sigma_x.
    d1 = np.column_stack([sigma_y, sigma_x])
    return OperatorSet(
        mesh=mesh,
        m_e=assemble_edge_mass(mesh),
        m_e_phys=assemble_edge_mass(mesh, c1),
        m_d1=assemble_edge_mass(mesh, d1),
        s=assemble_curl_curl(mesh),
        s_phys=assemble_curl_curl(mesh, c1),
        c=assemble_mixed_curl(mesh),
        dx=assemble_partial(mesh, "x"),
        dy=assemble_partial(mesh, "y"),
        g=assemble_interface_mass(mesh),
        areas=mesh.areas.copy(),
        sigma_x=sigma_x,
        sigma_y=sigma_y,
        c1=c1,
        c2=c2,
        pec_mask=boundary_dof_mask(mesh),
    )
