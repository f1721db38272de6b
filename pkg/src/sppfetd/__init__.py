"""2-D FETD simulator for TEz Maxwell with zero-thickness graphene interfaces."""

from .assembly import (OperatorSet, apply_pec, assemble_curl_curl,
                       assemble_edge_load, assemble_edge_mass,
                       assemble_interface_mass, assemble_mixed_curl,
                       assemble_partial, boundary_dof_mask, build_operator_set)
from .dynamics import (BlowUpError, CflConstants, EnergyReport, FieldState,
                       LeapfrogStepper, Snapshot, cfl_max_timestep,
                       discrete_energy, init_state, run_simulation)
from .elements import (QuadratureRule, eval_edge_basis, edge_basis_curls,
                       interpolate_hcurl, project_l2_p0, segment_quadrature,
                       triangle_quadrature)
from .harness import (ErrorTable, SimulationConfig, l2_errors, load_config,
                      run, run_convergence_study, scenario, write_energy_log,
                      write_snapshot)
from .mesh import (Arc, CellTag, EdgeTag, InterfaceSpec, Mesh, MeshError,
                   Segment, classify_cells, generate_rect_mesh, load_mesh,
                   save_mesh, snap_interface)
from .physics import (KuboParams, ManufacturedCase, MaterialParams, PmlSpec,
                      SourceSpec, damping_profile, dipole_source_cells,
                      eval_source, kubo_sigma0)
from .sparse_solve import (SolverConfig, SolverError, lumped_inverse_apply,
                           solve_spd, spmv)

__version__ = "0.1.0"
