"""Tests for the 2-D interface FEM: meshing, assembly, and spectra.

Reference values come from closed-form radial reductions that never touch
the FEM code: Bessel secular equations for the circle (scipy.special)
and the banded radial finite-difference solver.
"""

import os

import numpy as np
import pytest
import scipy.sparse as sp
import scipy.special
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from surfint import core, fem2d, radial
from surfint.errors import MeshQualityFailure, ParseError, UnknownRegionTag, ValidationError


def circle_delta_eigenvalue(alpha_tilde, R=1.0):
    """Ground state of the delta circle: alpha I0(kR) K0(kR) = 1/R."""
    f = lambda k: alpha_tilde * scipy.special.i0(k * R) * scipy.special.k0(k * R) - 1.0 / R
    k = brentq(f, 1e-9, 80.0, xtol=1e-14)
    return -k * k


def circle_delta_prime_eigenvalue(beta_tilde, R=1.0):
    """Ground state of the delta-prime circle: beta k^2 R I1 K1 = 1."""
    f = lambda k: beta_tilde * k * k * R * scipy.special.i1(k * R) * scipy.special.k1(k * R) - 1.0
    k = brentq(f, 1e-9, 80.0, xtol=1e-14)
    return -k * k


def fem_ladder_ground_state(field, R_out=6.0, h=0.2):
    vals = []
    for lvl in range(3):
        mesh = fem2d.build_mesh(1.0, R_out, h / 2**lvl)
        pairs = fem2d.lowest_eigenpairs(fem2d.assemble(field, mesh), 2)
        vals.append(pairs[0][0])
    return radial.richardson(vals)[0], vals


def radial_ground_state(field, R_out=6.0):
    geom = radial.RadialGeometry(dimension=2, R=1.0, R_out=R_out, outer_bc="neumann", mode=0)
    lad = [radial.radial_fd_spectrum(geom, field, n).eigenvalues[0] for n in (256, 512, 1024)]
    return radial.richardson(lad)[0]


def test_mesh_basic_structure():
    mesh = fem2d.build_mesh(1.0, 5.0, 0.2)
    n_iface = len(mesh.interface_edges)
    # interface ring is a power of two and doubled: inner/outer copies coincide
    assert n_iface & (n_iface - 1) == 0
    for ii, io, ji, jo in mesh.interface_edges:
        assert ii != io and ji != jo
        assert np.allclose(mesh.vertices[ii], mesh.vertices[io])
        assert np.allclose(mesh.vertices[ji], mesh.vertices[jo])
        assert np.isclose(np.hypot(*mesh.vertices[ii]), 1.0)
    for i, j in mesh.outer_edges:
        assert np.isclose(np.hypot(*mesh.vertices[i]), 5.0)
    assert fem2d.min_angle_degrees(mesh) >= fem2d.MIN_ANGLE_DEG
    # every triangle is tagged with the side it lies on
    cents = mesh.vertices[mesh.triangles].mean(axis=1)
    r = np.hypot(cents[:, 0], cents[:, 1])
    for rc, tag in zip(r, mesh.tri_region):
        assert (tag == "inner") == (rc < 1.0)


def test_mesh_determinism():
    m1 = fem2d.build_mesh(1.0, 4.0, 0.17)
    m2 = fem2d.build_mesh(1.0, 4.0, 0.17)
    assert np.array_equal(m1.vertices, m2.vertices)
    assert np.array_equal(m1.triangles, m2.triangles)


@settings(max_examples=25, deadline=None)
@given(
    R=st.floats(0.5, 3.0),
    ratio=st.floats(1.5, 6.0),
    frac=st.floats(0.05, 0.3),
)
def test_mesh_quality_across_parameters(R, ratio, frac):
    mesh = fem2d.build_mesh(R, ratio * R, frac * R)
    assert fem2d.min_angle_degrees(mesh) >= fem2d.MIN_ANGLE_DEG


def test_mesh_rejects_bad_geometry():
    with pytest.raises(ValidationError):
        fem2d.build_mesh(2.0, 1.0, 0.1)
    with pytest.raises(ValidationError):
        fem2d.build_mesh(1.0, 3.0, 1.5)


def test_min_angle_flags_slivers():
    mesh = fem2d.build_mesh(1.0, 3.0, 0.25)
    verts = np.vstack([mesh.vertices, [[50.0, 0.0]]])
    tris = np.vstack([mesh.triangles, [[0, 1, mesh.n_vertices]]]).astype(np.int32)
    bad = fem2d.InterfaceMesh(
        vertices=verts,
        triangles=tris,
        tri_region=mesh.tri_region + ("inner",),
        interface_edges=mesh.interface_edges,
        edge_region=mesh.edge_region,
        outer_edges=mesh.outer_edges,
        meta={},
    )
    assert fem2d.min_angle_degrees(bad) < fem2d.MIN_ANGLE_DEG


def test_delta_circle_against_bessel_oracle():
    lam_exact = circle_delta_eigenvalue(2.0)
    ext, ladder = fem_ladder_ground_state(core.delta_field(2.0))
    errs = [abs(v - lam_exact) for v in ladder]
    assert errs[0] > errs[1] > errs[2]
    assert abs(ext - lam_exact) < 2e-4


def test_delta_prime_circle_against_bessel_oracle():
    lam_exact = circle_delta_prime_eigenvalue(2.0)
    ext, ladder = fem_ladder_ground_state(core.delta_prime_field(2.0))
    errs = [abs(v - lam_exact) for v in ladder]
    assert errs[0] > errs[1] > errs[2]
    assert abs(ext - lam_exact) < 5e-5


def test_full_coupling_matches_radial_fd():
    field = core.uniform_field(1.0, 2.0, 1j)
    lam_fd = radial_ground_state(field)
    ext, _ = fem_ladder_ground_state(field)
    assert abs(ext - lam_fd) < 5e-5


def test_constrained_gamma_matches_radial_fd():
    field = core.uniform_field(2.0, 0.0, 1.0)
    lam_fd = radial_ground_state(field)
    ext, _ = fem_ladder_ground_state(field)
    assert abs(ext - lam_fd) < 5e-5


def test_constraint_map_reduces_interface_pairs():
    mesh = fem2d.build_mesh(1.0, 3.0, 0.25)
    pen_free = fem2d.assemble(core.delta_prime_field(1.0), mesh)
    assert pen_free.n_reduced == pen_free.n_full
    pen_con = fem2d.assemble(core.delta_field(1.0), mesh)
    assert pen_con.n_reduced == pen_con.n_full - len(mesh.interface_edges)
    # eliminated outer trace reproduces the inner one for gamma = 0
    lam, x = fem2d.lowest_eigenpairs(pen_con, 1)[0]
    for ii, io, ji, jo in mesh.interface_edges:
        assert abs(x[ii] - x[io]) < 1e-14
        assert abs(x[ji] - x[jo]) < 1e-14


def test_constraint_keeps_larger_coefficient_trace():
    # gamma = 2 forces the inner trace to vanish, so all weight sits outside
    mesh = fem2d.build_mesh(1.0, 4.0, 0.25)
    field = core.uniform_field(3.0, 0.0, 2.0)
    pen = fem2d.assemble(field, mesh)
    lam, x = fem2d.lowest_eigenpairs(pen, 1)[0]
    assert lam < 0
    for ii, io, ji, jo in mesh.interface_edges:
        assert abs(x[ii]) < 1e-13 * np.abs(x).max()
        assert abs(x[io]) > 0


def test_pencil_is_hermitian():
    mesh = fem2d.build_mesh(1.0, 3.0, 0.25)
    field = core.uniform_field(1.0, 2.0, 0.5 + 1.5j)
    pen = fem2d.assemble(field, mesh)
    K_r, M_r = pen.reduced()
    assert abs(K_r - K_r.conj().T).max() < 1e-12
    assert abs(M_r - M_r.conj().T).max() < 1e-14


def test_galerkin_nesting_monotone():
    # midpoint refinement without snapping nests the spaces, so every
    # variational eigenvalue can only go down
    field = core.delta_prime_field(1.5)
    m0 = fem2d.build_mesh(1.0, 3.0, 0.35)
    m1 = fem2d.refine_mesh(m0)
    p0 = fem2d.lowest_eigenpairs(fem2d.assemble(field, m0), 3)
    p1 = fem2d.lowest_eigenpairs(fem2d.assemble(field, m1), 3)
    for k in range(3):
        assert p1[k][0] <= p0[k][0] + 1e-12


def single_trace_delta_pencil(mesh, alpha):
    """Direct single-trace assembly of the delta circle for cross-checking.

    Outer interface copies are merged onto the inner ones and the boundary
    term -alpha * edge mass is added on the single trace.
    """
    n = mesh.n_vertices
    pts = mesh.vertices
    remap = np.arange(n)
    for ii, io, ji, jo in mesh.interface_edges:
        remap[io] = ii
        remap[jo] = ji
    kept = sorted(set(remap))
    col = {v: j for j, v in enumerate(kept)}
    cols = np.array([col[remap[v]] for v in range(n)])
    T = sp.coo_matrix((np.ones(n), (np.arange(n), cols)), shape=(n, len(kept))).tocsr()

    K = sp.lil_matrix((n, n))
    M = sp.lil_matrix((n, n))
    for a, b, c in mesh.triangles:
        P = pts[[a, b, c]]
        bv = np.array([P[1, 1] - P[2, 1], P[2, 1] - P[0, 1], P[0, 1] - P[1, 1]])
        cv = np.array([P[2, 0] - P[1, 0], P[0, 0] - P[2, 0], P[1, 0] - P[0, 0]])
        A = 0.5 * abs(bv[0] * cv[1] - bv[1] * cv[0])
        kl = (np.outer(bv, bv) + np.outer(cv, cv)) / (4 * A)
        ml = A * (np.ones((3, 3)) + np.eye(3)) / 12
        for i, vi in enumerate((a, b, c)):
            for j, vj in enumerate((a, b, c)):
                K[vi, vj] += kl[i, j]
                M[vi, vj] += ml[i, j]
    for ii, io, ji, jo in mesh.interface_edges:
        L = np.linalg.norm(pts[ji] - pts[ii])
        se = (L / 6.0) * np.array([[2.0, 1.0], [1.0, 2.0]])
        for p, vp in enumerate((ii, ji)):
            for q, vq in enumerate((ii, ji)):
                K[vp, vq] -= alpha * se[p, q]
    return (T.T @ K.tocsr() @ T).toarray(), (T.T @ M.tocsr() @ T).toarray()


def test_delta_consistency_with_single_trace_assembly():
    # for alpha delta coupling the doubled-trace pencil reduced by the
    # constraint must equal the classical one-trace assembly exactly
    alpha = 2.0
    mesh = fem2d.build_mesh(1.0, 2.5, 0.3)
    pen = fem2d.assemble(core.delta_field(alpha), mesh)
    K_r, M_r = pen.reduced()
    K1, M1 = single_trace_delta_pencil(mesh, alpha)
    assert np.max(np.abs(K_r.toarray().imag)) == 0.0
    assert np.max(np.abs(K_r.toarray().real - K1)) < 1e-12
    assert np.max(np.abs(M_r.toarray().real - M1)) < 1e-14


def test_unknown_region_tag():
    mesh = fem2d.build_mesh(1.0, 3.0, 0.3)
    field = core.validate_coupling({"elsewhere": 1.0}, {"elsewhere": 0.0}, {"elsewhere": 0.0})
    with pytest.raises(UnknownRegionTag):
        fem2d.assemble(field, mesh)


def test_mesh_io_roundtrip(tmp_path):
    mesh = fem2d.build_mesh(1.0, 3.0, 0.3)
    path = os.path.join(tmp_path, "disk.mesh")
    fem2d.save_mesh(mesh, path)
    back = fem2d.load_mesh(path)
    assert np.array_equal(back.vertices, mesh.vertices)
    assert np.array_equal(back.triangles, mesh.triangles)
    assert back.tri_region == mesh.tri_region
    assert np.array_equal(back.interface_edges, mesh.interface_edges)
    assert back.edge_region == mesh.edge_region
    assert len(back.outer_edges) == len(mesh.outer_edges)
    pen = fem2d.assemble(core.delta_field(1.0), mesh)
    pen2 = fem2d.assemble(core.delta_field(1.0), back)
    diff = pen2.K - pen.K
    assert diff.nnz == 0 or abs(diff).max() == 0.0


def test_mesh_parse_errors(tmp_path):
    bad = os.path.join(tmp_path, "bad.mesh")
    with open(bad, "w") as fh:
        fh.write("v 0.0 0.0\nv 1.0 0.0\nv 0.0 1.0\nt 0 1 2 inner\nq what\n")
    with pytest.raises(ParseError):
        fem2d.load_mesh(bad)
    empty = os.path.join(tmp_path, "empty.mesh")
    with open(empty, "w") as fh:
        fh.write("\n")
    with pytest.raises(ParseError):
        fem2d.load_mesh(empty)


def test_negative_spectrum_report():
    rep = fem2d.negative_spectrum_fem(core.delta_field(2.0), 1.0, 6.0, 0.2, count=4)
    lam_exact = circle_delta_eigenvalue(2.0)
    assert rep.N >= 1
    assert abs(rep.eigenvalues[0] - lam_exact) < 2e-4
    assert rep.convergence["error_bars"][0] < 1e-3
    assert len(rep.convergence["raw"]) == 3
    assert not rep.convergence["truncated_count"]
