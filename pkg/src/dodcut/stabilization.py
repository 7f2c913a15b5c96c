"""Penalty stabilization of small cut cells.

For every stabilized cell the inflow through each face is redistributed over
the outflow faces by per-face weight matrices, scaled by a scalar strength in
[0, 1].  The weights are diagonal in the shared eigenbasis, so each wave
family is handled independently; a wave's weight on a face is its share of
that wave's total inflow into the cell.

Weight construction is independent per cell and the residual scatters with a
fixed loop order, so results are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import SystemMatrices
from .mesh import BOUNDARY, CutCellMesh

WEIGHT_TOL = 1e-12
EIG_TOL = -1e-12


class StabilizationError(RuntimeError):
    pass


@dataclass
class CellStabilization:
    """Faces, neighbors, weights and penalty strength of one stabilized cell."""

    cell: int
    face_ids: np.ndarray      # (k,)
    neighbors: np.ndarray     # (k,) neighbor cell id or BOUNDARY
    lengths: np.ndarray       # (k,)
    midpoints: np.ndarray     # (k, 2)
    lam_out: np.ndarray       # (k, m) flux eigenvalues w.r.t. outward normals
    weight_diag: np.ndarray   # (k, m) weights in the shared eigenbasis
    weights: list             # k matrices (m, m) in state space
    penalty: float            # scalar strength in [0, 1]


def _cell_face_geometry(mesh: CutCellMesh, sys: SystemMatrices, cell_id: int):
    """Outward-oriented face data for one cell."""
    entries = mesh.cell_faces[cell_id]
    fids = np.array([f for f, _ in entries], dtype=int)
    signs = np.array([s for _, s in entries], dtype=float)
    normals = mesh.face_normal[fids] * signs[:, None]
    lengths = mesh.face_length[fids]
    lam_out = np.outer(normals[:, 0], sys.lam1) + np.outer(normals[:, 1], sys.lam2)
    neighbors = np.where(
        mesh.face_inner[fids] == cell_id, mesh.face_outer[fids], mesh.face_inner[fids]
    )
    return fids, neighbors, lengths, mesh.face_midpoint[fids], lam_out


def inflow_weights(mesh: CutCellMesh, sys: SystemMatrices, cell_id: int):
    """Per-face redistribution weights for one stabilized cell.

    Wave k's weight on face i is |F_i| * (inflow eigenvalue) over the wave's
    total inflow, with 0/0 -> 0 for waves that carry nothing.  Raises when a
    wave has outflow but no inflow to redistribute (cannot happen on a closed
    polygon, but the check keeps the construction total).

    Returns (weight matrices, eigenbasis diagonals, lam_out, face data).
    """
    fids, neighbors, lengths, mids, lam_out = _cell_face_geometry(mesh, sys, cell_id)
    inflow = np.minimum(lam_out, 0.0) * lengths[:, None]   # (k, m), <= 0
    outflow = np.maximum(lam_out, 0.0) * lengths[:, None]
    total_in = inflow.sum(axis=0)
    total_out = outflow.sum(axis=0)
    scale = np.abs(lam_out * lengths[:, None]).sum(axis=0)
    diag = np.zeros_like(inflow)
    for k in range(sys.m):
        tiny = 1e-14 + 1e-12 * scale[k]
        if total_in[k] < -tiny:
            diag[:, k] = inflow[:, k] / total_in[k]
        elif total_out[k] > tiny:
            raise StabilizationError(
                f"cell {cell_id}: wave {k} has outflow but no inflow to redistribute"
            )
        # else: the wave carries no flux through this cell; weights stay zero
    v = sys.eigvecs
    mats = [(v * diag[i]) @ v.T for i in range(len(fids))]
    return mats, diag, lam_out, (fids, neighbors, lengths, mids)


def penalty(mesh: CutCellMesh, sys: SystemMatrices, cell_id: int, mode: str,
            value: float = None, dt: float = None) -> float:
    """Scalar stabilization strength in [0, 1] for one cell.

    mode "paper":    largest per-wave total inflow rate, clamped to [0, 1].
    mode "capacity": 1 - |E| / (dt * rate), clipped to [0, 1]; zero exactly
                     when the cell can absorb a full step unstabilized.
    mode "manual":   the supplied constant.   mode "one": 1.
    """
    if mode == "one":
        return 1.0
    if mode == "manual":
        if value is None or not 0.0 <= value <= 1.0:
            raise ValueError("manual mode needs a strength in [0, 1]")
        return float(value)
    _, _, lengths, _, lam_out = _cell_face_geometry(mesh, sys, cell_id)
    rate = float(np.max(-(np.minimum(lam_out, 0.0) * lengths[:, None]).sum(axis=0)))
    if mode == "paper":
        return min(rate, 1.0)
    if mode == "capacity":
        if dt is None:
            raise ValueError("capacity mode needs the time step")
        if rate <= 0.0:
            return 0.0
        return float(np.clip(1.0 - mesh.areas[cell_id] / (dt * rate), 0.0, 1.0))
    raise ValueError(f"unknown penalty mode {mode!r}")


def build_stabilization(mesh: CutCellMesh, sys: SystemMatrices, mode: str = "capacity",
                        dt: float = None, value: float = None, verify: bool = True):
    """Stabilization data for every cell of the stabilized set."""
    out = []
    for cid in mesh.stabilized:
        mats, diag, lam_out, (fids, neighbors, lengths, mids) = inflow_weights(mesh, sys, cid)
        eta = penalty(mesh, sys, cid, mode, value=value, dt=dt)
        out.append(CellStabilization(
            cell=cid, face_ids=fids, neighbors=neighbors, lengths=lengths,
            midpoints=mids, lam_out=lam_out, weight_diag=diag, weights=mats,
            penalty=eta,
        ))
    if verify and out:
        bad = [d.cell for d in verify_weights(mesh, sys, out) if not d.ok()]
        if bad:
            raise StabilizationError(f"weight conditions violated on cells {bad}")
    return out


def stabilization_residual(mesh: CutCellMesh, sys: SystemMatrices, u: np.ndarray,
                           stab, t: float = 0.0, boundary_fn=None) -> np.ndarray:
    """Residual contribution of the penalty term.

    For every stabilized cell and ordered face pair (F_j, F_i) the amount
    eta * |F_j| * w_i C+_{F_j} (u^{E_i} - u^{E_cut}) is added to the cell's
    residual slot and removed from the outflow neighbor's slot, moving mass
    directly between the cut cell's neighbors.  Neighbor values behind an
    exterior inflow face come from the boundary data; scatter onto an exterior
    outflow face is dropped (no test-function trace outside the domain).
    """
    r = np.zeros_like(u)
    v = sys.eigvecs
    for cs in stab:
        eta = cs.penalty
        if eta == 0.0:
            continue
        k = len(cs.face_ids)
        ucut = u[cs.cell]
        un = np.empty((k, u.shape[1]))
        for a in range(k):
            nb = cs.neighbors[a]
            if nb == BOUNDARY:
                if boundary_fn is None:
                    un[a] = 0.0
                else:
                    un[a] = boundary_fn(cs.midpoints[a][None, :], t)[0]
            else:
                un[a] = u[nb]
        diffs_eig = (un - ucut) @ v                      # (k, m) in eigen coordinates
        lam_plus = np.maximum(cs.lam_out, 0.0)           # (k, m)
        inv_cut = 1.0 / mesh.areas[cs.cell]
        for jf in range(k):
            if not lam_plus[jf].any():
                continue
            base = eta * cs.lengths[jf] * lam_plus[jf]   # (m,) diagonal of eta*|F_j|*C+_j
            for ifc in range(k):
                wd = cs.weight_diag[ifc]
                if not wd.any():
                    continue
                tvec = (base * wd * diffs_eig[ifc]) @ v.T
                r[cs.cell] += tvec * inv_cut
                nbj = cs.neighbors[jf]
                if nbj != BOUNDARY:
                    r[nbj] -= tvec / mesh.areas[nbj]
    return r


@dataclass
class WeightDiagnostics:
    """Numeric violations of the weight conditions for one stabilized cell."""

    cell: int
    eq8_err: float    # | sum_i weights - Id |_max  (normalization)
    eq9_err: float    # redistribution balance residual, max over faces
    sym_err: float    # worst asymmetry of any weight * C+ product
    min_eig: float    # smallest eigenvalue over all weight * C+ products
    eta: float

    def ok(self, tol: float = WEIGHT_TOL, eig_tol: float = EIG_TOL) -> bool:
        return (self.eq8_err <= tol and self.eq9_err <= tol
                and self.sym_err <= tol and self.min_eig >= eig_tol)


def verify_weights(mesh: CutCellMesh, sys: SystemMatrices, stab):
    """Check normalization, redistribution balance, symmetry and PSD per cell."""
    v = sys.eigvecs
    rows = []
    for cs in stab:
        k = len(cs.face_ids)
        m = sys.m
        eq8 = float(np.abs(sum(cs.weights) - np.eye(m)).max())
        lam_plus = np.maximum(cs.lam_out, 0.0)
        lam_minus = np.minimum(cs.lam_out, 0.0)
        c_plus = [(v * lam_plus[j]) @ v.T for j in range(k)]
        c_minus = [(v * lam_minus[i]) @ v.T for i in range(k)]
        eq9 = 0.0
        sym = 0.0
        mineig = np.inf
        for i in range(k):
            bal = sum(cs.lengths[j] * (cs.weights[i] @ c_plus[j]) for j in range(k))
            bal += cs.lengths[i] * c_minus[i]
            eq9 = max(eq9, float(np.abs(bal).max()))
            for j in range(k):
                prod = cs.weights[i] @ c_plus[j]
                sym = max(sym, float(np.abs(prod - prod.T).max()))
                mineig = min(mineig, float(np.linalg.eigvalsh(0.5 * (prod + prod.T)).min()))
        rows.append(WeightDiagnostics(cs.cell, eq8, eq9, sym, float(mineig), cs.penalty))
    return rows


def quadratic_form_check(mesh: CutCellMesh, sys: SystemMatrices, stab,
                         trials: int = 1000, seed: int = 0) -> float:
    """Minimum Rayleigh quotient of the discrete energy form.

    Evaluates (u, r(u)) / (u, u) in the area-weighted inner product with
    homogeneous boundary data for random states that vanish on every
    boundary-touching cell; nonnegativity is the discrete L2-decay statement.
    """
    from .scheme import UpwindOperator  # local import: scheme also imports this module

    op = UpwindOperator(mesh, sys)
    interior = np.setdiff1d(np.arange(mesh.n_cells), mesh.boundary_cells)
    if interior.size == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _ in range(trials):
        u = np.zeros((mesh.n_cells, sys.m))
        u[interior] = rng.standard_normal((interior.size, sys.m))
        r = op.residual(u, 0.0, None)
        if stab:
            r += stabilization_residual(mesh, sys, u, stab, 0.0, None)
        num = float((mesh.areas * (u * r).sum(axis=1)).sum())
        den = float((mesh.areas * (u * u).sum(axis=1)).sum())
        worst = min(worst, num / den)
    return worst
