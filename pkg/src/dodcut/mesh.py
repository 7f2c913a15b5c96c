"""Cut-cell mesh generation for the unit square crossed by a straight line.

A structured N-by-N background grid on [0,1]^2 is intersected with the line
through (x0, 0) at angle gamma.  Every background cell the line passes through
is split into a "below" and an "above" polygon; grid edges crossed by the line
are split into two face fragments, and the in-cell line segments become
interior faces between the two pieces.

Ordering contract (results are deterministic): cells are numbered by
background index (i, j) lexicographically with the below piece before the
above piece; faces are numbered vertical edges first, then horizontal edges,
then cut segments, each group in background order with fragments bottom-up /
left-right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

BOUNDARY = -1          # neighbor marker for exterior faces
AREA_EPS = 1e-14       # clipped pieces below this area are reported absent
SNAP_REL = 1e-12       # vertex snapping tolerance, relative to h
PARALLEL_TOL = 1e-10   # reject cut angles this close to a grid direction


class MeshError(ValueError):
    pass


@dataclass(frozen=True)
class CutLine:
    """Straight cut through (x0, 0) at angle gamma (radians) to the x-axis."""

    x0: float
    gamma: float

    def __post_init__(self):
        if not 0.0 < self.gamma < math.pi / 2:
            raise MeshError("cut angle must lie strictly between 0 and pi/2")

    @property
    def direction(self) -> np.ndarray:
        return np.array([math.cos(self.gamma), math.sin(self.gamma)])

    @property
    def normal(self) -> np.ndarray:
        # left normal of the direction: positive signed distance = above the cut
        return np.array([-math.sin(self.gamma), math.cos(self.gamma)])

    def signed_distance(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        return (p[..., 0] - self.x0) * (-math.sin(self.gamma)) + p[..., 1] * math.cos(self.gamma)

    def y_at(self, x: float) -> float:
        """Height of the cut over abscissa x."""
        return math.tan(self.gamma) * (x - self.x0)

    def x_at(self, y: float) -> float:
        """Abscissa where the cut reaches height y."""
        return self.x0 + y / math.tan(self.gamma)


@dataclass
class Cell:
    id: int
    i: int
    j: int
    side: str              # "uncut", "below" or "above"
    polygon: np.ndarray    # (k, 2) CCW, first vertex lowest-then-leftmost
    area: float
    centroid: np.ndarray


@dataclass
class Face:
    id: int
    p0: np.ndarray
    p1: np.ndarray
    length: float
    normal: np.ndarray     # fixed orientation, points from inner to outer
    inner: int             # cell id
    outer: int             # cell id or BOUNDARY
    kind: str              # "interior" or "exterior"

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.p0 + self.p1)


def _shoelace(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _centroid(pts: np.ndarray, area: float) -> np.ndarray:
    x, y = pts[:, 0], pts[:, 1]
    w = x * np.roll(y, -1) - np.roll(x, -1) * y
    cx = float(((x + np.roll(x, -1)) * w).sum() / (6.0 * area))
    cy = float(((y + np.roll(y, -1)) * w).sum() / (6.0 * area))
    return np.array([cx, cy])


def polygon_area(polygon) -> float:
    """Shoelace area of a simple CCW polygon.

    Rejects vertex loops whose edge turns flip sign (self-intersecting or
    non-convex traversal) and non-positive areas.
    """
    pts = np.asarray(polygon, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3 or pts.shape[1] != 2:
        raise MeshError("polygon must be an (n>=3, 2) vertex array")
    edges = np.roll(pts, -1, axis=0) - pts
    turns = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[:, 1] * np.roll(edges, -1, axis=0)[:, 0]
    scale = max(float(np.abs(turns).max()), 1e-300)
    if (turns > 1e-9 * scale).any() and (turns < -1e-9 * scale).any():
        raise MeshError("polygon edge turns flip sign (self-intersecting input)")
    area = _shoelace(pts)
    if area <= 0.0:
        raise MeshError("polygon must be oriented CCW with positive area")
    return area


def _canonical(pts: np.ndarray) -> np.ndarray:
    """Rotate the CCW loop so it starts at the lowest, then leftmost vertex."""
    k = int(np.lexsort((pts[:, 0], pts[:, 1]))[0])
    return np.roll(pts, -k, axis=0)


def _prune(points: list, snap: float):
    """Drop consecutive (and wrap-around) duplicates; None if no area is left."""
    if len(points) < 3:
        return None
    out: list = []
    for p in points:
        if not out or math.hypot(p[0] - out[-1][0], p[1] - out[-1][1]) > snap:
            out.append(p)
    while len(out) > 1 and math.hypot(out[0][0] - out[-1][0], out[0][1] - out[-1][1]) <= snap:
        out.pop()
    if len(out) < 3:
        return None
    arr = np.array(out, dtype=float)
    if _shoelace(arr) < AREA_EPS:
        return None
    return arr


def _split_convex(poly: np.ndarray, line: CutLine, snap: float):
    """Split a convex CCW polygon along the cut.

    Returns (below, above, cut_points) where either polygon may be None when
    its area falls under AREA_EPS.  Intersection points within ``snap`` of a
    vertex are snapped onto it, so corner grazes collapse cleanly.
    """
    sig = line.signed_distance(poly).copy()
    sig[np.abs(sig) <= snap] = 0.0
    below: list = []
    above: list = []
    cut: list = []
    npts = len(poly)
    for k in range(npts):
        v, s = poly[k], sig[k]
        v2, s2 = poly[(k + 1) % npts], sig[(k + 1) % npts]
        if s <= 0.0:
            below.append(v)
        if s >= 0.0:
            above.append(v)
        if s == 0.0:
            cut.append(v)
        if s * s2 < 0.0:
            t = s / (s - s2)
            p = v + t * (v2 - v)
            if math.hypot(p[0] - v[0], p[1] - v[1]) <= snap:
                p = v.copy()
            elif math.hypot(p[0] - v2[0], p[1] - v2[1]) <= snap:
                p = v2.copy()
            below.append(p)
            above.append(p)
            cut.append(p)
    # de-duplicate collected crossing points
    cut_pts: list = []
    for p in cut:
        if all(math.hypot(p[0] - q[0], p[1] - q[1]) > snap for q in cut_pts):
            cut_pts.append(np.asarray(p, dtype=float))
    return _prune(below, snap), _prune(above, snap), cut_pts


def clip_cell(square, line: CutLine):
    """Split one axis-aligned cell along the cut; returns (below, above).

    Either entry is None when that side has no area (the cell counts uncut).
    """
    sq = np.asarray(square, dtype=float)
    h = float(sq[:, 0].max() - sq[:, 0].min())
    below, above, _ = _split_convex(sq, line, SNAP_REL * max(h, 1e-300))
    return below, above


@dataclass
class CutCellMesh:
    n: int
    h: float
    line: CutLine
    vf_threshold: float
    cells: list = field(default_factory=list)
    faces: list = field(default_factory=list)
    cell_faces: list = field(default_factory=list)   # per cell: [(face_id, +1 inner / -1 outer)]
    stabilized: list = field(default_factory=list)   # ids of cells with area/h^2 < threshold

    # array views, filled by _finalize
    areas: np.ndarray = None
    centroids: np.ndarray = None
    face_length: np.ndarray = None
    face_normal: np.ndarray = None
    face_inner: np.ndarray = None
    face_outer: np.ndarray = None
    face_midpoint: np.ndarray = None
    boundary_cells: np.ndarray = None

    def _finalize(self):
        self.areas = np.array([c.area for c in self.cells])
        self.centroids = np.array([c.centroid for c in self.cells])
        self.face_length = np.array([f.length for f in self.faces])
        self.face_normal = np.array([f.normal for f in self.faces])
        self.face_inner = np.array([f.inner for f in self.faces], dtype=int)
        self.face_outer = np.array([f.outer for f in self.faces], dtype=int)
        self.face_midpoint = np.array([f.midpoint for f in self.faces])
        ext = self.face_outer == BOUNDARY
        self.boundary_cells = np.unique(self.face_inner[ext])

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    def volume_fractions(self) -> np.ndarray:
        return self.areas / (self.h * self.h)

    def neighbor_of(self, face_id: int, cell_id: int) -> int:
        f = self.faces[face_id]
        return f.outer if f.inner == cell_id else f.inner


def _make_cell(cid: int, i: int, j: int, side: str, poly: np.ndarray) -> Cell:
    poly = _canonical(np.asarray(poly, dtype=float))
    area = _shoelace(poly)
    if area <= 0.0:
        raise MeshError(f"cell ({i},{j},{side}) has non-positive area")
    return Cell(cid, i, j, side, poly, area, _centroid(poly, area))


def generate_mesh(n: int, line: CutLine, vf_threshold: float = 0.4) -> CutCellMesh:
    """Build the cut-cell mesh for an n-by-n background grid.

    A line that misses the square yields the plain structured grid.  Lines
    (near-)parallel to a grid direction are rejected rather than perturbed.
    """
    if n < 2:
        raise MeshError("background resolution must be at least 2")
    if line.gamma < PARALLEL_TOL or line.gamma > math.pi / 2 - PARALLEL_TOL:
        raise MeshError("cut is (near-)parallel to a grid direction")
    h = 1.0 / n
    snap = SNAP_REL * h

    # signed distance at grid corners, snapped to zero near the line;
    # sign changes over a cell's corners flag the candidates for splitting
    xs = np.arange(n + 1) * h
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    sig = line.signed_distance(np.stack([gx, gy], axis=-1))
    sig[np.abs(sig) <= snap] = 0.0

    cells: list = []
    pieces: dict = {}   # (i, j) -> (uncut_id, below_id, above_id, cut_points)
    for i in range(n):
        for j in range(n):
            square = np.array([
                [i * h, j * h],
                [(i + 1) * h, j * h],
                [(i + 1) * h, (j + 1) * h],
                [i * h, (j + 1) * h],
            ])
            s = sig[i:i + 2, j:j + 2]
            if s.min() >= 0.0 or s.max() <= 0.0:
                cid = len(cells)
                cells.append(_make_cell(cid, i, j, "uncut", square))
                pieces[(i, j)] = (cid, None, None, None)
                continue
            below, above, cut_pts = _split_convex(square, line, snap)
            if below is None or above is None:
                cid = len(cells)
                cells.append(_make_cell(cid, i, j, "uncut", square))
                pieces[(i, j)] = (cid, None, None, None)
                continue
            bid = len(cells)
            cells.append(_make_cell(bid, i, j, "below", below))
            aid = len(cells)
            cells.append(_make_cell(aid, i, j, "above", above))
            if len(cut_pts) != 2:
                raise MeshError(f"degenerate cut segment in cell ({i},{j})")
            pieces[(i, j)] = (None, bid, aid, cut_pts)

    def cell_at(i: int, j: int, sig_mid: float) -> int:
        rec = pieces[(i, j)]
        if rec[0] is not None:
            return rec[0]
        return rec[1] if sig_mid < 0.0 else rec[2]

    faces: list = []
    cell_faces: list = [[] for _ in cells]

    def add_face(p0, p1, normal, inner, outer, kind):
        fid = len(faces)
        p0 = np.asarray(p0, dtype=float)
        p1 = np.asarray(p1, dtype=float)
        length = math.hypot(p1[0] - p0[0], p1[1] - p0[1])
        faces.append(Face(fid, p0, p1, length, np.asarray(normal, dtype=float), inner, outer, kind))
        cell_faces[inner].append((fid, +1))
        if outer != BOUNDARY:
            cell_faces[outer].append((fid, -1))

    # vertical grid edges x = i*h, split where the cut crosses them
    for i in range(n + 1):
        x = i * h
        ystar = line.y_at(x)
        for j in range(n):
            y0, y1 = j * h, (j + 1) * h
            if y0 + snap < ystar < y1 - snap:
                spans = [(y0, ystar), (ystar, y1)]
            else:
                spans = [(y0, y1)]
            for a, b in spans:
                sm = float(line.signed_distance(np.array([x, 0.5 * (a + b)])))
                if i == 0:
                    add_face([x, a], [x, b], [-1.0, 0.0], cell_at(0, j, sm), BOUNDARY, "exterior")
                elif i == n:
                    add_face([x, a], [x, b], [1.0, 0.0], cell_at(n - 1, j, sm), BOUNDARY, "exterior")
                else:
                    add_face([x, a], [x, b], [1.0, 0.0],
                             cell_at(i - 1, j, sm), cell_at(i, j, sm), "interior")

    # horizontal grid edges y = j*h
    for j in range(n + 1):
        y = j * h
        xstar = line.x_at(y)
        for i in range(n):
            x0, x1 = i * h, (i + 1) * h
            if x0 + snap < xstar < x1 - snap:
                spans = [(x0, xstar), (xstar, x1)]
            else:
                spans = [(x0, x1)]
            for a, b in spans:
                sm = float(line.signed_distance(np.array([0.5 * (a + b), y])))
                if j == 0:
                    add_face([a, y], [b, y], [0.0, -1.0], cell_at(i, 0, sm), BOUNDARY, "exterior")
                elif j == n:
                    add_face([a, y], [b, y], [0.0, 1.0], cell_at(i, n - 1, sm), BOUNDARY, "exterior")
                else:
                    add_face([a, y], [b, y], [0.0, 1.0],
                             cell_at(i, j - 1, sm), cell_at(i, j, sm), "interior")

    # cut segments: interior faces between the below and above piece
    for i in range(n):
        for j in range(n):
            rec = pieces[(i, j)]
            if rec[0] is None:
                p0, p1 = rec[3]
                add_face(p0, p1, line.normal, rec[1], rec[2], "interior")

    mesh = CutCellMesh(
        n=n, h=h, line=line, vf_threshold=vf_threshold,
        cells=cells, faces=faces, cell_faces=cell_faces,
        stabilized=[c.id for c in cells if c.area < vf_threshold * h * h],
    )
    mesh._finalize()
    if abs(mesh.areas.sum() - 1.0) > 1e-9:
        raise MeshError("mesh areas do not tile the unit square")
    return mesh
