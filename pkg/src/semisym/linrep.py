"""Incidence graphs of linear representations, and related graph families.

The graph of a point set K in the hyperplane X0 = 0 of PG(n+1,q) has the
affine points (1, a_1, ..., a_{n+1}) as one class and, as the other class,
the lines meeting the hyperplane exactly in a point of K.  Vertex numbering
is fixed: affine points first, ordered by their coordinate code, then lines
ordered by (K-point index, anchor code), so builds are reproducible byte for
byte.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import gf, pg
from .graphalg import Graph
from .pg import Collineation, ProjPoint, Space
from .pointsets import PointSet


class IncidenceGraph(Graph):
    """Bipartite point/line incidence graph, immutable after construction."""

    def __init__(self, num_vertices, edges, parts, meta):
        super().__init__(num_vertices, edges, parts, meta)

    @property
    def n_points(self) -> int:
        return int(self.meta["n_points"])

    @property
    def n_lines(self) -> int:
        return int(self.meta["n_lines"])


def _affine_codes(q: int, width: int) -> np.ndarray:
    """(q^width, width) rows in code order: row index == its base-q code."""
    rows = np.asarray(list(itertools.product(range(q), repeat=width)), dtype=np.int64)
    return rows.reshape(q**width, width)


def _encode(rows: np.ndarray, q: int) -> np.ndarray:
    code = np.zeros(len(rows), dtype=np.int64)
    for j in range(rows.shape[1]):
        code = code * q + rows[:, j]
    return code


def build_gamma(k_set: PointSet) -> IncidenceGraph:
    """Incidence graph of the linear representation of K in PG(n+1,q)."""
    if not k_set.points:
        raise ValueError("build_gamma needs a nonempty point set")
    sp = k_set.space
    n, q = sp.n, sp.q
    t = sp.t
    n_aff = q ** (n + 1)
    affine = _affine_codes(q, n + 1)
    dirs = k_set.coords_array()              # (|K|, n+1)
    k_count = len(dirs)
    lines_per_dir = q**n

    edges = np.empty((n_aff * k_count, 2), dtype=np.int64)
    for i in range(k_count):
        d = dirs[i]
        lead = int(np.argmax(d != 0))
        # anchor: the point of the affine line with coordinate 0 at the
        # direction's leading position (canonical coset representative)
        factor = t.mul[affine[:, lead], t.inv[d[lead]]]
        anchor = t.sub[affine, t.mul[factor[:, None], d[None, :]]]
        reduced = np.delete(anchor, lead, axis=1)
        line_code = _encode(reduced, q)
        line_ids = n_aff + i * lines_per_dir + line_code
        edges[i * n_aff:(i + 1) * n_aff, 0] = np.arange(n_aff)
        edges[i * n_aff:(i + 1) * n_aff, 1] = line_ids
    parts = np.concatenate([np.zeros(n_aff, dtype=np.int64),
                            np.ones(k_count * lines_per_dir, dtype=np.int64)])
    meta = {
        "kind": "gamma",
        "family": k_set.family,
        "n": n,
        "q": q,
        "n_points": n_aff,
        "n_lines": k_count * lines_per_dir,
        "k_size": k_count,
        "pointset": k_set,
        "family_meta": dict(k_set.meta),
    }
    g = IncidenceGraph(n_aff + k_count * lines_per_dir, edges, parts, meta)
    assert g.num_edges == n_aff * k_count
    return g


def build_lambda(n: int, q: int) -> IncidenceGraph:
    """The coordinate-relation graph on two copies of F_q^(n+1).

    A point row (p_1,...,p_{n+1}) and a line row (l_1,...,l_{n+1}) are
    adjacent when l_{i+1} + p_{i+1} = p_1 * l_i for i = 1..n.
    """
    if n < 1:
        raise ValueError("build_lambda needs n >= 1")
    spec = gf.field(q)
    t = gf.tables(spec)
    n_side = q ** (n + 1)
    p_rows = _affine_codes(q, n + 1)
    edges = np.empty((n_side * q, 2), dtype=np.int64)
    row = 0
    for l1 in range(q):
        cols = [np.full(n_side, l1, dtype=np.int64)]
        for i in range(1, n + 1):
            nxt = t.sub[t.mul[p_rows[:, 0], cols[-1]], p_rows[:, i]]
            cols.append(nxt)
        l_rows = np.stack(cols, axis=1)
        l_code = _encode(l_rows, q)
        edges[row: row + n_side, 0] = np.arange(n_side)
        edges[row: row + n_side, 1] = n_side + l_code
        row += n_side
    parts = np.concatenate([np.zeros(n_side, dtype=np.int64),
                            np.ones(n_side, dtype=np.int64)])
    meta = {"kind": "lambda", "family": "lambda", "n": n, "q": q,
            "n_points": n_side, "n_lines": n_side}
    return IncidenceGraph(2 * n_side, edges, parts, meta)


def dwz_pointset(n: int, p: int) -> PointSet:
    """Orbit of (1,0,...,0) under the unipotent one-step shear matrix.

    Defined for prime fields only; the orbit has exactly p points and,
    together with (0,...,0,1), forms a (p+1)-arc.
    """
    if not gf.is_prime(p):
        raise ValueError(f"dwz_pointset needs a prime field, got q={p}")
    if not 1 <= n <= p - 1:
        raise ValueError(f"dwz_pointset needs n <= p-1, got n={n}, p={p}")
    sp = pg.space(n, p)
    d = n + 1
    mat = tuple(tuple(1 if j in (i, i + 1) else 0 for j in range(d)) for i in range(d))
    phi = Collineation(sp, mat, 0)
    pts = []
    cur = sp.point([1] + [0] * n)
    for _ in range(p):
        pts.append(cur)
        cur = pg.apply(phi, cur)
    assert cur == pts[0], "the shear matrix has order p"
    assert len(set(pts)) == p
    ps = PointSet("dwz", sp, tuple(pts), meta={"matrix": [list(r) for r in mat]})
    from .pointsets import arc_violation
    extra = sp.point([0] * n + [1])
    assert arc_violation(list(ps.points) + [extra]) is None
    return ps


# ---------------------------------------------------------------------------
# vertex <-> geometry translation for gamma graphs
# ---------------------------------------------------------------------------

def gamma_vertex_geometry(g: IncidenceGraph):
    """Decoder functions (point_of, line_of) for a gamma graph's vertices.

    point_of(v) -> affine coordinate row (a_1..a_{n+1});
    line_of(v)  -> (K index, anchor coordinate row).
    """
    if g.meta.get("kind") != "gamma":
        raise ValueError("not a gamma graph")
    n, q = g.meta["n"], g.meta["q"]
    n_aff = g.n_points
    lines_per_dir = q**n
    k_set: PointSet = g.meta["pointset"]
    dirs = k_set.coords_array()

    def decode(code: int, width: int) -> list[int]:
        out = []
        for _ in range(width):
            out.append(code % q)
            code //= q
        return list(reversed(out))

    def point_of(v: int) -> list[int]:
        if not 0 <= v < n_aff:
            raise ValueError("not a point vertex")
        return decode(v, n + 1)

    def line_of(v: int) -> tuple[int, list[int]]:
        if not n_aff <= v < g.num_vertices:
            raise ValueError("not a line vertex")
        rel = v - n_aff
        i, code = divmod(rel, lines_per_dir)
        reduced = decode(code, n)
        lead = int(np.argmax(dirs[i] != 0))
        anchor = reduced[:lead] + [0] + reduced[lead:]
        return i, anchor

    return point_of, line_of


def edge_map_witness(g: IncidenceGraph, e1: tuple[int, int], e2: tuple[int, int],
                     budget: int = 10**8) -> Collineation:
    """An explicit collineation of PG(n+1,q) fixing the hyperplane at infinity,
    stabilizing K, and mapping the incident pair e1 to e2.

    Follows the constructive edge-transitivity argument: move the direction
    point inside K with a stabilizer element, extend it to the big space,
    then correct with the unique elation sliding the image point home.
    """
    if g.meta.get("kind") != "gamma":
        raise ValueError("edge_map_witness needs a gamma graph")
    k_set: PointSet = g.meta["pointset"]
    n, q = g.meta["n"], g.meta["q"]
    point_of, line_of = gamma_vertex_geometry(g)
    r1, l1 = e1
    r2, l2 = e2
    i1, _ = line_of(l1)
    i2, _ = line_of(l2)
    a1 = point_of(r1)
    a2 = point_of(r2)
    # incidence check: the anchor of (point, direction) must match the line
    for (pt, lv, i) in ((a1, l1, i1), (a2, l2, i2)):
        if _line_vertex_of_point(g, pt, i) != lv:
            raise ValueError("edge endpoints are not incident")

    stab = _stabilizer_elements(k_set, budget)
    if stab is None:
        raise ValueError(f"unsupported family: stabilizer of {k_set.family} "
                         "not transitive or oracle out of range")
    p1 = k_set.points[i1]
    p2 = k_set.points[i2]
    beta = None
    for cand in stab:
        if pg.apply(cand, p1) == p2:
            beta = cand
            break
    if beta is None:
        raise ValueError("unsupported family: stabilizer is not transitive on K")

    bsp = pg.space(n + 1, q)
    d = n + 2
    small = np.asarray(beta.matrix, dtype=np.int64)
    big = np.zeros((d, d), dtype=np.int64)
    big[0, 0] = 1
    big[1:, 1:] = small
    beta_big = Collineation(bsp, tuple(tuple(int(v) for v in row) for row in big), beta.frob)

    big_r1 = bsp.point([1] + a1)
    big_r2 = bsp.point([1] + a2)
    image = pg.apply(beta_big, big_r1)
    if image == big_r2:
        witness = beta_big
    else:
        axis = pg.span_in(bsp, [bsp.point([0] + list(row))
                                for row in np.eye(n + 1, dtype=np.int64).tolist()])
        center_rows = _line_infinity_point(bsp, image, big_r2)
        center = bsp.point(center_rows)
        gamma = pg.elation(axis, center, image, big_r2)
        witness = gamma.compose(beta_big)

    # verification by application: R1 -> R2 and L1 -> L2
    assert pg.apply(witness, big_r1) == big_r2
    dir1 = bsp.point([0] + list(k_set.points[i1].coords))
    dir2 = bsp.point([0] + list(k_set.points[i2].coords))
    assert pg.apply(witness, dir1) == dir2
    return witness


def _line_vertex_of_point(g: IncidenceGraph, affine_row, k_index: int) -> int:
    """Line vertex id through the given affine point in direction k_index."""
    k_set: PointSet = g.meta["pointset"]
    sp = k_set.space
    t = sp.t
    n, q = g.meta["n"], g.meta["q"]
    d = k_set.coords_array()[k_index]
    lead = int(np.argmax(d != 0))
    a = np.asarray(affine_row, dtype=np.int64)
    factor = t.mul[a[lead], t.inv[d[lead]]]
    anchor = t.sub[a, t.mul[factor, d]]
    reduced = np.delete(anchor, lead)
    code = 0
    for v in reduced:
        code = code * q + int(v)
    return g.n_points + k_index * (q**n) + code


def _line_infinity_point(bsp: Space, a: ProjPoint, b: ProjPoint) -> list[int]:
    """Coordinates of (line ab) meet (X0 = 0) for distinct affine points."""
    t = bsp.t
    av = np.asarray(a.coords, dtype=np.int64)
    bv = np.asarray(b.coords, dtype=np.int64)
    # both normalized with X0 = 1: the difference lies on the hyperplane
    diff = t.sub[bv, av]
    assert diff[0] == 0 and diff.any()
    return diff.tolist()


def _stabilizer_elements(k_set: PointSet, budget: int):
    cached = k_set.meta.get("_stabilizer_elements")
    if cached is not None:
        return cached
    try:
        rep = pg.stabilizer_order_bruteforce(k_set, budget=budget)
    except pg.OracleBudgetError:
        return None
    if not rep.transitive:
        return None
    k_set.meta["_stabilizer_elements"] = rep.elements
    return rep.elements


# ---------------------------------------------------------------------------
# the explicit coordinate isomorphism between the two graph families
# ---------------------------------------------------------------------------

def lambda_to_gamma_map(n: int, q: int) -> tuple[IncidenceGraph, IncidenceGraph, np.ndarray]:
    """The constructive isomorphism from the relation graph onto the gamma
    graph of the degenerate-conic point set.

    A line-class row (l_1,...,l_{n+1}) maps to the affine point
    (1, l_1, ..., l_{n+1}); a point-class row (p) maps to the line through
    its neighbor images with direction (1, p_1, p_1^2, ..., p_1^n) in K.
    Returns (lambda_graph, gamma_graph, vertex_map).
    """
    from .pointsets import power_rows
    lam = build_lambda(n, q)
    k_set = power_rows(n, q)
    gam = build_gamma(k_set)
    spec = gf.field(q)
    t = gf.tables(spec)
    n_side = q ** (n + 1)
    vmap = np.empty(lam.num_vertices, dtype=np.int64)
    # line-class rows become affine points with the same code
    vmap[n_side:] = np.arange(n_side)
    # point-class rows become gamma line vertices
    p_rows = _affine_codes(q, n + 1)
    for v in range(n_side):
        p = p_rows[v]
        k_index = int(p[0])  # K point (1, t, ..., t^n) with t = p_1
        # image of one neighbor: l with l_1 = 0, l_{i+1} = p_1 l_i - p_{i+1}
        l = [0]
        for i in range(1, n + 1):
            l.append(int(t.sub[t.mul[p[0], l[-1]], p[i]]))
        vmap[v] = _line_vertex_of_point(gam, l, k_index)
    return lam, gam, vmap
