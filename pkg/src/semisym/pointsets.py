"""The point-set families K living in a hyperplane PG(n,q).

Each constructor returns a PointSet of exactly q points spanning its ambient
space (custom sets excepted), with canonical coordinates fixed once so that
graphs, reports and stabilizer computations are reproducible.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import gf, pg
from .pg import ProjPoint, Space


class UnsupportedFamilyError(ValueError):
    """Requested family/parameter combination is not in the catalog."""


@dataclass
class PointSet:
    """A family-tagged set of points in a declared ambient PG(n,q)."""

    family: str
    space: Space
    points: tuple[ProjPoint, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for p in self.points:
            if p.space != self.space:
                raise ValueError("point outside the declared ambient space")
        if len(set(self.points)) != len(self.points):
            raise ValueError("point set contains duplicates")

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def q(self) -> int:
        return self.space.q

    def coords_array(self) -> np.ndarray:
        return np.asarray([p.coords for p in self.points], dtype=np.int64)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "q": self.q,
            "field": self.space.spec.to_json(),
            "points": [list(p.coords) for p in self.points],
            "meta": {k: v for k, v in self.meta.items() if _jsonable(v)},
        }


def _jsonable(v) -> bool:
    return isinstance(v, (int, float, str, bool, list, tuple, type(None)))


def _assert_spans(ps: PointSet):
    if pg.rank(ps.coords_array().tolist(), ps.space.t) != ps.space.n + 1:
        raise AssertionError(f"{ps.family} does not span its ambient space")


def arc_violation(points, d: int | None = None):
    """A (d+1)-subset lying in a hyperplane, or None when the set is an arc."""
    pts = list(points)
    if not pts:
        return None
    sp = pts[0].space
    d = sp.n + 1 if d is None else d
    coords = np.asarray([p.coords for p in pts], dtype=np.int64)
    for combo in itertools.combinations(range(len(pts)), d):
        if pg.rank(coords[list(combo)].tolist(), sp.t) < d:
            return tuple(pts[i] for i in combo)
    return None


# ---------------------------------------------------------------------------
# arc families
# ---------------------------------------------------------------------------

def basis_or_frame(kind: str, n: int, q: int) -> PointSet:
    """The q unit points (q = n+1) or unit points plus the all-ones point (q = n+2)."""
    if kind == "basis":
        if q != n + 1:
            raise ValueError(f"basis family needs q = n+1, got n={n}, q={q}")
    elif kind == "frame":
        if q != n + 2:
            raise ValueError(f"frame family needs q = n+2, got n={n}, q={q}")
    else:
        raise ValueError(f"kind must be basis or frame, got {kind!r}")
    sp = pg.space(n, q)
    pts = sp.unit_points()
    if kind == "frame":
        neg_one = int(sp.t.neg[1])
        pts.append(sp.point([neg_one] * (n + 1)))
    ps = PointSet(kind, sp, tuple(pts))
    assert len(ps.points) == q
    _assert_spans(ps)
    return ps


def nrc_minus_point(n: int, q: int) -> PointSet:
    """{(1, t, t^2, ..., t^n) : t in F_q}: the normal rational curve minus (0,...,0,1)."""
    if not 2 <= n <= q - 1:
        raise ValueError(f"nrc_minus_point needs 2 <= n <= q-1, got n={n}, q={q}")
    sp = pg.space(n, q)
    spec = sp.spec
    pts = []
    for t_el in gf.elements(spec):
        coords = [spec.one()]
        acc = spec.one()
        for _ in range(n):
            acc = acc * t_el
            coords.append(acc)
        pts.append(sp.point(coords))
    ps = PointSet("nrc_minus_point", sp, tuple(pts),
                  meta={"removed_point": [0] * n + [1]})
    assert len(ps.points) == q
    _assert_spans(ps)
    return ps


def power_rows(n: int, q: int) -> PointSet:
    """{(1, t, t^2, ..., t^n) : t in F_q} without the dimension guard.

    Identical to nrc_minus_point when 2 <= n <= q-1; for n >= q the set
    degenerates (t^q = t) and spans a proper flat, which is exactly what the
    relation-graph comparisons need at n = q.
    """
    sp = pg.space(n, q)
    spec = sp.spec
    pts = []
    for t_el in gf.elements(spec):
        coords = [spec.one()]
        acc = spec.one()
        for _ in range(n):
            acc = acc * t_el
            coords.append(acc)
        pts.append(sp.point(coords))
    return PointSet("power_rows", sp, tuple(pts))


def casse_glynn(q: int, sigma_exponent: int) -> PointSet:
    """{(1, x, x^sigma, x^(sigma+1))} in PG(3,q), sigma = 2^e a generator of Aut(F_q)."""
    spec = gf.field(q)
    if spec.p != 2 or spec.h <= 2:
        raise ValueError(f"casse_glynn needs q = 2^h with h > 2, got q={q}")
    e = sigma_exponent
    if not 1 <= e < spec.h or math.gcd(e, spec.h) != 1:
        raise ValueError(f"sigma exponent {e} does not generate Aut(F_{q})")
    sp = pg.space(3, q)
    pts = []
    for x in gf.elements(spec):
        sx = x.frobenius(e)
        pts.append(sp.point([spec.one(), x, sx, x * sx]))
    ps = PointSet("casse_glynn", sp, tuple(pts),
                  meta={"sigma_exponent": e, "removed_point": [0, 0, 0, 1]})
    assert len(ps.points) == q
    _assert_spans(ps)
    return ps


# ---------------------------------------------------------------------------
# Baer-subgeometry families (coordinates inside the subfield copy of PG(3, sqrt(q)))
# ---------------------------------------------------------------------------

def _square_root_field(q: int) -> tuple[gf.FieldSpec, gf.FieldSpec, np.ndarray]:
    spec = gf.field(q)
    if spec.h % 2 != 0:
        raise ValueError(f"q={q} is not a square")
    sub = gf.field(spec.p ** (spec.h // 2))
    emb = gf.subfield_embedding(sub, spec)
    return sub, spec, emb


def _anisotropic_form(sub: gf.FieldSpec):
    """Coefficients (a, b) with x^2 + a*x*y + b*y^2 irreducible over the subfield."""
    if sub.p != 2:
        # x^2 - nu*y^2 with nu the least non-square
        squares = {(x * x).index for x in gf.elements(sub) if not x.is_zero()}
        nu = next(i for i in range(1, sub.q) if i not in squares)
        return 0, int(gf.tables(sub).neg[nu])
    # x^2 + x*y + b*y^2 with the least workable b
    for b in range(1, sub.q):
        bel = sub.element(b)
        if all(not (x * x + x + bel).is_zero() for x in gf.elements(sub)):
            return 1, b
    raise AssertionError("anisotropic binary form exists over every finite field")


def baer_set(kind: str, q: int) -> PointSet:
    """Elliptic-quadric, Tits-ovoid or hyperbolic-quadric point set of PG(3, sqrt(q)).

    All coordinates lie in the subfield copy of PG(3, sqrt(q)) inside PG(3,q).
    Elliptic and Tits drop the ovoid point (0,0,0,1); the hyperbolic quadric
    drops the two canonical-form regulus lines through (0,0,0,1).
    """
    if kind not in ("elliptic", "tits", "hyperbolic"):
        raise ValueError(f"unknown Baer family kind {kind!r}")
    sub, spec, emb = _square_root_field(q)
    r = sub.q
    if kind in ("elliptic", "hyperbolic") and q <= 4:
        raise ValueError(f"{kind} family needs q > 4, got q={q}")
    if kind == "tits":
        # q = 2^(2(2e+1)): sqrt(q) = 2^(2e+1) with odd exponent >= 3
        if spec.p != 2 or sub.h % 2 == 0 or sub.h < 3:
            raise ValueError(f"tits family needs q = 2^(2(2e+1)) with e >= 1, got q={q}")
    sp = pg.space(3, q)
    tsub = gf.tables(sub)
    rows_sub = []
    meta: dict = {"subfield_order": r}
    if kind == "elliptic":
        a, b = _anisotropic_form(sub)
        meta["form"] = f"X0*X3 = X1^2 + {a}*X1*X2 + {b}*X2^2"
        for xi in range(r):
            for yi in range(r):
                g_val = tsub.add[tsub.mul[xi, xi],
                                 tsub.add[tsub.mul[a, tsub.mul[xi, yi]],
                                          tsub.mul[b, tsub.mul[yi, yi]]]]
                rows_sub.append((1, xi, yi, int(g_val)))
        meta["removed_point"] = [0, 0, 0, 1]
    elif kind == "tits":
        e = (sub.h - 1) // 2
        sigma_e = e + 1          # sigma: x -> x^(2^(e+1))
        meta["sigma_exponent"] = sigma_e
        for s in gf.elements(sub):
            for t_el in gf.elements(sub):
                last = s * t_el + (s ** (2 ** sigma_e + 2)) + t_el.frobenius(sigma_e)
                rows_sub.append((1, s.index, t_el.index, last.index))
        meta["removed_point"] = [0, 0, 0, 1]
    else:
        # hyperbolic X0*X3 = X1*X2 minus the two ruling lines through (0,0,0,1)
        meta["form"] = "X0*X3 = X1*X2"
        meta["removed_lines"] = "the two reguli lines through (0,0,0,1)"
        for xi in range(r):
            for yi in range(r):
                rows_sub.append((1, xi, yi, int(tsub.mul[xi, yi])))
    pts = tuple(sp.point([int(emb[c]) for c in row]) for row in rows_sub)
    ps = PointSet(f"{kind}_baer", sp, pts, meta=meta)
    assert len(ps.points) == q
    _assert_spans(ps)
    return ps


# ---------------------------------------------------------------------------
# cone family
# ---------------------------------------------------------------------------

# complement of a line of the Fano plane: a frame, so its stabilizer is
# transitive on it, but every Fano line meets it in 0 or 2 points, hence it
# has no tangent lines at all
FANO_LINE_COMPLEMENT = tuple((1, x2, x3) for x2 in range(2) for x3 in range(2))

# a full line plus one extra point: not stabilizer-transitive, but every
# point of the Fano plane off the base lies on a tangent line to it
FANO_LINE_PLUS_POINT = ((0, 1, 0), (0, 0, 1), (0, 1, 1), (1, 0, 0))

_NAMED_CONE_BASES = {
    (3, 2, 3): {
        "fano_complement": FANO_LINE_COMPLEMENT,
        "line_plus_point": FANO_LINE_PLUS_POINT,
    },
}


def cone_set(n: int, q0: int, h: int, base: tuple | str | None = None) -> PointSet:
    """Cone over a base set O in a subgeometry PG(n,q0) of PG(n, q0^h), minus the vertex.

    The vertex is V = (1,0,...,0); the base lives in the hyperplane X0 = 0 of
    the subgeometry and must have q0^(h-1) points spanning that hyperplane.
    At (n, q0, h) = (3, 2, 3) two named bases ship: "fano_complement" (the
    default; transitive stabilizer, no tangent lines to the base) and
    "line_plus_point" (tangency precondition of the distance-4 lemma holds,
    stabilizer not transitive).  No 4-point base in the Fano plane has both
    properties.
    """
    if h < 2:
        raise ValueError("cone_set needs q = q0^h with h >= 2")
    q = q0**h
    sub = gf.field(q0)
    spec = gf.field(q)
    if spec.p != sub.p or spec.h % sub.h != 0:
        raise ValueError(f"GF({q0}) is not a subfield of GF({q})")
    base_name = None
    if base is None:
        base = "fano_complement"
    if isinstance(base, str):
        named = _NAMED_CONE_BASES.get((n, q0, h), {})
        if base not in named:
            raise UnsupportedFamilyError(
                f"no named cone base {base!r} for (n,q0,h)=({n},{q0},{h}); pass points explicitly")
        base_name = base
        base = named[base]
    base_rows = [tuple(int(c) for c in b) for b in base]
    if any(len(b) != n for b in base_rows):
        raise ValueError("base points need n coordinates (they live in the hyperplane X0=0)")
    if len(set(base_rows)) != q0 ** (h - 1):
        raise ValueError(f"base must have q0^(h-1) = {q0**(h-1)} distinct points")
    if any(not any(b) for b in base_rows):
        raise ValueError("zero vector in base")
    tsub = gf.tables(sub)
    pi_space = pg.space(n - 1, q0)
    base_pts = [pi_space.point(b) for b in base_rows]
    if pg.rank([list(p.coords) for p in base_pts], tsub) != n:
        raise ValueError("base does not span the hyperplane of the subgeometry")
    if len(set(base_pts)) != len(base_pts):
        raise ValueError("base points are not projectively distinct")

    # tangency precondition of the distance-4 lemma, checked inside the base plane
    from . import setanalysis
    base_set = PointSet("custom", pi_space, tuple(base_pts))
    cover = setanalysis.tangent_coverage(base_set, include_s_points=False)
    tangent_ok = len(cover.uncovered) == 0

    emb = gf.subfield_embedding(sub, spec)
    sp = pg.space(n, q)
    pts = []
    for o in base_pts:
        # points of the line V-O in the subgeometry, except V itself
        for lam in range(1, q0):
            row = (1,) + tuple(int(tsub.mul[lam, c]) for c in o.coords)
            pts.append(sp.point([int(emb[c]) for c in row]))
        pts.append(sp.point([0] + [int(emb[c]) for c in o.coords]))
    vertex = sp.point([1] + [0] * n)
    ps = PointSet("cone", sp, tuple(pts),
                  meta={"q0": q0, "h": h, "vertex": list(vertex.coords),
                        "base": [list(b) for b in base_rows],
                        "base_name": base_name,
                        "base_tangency_ok": tangent_ok})
    assert len(ps.points) == q
    assert vertex not in ps.points
    _assert_spans(ps)
    return ps


# ---------------------------------------------------------------------------
# dual arcs
# ---------------------------------------------------------------------------

def dual_arc(k_set: PointSet) -> PointSet:
    """A dual k-arc in PG(k-n-2, q): columns of an orthogonal-complement basis.

    Duality is a correspondence between equivalence classes; this returns the
    echelon-form representative.  Only class-level properties are contractual.
    """
    pts = k_set.points
    k = len(pts)
    sp = k_set.space
    n = sp.n
    if k < n + 4:
        raise ValueError(f"dual_arc needs a k-arc with k >= n+4, got k={k}, n={n}")
    viol = arc_violation(pts)
    if viol is not None:
        raise ValueError(f"dual_arc input is not an arc; witness {viol}")
    a_cols = k_set.coords_array()             # (k, n+1): rows are point coords
    a_rows = [list(col) for col in a_cols.T]  # (n+1, k)
    ker = pg.right_kernel(a_rows, sp.t, k)    # (k-n-1) x k
    b = pg.rref(ker, sp.t)
    assert len(b) == k - n - 1
    dual_sp = pg.space(k - n - 2, k_set.q)
    cols = list(zip(*b))
    assert all(any(c) for c in cols), "MDS complement has no zero columns"
    dual_pts = tuple(dual_sp.point(list(c)) for c in cols)
    out = PointSet("dual_arc", dual_sp, dual_pts,
                   meta={"dual_of": k_set.family, "source_n": n, "k": k,
                         "generator_rows": [list(r) for r in b]})
    viol = arc_violation(out.points)
    if viol is not None:
        raise AssertionError("dual of an arc must be an arc (MDS duality)")
    return out


def custom_pointset(space: Space, coord_rows, family: str = "custom", meta: dict | None = None) -> PointSet:
    pts = tuple(space.point(list(r)) for r in coord_rows)
    return PointSet(family, space, pts, meta=meta or {})


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogEntry:
    family: str
    params: str
    condition: str
    order_formula: str
    constructible: bool
    notes: str = ""


CATALOG: tuple[CatalogEntry, ...] = (
    CatalogEntry("basis", "n, q", "q = n+1",
                 "conflicting printed formulas h*q^(n+1)*(q-1)*q! vs h*q^(n+1)*(q-1)^n*q!; "
                 "settled by the stabilizer oracle", True,
                 "full Aut can exceed the geometric group; see the GAP-index checks"),
    CatalogEntry("frame", "n, q", "q = n+2",
                 "conflicting printed formulas (swapped with basis row); settled by the oracle",
                 True, "Aut equals the geometric group when q = n+2 is prime"),
    CatalogEntry("nrc_minus_point", "n, q", "2 <= n <= q-1 (theorems need q >= n+3, or n=2 with q odd)",
                 "h*q^(n+2)*(q-1)^2", True, ""),
    CatalogEntry("casse_glynn", "q, sigma_exponent", "q = 2^h, h > 2, gcd(e, h) = 1",
                 "h*q^5*(q-1)^2", True, "sigma = 2 reproduces the NRC in PG(3,q)"),
    CatalogEntry("glynn", "q = 9", "the 10-arc of PG(4,9) minus a point",
                 "9^6*8^2", False,
                 "not constructible from paper data (no coordinates given); metadata only"),
    CatalogEntry("elliptic_baer", "q", "q > 4 a square",
                 "> h*q^5*(q-1)^2 (geometric part equals h*q^5*(q-1)^2)", True,
                 "non-geometric automorphisms expected"),
    CatalogEntry("tits_baer", "q", "q = 2^(2(2e+1))",
                 "> h*q^5*(q-1)*(sqrt(q)-1) (geometric part)", True,
                 "non-geometric automorphisms expected; desk scale is set-level only"),
    CatalogEntry("hyperbolic_baer", "q", "q > 4 a square",
                 "> 2*h*q^5*(q-1)*(sqrt(q)-1)^2 (geometric part)", True,
                 "non-geometric automorphisms expected"),
    CatalogEntry("cone", "n, q0, h", "q = q0^h; base O of q0^(h-1) points spanning "
                 "a hyperplane of the subgeometry",
                 "> geometric part |Persp(Hinf)|*|Persp(V)|*|PGammaL(n,q0)_O|*(h factor)", True,
                 "default base: Fano line complement at (n,q0,h)=(3,2,3)"),
)


def catalog() -> tuple[CatalogEntry, ...]:
    return CATALOG


def build_family(family: str, *, n: int | None = None, q: int | None = None,
                 q0: int | None = None, h: int | None = None,
                 sigma_exponent: int | None = None, base: tuple | None = None) -> PointSet:
    """Uniform constructor used by the CLI and the report generator."""
    if family in ("basis", "frame"):
        return basis_or_frame(family, n, q)
    if family in ("nrc", "nrc_minus_point"):
        return nrc_minus_point(n, q)
    if family == "casse_glynn":
        return casse_glynn(q, sigma_exponent if sigma_exponent is not None else 1)
    if family in ("elliptic", "elliptic_baer"):
        return baer_set("elliptic", q)
    if family in ("tits", "tits_baer"):
        return baer_set("tits", q)
    if family in ("hyperbolic", "hyperbolic_baer"):
        return baer_set("hyperbolic", q)
    if family == "cone":
        return cone_set(n, q0 if q0 is not None else 2,
                        h if h is not None else 3, base)
    if family == "glynn":
        raise UnsupportedFamilyError(
            "glynn: not constructible from paper data (no coordinates available)")
    raise UnsupportedFamilyError(f"unknown family {family!r}")
