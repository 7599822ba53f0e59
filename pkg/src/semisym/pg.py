"""Projective geometry PG(n,q): points, flats, collineations, stabilizers.

Conventions fixed once for the whole package:
  * points are row vectors of field-element indices, normalized so the first
    nonzero coordinate is 1;
  * flats are reduced row-echelon bases (unique per flat);
  * a collineation (M, e) acts by x -> frobenius(x, e) . M  (row vector times
    matrix, Frobenius applied first).
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

import numpy as np

from . import gf
from .gf import FieldSpec, FieldTables


class OracleBudgetError(RuntimeError):
    """The brute-force stabilizer oracle is out of range for these parameters."""


# ---------------------------------------------------------------------------
# small exact linear algebra over GF(q), entries are element indices
# ---------------------------------------------------------------------------

def rref(rows: Sequence[Sequence[int]], t: FieldTables) -> list[list[int]]:
    """Reduced row echelon form; returns only the nonzero rows."""
    m = [list(r) for r in rows]
    n_rows = len(m)
    if n_rows == 0:
        return []
    n_cols = len(m[0])
    add, mul, neg, inv = t.add, t.mul, t.neg, t.inv
    pivot_row = 0
    for col in range(n_cols):
        pr = None
        for r in range(pivot_row, n_rows):
            if m[r][col]:
                pr = r
                break
        if pr is None:
            continue
        m[pivot_row], m[pr] = m[pr], m[pivot_row]
        lead_inv = inv[m[pivot_row][col]]
        m[pivot_row] = [int(mul[lead_inv, v]) for v in m[pivot_row]]
        for r in range(n_rows):
            if r != pivot_row and m[r][col]:
                c = int(neg[m[r][col]])
                m[r] = [int(add[m[r][j], mul[c, m[pivot_row][j]]]) for j in range(n_cols)]
        pivot_row += 1
        if pivot_row == n_rows:
            break
    return [r for r in m if any(r)]


def rank(rows: Sequence[Sequence[int]], t: FieldTables) -> int:
    return len(rref(rows, t))


def right_kernel(rows: Sequence[Sequence[int]], t: FieldTables, n_cols: int) -> list[list[int]]:
    """Basis (as rows) of {x : R . x^T = 0} for the row matrix R."""
    red = rref(rows, t)
    pivots = []
    for r in red:
        pivots.append(next(j for j, v in enumerate(r) if v))
    free = [j for j in range(n_cols) if j not in pivots]
    basis = []
    neg = t.neg
    for f in free:
        vec = [0] * n_cols
        vec[f] = 1
        for r, pc in zip(red, pivots):
            vec[pc] = int(neg[r[f]])
        basis.append(vec)
    return basis


def mat_inverse(m: Sequence[Sequence[int]], t: FieldTables) -> list[list[int]] | None:
    """Inverse over GF(q), or None if singular."""
    d = len(m)
    aug = [list(row) + [1 if i == j else 0 for j in range(d)] for i, row in enumerate(m)]
    red = rref(aug, t)
    if len(red) < d or any(red[i][i] != 1 for i in range(d)):
        return None
    for i in range(d):
        if any(red[i][j] != (1 if j == i else 0) for j in range(d)):
            return None
    return [row[d:] for row in red]


# ---------------------------------------------------------------------------
# ambient space with cached enumeration and lookup structures
# ---------------------------------------------------------------------------

class Space:
    """PG(n,q) with a fixed point enumeration and numpy lookup tables."""

    def __init__(self, n: int, spec: FieldSpec):
        self.n = n
        self.spec = spec
        self.q = spec.q
        self.t = gf.tables(spec)
        self.num_points = (self.q ** (n + 1) - 1) // (self.q - 1)
        self.coords = self._enumerate()           # (N, n+1) normalized rows
        self._codes = self._encode(self.coords)
        self._id_of = {int(c): i for i, c in enumerate(self._codes)}
        self._line_cache: dict[tuple[int, int], tuple[int, ...]] = {}

    def _enumerate(self) -> np.ndarray:
        q, n = self.q, self.n
        blocks = []
        for lead in range(n + 1):
            tail = n - lead
            rest = np.array(list(itertools.product(range(q), repeat=tail)), dtype=np.int64)
            rest = rest.reshape(q**tail, tail)
            blk = np.zeros((q**tail, n + 1), dtype=np.int64)
            blk[:, lead] = 1
            if tail:
                blk[:, lead + 1:] = rest
            blocks.append(blk)
        pts = np.concatenate(blocks, axis=0)
        assert len(pts) == self.num_points
        return pts

    def _encode(self, rows: np.ndarray) -> np.ndarray:
        code = np.zeros(len(rows), dtype=np.int64)
        for j in range(self.n + 1):
            code = code * self.q + rows[:, j]
        return code

    def normalize_rows(self, rows: np.ndarray) -> np.ndarray:
        """Scale each nonzero row so its first nonzero coordinate is 1."""
        rows = np.asarray(rows, dtype=np.int64)
        nz = rows != 0
        lead_pos = np.argmax(nz, axis=1)
        lead_val = rows[np.arange(len(rows)), lead_pos]
        scale = self.t.inv[lead_val]
        return self.t.mul[rows, scale[:, None]]

    def ids_of_rows(self, rows: np.ndarray) -> np.ndarray:
        """Point ids of (already nonzero) coordinate rows."""
        norm = self.normalize_rows(rows)
        codes = self._encode(norm)
        return np.array([self._id_of[int(c)] for c in codes], dtype=np.int64)

    def id_of_row(self, row: Sequence[int]) -> int:
        return int(self.ids_of_rows(np.asarray([row], dtype=np.int64))[0])

    def point(self, coords: Sequence[int | gf.FieldElement]) -> "ProjPoint":
        idx = tuple(c.index if isinstance(c, gf.FieldElement) else int(c) for c in coords)
        return ProjPoint(self, idx)

    def point_by_id(self, pid: int) -> "ProjPoint":
        return ProjPoint(self, tuple(int(v) for v in self.coords[pid]))

    def unit_points(self) -> list["ProjPoint"]:
        out = []
        for i in range(self.n + 1):
            c = [0] * (self.n + 1)
            c[i] = 1
            out.append(self.point(c))
        return out

    def all_points(self) -> list["ProjPoint"]:
        return [self.point_by_id(i) for i in range(self.num_points)]

    def line_ids(self, i: int, j: int) -> tuple[int, ...]:
        """Ids of the q+1 points of the line through points with ids i, j."""
        key = (i, j) if i < j else (j, i)
        got = self._line_cache.get(key)
        if got is not None:
            return got
        a = self.coords[key[0]]
        b = self.coords[key[1]]
        rows = self.t.add[a[None, :], self.t.mul[np.arange(self.q)[:, None], b[None, :]]]
        ids = self.ids_of_rows(rows)
        out = tuple(sorted(ids.tolist() + [key[1]]))
        self._line_cache[key] = out
        return out

    def __repr__(self):
        return f"PG({self.n},{self.q})"

    def __eq__(self, other):
        return isinstance(other, Space) and self.n == other.n and self.spec == other.spec

    def __hash__(self):
        return hash((self.n, self.spec))


@functools.lru_cache(maxsize=None)
def space(n: int, q: int) -> Space:
    return Space(n, gf.field(q))


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjPoint:
    """Point of PG(n,q); coords are field-element indices, normalized."""

    space: Space
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != self.space.n + 1:
            raise ValueError("coordinate vector has wrong length")
        if not any(self.coords):
            raise ValueError("projective point needs a nonzero vector")
        norm = self.space.normalize_rows(np.asarray([self.coords], dtype=np.int64))[0]
        object.__setattr__(self, "coords", tuple(int(v) for v in norm))

    @property
    def id(self) -> int:
        return self.space.id_of_row(self.coords)

    def field_coords(self) -> tuple[gf.FieldElement, ...]:
        return tuple(self.space.spec.element(c) for c in self.coords)

    def __repr__(self):
        return f"Pt{self.coords}"


@dataclass(frozen=True)
class Subspace:
    """Flat of PG(n,q) as a reduced row-echelon basis (possibly empty)."""

    space: Space
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        red = rref(self.rows, self.space.t)
        object.__setattr__(self, "rows", tuple(tuple(r) for r in red))

    @property
    def dim(self) -> int:
        """Projective dimension; -1 for the empty flat."""
        return len(self.rows) - 1

    def contains(self, p: ProjPoint) -> bool:
        if not self.rows:
            return False
        stacked = list(self.rows) + [list(p.coords)]
        return rank(stacked, self.space.t) == len(self.rows)

    def points(self) -> list[ProjPoint]:
        """All points of the flat, deterministic order."""
        r = len(self.rows)
        if r == 0:
            return []
        t = self.space.t
        seen = set()
        out = []
        basis = np.asarray(self.rows, dtype=np.int64)
        for combo in itertools.product(range(self.space.q), repeat=r):
            if not any(combo):
                continue
            vec = np.zeros(self.space.n + 1, dtype=np.int64)
            for c, row in zip(combo, basis):
                vec = t.add[vec, t.mul[c, row]]
            p = self.space.point(vec.tolist())
            if p.coords not in seen:
                seen.add(p.coords)
                out.append(p)
        return out

    def __repr__(self):
        return f"Flat(dim={self.dim})"


@dataclass(frozen=True)
class Collineation:
    """Element of PGammaL(n+1,q): invertible matrix plus Frobenius exponent."""

    space: Space
    matrix: tuple[tuple[int, ...], ...]
    frob: int = 0

    def __post_init__(self):
        d = self.space.n + 1
        if len(self.matrix) != d or any(len(r) != d for r in self.matrix):
            raise ValueError("matrix has wrong shape")
        if not 0 <= self.frob < self.space.spec.h:
            raise ValueError("frobenius exponent out of range")
        t = self.space.t
        if mat_inverse(self.matrix, t) is None:
            raise ValueError("collineation matrix is singular")
        # scalar normalization: first nonzero entry of first nonzero column -> 1
        m = np.asarray(self.matrix, dtype=np.int64)
        for col in range(d):
            colvals = m[:, col]
            nz = np.nonzero(colvals)[0]
            if len(nz):
                s = t.inv[colvals[nz[0]]]
                m = t.mul[m, s]
                break
        object.__setattr__(self, "matrix", tuple(tuple(int(v) for v in r) for r in m))

    @classmethod
    def identity(cls, sp: Space) -> "Collineation":
        d = sp.n + 1
        eye = tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))
        return cls(sp, eye, 0)

    def apply_rows(self, rows: np.ndarray) -> np.ndarray:
        """Image coordinate rows (not normalized)."""
        t = self.space.t
        out = t.frob[self.frob][np.asarray(rows, dtype=np.int64)]
        return t.matmul(out, np.asarray(self.matrix, dtype=np.int64))

    def __call__(self, p: ProjPoint) -> ProjPoint:
        return apply(self, p)

    def compose(self, other: "Collineation") -> "Collineation":
        """self after other: (self.compose(other))(x) = self(other(x))."""
        if self.space != other.space:
            raise ValueError("collineations live in different spaces")
        t = self.space.t
        h = self.space.spec.h
        b = t.frob[self.frob][np.asarray(other.matrix, dtype=np.int64)]
        m = t.matmul(b, np.asarray(self.matrix, dtype=np.int64))
        return Collineation(self.space, tuple(tuple(int(v) for v in r) for r in m),
                            (self.frob + other.frob) % h)

    def inverse(self) -> "Collineation":
        t = self.space.t
        h = self.space.spec.h
        minv = mat_inverse(self.matrix, t)
        e = (-self.frob) % h
        m = t.frob[e][np.asarray(minv, dtype=np.int64)]
        return Collineation(self.space, tuple(tuple(int(v) for v in r) for r in m), e)

    def is_identity(self) -> bool:
        d = self.space.n + 1
        eye = tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))
        return self.frob == 0 and self.matrix == eye

    def key(self) -> tuple:
        return (self.matrix, self.frob)

    def to_json(self) -> dict:
        return {"matrix": [list(r) for r in self.matrix], "frob": self.frob}


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def span(points: Iterable[ProjPoint]) -> Subspace:
    """Smallest flat containing the given points; empty input gives the empty flat."""
    pts = list(points)
    if not pts:
        raise ValueError("span of nothing is ambiguous without an ambient; pass points")
    sp = pts[0].space
    for p in pts[1:]:
        if p.space != sp:
            raise ValueError("span: points from different ambient spaces")
    return Subspace(sp, tuple(p.coords for p in pts))


def span_in(sp: Space, points: Iterable[ProjPoint]) -> Subspace:
    pts = list(points)
    for p in pts:
        if p.space != sp:
            raise ValueError("span: points from different ambient spaces")
    return Subspace(sp, tuple(p.coords for p in pts))


def meet(s1: Subspace, s2: Subspace) -> Subspace:
    """Intersection flat of two flats."""
    if s1.space != s2.space:
        raise ValueError("meet: flats from different ambient spaces")
    sp = s1.space
    if not s1.rows or not s2.rows:
        return Subspace(sp, ())
    stacked = list(s1.rows) + list(s2.rows)
    rel = right_kernel([list(col) for col in zip(*stacked)], sp.t, len(stacked))
    t = sp.t
    rows = []
    r1 = len(s1.rows)
    for c in rel:
        vec = [0] * (sp.n + 1)
        for coef, row in zip(c[:r1], s1.rows):
            if coef:
                vec = [int(t.add[v, t.mul[coef, rv]]) for v, rv in zip(vec, row)]
        if any(vec):
            rows.append(vec)
    out = Subspace(sp, tuple(tuple(r) for r in rows))
    # projective dimension bound: dim(meet) >= dim(s1) + dim(s2) - n
    assert out.dim >= s1.dim + s2.dim - sp.n
    return out


def points_of_line(p: ProjPoint, q_: ProjPoint) -> list[ProjPoint]:
    """The q+1 points of the line through two distinct points, fixed order."""
    if p.space != q_.space:
        raise ValueError("points_of_line: different ambient spaces")
    if p == q_:
        raise ValueError("points_of_line needs two distinct points")
    sp = p.space
    t = sp.t
    a = np.asarray(p.coords, dtype=np.int64)
    b = np.asarray(q_.coords, dtype=np.int64)
    out = []
    for s in range(sp.q):
        vec = t.add[a, t.mul[s, b]]
        out.append(sp.point(vec.tolist()))
    out.append(q_)
    return out


def apply(g: Collineation, p: ProjPoint) -> ProjPoint:
    if g.space != p.space:
        raise ValueError("apply: spaces differ")
    row = g.apply_rows(np.asarray([p.coords], dtype=np.int64))[0]
    return p.space.point(row.tolist())


def hyperplane_functional(axis: Subspace) -> np.ndarray:
    """Coefficient vector v with axis = {x : x . v = 0}."""
    sp = axis.space
    if axis.dim != sp.n - 1:
        raise ValueError("axis must be a hyperplane")
    ker = right_kernel(axis.rows, sp.t, sp.n + 1)
    assert len(ker) == 1
    return np.asarray(ker[0], dtype=np.int64)


def _functional_value(t: FieldTables, x: Sequence[int], v: np.ndarray) -> int:
    acc = 0
    for xi, vi in zip(x, v):
        acc = int(t.add[acc, t.mul[xi, vi]])
    return acc


def elation(axis: Subspace, center: ProjPoint, a: ProjPoint, b: ProjPoint) -> Collineation:
    """The unique elation with the given axis and center mapping a to b."""
    sp = axis.space
    if center.space != sp or a.space != sp or b.space != sp:
        raise ValueError("elation: spaces differ")
    if axis.dim != sp.n - 1:
        raise ValueError("elation axis must be a hyperplane")
    if not axis.contains(center):
        raise ValueError("elation center must lie on the axis")
    if axis.contains(a) or axis.contains(b):
        raise ValueError("elation must move points off its axis")
    if a == b:
        return Collineation.identity(sp)
    if rank([list(a.coords), list(b.coords), list(center.coords)], sp.t) != 2:
        raise ValueError("a, b and the center must be collinear")
    t = sp.t
    phi = hyperplane_functional(axis)
    # solve b = alpha * a + beta * center
    sol = _solve_two(t, a.coords, center.coords, b.coords)
    alpha, beta = sol
    phi_a = _functional_value(t, a.coords, phi)
    assert phi_a != 0
    coef = int(t.mul[beta, t.inv[t.mul[alpha, phi_a]]])
    w = t.mul[coef, np.asarray(center.coords, dtype=np.int64)]
    d = sp.n + 1
    m = np.zeros((d, d), dtype=np.int64)
    for i in range(d):
        m[i, i] = 1
    m = t.add[m, t.mul[phi[:, None], w[None, :]]]
    g = Collineation(sp, tuple(tuple(int(v) for v in r) for r in m), 0)
    assert apply(g, a) == b
    return g


def _solve_two(t: FieldTables, u: Sequence[int], v: Sequence[int], target: Sequence[int]) -> tuple[int, int]:
    """Coefficients (alpha, beta) with alpha*u + beta*v = target, exact."""
    rows = [list(u), list(v), list(target)]
    cols = list(zip(*rows))
    # Gaussian elimination on the 2-unknown system via two independent columns
    for j1 in range(len(cols)):
        for j2 in range(j1 + 1, len(cols)):
            a11, a21, b1 = cols[j1]
            a12, a22, b2 = cols[j2]
            det = int(t.sub[t.mul[a11, a22], t.mul[a21, a12]])
            if det == 0:
                continue
            det_inv = t.inv[det]
            alpha = int(t.mul[det_inv, t.sub[t.mul[b1, a22], t.mul[b2, a21]]])
            beta = int(t.mul[det_inv, t.sub[t.mul[a11, b2], t.mul[a12, b1]]])
            # verify on all coordinates
            for (cu, cv, ct) in cols:
                lhs = int(t.add[t.mul[alpha, cu], t.mul[beta, cv]])
                if lhs != ct:
                    raise ValueError("target is not in the span of u and v")
            return alpha, beta
    raise ValueError("u and v are proportional")


@dataclass(frozen=True)
class PerspGroup:
    """Perspectivities with a fixed hyperplane axis: order and generators."""

    axis: Subspace
    order: int
    generators: tuple[Collineation, ...]


def persp_group(axis: Subspace) -> PerspGroup:
    """Persp(axis): all elations and homologies with the given hyperplane axis."""
    sp = axis.space
    if axis.dim != sp.n - 1:
        raise ValueError("axis must be a hyperplane")
    t = sp.t
    q = sp.q
    d = sp.n + 1
    phi = hyperplane_functional(axis)
    gens: list[Collineation] = []
    eye = np.zeros((d, d), dtype=np.int64)
    for i in range(d):
        eye[i, i] = 1
    # one elation per basis direction of the axis
    for row in axis.rows:
        w = np.asarray(row, dtype=np.int64)
        m = t.add[eye, t.mul[phi[:, None], w[None, :]]]
        gens.append(Collineation(sp, tuple(tuple(int(v) for v in r) for r in m), 0))
    # one homology: center anywhere off the axis, ratio a primitive element
    center = None
    for pid in range(sp.num_points):
        c = sp.coords[pid]
        if _functional_value(t, c, phi) != 0:
            center = np.asarray(c, dtype=np.int64)
            break
    mu = t.primitive_element()
    if q > 2:
        phi_c = _functional_value(t, center, phi)
        coef = int(t.mul[t.sub[mu, 1], t.inv[phi_c]])
        w = t.mul[coef, center]
        m = t.add[eye, t.mul[phi[:, None], w[None, :]]]
        gens.append(Collineation(sp, tuple(tuple(int(v) for v in r) for r in m), 0))
    order = q**sp.n * (q - 1)
    return PerspGroup(axis, order, tuple(gens))


def enumerate_group(generators: Sequence[Collineation], limit: int = 10**6) -> list[Collineation]:
    """Closure of the generators under composition (small groups only)."""
    if not generators:
        return []
    sp = generators[0].space
    seen = {Collineation.identity(sp).key(): Collineation.identity(sp)}
    frontier = list(seen.values())
    while frontier:
        nxt = []
        for g in frontier:
            for h in generators:
                c = h.compose(g)
                if c.key() not in seen:
                    if len(seen) >= limit:
                        raise RuntimeError("group enumeration limit exceeded")
                    seen[c.key()] = c
                    nxt.append(c)
        frontier = nxt
    return list(seen.values())


# ---------------------------------------------------------------------------
# brute-force setwise stabilizer oracle
# ---------------------------------------------------------------------------

@dataclass
class StabilizerReport:
    """Exact setwise stabilizer data from exhaustive enumeration."""

    order: int
    transitive: bool
    fixed_points: tuple[ProjPoint, ...]
    elements: list[Collineation] = dc_field(repr=False, default_factory=list)
    with_frobenius: bool = True
    candidates_scanned: int = 0


def _as_points(s) -> list[ProjPoint]:
    pts = list(getattr(s, "points", s))
    if not pts:
        raise ValueError("stabilizer oracle needs a nonempty point set")
    return pts


def _frame_matrix(t: FieldTables, rows: np.ndarray) -> np.ndarray | None:
    """Matrix sending the standard frame to the given (d+1)-tuple of points.

    rows has shape (d+1, d); returns the d x d matrix with scaled rows, or
    None when the tuple is not in general position.
    """
    d = rows.shape[1]
    a = rows[:d]
    target = rows[d]
    ainv = mat_inverse(a.tolist(), t)
    if ainv is None:
        return None
    lam = t.vecmat(target, np.asarray(ainv, dtype=np.int64))
    if np.any(lam == 0):
        return None
    return t.mul[lam[:, None], a]


def stabilizer_order_bruteforce(s, with_frobenius: bool = True,
                                budget: int = 10**8) -> StabilizerReport:
    """Exact order of the setwise stabilizer of S in PGL/PGammaL(n+1,q).

    Enumerates candidate collineations through their images of an anchor
    tuple chosen inside S (or inside the whole space when S does not span),
    so every candidate is checked, never sampled.
    """
    pts = _as_points(s)
    sp = pts[0].space
    t = sp.t
    d = sp.n + 1
    h = sp.spec.h if with_frobenius else 1
    q = sp.q
    coords = np.asarray([p.coords for p in pts], dtype=np.int64)
    point_ids = sp.ids_of_rows(coords)
    id_set = set(point_ids.tolist())
    k = len(pts)

    spans = rank(coords.tolist(), t) == d

    def images_in_s(matrix: np.ndarray, e: int) -> bool:
        img = t.frob[e][coords]
        img = t.matmul(img, matrix)
        for row in img:
            norm = sp.normalize_rows(row[None, :])[0]
            code = 0
            for j in range(d):
                code = code * q + int(norm[j])
            pid = sp._id_of.get(code)
            if pid is None or pid not in id_set:
                return False
        return True

    elements: dict[tuple, Collineation] = {}
    scanned = 0

    if spans:
        # look for an anchor frame (d+1 points in general position) inside S
        anchor = _find_frame(coords, t, d)
        if anchor is not None:
            n_cand = h
            for i in range(d + 1):
                n_cand *= (k - i)
            if n_cand > budget:
                raise OracleBudgetError(
                    f"oracle out of range: {n_cand} candidates exceed budget {budget}")
            src = coords[list(anchor)]
            for e in range(h):
                m_src = _frame_matrix(t, t.frob[e][src])
                src_inv = np.asarray(mat_inverse(m_src.tolist(), t), dtype=np.int64)
                for tup in itertools.permutations(range(k), d + 1):
                    scanned += 1
                    m_tgt = _frame_matrix(t, coords[list(tup)])
                    if m_tgt is None:
                        continue
                    g = t.matmul(src_inv, m_tgt)
                    if images_in_s(g, e):
                        c = Collineation(sp, tuple(tuple(int(v) for v in r) for r in g), e)
                        elements[c.key()] = c
        else:
            # S spans but holds no frame: anchor on a basis plus scale profiles
            base = _find_basis(coords, t, d)
            n_cand = h * (q - 1) ** (d - 1)
            for i in range(d):
                n_cand *= (k - i)
            if n_cand > budget:
                raise OracleBudgetError(
                    f"oracle out of range: {n_cand} candidates exceed budget {budget}")
            src = coords[list(base)]
            scales = list(itertools.product(range(1, q), repeat=d - 1))
            for e in range(h):
                src_e = t.frob[e][src]
                src_inv = np.asarray(mat_inverse(src_e.tolist(), t), dtype=np.int64)
                for tup in itertools.permutations(range(k), d):
                    tgt = coords[list(tup)]
                    if rank(tgt.tolist(), t) != d:
                        scanned += len(scales)
                        continue
                    for sc in scales:
                        scanned += 1
                        svec = np.asarray((1,) + sc, dtype=np.int64)
                        m_tgt = t.mul[svec[:, None], tgt]
                        g = t.matmul(src_inv, m_tgt)
                        if images_in_s(g, e):
                            c = Collineation(sp, tuple(tuple(int(v) for v in r) for r in g), e)
                            elements[c.key()] = c
    else:
        # S does not span: enumerate the full collineation group via frames
        # of the ambient space and filter
        n_cand = h
        for i in range(d + 1):
            n_cand *= (sp.num_points - i)
        if n_cand > budget:
            raise OracleBudgetError(
                f"oracle out of range: {n_cand} candidates exceed budget {budget}")
        all_rows = sp.coords
        anchor = _find_frame(all_rows, t, d)
        src = all_rows[list(anchor)]
        for e in range(h):
            m_src = _frame_matrix(t, t.frob[e][src])
            src_inv = np.asarray(mat_inverse(m_src.tolist(), t), dtype=np.int64)
            for tup in itertools.permutations(range(sp.num_points), d + 1):
                scanned += 1
                m_tgt = _frame_matrix(t, all_rows[list(tup)])
                if m_tgt is None:
                    continue
                g = t.matmul(src_inv, m_tgt)
                if images_in_s(g, e):
                    c = Collineation(sp, tuple(tuple(int(v) for v in r) for r in g), e)
                    elements[c.key()] = c

    elems = list(elements.values())

    # transitivity of the stabilizer on S
    orbit = {int(point_ids[0])}
    frontier = [int(point_ids[0])]
    while frontier:
        nxt = []
        for pid in frontier:
            row = sp.coords[pid][None, :]
            for g in elems:
                img = g.apply_rows(row)
                iid = int(sp.ids_of_rows(img)[0])
                if iid not in orbit:
                    orbit.add(iid)
                    nxt.append(iid)
        frontier = nxt
    transitive = orbit == id_set

    # ambient points fixed by the whole stabilizer
    cand = np.arange(sp.num_points)
    for g in elems:
        if len(cand) == 0:
            break
        img_ids = sp.ids_of_rows(g.apply_rows(sp.coords[cand]))
        cand = cand[img_ids == cand]
    fixed = tuple(sp.point_by_id(int(i)) for i in cand)

    return StabilizerReport(order=len(elems), transitive=transitive,
                            fixed_points=fixed, elements=elems,
                            with_frobenius=with_frobenius,
                            candidates_scanned=scanned)


def _find_frame(coords: np.ndarray, t: FieldTables, d: int) -> tuple[int, ...] | None:
    """Indices of d+1 rows in general position, or None."""
    base = _find_basis(coords, t, d)
    if base is None:
        return None
    for j in range(len(coords)):
        if j in base:
            continue
        tup = base + (j,)
        if _frame_matrix(t, coords[list(tup)]) is not None:
            return tup
    return None


def _find_basis(coords: np.ndarray, t: FieldTables, d: int) -> tuple[int, ...] | None:
    """Indices of d linearly independent rows, greedy, or None."""
    picked: list[int] = []
    for j in range(len(coords)):
        trial = picked + [j]
        if rank(coords[trial].tolist(), t) == len(trial):
            picked.append(j)
            if len(picked) == d:
                return tuple(picked)
    return None
