"""Point-set predicates: span dimension, arc/cap tests, tangency, closure.

The closure follows the two-step recursion: collect the flats spanned by
subsets of the current set, adjoin every point that is the exact intersection
of two such flats, repeat to the fixpoint.  For ambients of projective
dimension <= 3 the flats are handled through incidence tables (fast); higher
dimensions fall back to an explicit flat worklist.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import pg
from .pg import ProjPoint, Space
from .pointsets import PointSet, arc_violation


def span_dimension(s: PointSet) -> int:
    """Projective dimension of the span of the set."""
    if not s.points:
        raise ValueError("span_dimension needs a nonempty set")
    return pg.rank(s.coords_array().tolist(), s.space.t) - 1


def is_arc(s: PointSet) -> tuple[bool, tuple[ProjPoint, ...] | None]:
    """True when no n+1 points lie in a hyperplane; else a violating subset."""
    viol = arc_violation(s.points)
    return (viol is None), viol


def is_cap(s: PointSet) -> bool:
    """True when no 3 points of the set are collinear."""
    pts = list(s.points)
    sp = s.space
    ids = {p.id for p in pts}
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            line = pg.points_of_line(pts[i], pts[j])
            hits = sum(1 for p in line if p.id in ids)
            if hits >= 3:
                return False
    return True


# ---------------------------------------------------------------------------
# tangent lines
# ---------------------------------------------------------------------------

@dataclass
class TangentReport:
    """Which ambient points lie on at least one tangent line to the set."""

    uncovered: tuple[ProjPoint, ...]
    checked: int
    include_s_points: bool


def tangent_coverage(s: PointSet, include_s_points: bool = True) -> TangentReport:
    """For each ambient point, whether some line through it meets S exactly once."""
    sp = s.space
    t = sp.t
    q, n = sp.q, sp.n
    coords = s.coords_array()
    s_ids = set(int(i) for i in sp.ids_of_rows(coords))
    lines_per_point = (q**n - 1) // (q - 1)
    uncovered = []
    checked = 0
    for rid in range(sp.num_points):
        in_s = rid in s_ids
        if in_s and not include_s_points:
            continue
        checked += 1
        r = sp.coords[rid]
        lead = int(np.argmax(r != 0))
        # key of the line through r and p: the unique line point with
        # coordinate 0 at r's leading position
        others = coords[[i for i, p in enumerate(s.points) if p.id != rid]]
        if len(others) == 0:
            continue  # S = {r}: every line through r is tangent
        factor = t.mul[others[:, lead], t.inv[r[lead]]]
        reduced = t.sub[others, t.mul[factor[:, None], r[None, :]]]
        keys = sp.ids_of_rows(reduced)
        if in_s:
            covered = len(set(keys.tolist())) < lines_per_point
        else:
            _, counts = np.unique(keys, return_counts=True)
            covered = bool((counts == 1).any())
        if not covered:
            uncovered.append(sp.point_by_id(rid))
    return TangentReport(tuple(uncovered), checked, include_s_points)


# ---------------------------------------------------------------------------
# closure
# ---------------------------------------------------------------------------

# lazy per-space incidence caches
_line_tables: dict = {}
_plane_tables: dict = {}


def _line_table(sp: Space):
    """(line_of, line_points): pair -> line id and line id -> point ids."""
    got = _line_tables.get(sp)
    if got is not None:
        return got
    n_pts = sp.num_points
    line_of = np.full((n_pts, n_pts), -1, dtype=np.int32)
    line_points: list[np.ndarray] = []
    for i in range(n_pts):
        row = line_of[i]
        for j in range(i + 1, n_pts):
            if row[j] != -1:
                continue
            ids = np.asarray(sp.line_ids(i, j), dtype=np.int64)
            lid = len(line_points)
            line_points.append(ids)
            line_of[np.ix_(ids, ids)] = lid
    np.fill_diagonal(line_of, -1)
    _line_tables[sp] = (line_of, line_points)
    return line_of, line_points


def _plane_table(sp: Space) -> np.ndarray:
    """Boolean incidence points x dual-points for PG(3,q)."""
    got = _plane_tables.get(sp)
    if got is not None:
        return got
    t = sp.t
    coords = sp.coords
    acc = np.zeros((sp.num_points, sp.num_points), dtype=np.int64)
    for k in range(sp.n + 1):
        acc = t.add[acc, t.mul[coords[:, k][:, None], coords[:, k][None, :]]]
    inc = acc == 0
    _plane_tables[sp] = inc
    return inc


def closure(s: PointSet) -> PointSet:
    """Fixpoint of adjoining 0-dimensional meets of spans of subsets.

    Extensive by construction, monotone and idempotent.
    """
    sp = s.space
    if sp.n <= 3:
        ids = _closure_low_dim(s)
    else:
        ids = _closure_generic(s)
    pts = tuple(sp.point_by_id(int(i)) for i in sorted(ids))
    return PointSet("custom", sp, pts,
                    meta={"closure_of": s.family, "closure_size": len(pts),
                          "closure_equals_ambient": len(pts) == sp.num_points})


def _closure_low_dim(s: PointSet) -> set[int]:
    sp = s.space
    n_pts = sp.num_points
    cur = np.zeros(n_pts, dtype=bool)
    for p in s.points:
        cur[p.id] = True
    if sp.n == 1 or len(s.points) < 2:
        return set(np.nonzero(cur)[0].tolist())
    line_of, line_points = _line_table(sp)
    plane_inc = _plane_table(sp) if sp.n == 3 else None

    while True:
        if cur.all():
            break
        cur_ids = np.nonzero(cur)[0]
        sub = line_of[np.ix_(cur_ids, cur_ids)]
        a_lines = np.unique(sub[sub >= 0])
        cnt = np.zeros(n_pts, dtype=np.int64)
        which = np.full(n_pts, -1, dtype=np.int64)
        for lid in a_lines.tolist():
            ids = line_points[lid]
            cnt[ids] += 1
            which[ids] = lid
        new = cur | (cnt >= 2)
        if sp.n == 3 and not new.all():
            a_plane_mask = _a_planes(sp, cur, cur_ids, line_of, plane_inc)
            if a_plane_mask.any():
                for x in np.nonzero((cnt == 1) & ~new)[0].tolist():
                    lid = int(which[x])
                    a, b = int(line_points[lid][0]), int(line_points[lid][1])
                    hit = a_plane_mask & plane_inc[x] & ~(plane_inc[a] & plane_inc[b])
                    if hit.any():
                        new[x] = True
        if (new == cur).all():
            break
        cur = new
    return set(np.nonzero(cur)[0].tolist())


def _a_planes(sp: Space, cur: np.ndarray, cur_ids: np.ndarray,
              line_of: np.ndarray, plane_inc: np.ndarray) -> np.ndarray:
    """Planes spanned by a subset of the current set (PG(3,q) only)."""
    mask = np.zeros(sp.num_points, dtype=bool)
    trace_counts = plane_inc[cur_ids, :].sum(axis=0)
    for pl in np.nonzero(trace_counts >= 3)[0].tolist():
        trace = cur_ids[plane_inc[cur_ids, pl]]
        l0 = int(line_of[trace[0], trace[1]])
        if any(int(line_of[trace[0], x]) != l0 for x in trace[2:].tolist()):
            mask[pl] = True
    return mask


def _closure_generic(s: PointSet) -> set[int]:
    """Explicit flat worklist for ambient dimension >= 4 (small sets only)."""
    sp = s.space
    n = sp.n
    cur: set[int] = {p.id for p in s.points}
    line_cache: dict[tuple[int, int], int] = {}

    def line_mask(i: int, j: int) -> int:
        key = (i, j) if i < j else (j, i)
        got = line_cache.get(key)
        if got is None:
            got = 0
            for pid in sp.line_ids(*key):
                got |= 1 << pid
            line_cache[key] = got
        return got

    while True:
        # flats spanned by subsets of cur, as point masks keyed by dimension
        flats: dict[int, int] = {}
        queue: list[tuple[int, int]] = []
        for pid in cur:
            m = 1 << pid
            flats[m] = 0
            queue.append((m, 0))
        while queue:
            fmask, fdim = queue.pop()
            if fdim >= n:
                continue
            for pid in cur:
                if fmask >> pid & 1:
                    continue
                cone = 0
                m = fmask
                while m:
                    low = m & -m
                    cone |= line_mask(pid, low.bit_length() - 1)
                    m ^= low
                if cone not in flats:
                    flats[cone] = fdim + 1
                    queue.append((cone, fdim + 1))
                if len(flats) > 200_000:
                    raise RuntimeError("closure flat population too large for the generic path")
        new = set(cur)
        items = [(m, d) for m, d in flats.items() if d >= 1]
        for i in range(len(items)):
            m1, d1 = items[i]
            for j in range(i + 1, len(items)):
                m2, d2 = items[j]
                if d1 + d2 > n:
                    continue
                inter = m1 & m2
                if inter and inter.bit_count() == 1:
                    new.add(inter.bit_length() - 1)
        if new == cur:
            return cur
        cur = new
