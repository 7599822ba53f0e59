"""Acceptance suite: one test (or parametrized group) per criterion, each
printing a PASS/FAIL line.  Expected values are pinned here, never computed
from the code path under test: closed-form counts, the stabilizer oracle, or
literal brute-force enumeration provide the other route.
"""

import math

import numpy as np
import pytest

from semisym import gf, graphalg as ga
from semisym import linrep, pg, pointsets, setanalysis


# ---------------------------------------------------------------------------
# shared builds (expensive graphs cached per session)
# ---------------------------------------------------------------------------

_cache: dict = {}


def gamma_nrc(n, q):
    key = ("nrc", n, q)
    if key not in _cache:
        _cache[key] = linrep.build_gamma(pointsets.nrc_minus_point(n, q))
    return _cache[key]


def gamma_family(family, **kw):
    key = (family, tuple(sorted(kw.items())))
    if key not in _cache:
        if family == "cone":
            ps = pointsets.cone_set(kw["n"], kw["q0"], kw["h"], kw.get("base"))
        elif family in ("basis", "frame"):
            ps = pointsets.basis_or_frame(family, kw["n"], kw["q"])
        elif family == "casse_glynn":
            ps = pointsets.casse_glynn(kw["q"], kw["e"])
        elif family in ("elliptic", "hyperbolic"):
            ps = pointsets.baer_set(family, kw["q"])
        else:
            raise ValueError(family)
        _cache[key] = linrep.build_gamma(ps)
    return _cache[key]


def aut_of(g):
    key = ("aut", id(g))
    if key not in _cache:
        _cache[key] = ga.automorphisms(g)
    return _cache[key]


def report(name, ok, detail=""):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))


# ---------------------------------------------------------------------------
# 1. order / regularity
# ---------------------------------------------------------------------------

def test_criterion_1_order_regularity():
    g = gamma_nrc(2, 5)
    ok1 = g.num_vertices == 250 and g.n_points == 125 and g.regular_degree() == 5
    h = gamma_family("basis", n=3, q=4)
    ok2 = h.num_vertices == 512 and h.regular_degree() == 4
    report("criterion 1 (order/regularity)", ok1 and ok2,
           f"gamma(2,5): {g.num_vertices} vertices {g.regular_degree()}-regular; "
           f"basis(3,4): {h.num_vertices} vertices {h.regular_degree()}-regular")
    assert ok1 and ok2


# ---------------------------------------------------------------------------
# 2. girth / cycles
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n,q", [(2, 5), (2, 7), (3, 7), (3, 8)])
def test_criterion_2_girth_and_cycles(n, q):
    g = gamma_nrc(n, q)
    cc = ga.cycle_census(g)
    gir = ga.girth(g)
    base_ok = cc.c4 == 0 and cc.c6 == 0 and gir == 8
    c10_present = cc.c10 > 0
    expected_c10 = (n == 2)
    ok = base_ok and (c10_present == expected_c10)
    report(f"criterion 2 (girth/cycles) ({n},{q})", ok,
           f"c4={cc.c4} c6={cc.c6} girth={gir} c10={cc.c10} "
           f"(criterion expects C10 present iff n=2; the n=3 graphs do "
           f"contain 10-cycles, see the verified witness test)")
    assert base_ok
    assert c10_present == expected_c10  # faithfully as stated; red for n = 3


def test_c10_witness_for_n3_is_genuine():
    # independent verification that the n=3 failure above is mathematics, not
    # an engine artifact: an explicit 10-cycle, checked edge by edge
    g = gamma_nrc(3, 7)
    n = g.num_vertices
    indptr, nbr = g.adjacency()
    adj = [set(nbr[indptr[v]: indptr[v + 1]].tolist()) for v in range(n)]
    found = None

    def dfs(v, depth, path):
        nonlocal found
        if found:
            return
        if depth == 9:
            if 0 in adj[v]:
                found = list(path)
            return
        for u in adj[v]:
            if u not in path and u != 0:
                path.append(u)
                dfs(u, depth + 1, path)
                path.pop()
                if found:
                    return

    dfs(0, 0, [0])
    assert found is not None
    assert len(set(found)) == 10
    for i in range(10):
        assert found[(i + 1) % 10] in adj[found[i]]


# ---------------------------------------------------------------------------
# 3. connectivity
# ---------------------------------------------------------------------------

def test_criterion_3_connectivity():
    g = gamma_nrc(2, 4)
    ok_conn = ga.is_connected(g)
    # K spanning a line (t = 1) in PG(2,4)
    sp = pg.space(2, 4)
    k = pointsets.custom_pointset(sp, [[1, 0, 0], [0, 1, 0], [1, 1, 0]])
    h = linrep.build_gamma(k)
    comps = ga.connected_components(h)
    ok_count = len(comps) == 4  # q^(n-t)
    sp1 = pg.space(1, 4)
    k1 = pointsets.custom_pointset(sp1, [[1, 0], [0, 1], [1, 1]])
    target = ga.canonical_form(linrep.build_gamma(k1))
    ok_iso = all(ga.canonical_form(h.induced_subgraph(c)) == target for c in comps)
    report("criterion 3 (connectivity)", ok_conn and ok_count and ok_iso,
           f"spanning connected={ok_conn}; line-K components={len(comps)}, "
           f"each isomorphic to the rank-1 graph: {ok_iso}")
    assert ok_conn and ok_count and ok_iso


# ---------------------------------------------------------------------------
# 4. automorphism order, NRC family
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n,q,h,expected", [
    (2, 5, 1, 10000),
    (2, 7, 1, 86436),
    (3, 7, 1, 605052),
    (2, 9, 2, 839808),
])
def test_criterion_4_nrc_aut_orders(n, q, h, expected):
    assert expected == h * q ** (n + 2) * (q - 1) ** 2
    rep = aut_of(gamma_nrc(n, q))
    ok = rep.group_order == expected and rep.part_swap is None
    report(f"criterion 4 (aut order) nrc({n},{q})", ok,
           f"engine={rep.group_order} formula={expected}")
    assert rep.group_order == expected


# ---------------------------------------------------------------------------
# 5. GAP-remark indices for the basis family
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n,q,index", [(2, 3, 1), (3, 4, 8)])
def test_criterion_5_basis_indices(n, q, index):
    g = gamma_family("basis", n=n, q=q)
    rep = aut_of(g)
    geo = ga.geometric_order("basis", n, q)  # |Persp| x oracle stabilizer
    ok = rep.group_order == index * geo.value
    report(f"criterion 5 (GAP index) basis({n},{q})", ok,
           f"engine={rep.group_order} geometric={geo.value} index="
           f"{rep.group_order // geo.value if rep.group_order % geo.value == 0 else 'non-integer'}")
    assert rep.group_order % geo.value == 0
    assert rep.group_order // geo.value == index


@pytest.mark.slow
def test_criterion_5_basis_45_index_7776():
    g = gamma_family("basis", n=4, q=5)
    rep = aut_of(g)
    geo = ga.geometric_order("basis", 4, 5)
    assert geo.value == 5**5 * 4 * 30720  # |Persp| x oracle = 384,000,000
    ok = rep.group_order == 7776 * geo.value
    report("criterion 5 (GAP index) basis(4,5)", ok,
           f"engine={rep.group_order} geometric={geo.value} "
           f"index={rep.group_order // geo.value}")
    assert rep.group_order == 7776 * geo.value == 2985984000000


# ---------------------------------------------------------------------------
# 6. semisymmetry verdicts
# ---------------------------------------------------------------------------

def _semisym_verdict(g):
    rep = aut_of(g)
    regular = g.regular_degree() is not None
    return rep, regular and rep.edge_transitive and not rep.vertex_transitive


@pytest.mark.parametrize("label,builder", [
    ("nrc(2,5)", lambda: gamma_nrc(2, 5)),
    ("nrc(3,7)", lambda: gamma_nrc(3, 7)),
    ("basis(2,3)", lambda: gamma_family("basis", n=2, q=3)),
    ("basis(3,4)", lambda: gamma_family("basis", n=3, q=4)),
    ("frame(3,5)", lambda: gamma_family("frame", n=3, q=5)),
])
def test_criterion_6_semisymmetric_core(label, builder):
    rep, verdict = _semisym_verdict(builder())
    report(f"criterion 6 (semisymmetric) {label}", verdict,
           f"et={rep.edge_transitive} vt={rep.vertex_transitive}")
    assert verdict


@pytest.mark.slow
def test_criterion_6_semisymmetric_casse_glynn_38():
    rep, verdict = _semisym_verdict(gamma_family("casse_glynn", q=8, e=2))
    report("criterion 6 (semisymmetric) casse_glynn(3,8,sigma=4)", verdict,
           f"order={rep.group_order} et={rep.edge_transitive} vt={rep.vertex_transitive}")
    assert verdict


@pytest.mark.slow
def test_criterion_6_semisymmetric_cone():
    # Faithful to the criterion as stated.  No 4-point Fano base yields a
    # semisymmetric cone: the line-complement base gives a vertex-transitive
    # graph, the line-plus-point base an edge-intransitive one, and those are
    # the only two base types.  Expected to fail; see the decisions ledger.
    rep, verdict = _semisym_verdict(gamma_family("cone", n=3, q0=2, h=3))
    report("criterion 6 (semisymmetric) cone(3,q0=2,h=3)", verdict,
           f"default base: et={rep.edge_transitive} vt={rep.vertex_transitive} "
           f"(vertex-transitive, hence not semisymmetric; the alternative "
           f"tangency base is edge-intransitive)")
    assert verdict


@pytest.mark.slow
@pytest.mark.parametrize("kind", ["elliptic", "hyperbolic"])
def test_criterion_6_semisymmetric_baer_stretch(kind):
    rep, verdict = _semisym_verdict(gamma_family(kind, q=9))
    geo = ga.geometric_order(f"{kind}_baer", 3, 9)
    report(f"criterion 6 (semisymmetric, stretch) {kind}_baer(q=9)", verdict,
           f"order={rep.group_order} geometric={geo.value} "
           f"et={rep.edge_transitive} vt={rep.vertex_transitive}")
    assert verdict
    assert rep.group_order >= geo.value


# ---------------------------------------------------------------------------
# 7. isomorphism theorems
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n,q", [(2, 3), (2, 4), (2, 5), (3, 3), (3, 4)])
def test_criterion_7_lambda_isomorphic_to_gamma(n, q):
    lam = linrep.build_lambda(n, q)
    gam = linrep.build_gamma(pointsets.power_rows(n, q))
    ok = ga.canonical_form(lam) == ga.canonical_form(gam)
    report(f"criterion 7 (lambda iso) ({n},{q})", ok)
    assert ok


@pytest.mark.parametrize("n,p", [(2, 5), (2, 7)])
def test_criterion_7_dwz_isomorphic_to_nrc(n, p):
    g1 = linrep.build_gamma(linrep.dwz_pointset(n, p))
    ok = ga.canonical_form(g1) == ga.canonical_form(gamma_nrc(n, p))
    report(f"criterion 7 (dwz iso) ({n},{p})", ok)
    assert ok


# ---------------------------------------------------------------------------
# 8. distance-4 saturation statistic on the cone graph
# ---------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_8_cone_d4_statistic():
    # the tangency-satisfying base: the lemma's hypothesis holds, so every
    # point vertex must give exactly q-1 = 7 and every line vertex more
    g = gamma_family("cone", n=3, q0=2, h=3, base="line_plus_point")
    prof_points = ga.saturated_d4_profile(g, range(g.n_points))
    prof_lines = ga.saturated_d4_profile(g, range(g.n_points, g.num_vertices))
    ok = bool((prof_points == 7).all() and (prof_lines > 7).all())
    report("criterion 8 (distance-4 statistic, cone q=8)", ok,
           f"point vertices: {sorted(set(prof_points.tolist()))}, "
           f"line vertices min: {int(prof_lines.min())}")
    assert (prof_points == 7).all()
    assert (prof_lines > 7).all()


# ---------------------------------------------------------------------------
# 9. closure suite
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n,q", [(2, 5), (2, 7), (3, 7), (3, 8)])
def test_criterion_9_closure_full_space(n, q):
    out = setanalysis.closure(pointsets.nrc_minus_point(n, q))
    ok = out.meta["closure_equals_ambient"]
    report(f"criterion 9 (closure full) nrc({n},{q})", ok,
           f"size={len(out.points)}")
    assert ok


def test_criterion_9_closure_elliptic_baer_subgeometry():
    out = setanalysis.closure(pointsets.baer_set("elliptic", 9))
    ok = len(out.points) == 40 and not out.meta["closure_equals_ambient"]
    report("criterion 9 (closure) elliptic_baer(9)", ok, f"size={len(out.points)}")
    assert ok


@pytest.mark.parametrize("n,q", [(3, 7), (3, 8)])
def test_criterion_9_chord_closure_lower_bound(n, q):
    ps = pointsets.nrc_minus_point(n, q)
    closure_ids = {p.id for p in setanalysis.closure(ps).points}
    pts = list(ps.points)
    worst = None
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            extra = sum(1 for p in pg.points_of_line(pts[i], pts[j])
                        if p.id in closure_ids) - 2
            worst = extra if worst is None else min(worst, extra)
    ok = worst >= q / 2
    report(f"criterion 9 (chord bound) nrc({n},{q})", ok,
           f"min extra closure points on a chord: {worst} >= {q / 2}")
    assert ok


# ---------------------------------------------------------------------------
# 10. dual-arc duality
# ---------------------------------------------------------------------------

def test_criterion_10_dual_arc():
    ps = pointsets.casse_glynn(8, 2)  # sigma = 4
    dual = pointsets.dual_arc(ps)
    ok_arc = pointsets.arc_violation(dual.points) is None and len(dual.points) == 8
    r1 = pg.stabilizer_order_bruteforce(ps)
    r2 = pg.stabilizer_order_bruteforce(dual)
    # |AGammaL(1,8)| = 8 * 7 * 3
    ok_orders = r1.order == r2.order == 168
    report("criterion 10 (dual arc)", ok_arc and ok_orders,
           f"dual is an 8-arc: {ok_arc}; stabilizer orders {r1.order} == {r2.order}")
    assert ok_arc and ok_orders


# ---------------------------------------------------------------------------
# 11. basis/frame formula adjudication
# ---------------------------------------------------------------------------

def test_criterion_11_formula_adjudication():
    basis = ga.geometric_order("basis", 2, 3)
    frame = ga.geometric_order("frame", 3, 5)
    # oracle stabilizer orders decide the conflicting printed formulas
    ok_frame = frame.matching == ("sym_q_formula",) and frame.value == 300000
    ok_basis = basis.matching == () and basis.value == 1296
    # corrected basis count: |Persp| * q!(q-1)^n = h q^(n+1) (q-1)^(n+1) q!
    corrected = 1 * 3**3 * 2**3 * math.factorial(3)
    ok_corrected = corrected == basis.value
    report("criterion 11 (formula adjudication)", ok_frame and ok_basis and ok_corrected,
           f"frame(3,5) matches {frame.matching}; basis(2,3) matches none of the "
           f"printed formulas (oracle {basis.value} vs candidates {basis.candidates}); "
           f"corrected basis formula h*q^(n+1)*(q-1)^(n+1)*q! = {corrected}")
    assert ok_frame and ok_basis and ok_corrected
