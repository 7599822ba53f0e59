import numpy as np
import pytest

from semisym import gf, graphalg, linrep, pg, pointsets


# ---------- gamma construction ------------------------------------------------

def test_gamma_25_counts_and_degrees():
    g = linrep.build_gamma(pointsets.nrc_minus_point(2, 5))
    assert g.num_vertices == 250
    assert g.n_points == 125 and g.n_lines == 125
    assert g.regular_degree() == 5
    assert g.num_edges == 5**4
    assert g.is_bipartite_parts()


def test_gamma_degree_contract_general():
    # |K| = 3 in PG(2,4): line vertices degree q, point vertices degree |K|
    sp = pg.space(2, 4)
    k = pointsets.custom_pointset(sp, [[1, 0, 0], [0, 1, 0], [1, 1, 0]])
    g = linrep.build_gamma(k)
    assert g.n_points == 64 and g.n_lines == 3 * 16
    deg = g.degrees()
    assert (deg[:64] == 3).all()
    assert (deg[64:] == 4).all()


def test_gamma_single_point_k_is_star_union():
    sp = pg.space(2, 3)
    k = pointsets.custom_pointset(sp, [[1, 0, 0]])
    g = linrep.build_gamma(k)
    deg = g.degrees()
    assert (deg[:27] == 1).all()
    assert (deg[27:] == 3).all()
    comps = graphalg.connected_components(g)
    assert len(comps) == 9  # q^n stars


def test_gamma_empty_k_rejected():
    sp = pg.space(2, 3)
    with pytest.raises(ValueError):
        linrep.build_gamma(pointsets.PointSet("custom", sp, ()))


def test_gamma_connectivity_iff_spanning():
    # spanning K -> connected; K on a line -> q^(n-t) components
    for n, q in [(2, 3), (2, 4), (2, 5), (3, 4)]:
        sp = pg.space(n, q)
        spanning = pointsets.nrc_minus_point(n, q) if n <= q - 1 else None
        if spanning is not None:
            g = linrep.build_gamma(spanning)
            assert graphalg.is_connected(g)
        line_k = pointsets.custom_pointset(
            sp, [[1, 0] + [0] * (n - 1), [0, 1] + [0] * (n - 1), [1, 1] + [0] * (n - 1)])
        g = linrep.build_gamma(line_k)
        comps = graphalg.connected_components(g)
        assert len(comps) == q ** (n - 1)


def test_gamma_components_isomorphic_to_low_dim_gamma():
    # (n,q,t) = (2,4,1): each component is the rank-1 graph of 3 points of PG(1,4)
    sp = pg.space(2, 4)
    k3 = pointsets.custom_pointset(sp, [[1, 0, 0], [0, 1, 0], [1, 1, 0]])
    g = linrep.build_gamma(k3)
    comps = graphalg.connected_components(g)
    assert len(comps) == 4
    sp1 = pg.space(1, 4)
    k1 = pointsets.custom_pointset(sp1, [[1, 0], [0, 1], [1, 1]])
    target = graphalg.canonical_form(linrep.build_gamma(k1))
    for comp in comps:
        sub = g.induced_subgraph(comp)
        assert graphalg.canonical_form(sub) == target


# ---------- lambda graphs -------------------------------------------------------

def test_lambda_23_counts():
    g = linrep.build_lambda(2, 3)
    assert g.num_vertices == 54
    assert g.regular_degree() == 3


def test_lambda_zero_point_neighbors():
    # (p) = 0 is adjacent exactly to [l] = (l1, 0, ..., 0)
    q = 5
    g = linrep.build_lambda(2, q)
    n_side = q**3
    zero_nbrs = set()
    for u, v in g.edges.tolist():
        if u == 0:
            zero_nbrs.add(v - n_side)
        elif v == 0:
            zero_nbrs.add(u - n_side)
    expected = {l1 * q * q for l1 in range(q)}
    assert zero_nbrs == expected


@pytest.mark.parametrize("n,q", [(2, 3), (2, 4), (1, 5)])
def test_lambda_isomorphic_to_gamma_small(n, q):
    lam = linrep.build_lambda(n, q)
    if n == 1:
        sp = pg.space(1, q)
        k = pointsets.custom_pointset(
            sp, [[1, t] for t in range(q)], family="custom")
        gam = linrep.build_gamma(k)
    else:
        gam = linrep.build_gamma(pointsets.nrc_minus_point(n, q))
    assert graphalg.canonical_form(lam) == graphalg.canonical_form(gam)


@pytest.mark.parametrize("n,q", [(2, 3), (2, 4), (2, 5), (3, 3), (3, 4)])
def test_lambda_explicit_isomorphism(n, q):
    lam, gam, vmap = linrep.lambda_to_gamma_map(n, q)
    assert sorted(vmap.tolist()) == list(range(lam.num_vertices))  # bijection
    mapped = np.sort(np.sort(vmap[lam.edges], axis=1), axis=0)
    target = np.sort(np.sort(gam.edges, axis=1), axis=0)
    idx = np.lexsort((mapped[:, 1], mapped[:, 0]))
    idx2 = np.lexsort((target[:, 1], target[:, 0]))
    assert (mapped[idx] == target[idx2]).all()


# ---------- Du-Wang-Zhang orbit -------------------------------------------------

def test_dwz_orbit_25():
    ps = linrep.dwz_pointset(2, 5)
    assert len(ps.points) == 5
    sp = ps.space
    # with (0,0,1) adjoined the orbit is a 6-arc (a conic)
    extra = sp.point([0, 0, 1])
    assert pointsets.arc_violation(list(ps.points) + [extra]) is None


def test_dwz_requires_prime():
    with pytest.raises(ValueError):
        linrep.dwz_pointset(2, 4)
    with pytest.raises(ValueError):
        linrep.dwz_pointset(5, 5)


@pytest.mark.parametrize("n,p", [(2, 5), (2, 7)])
def test_dwz_graph_isomorphic_to_nrc_graph(n, p):
    g1 = linrep.build_gamma(linrep.dwz_pointset(n, p))
    g2 = linrep.build_gamma(pointsets.nrc_minus_point(n, p))
    assert graphalg.canonical_form(g1) == graphalg.canonical_form(g2)


# ---------- edge-map witness ----------------------------------------------------

def test_edge_map_witness_identity():
    g = linrep.build_gamma(pointsets.nrc_minus_point(2, 5))
    e = tuple(g.edges[0])
    w = linrep.edge_map_witness(g, e, e)
    sp = pg.space(3, 5)
    # maps the edge to itself
    pt_of, _ = linrep.gamma_vertex_geometry(g)
    big = sp.point([1] + pt_of(e[0]))
    assert pg.apply(w, big) == big


def test_edge_map_witness_random_pairs():
    import random
    rng = random.Random(5)
    g = linrep.build_gamma(pointsets.nrc_minus_point(2, 5))
    point_of, line_of = linrep.gamma_vertex_geometry(g)
    k_set = g.meta["pointset"]
    sp = pg.space(3, 5)
    edges = g.edges.tolist()
    for _ in range(5):
        e1 = tuple(rng.choice(edges))
        e2 = tuple(rng.choice(edges))
        w = linrep.edge_map_witness(g, e1, e2)
        # witness sends R1 to R2 and the K-direction of L1 to that of L2
        r1 = sp.point([1] + point_of(e1[0]))
        r2 = sp.point([1] + point_of(e2[0]))
        assert pg.apply(w, r1) == r2
        i1, _ = line_of(e1[1])
        i2, _ = line_of(e2[1])
        d1 = sp.point([0] + list(k_set.points[i1].coords))
        d2 = sp.point([0] + list(k_set.points[i2].coords))
        assert pg.apply(w, d1) == d2
        # fixes the hyperplane at infinity setwise and stabilizes K
        imgs = set()
        for kp in k_set.points:
            img = pg.apply(w, sp.point([0] + list(kp.coords)))
            assert img.coords[0] == 0
            imgs.add(img)
        assert imgs == {sp.point([0] + list(kp.coords)) for kp in k_set.points}


def test_edge_map_witness_rejects_non_incident():
    g = linrep.build_gamma(pointsets.nrc_minus_point(2, 5))
    e1 = tuple(g.edges[0])
    bad = (e1[0], int(g.edges[-1][1]))
    if linrep._line_vertex_of_point(g, linrep.gamma_vertex_geometry(g)[0](bad[0]),
                                    linrep.gamma_vertex_geometry(g)[1](bad[1])[0]) == bad[1]:
        pytest.skip("accidentally incident")
    with pytest.raises(ValueError):
        linrep.edge_map_witness(g, e1, bad)
