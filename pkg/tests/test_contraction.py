import math

import pytest

from catqm import words as W
from catqm.contraction import (
    CERTIFIED,
    REFUTED,
    CertBudget,
    ConstantLedger,
    certify_contracting,
    check_dichotomy,
    check_reverse_triangle,
    check_stability,
    check_thin_triangle,
    check_variation,
    contraction_scale,
    phi_projection_transfer,
    phi_subsegment,
    phi_table,
    phi_thin_triangle,
    projection_diameter_under_ball,
)
from catqm.errors import InputError
from catqm.samplers import (
    halfplane_thin_configs,
    halfplane_variation_configs,
    tree_dichotomy_configs,
    tree_triples_exhaustive,
    tree_variation_configs,
)
from catqm.spaces import EuclideanSpace, HalfPlaneSpace, TreeSpace, vertex

TREE = TreeSpace(2)
HP = HalfPlaneSpace()
EU = EuclideanSpace(2)

LEDGER = phi_table(1.0, 1.0)


# ---------------------------------------------------------------------------
# ledger
# ---------------------------------------------------------------------------

def test_ledger_pinned_values():
    assert phi_subsegment(1.0, 1.0) == 8.0
    assert phi_thin_triangle(1.0, 1.0) == 5.0
    assert phi_projection_transfer(1.0, 1.0, 2.0) == 9.0


def test_ledger_structure():
    led = phi_table(1.0, 1.0)
    assert led.B_prime == led.B + 4 * led.C + 3
    assert led.T == pytest.approx(
        5 * phi_subsegment(led.S_prime, led.C) + 2 * led.C + 1 + led.D)
    table = led.table()
    assert table["thin_triangle"] == 5.0
    assert table["D"] == led.D and table["S"] == led.S


def test_ledger_monotone_in_each_argument():
    grid = [0.5, 1.0, 2.0, 4.0]
    names = ["subsegment", "thin_triangle", "near_collinearity", "variation",
             "dichotomy", "adjacent_projections", "confinement", "chain"]
    for name in names:
        for c1 in grid:
            for b1 in grid:
                v0 = getattr(phi_table(c1, b1), name)()
                for c2 in grid:
                    for b2 in grid:
                        if c2 >= c1 and b2 >= b1:
                            assert getattr(phi_table(c2, b2), name)() >= v0 - 1e-12
    # the D-argument entries are monotone in D as well
    for D1, D2 in [(1.0, 2.0), (2.0, 5.0)]:
        led = phi_table(1.0, 1.0)
        assert led.projection_transfer(D2) >= led.projection_transfer(D1)
        assert led.stability(D2) >= led.stability(D1)


def test_ledger_rejects_nonpositive():
    with pytest.raises(InputError):
        phi_table(0.0, 1.0)
    with pytest.raises(InputError):
        phi_table(1.0, -2.0)


# ---------------------------------------------------------------------------
# projection diameters and certificates
# ---------------------------------------------------------------------------

def test_euclidean_ball_shadow_closed_form():
    seg = EU.geodesic((-200.0, 0.0), (200.0, 0.0))
    for h in (3.0, 7.0, 20.0):
        diam = projection_diameter_under_ball(EU, seg, (0.0, h), h - 1.0, 64)
        assert diam == pytest.approx(2 * (h - 1.0), rel=1e-6)


def test_tree_balls_project_to_points():
    seg = TREE.geodesic(vertex(""), vertex("aab"))
    for center_word in ("bb", "bab", "Ab", "bbbb"):
        center = vertex(center_word)
        d = TREE.project(center, seg).distance
        for radius in range(1, int(d)):
            diam = projection_diameter_under_ball(TREE, seg, center, radius)
            assert diam == 0.0


def test_zero_radius_ball():
    seg = EU.geodesic((0.0, 0.0), (4.0, 0.0))
    assert projection_diameter_under_ball(EU, seg, (2.0, 3.0), 0.0) == 0.0


def test_disjointness_required():
    seg = EU.geodesic((0.0, 0.0), (4.0, 0.0))
    with pytest.raises(InputError):
        projection_diameter_under_ball(EU, seg, (2.0, 1.0), 2.0)


def test_tree_segment_certified():
    cert = certify_contracting(TREE, TREE.geodesic(vertex(""), vertex("aab")),
                               1.0, CertBudget(center_radius=5))
    assert cert.status == CERTIFIED
    assert cert.max_diameter == 0.0
    assert cert.balls_checked > 100


def test_euclidean_segment_refuted_with_replayable_witness():
    seg = EU.geodesic((-200.0, 0.0), (200.0, 0.0))
    cert = certify_contracting(EU, seg, 10.0, CertBudget(center_radius=4))
    assert cert.status == REFUTED
    w = cert.witness
    assert w.diameter >= 10.0
    again = projection_diameter_under_ball(EU, seg, w.center, w.radius, w.samples)
    assert again == pytest.approx(w.diameter, rel=1e-9)
    d_center = EU.project(w.center, seg).distance
    assert w.diameter == pytest.approx(2 * (d_center - 1.0), rel=0.05)


def test_halfplane_axis_contracting_at_small_scale():
    seg = HP.geodesic(1j, 1j * math.exp(4.0))   # length-4 piece of the axis
    scale = contraction_scale(HP, seg, CertBudget(center_radius=6, center_count=32))
    assert scale <= 5.0
    cert = certify_contracting(HP, seg, 5.0, CertBudget(center_radius=6))
    assert cert.status == CERTIFIED


# ---------------------------------------------------------------------------
# lemma checkers, tree exhaustive
# ---------------------------------------------------------------------------

def test_thin_triangle_tree_exhaustive_radius4():
    violated = skipped = held = 0
    for a, b, c in tree_triples_exhaustive(TREE, 4):
        out = check_thin_triangle(TREE, a, b, c, LEDGER)
        if out.status == "violated":
            violated += 1
        elif out.status == "skipped":
            skipped += 1
        else:
            held += 1
    assert violated == 0
    assert held > 1000


def test_thin_triangle_example():
    out = check_thin_triangle(TREE, vertex(""), vertex("aa"), vertex("aab"), LEDGER)
    assert out.status == "holds"
    assert out.value == 0.0


def test_thin_triangle_degenerate():
    p = vertex("ab")
    out = check_thin_triangle(TREE, p, p, p, LEDGER)
    assert out.status == "holds" and out.value == 0.0


def test_reverse_triangle_collinear_equality():
    out = check_reverse_triangle(TREE, vertex(""), vertex("aa"), vertex("aaaa"), LEDGER)
    assert out.status == "holds"


def test_reverse_triangle_tree_exhaustive():
    assert all(check_reverse_triangle(TREE, a, b, c, LEDGER).ok
               for a, b, c in tree_triples_exhaustive(TREE, 4))


def test_dichotomy_tree():
    results = [check_dichotomy(TREE, seg, x, y, LEDGER)
               for seg, x, y in tree_dichotomy_configs(TREE, 3)]
    assert all(r.ok for r in results)
    assert any(r.status == "holds" for r in results)


def test_variation_tree():
    held = 0
    for seg_ab, seg_pq in tree_variation_configs(TREE, 3):
        out = check_variation(TREE, seg_ab, seg_pq, LEDGER)
        assert out.ok
        held += out.status == "holds"
    assert held > 50


def test_variation_example_a5():
    seg_ab = TREE.geodesic(vertex(""), vertex("aaaaa"))
    seg_pq = TREE.geodesic(vertex("b"), vertex("bb"))
    out = check_variation(TREE, seg_ab, seg_pq, LEDGER)
    assert out.status == "holds"
    assert out.value == pytest.approx(5.0)   # distance grows by the full length


def test_variation_degenerate_segment():
    seg_ab = TREE.geodesic(vertex("a"), vertex("a"))
    seg_pq = TREE.geodesic(vertex("bb"), vertex("bbb"))
    out = check_variation(TREE, seg_ab, seg_pq, LEDGER)
    assert out.ok   # 0 >= -variation constant


def test_stability_tree_perturbations():
    base = TREE.geodesic(vertex(""), vertex("aaaaa"))
    budget = CertBudget(center_radius=4)
    for a2, b2 in ((vertex("b"), vertex("aaaa")), (vertex(""), vertex("aaaaa")),
                   (vertex("B"), vertex("aaaaaa"))):
        cert = check_stability(TREE, base, a2, b2, D=1.0, ledger=LEDGER, budget=budget)
        assert not cert.refuted


def test_stability_rejects_large_displacement():
    base = TREE.geodesic(vertex(""), vertex("aaaaa"))
    with pytest.raises(InputError):
        check_stability(TREE, base, vertex("bbb"), vertex("aaaaa"), D=1.0,
                        ledger=LEDGER)


# ---------------------------------------------------------------------------
# lemma checkers, half-plane seeded
# ---------------------------------------------------------------------------

def test_halfplane_thin_and_reverse_seeded():
    budget = CertBudget(center_radius=4, center_count=12, ball_samples=32)
    checked = 0
    for a, b, c in halfplane_thin_configs(HP, 5, 120):
        seg = HP.geodesic(a, b)
        scale = contraction_scale(HP, seg, budget)
        led = phi_table(1.0, max(1.0, scale))
        out1 = check_thin_triangle(HP, a, b, c, led, tolerance=1e-6)
        out2 = check_reverse_triangle(HP, a, b, c, led, tolerance=1e-6)
        assert out1.ok and out2.ok
        checked += out1.status == "holds"
    assert checked > 60


def test_halfplane_variation_seeded():
    budget = CertBudget(center_radius=4, center_count=12, ball_samples=32)
    held = 0
    for seg_ab, seg_pq in halfplane_variation_configs(HP, 5, 60):
        scale = contraction_scale(HP, seg_ab, budget)
        led = phi_table(1.0, max(1.0, scale))
        out = check_variation(HP, seg_ab, seg_pq, led, tolerance=1e-6)
        assert out.ok
        held += out.status == "holds"
    assert held > 30


def test_diameter_monotone_in_samples():
    seg = EU.geodesic((-50.0, 0.0), (50.0, 0.0))
    prev = 0.0
    for n in (8, 16, 32, 64, 128):
        diam = projection_diameter_under_ball(EU, seg, (0.0, 5.0), 4.0, n)
        assert diam >= prev - 1e-12
        prev = diam
