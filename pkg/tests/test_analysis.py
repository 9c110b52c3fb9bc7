import math

import numpy as np
import pytest

from cosserat_pattern import analysis as an
from cosserat_pattern import potential as pot
from cosserat_pattern.field import BoundarySpec, Grid2D, ScalarField, Segment
from cosserat_pattern.params import MaterialParams, elastic_sufficient

P12 = MaterialParams(1.0, 1.0, 12.0)
TL1 = BoundarySpec.sides(left=0.0, right=math.pi, bottom=0.0, top=math.pi)
WELLS = (0.0, math.pi)


def _tanh_field(n, eps, axis="x"):
    g = Grid2D(n, 5) if axis == "x" else Grid2D(5, n)
    return ScalarField.from_function(
        g, lambda x, y: math.pi * (1 + np.tanh(((x if axis == "x" else y) - 0.5) / eps)) / 2)


def test_label_zero_field():
    r = an.label_cells(ScalarField.zeros(Grid2D(10, 8)), WELLS)
    assert r.cell_count == 1 and r.layer_fraction == 0.0
    assert r.counts() == {"well_0": 80, "well_pi": 0, "layer": 0}


def test_label_step_field():
    g = Grid2D(11, 6)
    v = np.where(g.coords()[0] < 0.45, 0.0, math.pi)
    v[:, 5] = math.pi / 2
    r = an.label_cells(ScalarField(g, v), WELLS)
    assert r.cell_count == 2
    assert np.all(r.labels[:, 5] == an.LAYER)
    assert r.counts()["layer"] == 6


def test_label_uses_angular_distance():
    g = Grid2D(4, 4)
    r = an.label_cells(ScalarField(g, np.full(g.shape, 2 * math.pi - 0.1)), WELLS)
    assert np.all(r.labels == 0)


def test_cells_four_connected():
    g = Grid2D(4, 4)
    v = np.full(g.shape, math.pi)
    v[0, 0] = v[1, 1] = 0.0     # diagonal neighbours are separate cells
    r = an.label_cells(ScalarField(g, v), WELLS)
    assert r.cell_count == 3


def test_label_rejects_bad_input():
    f = ScalarField.zeros(Grid2D(4, 4))
    with pytest.raises(ValueError):
        an.label_cells(f, [])
    with pytest.raises(ValueError):
        an.label_cells(f, WELLS, tol=0.0)


def test_tanh_width():
    eps = 0.05
    expected = eps * (math.atanh(0.8) - math.atanh(-0.8))
    w = an.measure_layer_width(_tanh_field(256, eps), WELLS)
    assert len(w) == 3      # three interior rows
    assert np.allclose(w, expected, rtol=0.1)
    wy = an.measure_layer_width(_tanh_field(256, eps, "y"), WELLS)
    assert np.allclose(wy, expected, rtol=0.1)


def test_tanh_width_refinement():
    eps = 0.05
    expected = eps * 2 * math.atanh(0.8)
    errs = [abs(np.median(an.measure_layer_width(_tanh_field(n, eps), WELLS)) - expected)
            for n in (65, 129, 257, 513)]
    for coarse, fine in zip(errs, errs[1:]):
        assert fine <= 0.5 * coarse


def test_width_of_constant_field_is_empty():
    assert an.measure_layer_width(ScalarField.zeros(Grid2D(20, 20)), WELLS) == []


def test_width_counts_both_directions():
    g = Grid2D(101, 5)
    x = g.coords()[0]
    v = math.pi * np.exp(-((x - 0.5) / 0.1) ** 2)
    w = an.measure_layer_width(ScalarField(g, v), WELLS)
    assert len(w) == 6 and np.ptp(w) < 1e-12


def test_width_arguments():
    f = ScalarField.zeros(Grid2D(5, 5))
    with pytest.raises(ValueError):
        an.measure_layer_width(f, (1.0, 1.0))
    with pytest.raises(ValueError):
        an.measure_layer_width(f, WELLS, 0.9, 0.1)


def test_report_text_and_pgm(tmp_path):
    g = Grid2D(11, 6)
    v = np.where(g.coords()[0] < 0.45, 0.0, math.pi)
    v[:, 5] = 1.0
    r = an.label_cells(ScalarField(g, v), WELLS)
    text = r.to_text({"converged": True, "steps": 3})
    assert "cell_count: 2\n" in text and "converged: true\n" in text and "steps: 3\n" in text
    r.write_pgm(tmp_path / "l.pgm")
    rows = (tmp_path / "l.pgm").read_text().splitlines()[3:]
    assert rows[0].split()[0] == "0" and rows[0].split()[5] == "128" and rows[0].split()[-1] == "255"


# -- TL1 / TL2 --------------------------------------------------------------

def test_tl1_examples():
    assert an.check_tl1(TL1)
    assert not an.check_tl1(BoundarySpec.constant(0.0))
    assert not an.check_tl1(BoundarySpec.constant(math.pi))
    two = BoundarySpec.sides(left=0.4 * math.pi, right=0.6 * math.pi, bottom=0.4 * math.pi, top=0.4 * math.pi)
    assert an.check_tl1(two)


def test_tl1_needs_two_different_segments():
    # pi/2 itself belongs to neither clause; one segment cannot serve both
    assert not an.check_tl1(BoundarySpec.constant(0.5 * math.pi))
    one_side = BoundarySpec((Segment("left", 0, 0.5, 0.0), Segment("left", 0.5, 1, math.pi),
                             Segment("right", 0, 1, 0.0), Segment("bottom", 0, 1, 0.0),
                             Segment("top", 0, 1, 0.0)))
    assert an.check_tl1(one_side)


def test_tl1_uses_wrapped_values():
    assert an.check_tl1(BoundarySpec.sides(left=2 * math.pi, right=3 * math.pi, bottom=0, top=0))


@pytest.fixture(scope="module")
def branch_trace():
    return pot.trace_extrema(MaterialParams(1.0, 1.0, 6.0), np.linspace(-2, 2, 81))


def test_tl2_bounds_match_brute_force(branch_trace):
    p = MaterialParams(1.0, 1.0, 6.0)
    m = an.tl2_bounds(branch_trace)
    for b in (-2.0, 2.0):
        _, maxs = pot.brute_force_extrema(p, b)
        for key in (f"M1({b:g})", f"M2({b:g})"):
            assert np.min(pot.angular_distance(maxs, m[key])) < 1e-6


def test_tl2_canonical_bc(branch_trace):
    m = an.tl2_bounds(branch_trace)
    expected = m["M1(-2)"] < math.pi < m["M2(2)"]
    assert an.check_tl2(TL1, branch_trace, MaterialParams(1.0, 1.0, 6.0)) == expected
    assert expected


def test_tl2_constant_bc_false(branch_trace):
    assert not an.check_tl2(BoundarySpec.constant(0.0), branch_trace)
    assert not an.check_tl2(BoundarySpec.constant(math.pi), branch_trace)


def test_tl2_missing_branch(branch_trace):
    broken = pot.BifurcationTrace(branch_trace.betas.copy(),
                                  {k: v.copy() for k, v in branch_trace.branches.items()})
    broken.branches["M2"][0] = math.nan
    with pytest.raises(ValueError):
        an.check_tl2(TL1, broken)


def test_tl2_is_intersection_of_basins(branch_trace):
    # both maxima move down with beta, so the clause-1 interval is the part of
    # the m1 basin that stays in it for every beta (and likewise for m2)
    m = an.tl2_bounds(branch_trace)
    assert all(t == "decreasing" for t in an.maxima_trends(branch_trace).values())
    for v in np.linspace(0.01, 2 * math.pi - 0.01, 200):
        in_m2_basin_always = all(
            pot.wrap(branch_trace.at(b, "M1")) < v < pot.wrap(branch_trace.at(b, "M2"))
            for b in branch_trace.betas)
        assert in_m2_basin_always == (m["M1(-2)"] < v < m["M2(2)"])


# -- elastic regime ---------------------------------------------------------

def test_s1_examples():
    p40 = MaterialParams(1.0, 1.0, 12.0, sigma_y=40.0)
    assert an.s1_pointwise(MaterialParams(1, 1, 12), 0.0, 0.0)
    assert an.s1_expression(p40, math.pi / 2, 1.0) == pytest.approx(-7.0)
    assert an.s1_pointwise(p40, math.pi / 2, 1.0)


def test_s1_matches_pointwise_gamma_min(rng):
    from cosserat_pattern.energy import pointwise_gamma_min
    for _ in range(200):
        p = MaterialParams(*rng.uniform(0.5, 8, 3), 1.0, 0.0, rng.uniform(0, 30))
        a, b = rng.uniform(0, 2 * math.pi), rng.uniform(-2, 2)
        assert an.s1_pointwise(p, a, b) == (pointwise_gamma_min(p, a, b) == 0.0)


def test_s2_implies_s1(rng):
    alpha = np.linspace(0, 2 * math.pi, 1000, endpoint=False)
    hits = 0
    for _ in range(200):
        p = MaterialParams(*rng.uniform(0.1, 10, 3), 1.0, 0.0, rng.uniform(0, 80))
        b = rng.uniform(-2, 2)
        if elastic_sufficient(p, b):
            hits += 1
            assert np.all(an.s1_pointwise(p, alpha, b))
    assert hits > 10


def test_field_elastic_report():
    g = Grid2D(6, 6)
    quarter = ScalarField(g, np.full(g.shape, math.pi / 2))
    assert an.field_elastic_report(MaterialParams(1, 1, 12, sigma_y=1e6), quarter, 1.0) == (1.0, True)
    assert an.field_elastic_report(MaterialParams(1, 1, 12), quarter, 1.0) == (0.0, False)
    mixed = quarter.with_values(np.where(g.coords()[0] < 0.5, 0.0, math.pi / 2))
    frac, ok = an.field_elastic_report(MaterialParams(1, 1, 12), mixed, 0.0)
    assert 0.0 < frac < 1.0 and not ok


def test_monotone_maxima_synthetic():
    betas = np.linspace(-1, 1, 5)
    up, down = np.linspace(1, 2, 5), np.linspace(5, 4, 5)
    ok = pot.BifurcationTrace(betas, {"m1": 0 * betas, "m2": 0 * betas + 3, "M1": up, "M2": down})
    assert an.monotone_maxima(ok)
    flat = pot.BifurcationTrace(betas, {"m1": 0 * betas, "m2": 0 * betas, "M1": 0 * betas + 1,
                                        "M2": 0 * betas + 4})
    assert not an.monotone_maxima(flat)
    single = pot.BifurcationTrace(np.array([0.0]), {k: np.array([1.0]) for k in pot.BRANCHES})
    assert an.monotone_maxima(single)
    ok.branches["M1"][2] = math.nan
    with pytest.raises(ValueError):
        an.monotone_maxima(ok)


def test_observed_maxima_trends(branch_trace):
    # recorded behaviour of the mu_c = 6 trace: both maxima decrease with beta
    assert an.maxima_trends(branch_trace) == {"M1": "decreasing", "M2": "decreasing"}
    assert branch_trace.at(0.0, "M1") == pytest.approx(2 * math.pi / 3, abs=1e-10)
    assert branch_trace.at(0.0, "M2") == pytest.approx(4 * math.pi / 3, abs=1e-10)
