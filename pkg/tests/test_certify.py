import json
from pathlib import Path

import pytest

from multicomm.certify import (
    FUNCTORS,
    InapplicableFunctor,
    bicommutative_square,
    certify_composition,
    certify_open,
    certify_surjective,
    chi,
    chi_factored,
    functor,
    image_diagram,
    report_json,
)
from multicomm.convex import ConvexFamily, polytope_square
from multicomm.diagram_io import load_diagram
from multicomm.spaces import FiniteSpace, Measure, Polytope

DATA = Path(__file__).parent / "data"
I = Polytope.box((0,), (1,))


def load(name):
    return load_diagram(DATA / f"{name}.json")


def test_registry_lists_ten_functors():
    assert sorted(FUNCTORS) == sorted(["exp", "G", "lambda", "P", "cc", "G_cc", "lambda_cc",
                                       "ccP", "G_ccP", "lambda_ccP"])
    assert functor("G_ccP").outer.name == "G_cc" and functor("G_ccP").inner.name == "P"
    with pytest.raises(InapplicableFunctor):
        functor("nope")


# image diagrams

def test_exp_image_of_cospan():
    img = image_diagram("exp", load("cospan_2x2"))
    assert [len(img.spaces[o]) for o in ("X", "Y")] == [3, 3]
    assert len(img.spaces["*"]) == 1
    img.validate()


def test_P_image_of_three_points_is_triangle():
    X = FiniteSpace.of_size(3)
    d = bicommutative_square(X, FiniteSpace.of_size(1))
    img = image_diagram("P", d)
    assert img.spaces["X"] == Polytope([(1, 0, 0), (0, 1, 0), (0, 0, 1)])


def test_composite_image_is_law_checked():
    img = image_diagram("G_ccP", load("cospan_2x2"), validate=True)
    assert img.spaces["X"].kind == "hyper"


def test_wrong_kind_is_inapplicable():
    with pytest.raises(InapplicableFunctor):
        image_diagram("cc", load("cospan_2x2"))
    with pytest.raises(InapplicableFunctor):
        certify_surjective("P", load("interval_square"))


def test_factored_chi_matches_direct_on_uniform():
    d = load("cospan_2x2")
    lam = Measure.uniform(d.limit().space)
    simplex_pt = Polytope.point(lam.weights)
    assert chi("ccP", d, simplex_pt) == chi_factored("ccP", d, simplex_pt)
    fam = ConvexFamily([simplex_pt])
    assert chi("G_ccP", d, fam) == chi_factored("G_ccP", d, fam)


# surjectivity

@pytest.mark.parametrize("name", ["exp", "G", "lambda"])
def test_discrete_surjective_on_cospan(name):
    rep = certify_surjective(name, load("cospan_2x2"))
    assert rep.ok and rep.mode == "exhaustive" and rep.tested > 0


def test_exp_miss_on_parallel_pair():
    rep = certify_surjective("exp", load("parallel_pair"))
    assert not rep.ok
    assert len(rep.misses) >= 1


def test_P_surjective_on_square():
    rep = certify_surjective("P", load("square_3x4"), budget=30, seed=0)
    assert rep.ok and rep.tested == 30


@pytest.mark.parametrize("name", ["cc", "G_cc", "lambda_cc"])
def test_convex_surjective_on_interval_square(name):
    assert certify_surjective(name, load("interval_square"), budget=10, seed=0).ok


def test_cc_miss_on_equalizer_names_witness():
    rep = certify_surjective("cc", load("interval_equalizer"), budget=10, seed=0)
    assert not rep.ok
    assert "1/2" in report_json(rep)


# openness

def test_discrete_openness_is_automatic():
    rep = certify_open("G", load("cospan_2x2"))
    assert rep.automatic and rep.ok and rep.K == 0
    assert json.loads(report_json(rep))["openness"].startswith("automatic")


def test_P_openness_on_square():
    rep = certify_open("P", load("square_3x4"), samples=20, seed=3)
    assert rep.ok and rep.stable
    assert all(row.failures == 0 and row.K <= 1 for row in rep.rows)


def test_P_openness_records_empty_correspondence():
    rep = certify_open("P", load("parallel_pair"), samples=10, seed=0)
    excluded = sum(row.excluded for row in rep.rows)
    assert excluded == sum(row.failures for row in rep.rows)


@pytest.mark.parametrize("name", ["cc", "G_cc", "lambda_cc"])
def test_convex_openness_on_product(name):
    rep = certify_open(name, load("triangle_interval"), samples=5, seed=1)
    assert rep.ok and rep.stable


def test_stability_ratio_definition():
    rep = certify_open("ccP", load("cospan_2x2"), samples=5, seed=1)
    Ks = [row.K for row in rep.rows if row.K > 0]
    assert rep.stability_ratio == max(Ks) / min(Ks)
    assert rep.stable == (rep.stability_ratio <= 2)


# composition

@pytest.mark.parametrize("name", ["ccP", "G_ccP", "lambda_ccP"])
def test_composition_factorizes(name):
    rep = certify_composition(name, load("cospan_2x2"), samples=5, seed=0, factor_budget=5)
    assert rep.ok and rep.equal == 5 and not rep.mismatches


# reports

def test_report_json_is_deterministic():
    d = load("square_3x4")
    a = report_json(certify_open("P", d, samples=5, seed=9))
    b = report_json(certify_open("P", d, samples=5, seed=9))
    assert a == b and a.endswith("\n")
    data = json.loads(a)
    assert data["schema_version"] == 1
    assert list(data) == sorted(data)
    assert all("/" in row["K"] for row in data["rows"])


def test_rationals_print_as_fractions():
    rep = certify_open("exp", load("cospan_2x2"))
    assert json.loads(report_json(rep))["K"] == "0/1"


def test_square_helper_matches_data_file():
    d = polytope_square(I, I)
    assert d.limit().space.ambient_dim == 3
    assert load("interval_square").limit().space == d.limit().space


def test_openness_report_names_metric_and_shape():
    notes = certify_open("P", load("parallel_pair"), samples=2, seed=0).notes
    assert "distance: L1 on measures" in notes and "non-product diagram" in notes
    notes = certify_open("cc", load("interval_square"), samples=2, seed=0).notes
    assert "distance: Hausdorff distance in the max norm" in notes and "product-shaped diagram" in notes
