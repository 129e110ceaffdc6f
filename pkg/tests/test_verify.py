import json
import math

import pytest

from htkernels.group import GroupPoint, heisenberg, quaternionic
from htkernels.kernels import composite_kernel
from htkernels.verify import (
    REGISTRY,
    CheckReport,
    UnknownCheckError,
    brute_force_convolution,
    check_names,
    run_check,
    run_suite,
    suite_passed,
)

REQUIRED = {
    "mass_one", "semigroup", "monster", "beta_identity", "convolution_lemma", "conformal_closed_form",
    "nonconformal_two_method", "folland_constant_resolution", "poisson_norm_parabolic", "poisson_norm_elliptic",
    "poisson_norm_conformal", "thick_closed_form", "pde_residual_parabolic", "pde_residual_elliptic",
    "pde_residual_bg", "homogeneity", "approx_identity", "decay_at_infinity", "dn_vs_balakrishnan",
    "gegenbauer", "bateman", "duplication", "restriction_relation",
}


def test_registry_contains_required_checks():
    assert REQUIRED <= set(check_names())
    assert check_names() == sorted(check_names())


def test_monster_check():
    rep = run_check("monster", params={"s": [0.5], "mu": [1.0]})
    assert rep.passed and rep.measured_error < 1e-10
    assert rep.group == {"name": "none"}


def test_unknown_check_and_parameters():
    with pytest.raises(UnknownCheckError):
        run_check("nonexistent")
    with pytest.raises(UnknownCheckError):
        run_suite(["monster", "nonexistent"])
    with pytest.raises(ValueError):
        run_check("monster", params={"bogus": 1})
    with pytest.raises(ValueError):
        run_check("monster", tolerance_scale=0.0)


def test_mass_one_check():
    rep = run_check("mass_one", heisenberg(1), {"s": 0.5, "t": 1.0})
    assert rep.passed and rep.measured_error < 1e-6
    assert rep.group["name"] == "heisenberg(1)"


def test_suite_cardinality_and_order():
    reps = run_suite(["monster", "beta_identity"])
    assert [r.name for r in reps] == ["beta_identity", "monster"]
    assert suite_passed(reps)


def test_group_free_checks_run_once():
    reps = run_suite(["monster", "semigroup"], [heisenberg(1), quaternionic()])
    assert [r.name for r in reps].count("monster") == 1
    assert [r.name for r in reps].count("semigroup") == 2


def test_impossible_tolerance_fails():
    reps = run_suite(["monster", "beta_identity"], tolerance_scale=1e-30)
    assert not suite_passed(reps)
    assert all(r.tolerance < 1e-30 for r in reps)


def test_threads_do_not_change_results():
    names = ["semigroup", "monster", "duplication", "restriction_relation"]
    serial = [r.to_json() for r in run_suite(names)]
    threaded = [r.to_json() for r in run_suite(names, threads=3)]
    strip = [json.loads(s) | {"wall_time": 0} for s in serial]
    strip_t = [json.loads(s) | {"wall_time": 0} for s in threaded]
    assert strip == strip_t


def test_seed_override_reaches_sampled_checks():
    reps = run_suite(["semigroup", "monster"], seed=42)
    by_name = {r.name: r for r in reps}
    assert by_name["semigroup"].parameters["seed"] == 42
    assert "seed" not in by_name["monster"].parameters


def test_report_json_is_stable():
    rep = CheckReport("x", {"name": "none"}, {"b": 1, "a": [1.0]}, math.inf, 1e-6, False, 0.0, "")
    text = rep.to_json()
    assert json.loads(text)["measured_error"] == "inf"
    assert text == rep.to_json()
    assert list(json.loads(text)) == sorted(json.loads(text))


def test_exceptions_become_failed_reports(monkeypatch):
    entry = REGISTRY["monster"]

    def boom(G, p, cfg):
        raise RuntimeError("quadrature exploded")

    monkeypatch.setitem(REGISTRY, "monster", type(entry)(boom, entry.defaults, entry.group_dependent))
    (rep,) = run_suite(["monster"])
    assert not rep.passed and "quadrature exploded" in rep.notes


@pytest.mark.parametrize(
    "name",
    ["semigroup", "convolution_lemma", "conformal_closed_form", "folland_constant_resolution", "thick_closed_form",
     "gegenbauer", "bateman", "duplication", "hypergeometric_identities", "restriction_relation", "change_of_variables",
     "poisson_norm_parabolic", "poisson_norm_conformal", "homogeneity", "decay_at_infinity", "monster_antiderivative",
     "intertwining", "pde_residual_parabolic"],
)
def test_fast_checks_pass_on_h1(name):
    rep = run_check(name, heisenberg(1))
    assert rep.passed, (rep.measured_error, rep.tolerance, rep.notes)


def test_brute_force_convolution_small_grid_agrees_roughly():
    # a coarse grid already lands within a few parts in 10^4 of the fiber formula
    brute = brute_force_convolution(0.5, 0.8, 1.0, (0.5, -0.3), 0.2, z_nodes=32, sigma_nodes=48)
    exact = composite_kernel(heisenberg(1), 0.5, GroupPoint([0.5, -0.3], [0.2]), 0.8, 1.0)
    assert brute == pytest.approx(exact, rel=1e-3)
