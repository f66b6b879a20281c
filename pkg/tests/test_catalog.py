import numpy as np
import pytest

from conftest import maxabs
from obstruct import catalog, config, poisson, report

SCENE_NAMES = ("flat-torus", "fuzzy-sphere", "podles-sphere", "su2-dual")
ALGEBRA_NAMES = ("sl2-drinfeld-jimbo", "sl2-triangular")


def test_example_names():
    assert set(catalog.example_names()) == set(SCENE_NAMES) | set(ALGEBRA_NAMES)


def test_unknown_name():
    with pytest.raises(KeyError, match="available"):
        catalog.load_example("moebius")


@pytest.mark.parametrize("name", SCENE_NAMES)
def test_scene_entries_load_and_validate(name):
    entry = catalog.load_example(name)
    scene = entry.scene()
    scene.validate()


@pytest.mark.parametrize("name", ALGEBRA_NAMES)
def test_algebra_entries_load_and_validate(name):
    from obstruct import liealg
    entry = catalog.load_example(name)
    pres, r = entry.presentation()
    assert r is not None
    assert liealg.validate(pres).ok


@pytest.mark.parametrize("name", SCENE_NAMES)
def test_all_scenes_are_genuinely_poisson(name):
    scene = catalog.load_example(name).scene()
    rng = np.random.default_rng(101)
    for point in scene.sample_points(rng, 8):
        assert maxabs(poisson.jacobi_defect(scene, point)) <= 1e-10


@pytest.mark.parametrize("name", SCENE_NAMES)
def test_export_round_trip_is_bit_identical(name):
    entry = catalog.load_example(name)
    scene = entry.scene()
    exported = config.scene_to_config(scene)
    reparsed = config.scene_from_config(exported)
    assert config.scene_to_config(reparsed) == exported
    assert config.canonical_digest(exported) == config.canonical_digest(entry.config)


@pytest.mark.parametrize("name", catalog.example_names())
def test_expected_outcomes_match_reports(name):
    entry = catalog.load_example(name)
    if entry.kind == "scene":
        rep = report.run_checks(entry.scene())
    else:
        pres, r = entry.presentation()
        rep = report.run_checks(pres, r=r, name=name)
    statuses = {c.name: c.status for c in rep.checks}
    for check, expected_status, _reason in entry.expected:
        assert statuses[check] == expected_status, (name, check)


def test_flat_torus_expectations_cover_key_checks():
    entry = catalog.load_example("flat-torus")
    names = {c for c, _, _ in entry.expected}
    assert {"divergence", "curvature"} <= names
