from __future__ import annotations

import json

import pytest

from microarena.errors import MissingClass, SchemaError
from microarena.units import REQUIRED_CLASSES, load_unit_specs


def test_bundled_catalog_has_required_classes(catalog):
    for name in REQUIRED_CLASSES:
        assert name in catalog
    assert len(catalog) >= 21


def test_marine_stats(catalog):
    marine = catalog["Marine"]
    assert marine.max_health == 45_000          # 45 HP
    assert marine.movement_speed == 3_150       # 3.15 u/s
    assert marine.attack_range == 5_000
    assert marine.attack_damage == 6_000
    assert "Stimpack" in marine.abilities


def test_zergling_health(catalog):
    assert catalog["Zergling"].max_health == 35_000


def test_cross_field_invariants_hold(catalog):
    for name in catalog:
        spec = catalog[name]
        assert spec.max_health > 0
        assert spec.armor >= 0
        assert spec.attack_range >= 0
        assert spec.movement_speed >= 0
        if spec.attack_damage > 0:
            assert spec.attack_cooldown_us > 0
        for ability in spec.abilities:
            assert catalog.abilities.known(ability)


def test_missing_class_raises(catalog):
    with pytest.raises(MissingClass):
        catalog["Dragoon"]


def test_start_energy_defaults_and_bounds(catalog):
    medivac = catalog["Medivac"]
    assert medivac.start_energy == 50_000
    assert medivac.max_energy == 200_000
    marine = catalog["Marine"]
    assert marine.start_energy == marine.max_energy == 0


def test_schema_error_on_bad_file(tmp_path):
    bad = {"version": 1, "abilities": {}, "units": {}}
    path = tmp_path / "units.json"
    path.write_text(json.dumps(bad))
    with pytest.raises(SchemaError):
        load_unit_specs(path)


def test_schema_error_reports_field(tmp_path, catalog):
    raw = json.loads(
        (__import__("importlib").resources.files("microarena.data")
         .joinpath("units.json").read_text()))
    raw["units"]["Marine"]["attack_cooldown"] = 0  # armed unit needs cooldown
    path = tmp_path / "units.json"
    path.write_text(json.dumps(raw))
    with pytest.raises(SchemaError) as err:
        load_unit_specs(path)
    assert "Marine" in str(err.value)


def test_missing_required_class_rejected(tmp_path):
    raw = json.loads(
        (__import__("importlib").resources.files("microarena.data")
         .joinpath("units.json").read_text()))
    del raw["units"]["Zergling"]
    path = tmp_path / "units.json"
    path.write_text(json.dumps(raw))
    with pytest.raises(MissingClass):
        load_unit_specs(path)


def test_sieged_weapon_profile(catalog):
    sieged = catalog.abilities.sieged_weapon
    assert sieged.range_milli == 13_000
    assert sieged.damage == 40_000
    assert sieged.splash is not None and sieged.splash.kind == "circle"
    assert sieged.splash.friendly_fire
    assert [r for r, _ in sieged.splash.rings] == [500, 800, 1250]
