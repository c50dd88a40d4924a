import pytest

from polycrystal import presets
from polycrystal.modules.polyhedral import PolyhedralRealization
from polycrystal.modules.zinfty import SequenceCrystal


@pytest.fixture
def rank2_211():
    return presets.rank2(2, 1, 1)


@pytest.fixture
def toy():
    return presets.monster_toy()


@pytest.fixture
def crystal_211(rank2_211):
    return SequenceCrystal(rank2_211.datum, rank2_211.iota)


@pytest.fixture
def realization_211(rank2_211):
    return PolyhedralRealization(rank2_211.datum, rank2_211.iota)


@pytest.fixture
def toy_crystal(toy):
    return SequenceCrystal(toy.datum, toy.iota)


@pytest.fixture
def toy_realization(toy):
    return PolyhedralRealization(toy.datum, toy.iota)


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in (
        "POLYCRYSTAL_THETA_CAP",
        "POLYCRYSTAL_DEPTH",
        "POLYCRYSTAL_WINDOW_FACTOR",
        "POLYCRYSTAL_CHARGES",
        "POLYCRYSTAL_VALIDATE_LEVELS",
        "POLYCRYSTAL_LOG_LEVEL",
    ):
        monkeypatch.delenv(name, raising=False)
