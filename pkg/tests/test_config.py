from polycrystal.config import Settings


def test_defaults():
    s = Settings.from_env()
    assert s.theta_cap == 50000
    assert s.depth == 4
    assert s.log_level == "WARNING"
    assert s.charges_path == ""


def test_env_overrides(monkeypatch):
    monkeypatch.setenv("POLYCRYSTAL_THETA_CAP", "123")
    monkeypatch.setenv("POLYCRYSTAL_DEPTH", "6")
    monkeypatch.setenv("POLYCRYSTAL_LOG_LEVEL", "debug")
    monkeypatch.setenv("POLYCRYSTAL_CHARGES", " /tmp/charges.txt ")
    s = Settings.from_env()
    assert s.theta_cap == 123
    assert s.depth == 6
    assert s.log_level == "DEBUG"
    assert s.charges_path == "/tmp/charges.txt"


def test_bad_integer_falls_back(monkeypatch):
    monkeypatch.setenv("POLYCRYSTAL_WINDOW_FACTOR", "wide")
    assert Settings.from_env().window_factor == 3


def test_default_window():
    s = Settings()
    assert s.default_window(4) == 12
    assert s.default_window(0) == 3
