from dataclasses import dataclass
import os


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        return default


@dataclass
class Settings:
    theta_cap: int = 50000
    depth: int = 4
    window_factor: int = 3
    charges_path: str = ""
    validate_levels: int = 5
    log_level: str = "WARNING"

    @classmethod
    def from_env(cls) -> "Settings":
        return cls(
            theta_cap=_env_int("POLYCRYSTAL_THETA_CAP", 50000),
            depth=_env_int("POLYCRYSTAL_DEPTH", 4),
            window_factor=_env_int("POLYCRYSTAL_WINDOW_FACTOR", 3),
            charges_path=os.getenv("POLYCRYSTAL_CHARGES", "").strip(),
            validate_levels=_env_int("POLYCRYSTAL_VALIDATE_LEVELS", 5),
            log_level=os.getenv("POLYCRYSTAL_LOG_LEVEL", "WARNING").strip().upper() or "WARNING",
        )

    def default_window(self, depth: int) -> int:
        return max(1, self.window_factor * max(1, depth))
