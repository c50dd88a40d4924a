from __future__ import annotations

from dataclasses import dataclass

from polycrystal.modules.cartan_datum import IMAGINARY, REAL, BorcherdsCartanDatum
from polycrystal.modules.iota_seq import IotaSequence
from polycrystal.modules.monster import ChargeTable, MonsterConfig, load_charges, monster_datum, monster_iota

TOY_CHARGES = (2, 1)


@dataclass(frozen=True)
class Preset:
    name: str
    datum: BorcherdsCartanDatum
    iota: IotaSequence
    params: tuple[int, ...] = ()
    monster: MonsterConfig | None = None


def parse_params(text: str, count: int, flag: str) -> tuple[int, ...]:
    parts = [p.strip() for p in str(text or "").split(",") if p.strip()]
    if len(parts) != count:
        raise ValueError(f"{flag} needs {count} comma-separated integers, got {text!r}")
    try:
        values = tuple(int(p) for p in parts)
    except ValueError:
        raise ValueError(f"{flag} needs integers, got {text!r}") from None
    if any(v < 0 for v in values):
        raise ValueError(f"{flag} parameters are nonnegative, got {text!r}")
    return values


def rank2(a: int, b: int, c: int) -> Preset:
    """Imaginary 1 (a_11 = -a) and real 2, sequence (..., 2, 1, 2, 1)."""
    datum = BorcherdsCartanDatum.from_matrix(
        [1, 2],
        [[-a, -b], [-c, 2]],
        classes=[IMAGINARY, REAL],
        name=f"rank2({a},{b},{c})",
    )
    return Preset(datum.name, datum, IotaSequence.periodic([], [1, 2], indices=datum.indices), (a, b, c))


def rank3(a: int, b: int, c: int, d: int, e: int, f: int, g: int, h: int) -> Preset:
    """Imaginary 1, 2 and real 3, sequence (..., 1, 3, 2, 1)."""
    datum = BorcherdsCartanDatum.from_matrix(
        [1, 2, 3],
        [[-a, -b, -c], [-d, -e, -f], [-g, -h, 2]],
        classes=[IMAGINARY, IMAGINARY, REAL],
        name=f"rank3({a},{b},{c},{d},{e},{f},{g},{h})",
    )
    iota = IotaSequence.periodic([], [1, 2, 3], indices=datum.indices)
    return Preset(datum.name, datum, iota, (a, b, c, d, e, f, g, h))


def all_imaginary(a11: int = -2, a22: int = -4, a12: int = 0) -> Preset:
    datum = BorcherdsCartanDatum.from_matrix(
        [1, 2],
        [[a11, a12], [a12, a22]],
        classes=[IMAGINARY, IMAGINARY],
        name=f"imaginary({a11},{a22},{a12})",
    )
    return Preset(datum.name, datum, IotaSequence.periodic([], [1, 2], indices=datum.indices))


def single_imaginary(a11: int = -2) -> Preset:
    datum = BorcherdsCartanDatum.from_matrix([1], [[a11]], classes=[IMAGINARY], name=f"imaginary({a11})")
    return Preset(datum.name, datum, IotaSequence.periodic([], [1], indices=datum.indices))


def sl2() -> Preset:
    datum = BorcherdsCartanDatum.from_matrix([1], [[2]], name="sl2")
    return Preset(datum.name, datum, IotaSequence.periodic([], [1], indices=datum.indices))


def monster(charges: ChargeTable, max_level: int | None = None, copies: int = 3) -> Preset:
    cfg = MonsterConfig(charges=charges, max_level=max_level or charges.max_level(), copies=copies)
    datum = monster_datum(cfg)
    return Preset(datum.name, datum, monster_iota(cfg), monster=cfg)


def monster_toy() -> Preset:
    return monster(ChargeTable(TOY_CHARGES, closed=True, source="toy"), max_level=2)


def monster_real(charges_path: str | None = None, validate_levels: int = 5) -> Preset:
    charges = load_charges(charges_path or None)
    return monster(charges, max_level=min(validate_levels, charges.max_level()))
