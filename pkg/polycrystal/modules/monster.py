from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence
import logging

import pandas as pd

from polycrystal.models import IndexId, PathVector
from polycrystal.modules.cartan_datum import IMAGINARY, REAL, BorcherdsCartanDatum
from polycrystal.modules.iota_seq import MONSTER_REAL, IotaError, IotaSequence
from polycrystal.modules.polyhedral import IN, OUT, PolyhedralRealization, Verdict

logger = logging.getLogger(__name__)

DEFAULT_CHARGES_PATH = Path(__file__).resolve().parent.parent / "data" / "monster_charges.txt"
CHECK_COLUMNS = ["vector", "closed_form", "single_real", "agree"]


class ChargeTableError(ValueError):
    pass


@dataclass(frozen=True)
class ChargeTable:
    """Multiplicities c(1), ..., c(L) of the imaginary levels; c(-1) = 1 is implicit.

    A closed table declares c(level) = 0 above L, which keeps the block sequence
    infinite with finitely many indices. An open table only knows its listed levels.
    """

    values: tuple[int, ...]
    closed: bool = False
    source: str = "inline"

    def __post_init__(self) -> None:
        if not self.values:
            raise ChargeTableError("a charge table needs at least level 1")
        for level, value in enumerate(self.values, start=1):
            if value < 1:
                raise ChargeTableError(f"charge of level {level} must be positive, got {value}")

    def c(self, level: int) -> int:
        if level == -1:
            return 1
        if level < 1:
            raise ChargeTableError(f"no level {level}")
        if level <= len(self.values):
            return self.values[level - 1]
        if self.closed:
            return 0
        raise ChargeTableError(f"charge of level {level} is not known (supply it with a charge file)")

    def max_level(self) -> int:
        return len(self.values)

    def sigma(self, n: int) -> int:
        return sum(self.c(level) for level in range(1, n + 1))

    def truncated(self, max_level: int) -> "ChargeTable":
        if max_level < 1:
            raise ChargeTableError("max_level must be >= 1")
        return ChargeTable(self.values[:max_level], closed=True, source=f"{self.source}[:{max_level}]")


@dataclass(frozen=True)
class MonsterConfig:
    charges: ChargeTable
    max_level: int = 2
    copies: int = 3

    def __post_init__(self) -> None:
        if self.max_level < 1:
            raise ChargeTableError("max_level must be >= 1")

    def effective_charges(self) -> ChargeTable:
        if self.max_level < self.charges.max_level():
            return self.charges.truncated(self.max_level)
        return self.charges


def _parse_charge_frame(frame: pd.DataFrame, origin: str) -> dict[int, int]:
    parsed: dict[int, int] = {}
    for row in frame.itertuples(index=False):
        try:
            level, value = int(row.level), int(row.charge)
        except (TypeError, ValueError):
            raise ChargeTableError(f"{origin}: malformed line {tuple(row)}") from None
        if level in parsed:
            raise ChargeTableError(f"{origin}: duplicate level {level}")
        if level < 1:
            raise ChargeTableError(f"{origin}: level must be >= 1, got {level}")
        if value < 1:
            raise ChargeTableError(f"{origin}: charge of level {level} must be positive, got {value}")
        parsed[level] = value
    return parsed


def _read_charge_file(path: Path) -> dict[int, int]:
    try:
        frame = pd.read_csv(path, sep=r"\s+", comment="#", header=None, index_col=False, dtype=str)
    except pd.errors.EmptyDataError:
        return {}
    except pd.errors.ParserError as exc:
        raise ChargeTableError(f"{path}: {exc}") from exc
    if frame.shape[1] != 2:
        raise ChargeTableError(f"{path}: expected 2 fields per line, found {frame.shape[1]}")
    frame.columns = ["level", "charge"]
    if frame.isna().any().any():
        raise ChargeTableError(f"{path}: every line needs '<level> <multiplicity>'")
    return _parse_charge_frame(frame, str(path))


def _table_from_levels(levels: Mapping[int, int], closed: bool, source: str) -> ChargeTable:
    top = max(levels) if levels else 0
    missing = [level for level in range(1, top + 1) if level not in levels]
    if missing:
        raise ChargeTableError(f"{source}: levels must be contiguous from 1, missing {missing}")
    return ChargeTable(tuple(levels[level] for level in range(1, top + 1)), closed=closed, source=source)


def load_charges(path: str | Path | None = None, closed: bool = False) -> ChargeTable:
    """Read "<level> <multiplicity>" lines and merge them over the embedded defaults."""
    levels = _read_charge_file(DEFAULT_CHARGES_PATH)
    source = "embedded"
    if path:
        target = Path(path)
        if not target.exists():
            raise ChargeTableError(f"charge file not found: {target}")
        levels.update(_read_charge_file(target))
        source = str(target)
    table = _table_from_levels(levels, closed, source)
    logger.info("charge table %s: %d levels, closed=%s", source, table.max_level(), closed)
    return table


def load_charge_spec(spec: Any, base_dir: Path | None = None, closed: bool | None = None) -> ChargeTable:
    """Charges from a JSON datum field: absent (embedded), a file path, or inline values.

    Inline values default to a closed table, files to an open one.
    """
    if spec is None:
        return load_charges(None, closed=bool(closed))
    if isinstance(spec, str):
        target = Path(spec)
        if base_dir is not None and not target.is_absolute():
            target = base_dir / target
        return load_charges(target, closed=bool(closed))
    if isinstance(spec, Mapping):
        levels = {int(k): int(v) for k, v in spec.items()}
    elif isinstance(spec, Sequence):
        levels = {level: int(v) for level, v in enumerate(spec, start=1)}
    else:
        raise ChargeTableError(f"cannot read charges from {type(spec).__name__}")
    return _table_from_levels(levels, True if closed is None else bool(closed), "inline")


def b_of_n(n: int, charges: ChargeTable) -> int:
    """b(n) = n c(1) + (n-1) c(2) + ... + c(n) + n + 1; b(0) = 1."""
    if n < 0:
        raise ChargeTableError(f"n must be >= 0, got {n}")
    return sum((n - level + 1) * charges.c(level) for level in range(1, n + 1)) + n + 1


def sigma_sum(n: int, charges: ChargeTable) -> int:
    return charges.sigma(n)


def _level_of(index: IndexId) -> int:
    return index[0]


def monster_datum(cfg: MonsterConfig) -> BorcherdsCartanDatum:
    """a_pq = -(i + j) for p a copy of level i and q a copy of level j; -1 is the only real index."""
    charges = cfg.effective_charges()
    sample: list[IndexId] = [MONSTER_REAL]
    for level in range(1, cfg.max_level + 1):
        for copy in range(1, min(charges.c(level), cfg.copies) + 1):
            sample.append((level, copy))

    def entry(p: IndexId, q: IndexId) -> int:
        return -(_level_of(p) + _level_of(q))

    def classify(p: IndexId) -> str:
        return REAL if p == MONSTER_REAL else IMAGINARY

    def contains(p: IndexId) -> bool:
        if p == MONSTER_REAL:
            return True
        if not (isinstance(p, tuple) and len(p) == 2):
            return False
        level, copy = p
        try:
            return level >= 1 and 1 <= copy <= charges.c(level)
        except ChargeTableError:
            return False

    return BorcherdsCartanDatum(
        name=f"monster[{charges.source}]",
        indices=tuple(sample),
        entry_fn=entry,
        classify_fn=classify,
        contains_fn=contains,
        family="monster",
        charges=charges,
    )


def monster_iota(cfg: MonsterConfig) -> IotaSequence:
    return IotaSequence.monster(cfg.effective_charges())


def _block_value(x: PathVector, iota: IotaSequence, n: int) -> int:
    # sum_{k=1}^n k (x_{b(n)+sigma(k)+1} + ... + x_{b(n)+sigma(k+1)}) - x_{b(n+1)}
    start, stop = iota.block_end(n), iota.block_end(n + 1)
    total = 0
    for pos, v in x.entries:
        if start < pos < stop:
            total += (_level_of(iota.index_at(pos)) - 1) * v
        elif pos == stop:
            total -= v
    return total


def monster_verdict(x: PathVector, cfg: MonsterConfig) -> Verdict:
    iota = monster_iota(cfg)
    charges = cfg.effective_charges()
    top = x.max_position()
    try:
        first_real = charges.c(1) + 2
        if x[first_real]:
            return Verdict(OUT, "first-block", f"x_{first_real} = {x[first_real]} must vanish", top)
        n = 1
        while iota.block_end(n) < top:
            value = _block_value(x, iota, n)
            if value < 0:
                return Verdict(OUT, "block-slack", f"block {n} value {value}", top)
            n += 1
        for k, _ in x.entries:
            index = iota.index_at(k)
            if index == MONSTER_REAL:
                continue
            back = iota.kminus(k)
            if back == 0:
                continue
            total = 0
            imaginary_zero = True
            for j, v in x.entries:
                if back < j < k:
                    other = iota.index_at(j)
                    term = -(_level_of(index) + _level_of(other)) * v
                    total += term
                    if other != MONSTER_REAL and term:
                        imaginary_zero = False
            if total >= 0:
                return Verdict(OUT, "imaginary-sum", f"range sum {total} at k={k}", top)
            if imaginary_zero:
                m = 1
                found = False
                while iota.block_end(m) < k:
                    if iota.block_end(m) > back and _block_value(x, iota, m) > 0:
                        found = True
                        break
                    m += 1
                if not found:
                    return Verdict(OUT, "block-slack", f"no block between {back} and {k} has strict slack", top)
    except (IotaError, ChargeTableError) as exc:
        raise ChargeTableError(f"{x} reaches beyond the configured levels: {exc}") from exc
    return Verdict(IN, window=top)


def monster_member(x: PathVector, cfg: MonsterConfig) -> bool:
    return monster_verdict(x, cfg).is_member


def monster_theta_check(vectors: Sequence[PathVector], cfg: MonsterConfig) -> pd.DataFrame:
    """Compare the block closed form with the single-real test on the same datum."""
    realization = PolyhedralRealization(monster_datum(cfg), monster_iota(cfg))
    rows = []
    for x in vectors:
        closed_form = monster_member(x, cfg)
        single_real = realization.gamma_member_single_real(x)
        rows.append({"vector": str(x), "closed_form": closed_form, "single_real": single_real, "agree": closed_form == single_real})
    frame = pd.DataFrame(rows, columns=CHECK_COLUMNS)
    if not frame.empty and not frame["agree"].all():
        logger.warning("block closed form disagrees with the single-real test on %d vectors", int((~frame["agree"]).sum()))
    return frame
