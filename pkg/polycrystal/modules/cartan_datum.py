from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence
import json
import logging

import pandas as pd

from polycrystal.models import IndexId, Weight, format_index, index_sort_key

logger = logging.getLogger(__name__)

REAL = "real"
IMAGINARY = "imaginary"
REPORT_COLUMNS = ["axiom", "i", "j", "detail"]


class DatumError(ValueError):
    pass


@dataclass(frozen=True)
class BorcherdsCartanDatum:
    """Borcherds-Cartan data: an index set, the matrix a_ij and the real/imaginary split.

    Explicit data keep every index in ``indices``. Generated families (the Monster)
    keep only a validation prefix there and answer ``entry``/``classify`` through
    closures; ``contains`` decides membership for the whole family.
    """

    name: str
    indices: tuple[IndexId, ...]
    entry_fn: Callable[[IndexId, IndexId], int] = field(repr=False, compare=False)
    classify_fn: Callable[[IndexId], str] = field(repr=False, compare=False)
    contains_fn: Callable[[IndexId], bool] | None = field(default=None, repr=False, compare=False)
    symmetrizer: Mapping[IndexId, int] | None = field(default=None, repr=False, compare=False)
    family: str | None = None
    charges: Any = field(default=None, repr=False, compare=False)

    @classmethod
    def from_matrix(
        cls,
        indices: Sequence[IndexId],
        matrix: Sequence[Sequence[int]],
        classes: Sequence[str] | None = None,
        symmetrizer: Sequence[int] | None = None,
        name: str = "custom",
    ) -> "BorcherdsCartanDatum":
        ids = tuple(indices)
        if len(set(ids)) != len(ids):
            raise DatumError("index ids must be distinct")
        if len(matrix) != len(ids) or any(len(row) != len(ids) for row in matrix):
            raise DatumError(f"matrix must be {len(ids)}x{len(ids)}")
        table = {(i, j): matrix[r][c] for r, i in enumerate(ids) for c, j in enumerate(ids)}
        if classes is None:
            class_map = {i: (REAL if table[(i, i)] == 2 else IMAGINARY) for i in ids}
        else:
            if len(classes) != len(ids):
                raise DatumError("one class per index is required")
            class_map = {}
            for i, label in zip(ids, classes):
                label = str(label).strip().lower()
                if label not in (REAL, IMAGINARY):
                    raise DatumError(f"class of {format_index(i)} must be 'real' or 'imaginary', got {label!r}")
                class_map[i] = label
        sym = None
        if symmetrizer is not None:
            if len(symmetrizer) != len(ids):
                raise DatumError("one symmetrizer entry per index is required")
            sym = dict(zip(ids, symmetrizer))

        def entry(i: IndexId, j: IndexId) -> int:
            try:
                return table[(i, j)]
            except KeyError:
                raise DatumError(f"unknown index pair ({format_index(i)}, {format_index(j)})") from None

        def classify(i: IndexId) -> str:
            try:
                return class_map[i]
            except KeyError:
                raise DatumError(f"unknown index {format_index(i)}") from None

        return cls(
            name=name,
            indices=ids,
            entry_fn=entry,
            classify_fn=classify,
            contains_fn=lambda i: i in class_map,
            symmetrizer=sym,
        )

    def entry(self, i: IndexId, j: IndexId) -> int:
        return self.entry_fn(i, j)

    def classify(self, i: IndexId) -> str:
        return self.classify_fn(i)

    def is_real(self, i: IndexId) -> bool:
        return self.classify_fn(i) == REAL

    def contains(self, i: IndexId) -> bool:
        if self.contains_fn is None:
            return i in self.indices
        return self.contains_fn(i)

    def real_indices(self) -> list[IndexId]:
        return [i for i in self.indices if self.is_real(i)]

    def is_finite(self) -> bool:
        return self.family is None


def validate_datum(d: BorcherdsCartanDatum, sample: Sequence[IndexId] | None = None) -> pd.DataFrame:
    """Return one row per violated axiom instance; an empty frame means the datum is valid.

    Generated families are checked on ``sample`` (default: the stored prefix).
    """
    ids = list(sample) if sample is not None else list(d.indices)
    rows: list[dict[str, str]] = []

    def flag(axiom: str, i: IndexId, j: IndexId | None, detail: str) -> None:
        rows.append(
            {
                "axiom": axiom,
                "i": format_index(i),
                "j": "" if j is None else format_index(j),
                "detail": detail,
            }
        )

    for i in ids:
        a_ii = d.entry(i, i)
        if not isinstance(a_ii, int):
            flag("integer entries", i, i, f"a_ii={a_ii!r}")
            continue
        if d.is_real(i):
            if a_ii != 2:
                flag("real diagonal is 2", i, i, f"a_ii={a_ii}")
        else:
            if a_ii > 0:
                flag("imaginary diagonal is nonpositive", i, i, f"a_ii={a_ii}")
            if a_ii % 2 != 0:
                flag("imaginary diagonal is even", i, i, f"a_ii={a_ii}")

    for pos, i in enumerate(ids):
        for j in ids[pos + 1 :]:
            a_ij = d.entry(i, j)
            a_ji = d.entry(j, i)
            if not isinstance(a_ij, int) or not isinstance(a_ji, int):
                flag("integer entries", i, j, f"a_ij={a_ij!r}, a_ji={a_ji!r}")
                continue
            if a_ij > 0:
                flag("off-diagonal is nonpositive", i, j, f"a_ij={a_ij}")
            if a_ji > 0:
                flag("off-diagonal is nonpositive", j, i, f"a_ji={a_ji}")
            if (a_ij == 0) != (a_ji == 0):
                flag("a_ij=0 iff a_ji=0", i, j, f"a_ij={a_ij}, a_ji={a_ji}")

    if d.symmetrizer is not None:
        for i in ids:
            s_i = d.symmetrizer.get(i)
            if s_i is None or s_i <= 0:
                flag("symmetrizer is positive", i, None, f"s_i={s_i}")
        for pos, i in enumerate(ids):
            for j in ids[pos + 1 :]:
                s_i = d.symmetrizer.get(i, 0)
                s_j = d.symmetrizer.get(j, 0)
                if s_i * d.entry(i, j) != s_j * d.entry(j, i):
                    flag("symmetrizable", i, j, f"s_i*a_ij={s_i * d.entry(i, j)} != s_j*a_ji={s_j * d.entry(j, i)}")

    if rows:
        logger.info("datum %s: %d axiom violations", d.name, len(rows))
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)


def pairing(d: BorcherdsCartanDatum, i: IndexId, w: Weight) -> int:
    """<h_i, w> = sum_j w_j a_ij."""
    if not d.contains(i):
        raise DatumError(f"unknown index {format_index(i)}")
    total = 0
    for j, c in w.coeffs:
        if not d.contains(j):
            raise DatumError(f"weight mentions unknown index {format_index(j)}")
        total += c * d.entry(i, j)
    return total


def _parse_index(raw: Any) -> IndexId:
    if isinstance(raw, list):
        return tuple(int(v) for v in raw)
    if isinstance(raw, str) and raw.lstrip("-").isdigit():
        return int(raw)
    return raw


def datum_from_json(payload: Mapping[str, Any], base_dir: Path | None = None) -> BorcherdsCartanDatum:
    """Build a datum from the JSON descriptor; the monster family is delegated to the monster module."""
    if "family" in payload:
        family = str(payload["family"]).strip().lower()
        if family != "monster":
            raise DatumError(f"unknown datum family {family!r}")
        from polycrystal.modules.monster import MonsterConfig, load_charge_spec, monster_datum

        charges = load_charge_spec(payload.get("charges"), base_dir=base_dir, closed=payload.get("closed"))
        max_level = int(payload.get("max_level", charges.max_level()))
        return monster_datum(MonsterConfig(charges=charges, max_level=max_level))

    entries = payload.get("indices")
    matrix = payload.get("matrix")
    if not isinstance(entries, list) or not isinstance(matrix, list):
        raise DatumError("datum JSON needs 'indices' and 'matrix' lists")
    ids = [_parse_index(item.get("id") if isinstance(item, Mapping) else item) for item in entries]
    classes = None
    if all(isinstance(item, Mapping) and "class" in item for item in entries):
        classes = [str(item["class"]) for item in entries]
    try:
        rows = [[int(v) for v in row] for row in matrix]
    except (TypeError, ValueError) as exc:
        raise DatumError(f"matrix entries must be integers: {exc}") from exc
    return BorcherdsCartanDatum.from_matrix(
        ids,
        rows,
        classes=classes,
        symmetrizer=payload.get("symmetrizer"),
        name=str(payload.get("name", "custom")),
    )


def load_datum(path: str | Path) -> BorcherdsCartanDatum:
    target = Path(path)
    with target.open("r", encoding="utf-8") as f:
        payload = json.load(f)
    return datum_from_json(payload, base_dir=target.parent)


def sorted_indices(indices) -> list[IndexId]:
    return sorted(indices, key=index_sort_key)
