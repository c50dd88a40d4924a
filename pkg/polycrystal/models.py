from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

# Plain ints for small presets, (level, copy) pairs for the Monster family.
IndexId = Hashable


def index_sort_key(index: IndexId) -> tuple:
    if isinstance(index, tuple):
        return (0,) + tuple(index)
    if isinstance(index, int):
        return (0, index)
    return (1, str(index))


def format_index(index: IndexId) -> str:
    if isinstance(index, tuple):
        level, copy = index
        if level == -1:
            return "-1"
        return f"{level}_{copy}"
    return str(index)


def _signed_terms(terms: list[tuple[int, str]]) -> str:
    if not terms:
        return "0"
    parts: list[str] = []
    for pos, (coeff, name) in enumerate(terms):
        body = name if abs(coeff) == 1 else f"{abs(coeff)}·{name}"
        if pos == 0:
            parts.append(body if coeff > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if coeff > 0 else f"- {body}")
    return " ".join(parts)


@dataclass(frozen=True)
class Weight:
    """Sparse integer combination of simple roots."""

    coeffs: tuple[tuple[IndexId, int], ...] = ()

    @classmethod
    def from_dict(cls, coeffs: Mapping[IndexId, int]) -> "Weight":
        items = [(i, int(c)) for i, c in coeffs.items() if int(c) != 0]
        return cls(tuple(sorted(items, key=lambda item: index_sort_key(item[0]))))

    @classmethod
    def simple_root(cls, index: IndexId, multiple: int = 1) -> "Weight":
        return cls.from_dict({index: multiple})

    def as_dict(self) -> dict[IndexId, int]:
        return dict(self.coeffs)

    def coeff(self, index: IndexId) -> int:
        for i, c in self.coeffs:
            if i == index:
                return c
        return 0

    def __add__(self, other: "Weight") -> "Weight":
        merged = self.as_dict()
        for i, c in other.coeffs:
            merged[i] = merged.get(i, 0) + c
        return Weight.from_dict(merged)

    def __neg__(self) -> "Weight":
        return Weight(tuple((i, -c) for i, c in self.coeffs))

    def __sub__(self, other: "Weight") -> "Weight":
        return self + (-other)

    def height(self) -> int:
        return -sum(c for _, c in self.coeffs)

    def collapse(self, key) -> "Weight":
        merged: dict[IndexId, int] = {}
        for i, c in self.coeffs:
            k = key(i)
            merged[k] = merged.get(k, 0) + c
        return Weight.from_dict(merged)

    def __str__(self) -> str:
        terms = [(c, f"α_{format_index(i)}") for i, c in self.coeffs]
        return _signed_terms(terms)


@dataclass(frozen=True)
class PathVector:
    """Finite-support nonnegative sequence (..., x_2, x_1); position 1 is rightmost."""

    entries: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        for k, v in self.entries:
            if k < 1:
                raise ValueError(f"positions start at 1, got {k}")
            if v < 1:
                raise ValueError(f"stored entries must be positive, got x_{k}={v}")

    @classmethod
    def from_dict(cls, entries: Mapping[int, int]) -> "PathVector":
        for k, v in entries.items():
            if int(v) < 0:
                raise ValueError(f"negative entry x_{k}={v}")
        return cls(tuple(sorted((int(k), int(v)) for k, v in entries.items() if int(v) != 0)))

    @classmethod
    def from_list(cls, values: Iterable[int]) -> "PathVector":
        """Little-endian: the first value is x_1."""
        return cls.from_dict({k: v for k, v in enumerate(values, start=1)})

    @classmethod
    def parse(cls, text: str) -> "PathVector":
        """Parse the text form "[x_N,...,x_1]"."""
        raw = str(text or "").strip()
        if not (raw.startswith("[") and raw.endswith("]")):
            raise ValueError(f"path vector must look like [x_N,...,x_1], got {text!r}")
        body = raw[1:-1].strip()
        if not body:
            return cls()
        values = [int(v.strip()) for v in body.split(",")]
        return cls.from_list(reversed(values))

    @classmethod
    def zero(cls) -> "PathVector":
        return cls()

    def __getitem__(self, k: int) -> int:
        for pos, v in self.entries:
            if pos == k:
                return v
        return 0

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)

    def support(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.entries)

    def max_position(self) -> int:
        return self.entries[-1][0] if self.entries else 0

    def degree(self) -> int:
        return sum(v for _, v in self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def bump(self, k: int, delta: int) -> "PathVector":
        values = self.as_dict()
        values[k] = values.get(k, 0) + delta
        return PathVector.from_dict(values)

    def to_list(self, length: int | None = None) -> list[int]:
        size = self.max_position() if length is None else length
        values = self.as_dict()
        return [values.get(k, 0) for k in range(1, size + 1)]

    def sort_key(self) -> tuple:
        return (self.degree(), tuple(reversed(self.to_list())))

    def __str__(self) -> str:
        return "[" + ",".join(str(v) for v in reversed(self.to_list())) + "]"


@dataclass(frozen=True)
class LinearForm:
    """Exact integer linear functional psi(x) = sum psi_k x_k with finite support."""

    coeffs: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, int]) -> "LinearForm":
        return cls(tuple(sorted((int(k), int(c)) for k, c in coeffs.items() if int(c) != 0)))

    @classmethod
    def coordinate(cls, k: int) -> "LinearForm":
        return cls(((k, 1),))

    def __getitem__(self, k: int) -> int:
        for pos, c in self.coeffs:
            if pos == k:
                return c
        return 0

    def as_dict(self) -> dict[int, int]:
        return dict(self.coeffs)

    def support(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.coeffs)

    def max_position(self) -> int:
        return self.coeffs[-1][0] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_nonnegative(self) -> bool:
        return all(c > 0 for _, c in self.coeffs)

    def __add__(self, other: "LinearForm") -> "LinearForm":
        merged = self.as_dict()
        for k, c in other.coeffs:
            merged[k] = merged.get(k, 0) + c
        return LinearForm.from_dict(merged)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + other.scaled(-1)

    def scaled(self, factor: int) -> "LinearForm":
        if factor == 0:
            return LinearForm()
        return LinearForm(tuple((k, c * factor) for k, c in self.coeffs))

    def evaluate(self, x: PathVector | Mapping[int, int]) -> int:
        values = x if isinstance(x, Mapping) else x.as_dict()
        return sum(c * values.get(k, 0) for k, c in self.coeffs)

    def __str__(self) -> str:
        return "ψ = " + _signed_terms([(c, f"x_{k}") for k, c in self.coeffs])
