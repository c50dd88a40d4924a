from __future__ import annotations

from bisect import bisect_left
from typing import Any, Iterable, Iterator, Mapping, Protocol, Sequence
import logging

import pandas as pd

from polycrystal.models import IndexId, format_index

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["check", "position", "index", "detail"]
MONSTER_REAL = (-1, 1)


class IotaError(ValueError):
    pass


class ChargeSource(Protocol):
    closed: bool

    def c(self, level: int) -> int: ...

    def max_level(self) -> int: ...


class IotaSequence:
    """The index sequence (..., i_k, ..., i_2, i_1) with 1-based positions, rightmost first.

    Two layouts exist: a finite prefix followed by a repeating period, and the
    Monster block layout where block n lists levels 1..n (every copy) and then -1.
    """

    def __init__(
        self,
        kind: str,
        prefix: Sequence[IndexId] = (),
        period: Sequence[IndexId] = (),
        charges: ChargeSource | None = None,
    ):
        self.kind = kind
        self.prefix = tuple(prefix)
        self.period = tuple(period)
        self.charges = charges
        self._sigma: list[int] = [0]
        self._bounds: list[int] = [1]
        if kind == "periodic":
            if not self.period:
                raise IotaError("the period word must be nonempty")
        elif kind == "monster":
            if charges is None:
                raise IotaError("the monster layout needs a charge table")
            for level in range(1, charges.max_level() + 1):
                self._sigma.append(self._sigma[-1] + charges.c(level))
                self._bounds.append(self._bounds[-1] + self._sigma[-1] + 1)
        else:
            raise IotaError(f"unknown sequence kind {kind!r}")

    @classmethod
    def periodic(
        cls,
        prefix: Sequence[IndexId],
        period: Sequence[IndexId],
        indices: Iterable[IndexId] | None = None,
    ) -> "IotaSequence":
        seq = cls("periodic", prefix=prefix, period=period)
        if indices is not None:
            known = set(indices)
            stray = [i for i in seq.prefix + seq.period if i not in known]
            if stray:
                raise IotaError(f"sequence uses indices outside the datum: {sorted(map(format_index, stray))}")
            missing = [i for i in known if i not in set(seq.period)]
            if missing:
                raise IotaError(
                    "every datum index must recur in the period word; missing "
                    + ", ".join(sorted(map(format_index, missing)))
                )
        return seq

    @classmethod
    def monster(cls, charges: ChargeSource) -> "IotaSequence":
        return cls("monster", charges=charges)

    def describe(self) -> dict[str, Any]:
        if self.kind == "periodic":
            return {"prefix": list(self.prefix), "period": list(self.period)}
        return {"monster": True}

    # Monster block bookkeeping: block n occupies (b(n-1), b(n)] with b(0) = 1.

    def _levels(self) -> int:
        return len(self._sigma) - 1

    def sigma(self, n: int) -> int:
        if n <= self._levels():
            return self._sigma[n]
        if self.charges is not None and self.charges.closed:
            return self._sigma[-1]
        raise IotaError(f"charge of level {n} is not known")

    def block_end(self, n: int) -> int:
        if n <= self._levels():
            return self._bounds[n]
        if self.charges is not None and self.charges.closed:
            top = self._levels()
            return self._bounds[top] + (n - top) * (self._sigma[top] + 1)
        raise IotaError(f"charge of level {n} is not known")

    def _locate(self, k: int) -> tuple[int, int]:
        if k <= self._bounds[-1]:
            n = bisect_left(self._bounds, k)
        elif self.charges is not None and self.charges.closed:
            top = self._levels()
            step = self._sigma[top] + 1
            n = top + -(-(k - self._bounds[top]) // step)
        else:
            raise IotaError(f"position {k} lies beyond the known charge levels")
        return n, k - self.block_end(n - 1)

    def _level_of_offset(self, n: int, r: int) -> tuple[int, int]:
        level = bisect_left(self._sigma, r, lo=1, hi=min(n, self._levels()) + 1)
        return level, r - self._sigma[level - 1]

    def index_at(self, k: int) -> IndexId:
        if k < 1:
            raise IotaError(f"positions start at 1, got {k}")
        if self.kind == "periodic":
            if k <= len(self.prefix):
                return self.prefix[k - 1]
            return self.period[(k - len(self.prefix) - 1) % len(self.period)]
        if k == 1:
            return MONSTER_REAL
        n, r = self._locate(k)
        if r == self.sigma(n) + 1:
            return MONSTER_REAL
        return self._level_of_offset(n, r)

    def kplus(self, k: int) -> int:
        if self.kind == "periodic":
            target = self.index_at(k)
            j = k + 1
            limit = k + len(self.prefix) + len(self.period)
            while j <= limit:
                if self.index_at(j) == target:
                    return j
                j += 1
            raise IotaError(f"index {format_index(target)} does not recur after position {k}")
        if k == 1:
            return self.block_end(1)
        n, r = self._locate(k)
        if r == self.sigma(n) + 1:
            return self.block_end(n + 1)
        return k + self.sigma(n) + 1

    def kminus(self, k: int) -> int:
        if self.kind == "periodic":
            target = self.index_at(k)
            for j in range(k - 1, 0, -1):
                if self.index_at(j) == target:
                    return j
            return 0
        if k == 1:
            return 0
        n, r = self._locate(k)
        if r == self.sigma(n) + 1:
            return self.block_end(n - 1)
        level, _ = self._level_of_offset(n, r)
        if level <= n - 1:
            return k - self.sigma(n - 1) - 1
        return 0

    def first_position(self, index: IndexId) -> int:
        if self.kind == "periodic":
            for k in range(1, len(self.prefix) + len(self.period) + 1):
                if self.index_at(k) == index:
                    return k
            raise IotaError(f"index {format_index(index)} never occurs")
        if index == MONSTER_REAL:
            return 1
        level, copy = index
        if level < 1 or copy < 1 or copy > (self.sigma(level) - self.sigma(level - 1)):
            raise IotaError(f"index {format_index(index)} never occurs")
        return self.block_end(level - 1) + self.sigma(level - 1) + copy

    def occurrences(self, index: IndexId, upto: int) -> Iterator[int]:
        """Positions of ``index`` up to and including the first one beyond ``upto``."""
        k = self.first_position(index)
        while True:
            yield k
            if k > upto:
                return
            k = self.kplus(k)

    def indices_within(self, n: int) -> list[IndexId]:
        seen: dict[IndexId, None] = {}
        for k in range(1, n + 1):
            seen.setdefault(self.index_at(k), None)
        return list(seen)

    def is_first_occurrence(self, k: int) -> bool:
        return self.kminus(k) == 0


def check_prefix_constraints(s: IotaSequence, n: int, bound: int | None = None) -> pd.DataFrame:
    """Adjacency-distinctness on positions 1..n and recurrence of every index seen there.

    Monster sequences recur by construction, so without ``bound`` only the existence of
    a next occurrence is checked for them.
    """
    limit = bound
    if limit is None and s.kind == "periodic":
        limit = max(2 * n, n + 2 * (len(s.prefix) + len(s.period)))
    rows: list[dict[str, Any]] = []
    seen: set[IndexId] = set()
    for k in range(1, n + 1):
        current = s.index_at(k)
        if k < n and s.index_at(k + 1) == current:
            rows.append(
                {
                    "check": "adjacent indices differ",
                    "position": k,
                    "index": format_index(current),
                    "detail": f"i_{k} = i_{k + 1}",
                }
            )
        if current in seen:
            continue
        seen.add(current)
        try:
            nxt = s.kplus(k)
        except IotaError as exc:
            nxt = None
            detail = str(exc)
        else:
            detail = f"next occurrence at {nxt} > {limit}"
        if nxt is None or (limit is not None and nxt > limit):
            rows.append({"check": "index recurs", "position": k, "index": format_index(current), "detail": detail})
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)


def iota_from_json(
    payload: Mapping[str, Any],
    indices: Iterable[IndexId] | None = None,
    charges: ChargeSource | None = None,
) -> IotaSequence:
    if payload.get("monster"):
        if charges is None:
            raise IotaError("a monster sequence needs a monster datum")
        return IotaSequence.monster(charges)

    def parse(raw: Any) -> IndexId:
        if isinstance(raw, list):
            return tuple(int(v) for v in raw)
        return raw

    prefix = [parse(v) for v in payload.get("prefix", [])]
    period = [parse(v) for v in payload.get("period", [])]
    return IotaSequence.periodic(prefix, period, indices=indices)
