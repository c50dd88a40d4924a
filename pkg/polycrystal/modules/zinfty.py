from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence
import logging

from polycrystal.models import IndexId, PathVector, Weight
from polycrystal.modules.cartan_datum import BorcherdsCartanDatum, pairing
from polycrystal.modules.crystal_core import CrystalOps, ExtInt
from polycrystal.modules.iota_seq import IotaSequence

logger = logging.getLogger(__name__)


@dataclass
class SequenceCrystal:
    """Kashiwara operators on path vectors for a fixed datum and index sequence.

    ``e_tilde`` returns ``None`` for the null element; the zero vector is ``PathVector()``.
    """

    datum: BorcherdsCartanDatum
    iota: IotaSequence
    _scans: dict[tuple[PathVector, IndexId], tuple[int, int, int]] = field(default_factory=dict, repr=False)

    def sigma_k(self, x: PathVector, k: int) -> int:
        i = self.iota.index_at(k)
        total = x[k] if self.datum.is_real(i) else 0
        for j, v in x.entries:
            if j > k:
                total += self.datum.entry(i, self.iota.index_at(j)) * v
        return total

    def _scan(self, x: PathVector, i: IndexId) -> tuple[int, int, int]:
        key = (x, i)
        hit = self._scans.get(key)
        if hit is not None:
            return hit
        best: int | None = None
        nf = ne = 0
        for k in self.iota.occurrences(i, x.max_position()):
            value = self.sigma_k(x, k)
            if best is None or value > best:
                best, nf, ne = value, k, k
            elif value == best:
                ne = k
        if not self.datum.is_real(i):
            ne = nf
        result = (best or 0, nf, ne)
        if len(self._scans) > 200_000:
            self._scans.clear()
        self._scans[key] = result
        return result

    def sigma_max(self, x: PathVector, i: IndexId) -> int:
        return self._scan(x, i)[0]

    def nf(self, x: PathVector, i: IndexId) -> int:
        return self._scan(x, i)[1]

    def ne(self, x: PathVector, i: IndexId) -> int:
        return self._scan(x, i)[2]

    def f_tilde(self, x: PathVector, i: IndexId) -> PathVector:
        return x.bump(self.nf(x, i), 1)

    def e_tilde(self, x: PathVector, i: IndexId) -> PathVector | None:
        best, _, k = self._scan(x, i)
        x_k = x[k]
        if self.datum.is_real(i):
            if best > 0 and x_k >= 1:
                return x.bump(k, -1)
            return None
        back = self.iota.kminus(k)
        if back == 0:
            return x.bump(k, -1) if x_k >= 1 else None
        if x_k > 1:
            return x.bump(k, -1)
        if x_k == 1:
            between = sum(
                self.datum.entry(i, self.iota.index_at(j)) * v for j, v in x.entries if back < j < k
            )
            if between < 0:
                return x.bump(k, -1)
        return None

    def wt(self, x: PathVector) -> Weight:
        merged: dict[IndexId, int] = {}
        for k, v in x.entries:
            i = self.iota.index_at(k)
            merged[i] = merged.get(i, 0) - v
        return Weight.from_dict(merged)

    def eps(self, x: PathVector, i: IndexId) -> int:
        if not self.datum.is_real(i):
            return 0
        return self.sigma_max(x, i)

    def phi(self, x: PathVector, i: IndexId) -> int:
        return pairing(self.datum, i, self.wt(x)) + self.eps(x, i)

    def string_length(self, x: PathVector, i: IndexId) -> int:
        """Number of times e_tilde(., i) can be applied before hitting null."""
        steps = 0
        current = self.e_tilde(x, i)
        while current is not None:
            steps += 1
            current = self.e_tilde(current, i)
        return steps

    def apply_word(self, x: PathVector, word: Iterable[IndexId]) -> PathVector:
        """Apply f_tilde for each index of ``word``, first entry first."""
        for i in word:
            x = self.f_tilde(x, i)
        return x

    def raise_to_zero(self, x: PathVector, order: Sequence[IndexId] | None = None) -> list[IndexId] | None:
        """Greedy e_tilde path down to the zero vector; ``None`` when every e_tilde is null."""
        word: list[IndexId] = []
        while not x.is_zero():
            candidates = order if order is not None else self.iota.indices_within(x.max_position())
            for i in candidates:
                lowered = self.e_tilde(x, i)
                if lowered is not None:
                    word.append(i)
                    x = lowered
                    break
            else:
                logger.debug("raise_to_zero stuck at %s", x)
                return None
        return word

    def ops(self) -> CrystalOps:
        return CrystalOps(
            wt=self.wt,
            eps=lambda x, i: ExtInt(self.eps(x, i)),
            phi=lambda x, i: ExtInt(self.phi(x, i)),
            e=self.e_tilde,
            f=self.f_tilde,
            is_real=self.datum.is_real,
            a_ii=lambda i: self.datum.entry(i, i),
            pair=lambda i, w: pairing(self.datum, i, w),
        )
