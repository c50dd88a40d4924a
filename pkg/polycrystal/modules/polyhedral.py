from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterator
import logging

import pandas as pd

from polycrystal.models import LinearForm, PathVector
from polycrystal.modules.cartan_datum import BorcherdsCartanDatum
from polycrystal.modules.iota_seq import IotaSequence

logger = logging.getLogger(__name__)

IN = "in"
OUT = "out"
UNKNOWN = "unknown"

THETA_COLUMNS = ["form", "support", "max_position"]
POSITIVITY_COLUMNS = ["form", "position", "coefficient"]
STRUCTURE_COLUMNS = ["j", "k", "fact", "result", "holds"]

DEFAULT_CAP = 50_000


class MembershipError(ValueError):
    pass


@dataclass
class ThetaSet:
    """Forms generated inside the position window 1..window."""

    forms: frozenset[LinearForm]
    window: int
    saturated: bool
    generation_cap_hit: bool
    escaped: int = 0
    seeds: tuple[int, ...] = ()
    excluded: int | None = None
    _sorted: list[LinearForm] | None = field(default=None, init=False, repr=False, compare=False)
    # (form, position, coefficient) triples, filled once by PolyhedralRealization.positivity_failures
    _negatives: tuple[tuple[LinearForm, int, int], ...] | None = field(
        default=None, init=False, repr=False, compare=False
    )

    def __len__(self) -> int:
        return len(self.forms)

    def __iter__(self) -> Iterator[LinearForm]:
        return iter(self.sorted_forms())

    def __contains__(self, psi: object) -> bool:
        return psi in self.forms

    def sorted_forms(self) -> list[LinearForm]:
        if self._sorted is None:
            self._sorted = sorted(self.forms, key=lambda psi: (psi.support(), psi.coeffs))
        return self._sorted

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {"form": str(psi), "support": list(psi.support()), "max_position": psi.max_position()}
            for psi in self.sorted_forms()
        ]
        return pd.DataFrame(rows, columns=THETA_COLUMNS)


# clause key -> the inequality it stands for
CLAUSE_LABELS = {
    "imaginary-sum": "imaginary range sum: sum of <h_k, alpha_j> x_j over k- < j < k is < 0 when x_k > 0",
    "real-slack": "real slack: some real p in (k-, k) has S_p x_p > 0",
    "theta-nonnegativity": "form nonnegativity: psi(x) >= 0 for every psi in Theta",
    "cap": "generation cap: Theta stopped growing before saturation",
    "first-block": "first block: the entry at the first real position is 0",
    "block-slack": (
        "block slack: every block value is >= 0, and one inside (k-, k) is > 0"
        " when the imaginary sum has no imaginary term"
    ),
    "rank2-closed-form": "rank 2 closed form: one-imaginary one-real inequalities",
    "rank3-closed-form": "rank 3 closed form: one-imaginary two-real inequalities",
}


@dataclass(frozen=True)
class Verdict:
    status: str
    clause: str = ""
    detail: str = ""
    window: int = 0

    @property
    def is_member(self) -> bool:
        return self.status == IN

    @property
    def label(self) -> str:
        return CLAUSE_LABELS.get(self.clause, "")

    def __str__(self) -> str:
        if self.status == IN:
            return f"in (window {self.window})"
        return f"{self.status}: {self.clause} {self.detail}".strip()


@dataclass
class PolyhedralRealization:
    datum: BorcherdsCartanDatum
    iota: IotaSequence
    cap: int = DEFAULT_CAP
    _betas: dict[int, LinearForm] = field(default_factory=dict, repr=False)
    _thetas: dict[tuple, ThetaSet] = field(default_factory=dict, repr=False)

    def _a(self, k: int, j: int) -> int:
        return self.datum.entry(self.iota.index_at(k), self.iota.index_at(j))

    def beta_form(self, k: int) -> LinearForm:
        if k < 0:
            raise ValueError(f"beta needs k >= 0, got {k}")
        if k == 0:
            return LinearForm()
        cached = self._betas.get(k)
        if cached is not None:
            return cached
        nxt = self.iota.kplus(k)
        coeffs = {j: self._a(k, j) for j in range(k + 1, nxt)}
        if self.datum.is_real(self.iota.index_at(k)):
            coeffs[k] = 1
            coeffs[nxt] = 1
        else:
            coeffs[nxt] = self._a(k, nxt)
        form = LinearForm.from_dict(coeffs)
        self._betas[k] = form
        return form

    def _imaginary_shift(self, k: int) -> LinearForm:
        # x_k + sum_{k<j<k+} a x_j - x_{k+}
        nxt = self.iota.kplus(k)
        coeffs = {j: self._a(k, j) for j in range(k + 1, nxt)}
        coeffs[k] = 1
        coeffs[nxt] = -1
        return LinearForm.from_dict(coeffs)

    def s_k(self, psi: LinearForm, k: int) -> LinearForm:
        if k < 1:
            raise ValueError(f"S_k needs k >= 1, got {k}")
        c = psi[k]
        if c == 0:
            return psi
        if c > 0:
            if self.datum.is_real(self.iota.index_at(k)):
                return psi - self.beta_form(k).scaled(c)
            return psi - self._imaginary_shift(k).scaled(c)
        return psi - self.beta_form(self.iota.kminus(k)).scaled(c)

    def _close(self, seeds: list[int], window: int, cap: int, excluded: int | None) -> ThetaSet:
        if window < 1:
            raise ValueError(f"window must be >= 1, got {window}")
        forms: set[LinearForm] = set()
        queue: deque[LinearForm] = deque()
        for j in seeds:
            psi = LinearForm.coordinate(j)
            forms.add(psi)
            queue.append(psi)
        escaped = 0
        cap_hit = False
        while queue:
            psi = queue.popleft()
            for k in psi.support():
                if k == excluded:
                    continue
                image = self.s_k(psi, k)
                if image.is_zero() or image in forms:
                    continue
                if image.max_position() > window:
                    escaped += 1
                    continue
                if len(forms) >= cap:
                    cap_hit = True
                    break
                forms.add(image)
                queue.append(image)
            if cap_hit:
                break
        if cap_hit:
            logger.warning("theta generation hit the cap of %d forms in window %d", cap, window)
        else:
            logger.info("theta window %d: %d forms, %d escaped", window, len(forms), escaped)
        return ThetaSet(
            forms=frozenset(forms),
            window=window,
            saturated=not cap_hit,
            generation_cap_hit=cap_hit,
            escaped=escaped,
            seeds=tuple(seeds),
            excluded=excluded,
        )

    def generate_theta(self, window: int, cap: int | None = None) -> ThetaSet:
        limit = self.cap if cap is None else cap
        key = ("all", window, limit)
        if key not in self._thetas:
            self._thetas[key] = self._close(list(range(1, window + 1)), window, limit, None)
        return self._thetas[key]

    def generate_theta_excluding(self, s: int, t: int, window: int, cap: int | None = None) -> ThetaSet:
        if not 1 <= s < t:
            raise ValueError(f"need t > s >= 1, got s={s}, t={t}")
        limit = self.cap if cap is None else cap
        key = ("excluding", s, t, window, limit)
        if key not in self._thetas:
            self._thetas[key] = self._close([s], max(window, s), limit, t)
        return self._thetas[key]

    def positivity_failures(self, th: ThetaSet) -> tuple[tuple[LinearForm, int, int], ...]:
        """Negative coefficients at first-occurrence positions, computed once per set."""
        if th._negatives is None:
            th._negatives = tuple(
                (psi, k, c)
                for psi in th.sorted_forms()
                for k, c in psi.coeffs
                if c < 0 and self.iota.is_first_occurrence(k)
            )
            if th._negatives:
                logger.warning(
                    "positivity assumption fails in window %d (%d coefficients)", th.window, len(th._negatives)
                )
        return th._negatives

    def check_positivity(self, th: ThetaSet) -> pd.DataFrame:
        rows = [
            {"form": str(psi), "position": k, "coefficient": c} for psi, k, c in self.positivity_failures(th)
        ]
        return pd.DataFrame(rows, columns=POSITIVITY_COLUMNS)

    def membership_window(self, x: PathVector) -> int:
        top = max(1, x.max_position())
        return max(self.iota.kplus(k) for k in range(1, top + 1))

    def _range_terms(self, x: PathVector, t: int) -> tuple[int, list[tuple[int, int]]]:
        # (t-, t) summands <h_{i_t}, alpha_{i_j}> x_j, nonzero ones only.
        back = self.iota.kminus(t)
        terms = []
        for j, v in x.entries:
            if back < j < t:
                term = self._a(t, j) * v
                if term:
                    terms.append((j, term))
        return back, terms

    def _imaginary_positions(self, x: PathVector) -> Iterator[tuple[int, int, list[tuple[int, int]]]]:
        """Imaginary positions t with x_t != 0 and t- != 0, with their range sum and terms."""
        for t, _ in x.entries:
            if self.datum.is_real(self.iota.index_at(t)):
                continue
            back, terms = self._range_terms(x, t)
            if back == 0:
                continue
            yield t, sum(term for _, term in terms), terms

    def _real_candidates(self, t: int, terms: list[tuple[int, int]]) -> list[int] | None:
        # None when some imaginary summand is nonzero; otherwise the real p with a x_p < 0.
        if any(not self.datum.is_real(self.iota.index_at(j)) for j, _ in terms):
            return None
        return [j for j, term in terms if term < 0]

    def gamma_member_general(self, x: PathVector, window: int | None = None, cap: int | None = None) -> Verdict:
        size = window if window is not None else self.membership_window(x)
        theta = self.generate_theta(size, cap)
        failures = self.positivity_failures(theta)
        if failures:
            psi, k, _ = failures[0]
            raise MembershipError(f"positivity assumption fails in window {size}: {psi} at x_{k}")
        undecided = theta.generation_cap_hit
        values = x.as_dict()
        for t, total, terms in self._imaginary_positions(x):
            if total >= 0:
                return Verdict(OUT, "imaginary-sum", f"range sum {total} at t={t}", size)
            candidates = self._real_candidates(t, terms)
            if candidates is None:
                continue
            found = False
            for p in candidates:
                sub = self.generate_theta_excluding(p, t, size, cap)
                if all(psi.evaluate(values) > 0 for psi in sub.forms):
                    if sub.generation_cap_hit:
                        undecided = True
                    found = True
                    break
            if not found:
                return Verdict(OUT, "real-slack", f"no real p in ({self.iota.kminus(t)}, {t}) has strict slack", size)
        negative = [psi for psi in theta.forms if psi.evaluate(values) < 0]
        if negative:
            psi = min(negative, key=lambda form: (form.support(), form.coeffs))
            return Verdict(OUT, "theta-nonnegativity", f"{psi} is {psi.evaluate(x)}", size)
        if undecided:
            return Verdict(UNKNOWN, "cap", f"generation stopped at {theta.window} before saturation", size)
        return Verdict(IN, window=size)

    def _require_real_count(self, count: int, label: str) -> None:
        found = len(self.datum.real_indices())
        if found != count:
            raise MembershipError(f"{label} needs {count} real indices, datum {self.datum.name} has {found}")

    def gamma_member_all_imaginary(self, x: PathVector) -> bool:
        self._require_real_count(0, "the all-imaginary test")
        return all(total < 0 for _, total, _ in self._imaginary_positions(x))

    def real_slack(self, x: PathVector, j: int) -> int:
        """(S_j x_j)(x) for a real position j."""
        return self.s_k(LinearForm.coordinate(j), j).evaluate(x)

    def single_real_verdict(self, x: PathVector) -> Verdict:
        self._require_real_count(1, "the single-real test")
        top = x.max_position()
        for j in range(1, top + 1):
            if self.datum.is_real(self.iota.index_at(j)):
                slack = self.real_slack(x, j)
                if slack < 0:
                    return Verdict(OUT, "real-slack", f"S_{j}x_{j} = {slack}", top)
        for t, total, terms in self._imaginary_positions(x):
            if total >= 0:
                return Verdict(OUT, "imaginary-sum", f"range sum {total} at t={t}", top)
            candidates = self._real_candidates(t, terms)
            if candidates is not None and not any(self.real_slack(x, p) > 0 for p in candidates):
                return Verdict(OUT, "real-slack", f"no real p in ({self.iota.kminus(t)}, {t}) has S_p x_p > 0", top)
        return Verdict(IN, window=top)

    def gamma_member_single_real(self, x: PathVector) -> bool:
        return self.single_real_verdict(x).is_member

    def single_real_structure_report(self, j: int, window: int | None = None) -> pd.DataFrame:
        """Apply every S_k to S_j x_j for a real position j and sort the outcome into the three known cases."""
        if not self.datum.is_real(self.iota.index_at(j)):
            raise MembershipError(f"position {j} is not real")
        base = self.s_k(LinearForm.coordinate(j), j)
        nxt = self.iota.kplus(j)
        size = window if window is not None else nxt + 1
        rows = []
        for k in range(1, size + 1):
            result = self.s_k(base, k)
            if k == nxt:
                fact, holds = "returns x_j", result == LinearForm.coordinate(j)
            elif j < k < nxt and self._a(k, j) < 0:
                fact, holds = "nonnegative", result.is_nonnegative()
            else:
                fact, holds = "unchanged", result == base
            rows.append({"j": j, "k": k, "fact": fact, "result": str(result), "holds": bool(holds)})
        return pd.DataFrame(rows, columns=STRUCTURE_COLUMNS)


def _entry(x: PathVector, k: int) -> int:
    return x[k] if k >= 1 else 0


def rank2_member(x: PathVector, a: int, b: int, c: int) -> bool:
    """Closed-form image test for indices 1 (imaginary) and 2 (real) with period (1, 2)."""
    top = x.max_position()
    if b == 0 or c == 0:
        return top <= 2
    for k in range(1, top // 2 + 1):
        odd, even = _entry(x, 2 * k + 1), _entry(x, 2 * k + 2)
        if (odd or even) and not c * odd - even > 0:
            return False
        if odd and not _entry(x, 2 * k) > 0:
            return False
    return True


def rank3_member(x: PathVector, a: int, b: int, c: int, d: int, e: int, f: int, g: int, h: int) -> bool:
    """Closed-form image test for imaginary 1, 2 and real 3 with period (1, 2, 3)."""
    top = x.max_position()

    def slack(k: int) -> int:
        return g * _entry(x, 3 * k + 1) + h * _entry(x, 3 * k + 2) - _entry(x, 3 * k + 3)

    for k in range(1, top // 3 + 1):
        if slack(k) < 0:
            return False
        if _entry(x, 3 * k + 1) > 0:
            if not b * _entry(x, 3 * k - 1) + c * _entry(x, 3 * k) > 0:
                return False
            if b * _entry(x, 3 * k - 1) == 0 and not slack(k) > 0:
                return False
        if _entry(x, 3 * k + 2) > 0:
            if not f * _entry(x, 3 * k) + d * _entry(x, 3 * k + 1) > 0:
                return False
            if d * _entry(x, 3 * k + 1) == 0 and not slack(k) > 0:
                return False
    return True

