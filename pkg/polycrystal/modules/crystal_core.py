from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence
import logging

import pandas as pd

from polycrystal.models import IndexId, PathVector, Weight, format_index
from polycrystal.modules.cartan_datum import BorcherdsCartanDatum, pairing

logger = logging.getLogger(__name__)

AXIOM_COLUMNS = ["axiom", "element", "index", "detail"]


@dataclass(frozen=True)
class ExtInt:
    """An integer or minus infinity (``value is None``)."""

    value: int | None = None

    @staticmethod
    def coerce(other: "ExtInt | int") -> "ExtInt":
        return other if isinstance(other, ExtInt) else ExtInt(int(other))

    def is_finite(self) -> bool:
        return self.value is not None

    def _key(self) -> tuple[int, int]:
        return (0, 0) if self.value is None else (1, self.value)

    def __add__(self, other: "ExtInt | int") -> "ExtInt":
        rhs = ExtInt.coerce(other)
        if self.value is None or rhs.value is None:
            return NEG_INF
        return ExtInt(self.value + rhs.value)

    __radd__ = __add__

    def __sub__(self, other: int) -> "ExtInt":
        if isinstance(other, ExtInt):
            if other.value is None:
                raise ValueError("cannot subtract minus infinity")
            other = other.value
        return self + (-other)

    def __lt__(self, other: "ExtInt | int") -> bool:
        return self._key() < ExtInt.coerce(other)._key()

    def __le__(self, other: "ExtInt | int") -> bool:
        return self._key() <= ExtInt.coerce(other)._key()

    def __gt__(self, other: "ExtInt | int") -> bool:
        return self._key() > ExtInt.coerce(other)._key()

    def __ge__(self, other: "ExtInt | int") -> bool:
        return self._key() >= ExtInt.coerce(other)._key()

    def __str__(self) -> str:
        return "-inf" if self.value is None else str(self.value)


NEG_INF = ExtInt(None)


def ext_max(a: ExtInt, b: ExtInt) -> ExtInt:
    return a if a >= b else b


@dataclass(frozen=True)
class ElementaryElem:
    """b_i(-n) of the elementary crystal B_i."""

    i: IndexId
    n: int = 0

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"b_i(-n) needs n >= 0, got {self.n}")

    def __str__(self) -> str:
        return f"b_{format_index(self.i)}(-{self.n})"


@dataclass(frozen=True)
class TensorElem:
    """Flat tensor product b_1 ⊗ ... ⊗ b_m, leftmost factor first."""

    factors: tuple[Any, ...]

    def __post_init__(self) -> None:
        if not self.factors:
            raise ValueError("a tensor element needs at least one factor")

    @classmethod
    def of(cls, *parts: Any) -> "TensorElem":
        flat: list[Any] = []
        for part in parts:
            if isinstance(part, TensorElem):
                flat.extend(part.factors)
            else:
                flat.append(part)
        return cls(tuple(flat))

    def replace(self, pos: int, factor: Any) -> "TensorElem":
        return TensorElem(self.factors[:pos] + (factor,) + self.factors[pos + 1 :])

    def __str__(self) -> str:
        return " ⊗ ".join(str(f) for f in self.factors)


@dataclass(frozen=True)
class CrystalOps:
    """The maps of an abstract crystal, bundled so generic checks can drive any realization."""

    wt: Callable[[Any], Weight]
    eps: Callable[[Any, IndexId], ExtInt]
    phi: Callable[[Any, IndexId], ExtInt]
    e: Callable[[Any, IndexId], Any]
    f: Callable[[Any, IndexId], Any]
    is_real: Callable[[IndexId], bool]
    a_ii: Callable[[IndexId], int]
    pair: Callable[[IndexId, Weight], int]


def elem_wt(b: ElementaryElem) -> Weight:
    return Weight.simple_root(b.i, -b.n)


def elem_eps(d: BorcherdsCartanDatum, b: ElementaryElem, j: IndexId) -> ExtInt:
    if j != b.i:
        return NEG_INF
    return ExtInt(b.n if d.is_real(j) else 0)


def elem_phi(d: BorcherdsCartanDatum, b: ElementaryElem, j: IndexId) -> ExtInt:
    if j != b.i:
        return NEG_INF
    return ExtInt(-b.n if d.is_real(j) else -b.n * d.entry(j, j))


def elem_e(b: ElementaryElem, j: IndexId) -> ElementaryElem | None:
    if j != b.i or b.n == 0:
        return None
    return ElementaryElem(b.i, b.n - 1)


def elem_f(b: ElementaryElem, j: IndexId) -> ElementaryElem | None:
    if j != b.i:
        return None
    return ElementaryElem(b.i, b.n + 1)


def elementary_ops(d: BorcherdsCartanDatum) -> CrystalOps:
    return CrystalOps(
        wt=elem_wt,
        eps=lambda b, i: elem_eps(d, b, i),
        phi=lambda b, i: elem_phi(d, b, i),
        e=elem_e,
        f=elem_f,
        is_real=d.is_real,
        a_ii=lambda i: d.entry(i, i),
        pair=lambda i, w: pairing(d, i, w),
    )


def _prefix_folds(t: TensorElem, i: IndexId, ops: CrystalOps) -> tuple[list[ExtInt], list[ExtInt], list[Weight]]:
    # eps/phi/wt of b_1 ⊗ ... ⊗ b_s for every s, by the binary rule folded from the left.
    eps_acc: list[ExtInt] = []
    phi_acc: list[ExtInt] = []
    wt_acc: list[Weight] = []
    for factor in t.factors:
        e_b, p_b, w_b = ops.eps(factor, i), ops.phi(factor, i), ops.wt(factor)
        if not wt_acc:
            eps_acc.append(e_b)
            phi_acc.append(p_b)
            wt_acc.append(w_b)
            continue
        left_wt = wt_acc[-1]
        eps_acc.append(ext_max(eps_acc[-1], e_b - ops.pair(i, left_wt)))
        phi_acc.append(ext_max(phi_acc[-1] + ops.pair(i, w_b), p_b))
        wt_acc.append(left_wt + w_b)
    return eps_acc, phi_acc, wt_acc


def tensor_wt(t: TensorElem, ops: CrystalOps) -> Weight:
    total = Weight()
    for factor in t.factors:
        total = total + ops.wt(factor)
    return total


def tensor_eps(t: TensorElem, i: IndexId, ops: CrystalOps) -> ExtInt:
    return _prefix_folds(t, i, ops)[0][-1]


def tensor_phi(t: TensorElem, i: IndexId, ops: CrystalOps) -> ExtInt:
    return _prefix_folds(t, i, ops)[1][-1]


def _act(t: TensorElem, pos: int, result: Any) -> TensorElem | None:
    if result is None:
        return None
    return t.replace(pos, result)


def tensor_f(t: TensorElem, i: IndexId, ops: CrystalOps) -> TensorElem | None:
    _, phi_acc, _ = _prefix_folds(t, i, ops)
    for s in range(len(t.factors) - 1, 0, -1):
        right = t.factors[s]
        if not phi_acc[s - 1] > ops.eps(right, i):
            return _act(t, s, ops.f(right, i))
    return _act(t, 0, ops.f(t.factors[0], i))


def tensor_e(t: TensorElem, i: IndexId, ops: CrystalOps) -> TensorElem | None:
    _, phi_acc, _ = _prefix_folds(t, i, ops)
    real = ops.is_real(i)
    a_ii = ops.a_ii(i)
    for s in range(len(t.factors) - 1, 0, -1):
        right = t.factors[s]
        phi_left, eps_right = phi_acc[s - 1], ops.eps(right, i)
        if real:
            if phi_left < eps_right:
                return _act(t, s, ops.e(right, i))
            continue
        if phi_left <= eps_right:
            return _act(t, s, ops.e(right, i))
        if not phi_left > eps_right - a_ii:
            return None
    return _act(t, 0, ops.e(t.factors[0], i))


def tensor_ops(factor_ops: CrystalOps) -> CrystalOps:
    return CrystalOps(
        wt=lambda t: tensor_wt(t, factor_ops),
        eps=lambda t, i: tensor_eps(t, i, factor_ops),
        phi=lambda t, i: tensor_phi(t, i, factor_ops),
        e=lambda t, i: tensor_e(t, i, factor_ops),
        f=lambda t, i: tensor_f(t, i, factor_ops),
        is_real=factor_ops.is_real,
        a_ii=factor_ops.a_ii,
        pair=factor_ops.pair,
    )


def tensor_from_vector(x: PathVector, iota, length: int | None = None) -> TensorElem:
    """b_{i_N}(-x_N) ⊗ ... ⊗ b_{i_1}(-x_1) with N = ``length`` (default: the top of the support)."""
    size = max(1, x.max_position() if length is None else length)
    if size < x.max_position():
        raise ValueError(f"length {size} cuts the support of {x}")
    return TensorElem(tuple(ElementaryElem(iota.index_at(k), x[k]) for k in range(size, 0, -1)))


def vector_from_tensor(t: TensorElem) -> PathVector:
    size = len(t.factors)
    return PathVector.from_dict({size - pos: factor.n for pos, factor in enumerate(t.factors)})


def axiom_check(elements: Iterable[Any], ops: CrystalOps, indices: Sequence[IndexId]) -> pd.DataFrame:
    """One row per violated instance of the abstract-crystal axioms on the sample."""
    rows: list[dict[str, str]] = []

    def flag(axiom: str, b: Any, i: IndexId, detail: str) -> None:
        rows.append({"axiom": axiom, "element": str(b), "index": format_index(i), "detail": detail})

    for b in elements:
        w = ops.wt(b)
        for i in indices:
            eps_b, phi_b = ops.eps(b, i), ops.phi(b, i)
            up, down = ops.e(b, i), ops.f(b, i)
            alpha = Weight.simple_root(i)
            if phi_b != eps_b + ops.pair(i, w):
                flag("iii", b, i, f"phi={phi_b}, eps={eps_b}, <h,wt>={ops.pair(i, w)}")
            if not phi_b.is_finite() and (up is not None or down is not None):
                flag("vii", b, i, "phi is -inf but an operator is defined")
            step = 1 if ops.is_real(i) else 0
            shift = 1 if ops.is_real(i) else ops.a_ii(i)
            if up is not None:
                if ops.wt(up) != w + alpha:
                    flag("i", b, i, f"wt(e b)={ops.wt(up)}")
                if ops.f(up, i) != b:
                    flag("iv", b, i, "f(e b) != b")
                if ops.eps(up, i) != eps_b - step or ops.phi(up, i) != phi_b + shift:
                    flag("v", b, i, f"eps {eps_b}->{ops.eps(up, i)}, phi {phi_b}->{ops.phi(up, i)}")
            if down is not None:
                if ops.wt(down) != w - alpha:
                    flag("ii", b, i, f"wt(f b)={ops.wt(down)}")
                if ops.e(down, i) != b:
                    flag("iv", b, i, "e(f b) != b")
                if ops.eps(down, i) != eps_b + step or ops.phi(down, i) != phi_b - shift:
                    flag("vi", b, i, f"eps {eps_b}->{ops.eps(down, i)}, phi {phi_b}->{ops.phi(down, i)}")

    if rows:
        logger.warning("axiom check found %d violations", len(rows))
    return pd.DataFrame(rows, columns=AXIOM_COLUMNS)
