from dataclasses import replace
from itertools import product

import pytest

from polycrystal import presets
from polycrystal.models import PathVector, Weight
from polycrystal.modules.crystal_core import (
    NEG_INF,
    CrystalOps,
    ElementaryElem,
    ExtInt,
    TensorElem,
    axiom_check,
    elem_e,
    elem_eps,
    elem_f,
    elem_phi,
    elementary_ops,
    ext_max,
    tensor_e,
    tensor_eps,
    tensor_f,
    tensor_from_vector,
    tensor_ops,
    tensor_phi,
    vector_from_tensor,
)
from polycrystal.modules.oracle import bfs_image, enumeration_indices
from polycrystal.modules.zinfty import SequenceCrystal
from tests.strategies import random_vectors


def _tensor_length(iota, indices, n):
    return max(list(iota.occurrences(i, n))[-1] for i in indices)


def test_extint_ordering_and_arithmetic():
    assert NEG_INF < -10**9
    assert ExtInt(3) + 2 == ExtInt(5)
    assert NEG_INF + 5 == NEG_INF
    assert ExtInt(1) - ExtInt(4) == ExtInt(-3)
    assert ext_max(NEG_INF, ExtInt(0)) == ExtInt(0)
    assert str(NEG_INF) == "-inf"
    assert not NEG_INF.is_finite()
    with pytest.raises(ValueError):
        ExtInt(1) - NEG_INF


def test_elementary_crystal():
    d = presets.rank2(2, 1, 1).datum
    b = ElementaryElem(2, 3)
    assert elem_eps(d, b, 2) == ExtInt(3)
    assert elem_phi(d, b, 2) == ExtInt(-3)
    assert elem_eps(d, b, 1) == NEG_INF
    assert elem_e(b, 2) == ElementaryElem(2, 2)
    assert elem_e(ElementaryElem(2, 0), 2) is None
    assert elem_f(b, 1) is None
    imaginary = ElementaryElem(1, 2)
    assert elem_eps(d, imaginary, 1) == ExtInt(0)
    # -n * a_11 with a_11 = -2
    assert elem_phi(d, imaginary, 1) == ExtInt(4)
    with pytest.raises(ValueError):
        ElementaryElem(1, -1)


def test_elementary_axioms_hold():
    d = presets.rank2(2, 1, 1).datum
    sample = [ElementaryElem(i, n) for i in (1, 2) for n in range(4)]
    assert axiom_check(sample, elementary_ops(d), [1, 2]).empty


def test_tensor_elem_flattens():
    a, b, c = ElementaryElem(1, 0), ElementaryElem(2, 1), ElementaryElem(1, 2)
    t = TensorElem.of(a, TensorElem.of(b, c))
    assert t.factors == (a, b, c)
    assert t.replace(1, ElementaryElem(2, 0)).factors[1] == ElementaryElem(2, 0)
    with pytest.raises(ValueError):
        TensorElem(())


def test_vector_tensor_conversion():
    p = presets.rank2(2, 1, 1)
    x = PathVector.from_dict({1: 1, 3: 2})
    t = tensor_from_vector(x, p.iota, length=5)
    assert len(t.factors) == 5
    assert t.factors[0] == ElementaryElem(1, 0)
    assert t.factors[2] == ElementaryElem(1, 2)
    assert vector_from_tensor(t) == x
    with pytest.raises(ValueError):
        tensor_from_vector(x, p.iota, length=2)


def test_sl2_tensor_matches_by_hand():
    p = presets.sl2()
    ops = elementary_ops(p.datum)
    t = TensorElem.of(ElementaryElem(1, 0), ElementaryElem(1, 2))
    assert tensor_eps(t, 1, ops) == ExtInt(2)
    assert tensor_phi(t, 1, ops) == ExtInt(-2)
    assert tensor_f(t, 1, ops) == TensorElem.of(ElementaryElem(1, 0), ElementaryElem(1, 3))
    assert tensor_e(t, 1, ops) == TensorElem.of(ElementaryElem(1, 0), ElementaryElem(1, 1))


@pytest.mark.parametrize(
    "preset, depth",
    [
        (presets.rank2(2, 1, 1), 4),
        (presets.rank2(0, 0, 0), 3),
        (presets.all_imaginary(-2, -4, -1), 3),
        (presets.monster_toy(), 3),
    ],
    ids=["rank2-211", "rank2-000", "imaginary", "toy-monster"],
)
def test_tensor_rule_agrees_with_sequence_operators(preset, depth):
    crystal = SequenceCrystal(preset.datum, preset.iota)
    graph = bfs_image(crystal, depth)
    ops = elementary_ops(preset.datum)
    for x in graph.nodes():
        n = max(1, x.max_position())
        length = _tensor_length(preset.iota, graph.indices, n)
        t = tensor_from_vector(x, preset.iota, length=length)
        for i in graph.indices:
            assert vector_from_tensor(tensor_f(t, i, ops)) == crystal.f_tilde(x, i)
            lowered = tensor_e(t, i, ops)
            expected = crystal.e_tilde(x, i)
            if expected is None:
                assert lowered is None
            else:
                assert vector_from_tensor(lowered) == expected
            assert tensor_eps(t, i, ops) == ExtInt(crystal.eps(x, i))
            assert tensor_phi(t, i, ops) == ExtInt(crystal.phi(x, i))


def test_tensor_ops_bundle_weights():
    p = presets.rank2(2, 1, 1)
    ops = tensor_ops(elementary_ops(p.datum))
    t = TensorElem.of(ElementaryElem(2, 1), ElementaryElem(1, 2))
    assert ops.wt(t) == Weight.from_dict({1: -2, 2: -1})
    assert ops.is_real(2)
    assert ops.a_ii(1) == -2


def test_sequence_crystal_axioms_on_image():
    p = presets.rank2(2, 1, 1)
    crystal = SequenceCrystal(p.datum, p.iota)
    graph = bfs_image(crystal, 4)
    report = axiom_check(graph.nodes(), crystal.ops(), list(graph.indices))
    assert report.empty, report.to_string()


@pytest.mark.parametrize(
    "preset",
    [
        presets.rank2(2, 1, 1),
        presets.rank2(0, 0, 0),
        presets.rank2(4, 2, 3),
        presets.rank3(2, 1, 1, 1, 2, 1, 1, 1),
        presets.all_imaginary(-2, -4, -1),
        presets.monster_toy(),
    ],
    ids=["rank2-211", "rank2-000", "rank2-423", "rank3", "imaginary", "toy-monster"],
)
def test_tensor_rule_agrees_on_random_vectors(preset):
    crystal = SequenceCrystal(preset.datum, preset.iota)
    indices = enumeration_indices(crystal, 10)
    ops = elementary_ops(preset.datum)
    for x in random_vectors(150, 10, seed=5):
        n = max(1, x.max_position())
        t = tensor_from_vector(x, preset.iota, length=_tensor_length(preset.iota, indices, n))
        for i in indices:
            assert vector_from_tensor(tensor_f(t, i, ops)) == crystal.f_tilde(x, i), (str(x), i)
            lowered = tensor_e(t, i, ops)
            expected = crystal.e_tilde(x, i)
            assert (None if lowered is None else vector_from_tensor(lowered)) == expected, (str(x), i)


def _nested_ops(factor_ops):
    # factors may be elementary or themselves tensors
    inner = tensor_ops(factor_ops)

    def pick(b):
        return inner if isinstance(b, TensorElem) else factor_ops

    return CrystalOps(
        wt=lambda b: pick(b).wt(b),
        eps=lambda b, i: pick(b).eps(b, i),
        phi=lambda b, i: pick(b).phi(b, i),
        e=lambda b, i: pick(b).e(b, i),
        f=lambda b, i: pick(b).f(b, i),
        is_real=factor_ops.is_real,
        a_ii=factor_ops.a_ii,
        pair=factor_ops.pair,
    )


def _flat(t):
    return None if t is None else TensorElem.of(*t.factors)


def test_tensor_rule_is_associative():
    d = presets.rank2(2, 1, 1).datum
    flat_ops = elementary_ops(d)
    nested = _nested_ops(flat_ops)
    pool = [ElementaryElem(i, n) for i in (1, 2) for n in range(3)]
    for a, b, c in product(pool, repeat=3):
        flat = TensorElem.of(a, b, c)
        left = TensorElem((TensorElem((a, b)), c))
        right = TensorElem((a, TensorElem((b, c))))
        for i in (1, 2):
            for t in (left, right):
                assert tensor_eps(t, i, nested) == tensor_eps(flat, i, flat_ops)
                assert tensor_phi(t, i, nested) == tensor_phi(flat, i, flat_ops)
                assert _flat(tensor_f(t, i, nested)) == tensor_f(flat, i, flat_ops), (str(t), i)
                assert _flat(tensor_e(t, i, nested)) == tensor_e(flat, i, flat_ops), (str(t), i)


def test_axiom_check_flags_a_corrupted_phi():
    d = presets.rank2(2, 1, 1).datum
    ops = elementary_ops(d)
    broken = replace(ops, phi=lambda b, i: ops.phi(b, i) + 1)
    sample = [ElementaryElem(i, n) for i in (1, 2) for n in range(3)]
    report = axiom_check(sample, broken, [1, 2])
    assert not report.empty
    assert "iii" in set(report["axiom"])
    assert set(report["index"]) == {"1", "2"}
