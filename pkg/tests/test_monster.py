import pytest

from polycrystal.models import PathVector
from polycrystal.modules.cartan_datum import validate_datum
from polycrystal.modules.iota_seq import MONSTER_REAL
from polycrystal.modules.monster import (
    ChargeTable,
    ChargeTableError,
    MonsterConfig,
    b_of_n,
    load_charge_spec,
    load_charges,
    monster_datum,
    monster_iota,
    monster_member,
    monster_theta_check,
    monster_verdict,
    sigma_sum,
)
from polycrystal.modules.polyhedral import IN, OUT

TOY = ChargeTable((2, 1), closed=True, source="toy")
TOY_CFG = MonsterConfig(charges=TOY, max_level=2)


def v(**entries):
    return PathVector.from_dict({int(k[1:]): val for k, val in entries.items()})


def test_b_of_n_matches_block_ends():
    assert [b_of_n(n, TOY) for n in range(4)] == [1, 4, 8, 12]
    iota = monster_iota(TOY_CFG)
    assert [iota.block_end(n) for n in range(4)] == [b_of_n(n, TOY) for n in range(4)]
    assert sigma_sum(2, TOY) == 3
    with pytest.raises(ChargeTableError):
        b_of_n(-1, TOY)


def test_real_charges():
    table = load_charges()
    assert table.c(1) == 196884
    assert table.c(2) == 21493760
    assert not table.closed
    assert b_of_n(1, table) == 196886
    assert b_of_n(2, table) == 21887531
    with pytest.raises(ChargeTableError):
        table.c(3)


def test_charge_table_rules():
    assert TOY.c(-1) == 1
    assert TOY.c(3) == 0
    assert TOY.truncated(1).values == (2,)
    with pytest.raises(ChargeTableError):
        ChargeTable(())
    with pytest.raises(ChargeTableError):
        ChargeTable((2, 0))
    with pytest.raises(ChargeTableError):
        TOY.c(0)


def test_charge_file_merges_over_defaults(tmp_path):
    extra = tmp_path / "charges.txt"
    extra.write_text("# level multiplicity\n3 864299970\n", encoding="utf-8")
    table = load_charges(extra)
    assert table.max_level() == 3
    assert table.c(1) == 196884
    assert table.c(3) == 864299970


@pytest.mark.parametrize(
    "body",
    ["4 10\n", "1 0\n", "1 x\n", "1\n", "2 5\n2 6\n", "1 2 3\n2 1 7\n", "1 2\n2 1 7\n", "1 5 9\n"],
)
def test_bad_charge_files(tmp_path, body):
    bad = tmp_path / "bad.txt"
    bad.write_text(body, encoding="utf-8")
    with pytest.raises(ChargeTableError):
        load_charges(bad)


def test_extra_leading_field_does_not_shift_values(tmp_path):
    shifted = tmp_path / "shifted.txt"
    shifted.write_text("1 2 3\n2 1 7\n", encoding="utf-8")
    with pytest.raises(ChargeTableError, match="expected 2 fields"):
        load_charges(shifted)


def test_missing_charge_file(tmp_path):
    with pytest.raises(ChargeTableError):
        load_charges(tmp_path / "absent.txt")


def test_charge_spec_variants(tmp_path):
    assert load_charge_spec([2, 1]).closed
    assert load_charge_spec({"1": 3}).values == (3,)
    assert not load_charge_spec([2, 1], closed=False).closed
    (tmp_path / "more.txt").write_text("3 5\n", encoding="utf-8")
    assert load_charge_spec("more.txt", base_dir=tmp_path).c(3) == 5
    with pytest.raises(ChargeTableError):
        load_charge_spec(3.5)


def test_monster_datum():
    d = monster_datum(TOY_CFG)
    assert d.entry((1, 1), (2, 1)) == -3
    assert d.entry(MONSTER_REAL, MONSTER_REAL) == 2
    assert d.entry(MONSTER_REAL, (1, 2)) == 0
    assert d.entry((2, 1), MONSTER_REAL) == -1
    assert d.real_indices() == [MONSTER_REAL]
    assert d.contains((1, 2))
    assert not d.contains((1, 3))
    assert not d.contains((3, 1))
    assert validate_datum(d).empty


def test_verdict_clauses():
    assert monster_verdict(PathVector(), TOY_CFG).status == IN
    assert monster_member(v(x2=1), TOY_CFG)
    first = monster_verdict(v(x4=1), TOY_CFG)
    assert (first.status, first.clause) == (OUT, "first-block")
    block = monster_verdict(v(x8=1), TOY_CFG)
    assert (block.status, block.clause) == (OUT, "block-slack")
    imaginary = monster_verdict(v(x5=1), TOY_CFG)
    assert (imaginary.status, imaginary.clause) == (OUT, "imaginary-sum")


def test_fallback_through_real_positions():
    assert monster_member(v(x7=1, x8=1, x11=1), TOY_CFG)
    verdict = monster_verdict(v(x7=1, x8=1, x11=1, x12=1), TOY_CFG)
    assert (verdict.status, verdict.clause) == (OUT, "block-slack")


def test_closed_form_agrees_with_single_real():
    vectors = [
        PathVector(),
        v(x2=1),
        v(x4=1),
        v(x5=1),
        v(x8=1),
        v(x7=1, x8=1, x11=1),
        v(x7=1, x8=1, x11=1, x12=1),
        v(x3=1, x2=1, x1=1),
    ]
    frame = monster_theta_check(vectors, TOY_CFG)
    assert list(frame.columns) == ["vector", "closed_form", "single_real", "agree"]
    assert frame["agree"].all(), frame.to_string()


def test_open_table_reports_unknown_levels():
    cfg = MonsterConfig(charges=load_charges(), max_level=2)
    assert monster_member(v(x2=1), cfg)
    with pytest.raises(ChargeTableError):
        monster_verdict(PathVector.from_dict({30_000_000: 1}), cfg)
