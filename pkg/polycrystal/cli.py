from __future__ import annotations

from pathlib import Path
from typing import Sequence
import argparse
import json
import logging
import sys

import pandas as pd
from dotenv import load_dotenv

from polycrystal import presets
from polycrystal.config import Settings
from polycrystal.models import PathVector
from polycrystal.modules.cartan_datum import load_datum
from polycrystal.modules.graph_ops import export_dot, export_json
from polycrystal.modules.iota_seq import iota_from_json
from polycrystal.modules.monster import (
    ChargeTable,
    ChargeTableError,
    MonsterConfig,
    b_of_n,
    load_charges,
    monster_iota,
    monster_verdict,
    sigma_sum,
)
from polycrystal.modules.polyhedral import IN, Verdict
from polycrystal.workbench import METHODS, CrystalWorkbench

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_argument_group("datum and sequence")
    source.add_argument("--datum", type=Path, help="datum JSON file")
    source.add_argument("--iota", type=Path, help="sequence JSON file (prefix/period, or monster)")
    source.add_argument("--rank2", metavar="A,B,C", help="rank-2 preset with a_11=-a, a_12=-b, a_21=-c")
    source.add_argument("--rank3", metavar="A,...,H", help="rank-3 preset with imaginary 1, 2 and real 3")
    source.add_argument("--sl2", action="store_true", help="the 1x1 real preset")
    source.add_argument("--monster", choices=["toy", "real"], help="monster preset (toy charges 2,1 or the charge table)")
    source.add_argument("--charges", type=Path, help="charge file '<level> <multiplicity>' per line")
    run = common.add_argument_group("run")
    run.add_argument("--depth", type=int, help="total degree bound")
    run.add_argument("--window", type=int, help="position window")
    run.add_argument("--cap", type=int, help="theta form cap")
    run.add_argument("--format", choices=["table", "json", "dot"], default="table")
    run.add_argument("--out", type=Path, help="write output here instead of stdout")
    run.add_argument("-v", "--verbose", action="count", default=0)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="polycrystal",
        description="Crystal B(infinity) of a Borcherds-Cartan datum as integer path vectors cut out by linear forms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check the datum, the sequence and positivity")
    sub.add_parser("enumerate", parents=[common], help="list the f_tilde closure of the zero vector")
    member = sub.add_parser("member", parents=[common], help="decide membership of one path vector")
    member.add_argument("--vector", required=True, help='path vector "[x_N,...,x_1]"')
    member.add_argument("--method", choices=METHODS, default="auto")
    sub.add_parser("theta", parents=[common], help="print the generated linear forms")
    char = sub.add_parser("char", parents=[common], help="weight multiplicities by degree")
    char.add_argument("--collapse-levels", action="store_true", help="merge monster copies of one level")
    sub.add_parser("graph", parents=[common], help="export the enumerated crystal graph")
    monster = sub.add_parser("monster", parents=[common], help="monster block bookkeeping and membership")
    monster.add_argument("action", choices=["b-of-n", "sigma", "member"])
    monster.add_argument("n", nargs="?", type=int)
    monster.add_argument("--vector", help='path vector "[x_N,...,x_1]"')
    monster.add_argument("--closed", action="store_true", help="treat levels above the charge file as empty")
    return parser


def _load_workbench(args: argparse.Namespace, settings: Settings) -> CrystalWorkbench:
    chosen = [flag for flag in ("datum", "rank2", "rank3", "sl2", "monster") if getattr(args, flag)]
    if len(chosen) != 1:
        raise ValueError("choose exactly one of --datum, --rank2, --rank3, --sl2, --monster")
    if args.rank2:
        preset = presets.rank2(*presets.parse_params(args.rank2, 3, "--rank2"))
    elif args.rank3:
        preset = presets.rank3(*presets.parse_params(args.rank3, 8, "--rank3"))
    elif args.sl2:
        preset = presets.sl2()
    elif args.monster == "toy":
        preset = presets.monster_toy()
    elif args.monster == "real":
        path = str(args.charges) if args.charges else settings.charges_path
        preset = presets.monster_real(path, settings.validate_levels)
    else:
        datum = load_datum(args.datum)
        if datum.family == "monster":
            cfg = MonsterConfig(charges=datum.charges, max_level=datum.charges.max_level())
            return CrystalWorkbench(datum, monster_iota(cfg), settings=settings, monster=cfg)
        if args.iota is None:
            raise ValueError("--datum needs --iota")
        with args.iota.open("r", encoding="utf-8") as f:
            iota = iota_from_json(json.load(f), indices=datum.indices, charges=datum.charges)
        return CrystalWorkbench(datum, iota, settings=settings)
    return CrystalWorkbench.from_preset(preset, settings)


def _render(frame: pd.DataFrame, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(frame.to_dict(orient="records"), indent=2, ensure_ascii=False, default=str) + "\n"
    if frame.empty:
        return "(none)\n"
    return frame.to_string(index=False) + "\n"


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _verdict_line(verdict: Verdict) -> str:
    if not verdict.clause:
        return f"{verdict.status}\n"
    line = f"{verdict.status} [{verdict.clause}] {verdict.detail}".rstrip()
    if verdict.label:
        line += f"\n  clause: {verdict.label}"
    return line + "\n"


def cmd_validate(args: argparse.Namespace, settings: Settings) -> int:
    bench = _load_workbench(args, settings)
    result = bench.validate(args.depth, args.window)
    sections = [
        ("datum axioms", result.datum_report),
        ("sequence constraints", result.iota_report),
        ("positivity", result.positivity_report),
    ]
    if args.format == "json":
        payload = {name: frame.to_dict(orient="records") for name, frame in sections}
        payload["notices"] = result.notices
        payload["ok"] = result.ok
        payload["complete"] = result.complete
        text = json.dumps(payload, indent=2, ensure_ascii=False, default=str) + "\n"
    else:
        parts = [f"== {name} ==\n{_render(frame, 'table')}" for name, frame in sections]
        parts.extend(f"notice: {note}\n" for note in result.notices)
        if not result.ok:
            parts.append("violations found\n")
        else:
            parts.append("ok\n" if result.complete else "ok (incomplete)\n")
        text = "".join(parts)
    _emit(text, args.out)
    return EXIT_OK if result.ok else EXIT_NEGATIVE


def cmd_enumerate(args: argparse.Namespace, settings: Settings) -> int:
    bench = _load_workbench(args, settings)
    depth = settings.depth if args.depth is None else args.depth
    graph = bench.enumerate(depth, args.window)
    if args.format == "dot":
        _emit(export_dot(graph), args.out)
    elif args.format == "json":
        _emit(export_json(graph), args.out)
    else:
        _emit(_render(graph.to_frame(), "table"), args.out)
    return EXIT_OK


def cmd_graph(args: argparse.Namespace, settings: Settings) -> int:
    bench = _load_workbench(args, settings)
    depth = settings.depth if args.depth is None else args.depth
    graph = bench.enumerate(depth, args.window)
    text = export_json(graph) if args.format == "json" else export_dot(graph)
    _emit(text, args.out)
    return EXIT_OK


def cmd_member(args: argparse.Namespace, settings: Settings) -> int:
    bench = _load_workbench(args, settings)
    x = PathVector.parse(args.vector)
    result = bench.member(x, method=args.method, window=args.window)
    verdict = result.verdict
    if args.format == "json":
        payload = {
            "vector": str(x),
            "method": result.method,
            "status": verdict.status,
            "clause": verdict.clause,
            "label": verdict.label,
            "detail": verdict.detail,
        }
        text = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    else:
        text = _verdict_line(verdict)
    _emit(text, args.out)
    return EXIT_OK if verdict.status == IN else EXIT_NEGATIVE


def cmd_theta(args: argparse.Namespace, settings: Settings) -> int:
    bench = _load_workbench(args, settings)
    window = args.window or settings.default_window(settings.depth if args.depth is None else args.depth)
    theta = bench.theta(window)
    frame = theta.to_frame()
    if args.format == "json":
        _emit(_render(frame, "json"), args.out)
    else:
        lines = [str(psi) for psi in theta]
        lines.append(
            f"# {len(theta)} forms, window {theta.window}, {theta.escaped} escaped, "
            f"saturated={theta.saturated}, cap_hit={theta.generation_cap_hit}"
        )
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_char(args: argparse.Namespace, settings: Settings) -> int:
    bench = _load_workbench(args, settings)
    depth = settings.depth if args.depth is None else args.depth
    frame = bench.character(depth, args.window, collapse_levels=args.collapse_levels)
    _emit(_render(frame, args.format if args.format != "dot" else "table"), args.out)
    return EXIT_OK


def _monster_charges(args: argparse.Namespace, settings: Settings) -> ChargeTable:
    if args.monster == "toy":
        return presets.monster_toy().monster.charges
    path = str(args.charges) if args.charges else settings.charges_path
    return load_charges(path or None, closed=args.closed)


def cmd_monster(args: argparse.Namespace, settings: Settings) -> int:
    charges = _monster_charges(args, settings)
    if args.action in ("b-of-n", "sigma"):
        if args.n is None or args.n < 0:
            raise ValueError(f"monster {args.action} needs a level N >= 0")
        value = b_of_n(args.n, charges) if args.action == "b-of-n" else sigma_sum(args.n, charges)
        _emit(f"{value}\n", args.out)
        return EXIT_OK
    if not args.vector:
        raise ValueError("monster member needs --vector")
    cfg = MonsterConfig(charges=charges, max_level=charges.max_level())
    verdict = monster_verdict(PathVector.parse(args.vector), cfg)
    text = _verdict_line(verdict)
    _emit(text, args.out)
    return EXIT_OK if verdict.status == IN else EXIT_NEGATIVE


COMMANDS = {
    "validate": cmd_validate,
    "enumerate": cmd_enumerate,
    "member": cmd_member,
    "theta": cmd_theta,
    "char": cmd_char,
    "graph": cmd_graph,
    "monster": cmd_monster,
}


def main(argv: Sequence[str] | None = None) -> int:
    load_dotenv()
    settings = Settings.from_env()
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else settings.log_level
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    if args.cap is not None:
        settings.theta_cap = args.cap
    if args.depth is not None and args.depth < 0:
        print("error: --depth must be >= 0", file=sys.stderr)
        return EXIT_USAGE
    if args.window is not None and args.window < 1:
        print("error: --window must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args, settings)
    except (ValueError, OSError, ChargeTableError) as exc:
        logger.debug("command %s failed", args.command, exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
