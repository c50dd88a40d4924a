from __future__ import annotations

from dataclasses import dataclass, field
import logging

import pandas as pd

from polycrystal.config import Settings
from polycrystal.models import PathVector
from polycrystal.modules.cartan_datum import BorcherdsCartanDatum, validate_datum
from polycrystal.modules.iota_seq import IotaSequence, check_prefix_constraints
from polycrystal.modules.monster import MonsterConfig, monster_verdict
from polycrystal.modules.oracle import CrystalGraph, bfs_image, character
from polycrystal.modules.polyhedral import (
    IN,
    OUT,
    PolyhedralRealization,
    ThetaSet,
    Verdict,
    rank2_member,
    rank3_member,
)
from polycrystal.modules.zinfty import SequenceCrystal
from polycrystal.presets import Preset

logger = logging.getLogger(__name__)

METHODS = ("auto", "general", "single-real", "all-imaginary", "rank2", "rank3", "monster")


@dataclass
class ValidationResult:
    datum_report: pd.DataFrame
    iota_report: pd.DataFrame
    positivity_report: pd.DataFrame
    theta: ThetaSet | None = None
    # incomplete checks, not violations
    notices: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.datum_report.empty and self.iota_report.empty and self.positivity_report.empty

    @property
    def complete(self) -> bool:
        return self.theta is None or not self.theta.generation_cap_hit


@dataclass
class MemberResult:
    vector: PathVector
    method: str
    verdict: Verdict


class CrystalWorkbench:
    """Everything the command line needs for one datum and one index sequence."""

    def __init__(
        self,
        datum: BorcherdsCartanDatum,
        iota: IotaSequence,
        settings: Settings | None = None,
        params: tuple[int, ...] = (),
        monster: MonsterConfig | None = None,
    ):
        self.settings = settings or Settings()
        self.datum = datum
        self.iota = iota
        self.params = params
        self.monster = monster
        self.crystal = SequenceCrystal(datum, iota)
        self.realization = PolyhedralRealization(datum, iota, cap=self.settings.theta_cap)

    @classmethod
    def from_preset(cls, preset: Preset, settings: Settings | None = None) -> "CrystalWorkbench":
        return cls(preset.datum, preset.iota, settings=settings, params=preset.params, monster=preset.monster)

    def window_for(self, depth: int, window: int | None = None) -> int:
        return window if window is not None else self.settings.default_window(depth)

    def validate(self, depth: int | None = None, window: int | None = None) -> ValidationResult:
        size = self.window_for(self.settings.depth if depth is None else depth, window)
        datum_report = validate_datum(self.datum)
        iota_report = check_prefix_constraints(self.iota, size)
        notices: list[str] = []
        theta = None
        positivity = pd.DataFrame(columns=["form", "position", "coefficient"])
        if self.monster is None:
            theta = self.realization.generate_theta(size)
            positivity = self.realization.check_positivity(theta)
            if theta.generation_cap_hit:
                notices.append(
                    f"theta generation stopped at the cap of {self.settings.theta_cap} forms in window {size}; "
                    "positivity was checked on the generated part only"
                )
                logger.info("validation of %s is incomplete: theta cap hit", self.datum.name)
        return ValidationResult(datum_report, iota_report, positivity, theta, notices)

    def enumerate(self, depth: int, window: int | None = None) -> CrystalGraph:
        return bfs_image(self.crystal, depth, self.window_for(depth, window))

    def theta(self, window: int) -> ThetaSet:
        return self.realization.generate_theta(window)

    def character(self, depth: int, window: int | None = None, collapse_levels: bool = False) -> pd.DataFrame:
        return character(self.enumerate(depth, window), collapse_levels=collapse_levels)

    def resolve_method(self, method: str = "auto") -> str:
        if method not in METHODS:
            raise ValueError(f"unknown membership method {method!r}")
        if method != "auto":
            return method
        if self.monster is not None:
            return "monster"
        reals = len(self.datum.real_indices())
        if reals == 0:
            return "all-imaginary"
        if reals == 1:
            return "single-real"
        return "general"

    def member(self, x: PathVector, method: str = "auto", window: int | None = None) -> MemberResult:
        chosen = self.resolve_method(method)
        if chosen == "general":
            verdict = self.realization.gamma_member_general(x, window=window)
        elif chosen == "single-real":
            verdict = self.realization.single_real_verdict(x)
        elif chosen == "all-imaginary":
            ok = self.realization.gamma_member_all_imaginary(x)
            verdict = Verdict(IN) if ok else Verdict(OUT, "imaginary-sum")
        elif chosen == "monster":
            if self.monster is None:
                raise ValueError("the monster test needs a monster datum")
            verdict = monster_verdict(x, self.monster)
        elif chosen == "rank2":
            if len(self.params) != 3:
                raise ValueError("the rank2 test needs the --rank2 preset")
            verdict = Verdict(IN) if rank2_member(x, *self.params) else Verdict(OUT, "rank2-closed-form")
        else:
            if len(self.params) != 8:
                raise ValueError("the rank3 test needs the --rank3 preset")
            verdict = Verdict(IN) if rank3_member(x, *self.params) else Verdict(OUT, "rank3-closed-form")
        logger.info("member %s via %s: %s", x, chosen, verdict.status)
        return MemberResult(vector=x, method=chosen, verdict=verdict)
