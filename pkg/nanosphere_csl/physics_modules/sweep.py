# physics_modules/sweep.py
"""Parameter sweeps producing paired entanglement curves with and without
collapse noise, and the metrics used to tell the two curves apart."""
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from multiprocessing import Pool
from typing import Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from ..constants import CONSTANTS_VERSION
from ..exceptions import InstabilityError, SweepError, ValidityWarning
from .dynamics import STABILITY_MARGIN, build_model, is_stable, solve_lyapunov
from .entanglement import log_negativity, mechanical_block
from .noise import NoiseBudget, budgets
from .parameters import DerivedQuantities, SystemConfig, config_hash, derive, effective_decay

PARAMETERS = ("omega1", "R", "lambda")
CSL_VARIANTS = ("on", "off", "both")

DEFAULT_POINTS = 40
DEFAULT_WINDOW = 0.2
DEFAULT_GAP_THRESHOLD = 0.10

# scheme conditions kappa_eff, G << omega_j, |omega1 - omega2|
SCALE_FACTOR = 10.0
COUPLING_FACTOR = 5.0


def make_grid(start: float, stop: float, points: int, log: bool = True) -> Tuple[float, ...]:
    if points < 1:
        raise SweepError(f"grid needs at least one point, got {points}")
    if points == 1:
        return (float(start),)
    if not stop > start:
        raise SweepError(f"grid end {stop!r} must exceed start {start!r}")
    if log:
        if not start > 0:
            raise SweepError(f"log grid needs a positive start, got {start!r}")
        values = np.logspace(np.log10(start), np.log10(stop), points)
    else:
        values = np.linspace(start, stop, points)
    return tuple(float(v) for v in values)


def default_omega_grid(config: SystemConfig, points: int = DEFAULT_POINTS) -> Tuple[float, ...]:
    kappa_eff = effective_decay(config)
    return make_grid(10.0 * kappa_eff, 500.0 * kappa_eff, points, log=True)


@dataclass(frozen=True)
class SweepSpec:
    base: SystemConfig
    grid: Tuple[float, ...]
    parameter: str = "omega1"
    csl: str = "both"
    preset: Optional[str] = None
    # trap frequency used when sweeping R or lambda
    omega1: float = 1.0e4

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(v) for v in self.grid))
        if self.parameter not in PARAMETERS:
            raise SweepError(f"unknown sweep parameter {self.parameter!r}, expected one of {PARAMETERS}")
        if self.csl not in CSL_VARIANTS:
            raise SweepError(f"unknown csl variant {self.csl!r}, expected one of {CSL_VARIANTS}")
        if not self.grid:
            raise SweepError("sweep grid is empty")
        values = np.asarray(self.grid)
        if not np.all(np.isfinite(values)):
            raise SweepError("sweep grid contains non-finite values")
        if np.any(np.diff(values) <= 0):
            raise SweepError("sweep grid must be strictly increasing")
        lowest = values[0]
        if self.parameter == "lambda" and lowest < 0:
            raise SweepError(f"collapse rate grid must be >= 0, got {lowest!r}")
        if self.parameter != "lambda" and not lowest > 0:
            raise SweepError(f"{self.parameter} grid must be > 0, got {lowest!r}")

    @property
    def variants(self) -> Tuple[bool, ...]:
        return {"on": (True,), "off": (False,), "both": (False, True)}[self.csl]

    def point(self, value: float) -> Tuple[SystemConfig, float]:
        if self.parameter == "omega1":
            return self.base, value
        if self.parameter == "R":
            return replace(self.base, radius=value), self.omega1
        return replace(self.base, csl_rate=value), self.omega1

    def settings(self) -> Dict:
        return {
            "parameter": self.parameter,
            "grid": list(self.grid),
            "csl": self.csl,
            "preset": self.preset,
            "omega1": self.omega1,
        }


@dataclass(frozen=True)
class SweepPoint:
    value: float
    derived: DerivedQuantities
    budgets: Tuple[NoiseBudget, NoiseBudget]
    stable: bool
    abscissa: float
    E_N_off: float = math.nan
    E_N_on: float = math.nan

    def E_N(self, csl_on: bool) -> float:
        return self.E_N_on if csl_on else self.E_N_off


@dataclass(frozen=True)
class SweepMetadata:
    config_hash: str
    constants_version: str = CONSTANTS_VERSION
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    points: Tuple[SweepPoint, ...]
    metadata: SweepMetadata

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points])

    @property
    def omega1(self) -> np.ndarray:
        return np.array([p.derived.omega1 for p in self.points])

    @property
    def stable(self) -> np.ndarray:
        return np.array([p.stable for p in self.points], dtype=bool)

    def has_variant(self, csl_on: bool) -> bool:
        return csl_on in self.spec.variants

    def E_N(self, csl_on: bool) -> np.ndarray:
        if not self.has_variant(csl_on):
            label = "on" if csl_on else "off"
            raise SweepError(f"sweep has no CSL-{label} curve (ran with --csl {self.spec.csl})")
        return np.array([p.E_N(csl_on) for p in self.points])


def evaluate_point(config: SystemConfig, omega1: float, variants: Tuple[bool, ...] = (False, True),
                   value: Optional[float] = None) -> SweepPoint:
    dq = derive(config, omega1)
    pair = budgets(dq)
    # the drift matrix does not depend on the noise, so one stability check covers both variants
    model = build_model(dq, pair, csl_on=False)
    report = is_stable(model)
    stable = report.abscissa < -STABILITY_MARGIN * model.rate_scale
    entanglement = {}
    if stable:
        for csl_on in variants:
            cov = solve_lyapunov(build_model(dq, pair, csl_on))
            entanglement[csl_on] = log_negativity(mechanical_block(cov))
    return SweepPoint(
        value=omega1 if value is None else value,
        derived=dq,
        budgets=pair,
        stable=stable,
        abscissa=report.abscissa,
        E_N_off=entanglement.get(False, math.nan),
        E_N_on=entanglement.get(True, math.nan),
    )


def _evaluate(task) -> Tuple[SweepPoint, List[Tuple[type, str]]]:
    """Evaluate one point, returning the warnings it raised so a Pool worker can hand them back."""
    config, omega1, variants, value = task
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        point = evaluate_point(config, omega1, variants, value)
    return point, [(w.category, str(w.message)) for w in caught]


def check_scheme_validity(dq: DerivedQuantities) -> List[Tuple[str, str]]:
    """(kind, message) for every violated scheme condition at this point."""
    problems = []
    separation = abs(dq.omega1 - dq.omega2)
    if dq.omega1 < SCALE_FACTOR * dq.kappa_eff:
        problems.append(("omega-kappa", f"omega1 = {dq.omega1:.6g} < {SCALE_FACTOR:g} kappa_eff"))
    if dq.G2 > dq.omega1 / COUPLING_FACTOR:
        problems.append(("coupling-omega", f"G2 = {dq.G2:.6g} > omega1/{COUPLING_FACTOR:g}"))
    if separation < SCALE_FACTOR * dq.kappa_eff:
        problems.append(("separation-kappa", f"|omega1 - omega2| = {separation:.6g} < {SCALE_FACTOR:g} kappa_eff"))
    if dq.G2 > separation / COUPLING_FACTOR:
        problems.append(("coupling-separation", f"G2 = {dq.G2:.6g} > |omega1 - omega2|/{COUPLING_FACTOR:g}"))
    return problems


def _warn_validity(points) -> None:
    counts = Counter()
    example = {}
    for point in points:
        for kind, message in check_scheme_validity(point.derived):
            counts[kind] += 1
            example.setdefault(kind, message)
    for kind, count in sorted(counts.items()):
        warnings.warn(
            f"scheme condition violated at {count} of {len(points)} points (e.g. {example[kind]})",
            ValidityWarning, stacklevel=3,
        )


def run_sweep(spec: SweepSpec, workers: int = 1, progress: bool = False) -> SweepResult:
    tasks = []
    for value in spec.grid:
        config, omega1 = spec.point(value)
        tasks.append((config, omega1, spec.variants, value))

    if workers > 1 and len(tasks) > 1:
        with Pool(processes=min(workers, len(tasks))) as pool:
            outcomes = list(tqdm(pool.imap(_evaluate, tasks), total=len(tasks),
                                 desc="sweep", disable=not progress))
    else:
        outcomes = [_evaluate(task) for task in tqdm(tasks, desc="sweep", disable=not progress)]

    points = [point for point, _ in outcomes]
    seen = set()
    for _, caught in outcomes:
        for category, message in caught:
            if (category, message) not in seen:
                seen.add((category, message))
                warnings.warn(message, category, stacklevel=2)

    if not any(p.stable for p in points):
        raise InstabilityError(f"all {len(points)} sweep points are unstable")
    _warn_validity(points)

    metadata = SweepMetadata(config_hash=config_hash(spec.base, **spec.settings()))
    return SweepResult(spec=spec, points=tuple(points), metadata=metadata)


def relative_difference(result: SweepResult) -> np.ndarray:
    """(E_N_off - E_N_on) / E_N_off per point; NaN where E_N_off is 0 or undefined."""
    off = result.E_N(False)
    on = result.E_N(True)
    ratio = np.full(off.shape, np.nan)
    defined = np.isfinite(off) & np.isfinite(on) & (off > 0)
    ratio[defined] = (off[defined] - on[defined]) / off[defined]
    return ratio


def slope_sign_changes(values: np.ndarray) -> int:
    """Sign changes of the finite-difference slope, flat steps ignored."""
    steps = np.sign(np.diff(np.asarray(values, dtype=float)))
    steps = steps[steps != 0]
    return int(np.count_nonzero(steps[1:] != steps[:-1]))


@dataclass(frozen=True)
class DiscriminatorReport:
    verdict: str
    slope_off: float
    slope_on: float
    sign_off: int
    sign_on: int
    mean_gap: float
    leftmost_gap: float
    window: Tuple[float, ...]


def slope_sign_discriminator(result: SweepResult, window: float = DEFAULT_WINDOW,
                             gap_threshold: float = DEFAULT_GAP_THRESHOLD) -> DiscriminatorReport:
    """Compare the low-omega behaviour of the two curves.

    The window is the lowest `window` fraction of the points where both curves
    are entangled, not of the whole grid, and must hold at least 3 points;
    points where either E_N is zero never enter it. Opposite slope signs give
    "distinguishable-by-sign"; otherwise a mean relative gap of at least
    `gap_threshold` gives "distinguishable-by-gap".
    """
    if not 0 < window <= 1:
        raise SweepError(f"window fraction must be in (0, 1], got {window!r}")
    x = result.values
    off = result.E_N(False)
    on = result.E_N(True)
    gap = relative_difference(result)

    entangled = np.flatnonzero(np.isfinite(off) & np.isfinite(on) & (off > 0) & (on > 0))
    size = max(3, math.ceil(window * len(entangled)))
    if len(entangled) < size:
        raise SweepError(
            f"need at least 3 points where both curves are entangled, found {len(entangled)}"
        )
    idx = entangled[:size]

    slope_off = float(np.mean(np.diff(off[idx]) / np.diff(x[idx])))
    slope_on = float(np.mean(np.diff(on[idx]) / np.diff(x[idx])))
    sign_off, sign_on = int(np.sign(slope_off)), int(np.sign(slope_on))
    mean_gap = float(np.mean(gap[idx]))

    if sign_off != 0 and sign_on != 0 and sign_off != sign_on:
        verdict = "distinguishable-by-sign"
    elif mean_gap >= gap_threshold:
        verdict = "distinguishable-by-gap"
    else:
        verdict = "indistinguishable"
    return DiscriminatorReport(
        verdict=verdict,
        slope_off=slope_off,
        slope_on=slope_on,
        sign_off=sign_off,
        sign_on=sign_on,
        mean_gap=mean_gap,
        leftmost_gap=float(gap[idx[0]]),
        window=tuple(float(v) for v in x[idx]),
    )
