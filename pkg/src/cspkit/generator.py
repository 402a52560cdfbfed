"""Random binary constraint networks (Model B) and phase-transition scans.

Model B draws ``e = round(density * C(n,2))`` distinct variable pairs and, for
each, a conflicts table of ``round(tightness * d^2)`` distinct forbidden
tuples.  Everything is a pure function of the seed; child streams are derived
by hashing ``"{seed}:{label}"`` so that grid cells are independent.
"""

from __future__ import annotations

import csv
import hashlib
import itertools
import math
import random
from dataclasses import dataclass, field
from time import perf_counter

from .enforcers import enforce_sac1, enforce_scdc, enforce_sdc
from .network import CONFLICTS, ConstraintNetwork, NetworkError, build_network
from .propagation import enforce_gac

PRNG_ID = "mt19937/sha256-stream"


def child_seed(seed: int, label: str) -> int:
    """Derive an independent 64-bit child seed from a base seed and a label."""
    digest = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


@dataclass(frozen=True)
class ModelBParams:
    n: int
    d: int
    density: float
    tightness: float
    seed: int
    r: int = 2

    def constraint_count(self) -> int:
        return _round_half_up(self.density * math.comb(self.n, 2))

    def forbidden_per_constraint(self) -> int:
        return _round_half_up(self.tightness * self.d * self.d)

    def validate(self):
        if self.r != 2:
            raise NetworkError("Model B generates binary constraints only (r=2)")
        if self.n < 2 or self.d < 1:
            raise NetworkError("Model B needs n >= 2 and d >= 1")
        if not 0.0 <= self.density <= 1.0:
            raise NetworkError("density must lie in [0, 1]")
        if not 0.0 <= self.tightness <= 1.0:
            raise NetworkError("tightness must lie in [0, 1]")
        if self.forbidden_per_constraint() >= self.d * self.d:
            raise NetworkError(
                "tightness too high: every constraint would forbid all tuples")

    def metadata(self) -> dict:
        return {
            "model": "B",
            "n": self.n,
            "d": self.d,
            "r": self.r,
            "density": self.density,
            "tightness": self.tightness,
            "seed": self.seed,
            "prng": PRNG_ID,
        }


def generate_model_b(params: ModelBParams) -> ConstraintNetwork:
    """Generate a Model B network, fully determined by ``params.seed``."""
    params.validate()
    n, d = params.n, params.d
    e = params.constraint_count()
    q = params.forbidden_per_constraint()
    rng = random.Random(child_seed(params.seed, "model-b"))
    pairs = rng.sample(list(itertools.combinations(range(n), 2)), e)
    specs = []
    for x, y in pairs:
        cells = rng.sample(range(d * d), q)
        table = {(cell // d, cell % d) for cell in cells}
        specs.append(((x, y), CONFLICTS, table))
    return build_network([d] * n, specs)


# ---------------------------------------------------------------------------
# Phase-transition scans

SCAN_CHECKS = ("ac", "sac", "scdc", "sdc")

CSV_HEADER = ("t", "check", "samples", "frac_unsat", "mean_ms",
              "crossing_flag")


def _run_check(check: str, net: ConstraintNetwork) -> tuple[bool, float]:
    """Run one consistency check in place; (detected_unsat, elapsed seconds)."""
    start = perf_counter()
    if check == "ac":
        detected = not enforce_gac(net).ok
    elif check == "sac":
        detected = not enforce_sac1(net).consistent
    elif check == "scdc":
        detected = not enforce_scdc(net).consistent
    elif check == "sdc":
        detected = not enforce_sdc(net).consistent
    else:
        raise NetworkError(f"unknown phase-scan check {check!r}")
    return detected, perf_counter() - start


@dataclass
class PhaseRecord:
    t: float
    check: str
    samples: int
    frac_unsat: float
    mean_ms: float
    crossing_flag: int = 0
    detected: tuple = field(default_factory=tuple, repr=False)

    def csv_row(self) -> list:
        return [f"{self.t:.6g}", self.check, self.samples,
                f"{self.frac_unsat:.6g}", f"{self.mean_ms:.6g}",
                self.crossing_flag]


def phase_scan(base: ModelBParams, t_grid, samples_per_point: int,
               checks=SCAN_CHECKS) -> list[PhaseRecord]:
    """Sweep tightness, recording how often each check detects wipeout.

    Instances are derived from ``base.seed`` per (t, index) pair, so every
    check sees the same networks and different grids agree where they
    overlap.  The first row at or past the 50% detection mark carries
    crossing_flag=1; ``crossing_tightness`` interpolates the exact spot.
    """
    checks = list(checks)
    for check in checks:
        if check not in SCAN_CHECKS:
            raise NetworkError(f"unknown phase-scan check {check!r}")
    records: list[PhaseRecord] = []
    for t in t_grid:
        nets = []
        for i in range(samples_per_point):
            params = ModelBParams(n=base.n, d=base.d, density=base.density,
                                  tightness=t,
                                  seed=child_seed(base.seed, f"phase:{t!r}:{i}"))
            nets.append(generate_model_b(params))
        for check in checks:
            hits = []
            elapsed = 0.0
            for net in nets:
                detected, seconds = _run_check(check, net.copy())
                hits.append(detected)
                elapsed += seconds
            records.append(PhaseRecord(
                t=t, check=check, samples=samples_per_point,
                frac_unsat=sum(hits) / samples_per_point,
                mean_ms=1000.0 * elapsed / samples_per_point,
                detected=tuple(hits)))
    for check in checks:
        for record in records:
            if record.check == check and record.frac_unsat >= 0.5:
                record.crossing_flag = 1
                break
    return records


def crossing_tightness(records, check: str):
    """Interpolated tightness where detection first reaches 50%, or None."""
    points = sorted((r.t, r.frac_unsat) for r in records if r.check == check)
    previous = None
    for t, frac in points:
        if frac >= 0.5:
            if previous is None:
                return t
            t0, f0 = previous
            if frac == f0:
                return t
            return t0 + (0.5 - f0) * (t - t0) / (frac - f0)
        previous = (t, frac)
    return None


def scan_to_csv(records, stream):
    """Write scan records as CSV rows under the documented header."""
    writer = csv.writer(stream)
    writer.writerow(CSV_HEADER)
    for record in records:
        writer.writerow(record.csv_row())
