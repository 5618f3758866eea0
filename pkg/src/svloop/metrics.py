"""Attack rate, divergence rate, divergent attack, and 5-bin histograms.

AR is the fraction of targets whose suite produced a failing trace.
DR counts, over one unit test of length n, the fraction of cycles on
which the failing and passing traces disagree on any output.
DA gates DR by attack success: the set-intersection notation in the
source material has no formal definition, so the gating reading lives
entirely behind ``divergent_attack``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import TraceShapeMismatch
from .sim.engine import Trace

BIN_EDGES = [Fraction(k, 5) for k in range(1, 5)]  # 20/40/60/80 %


@dataclass(frozen=True)
class PairResult:
    source: str
    target: str
    ar: int                      # 0 or 1
    dr: Fraction
    da: Fraction

    def __post_init__(self):
        if self.ar not in (0, 1):
            raise ValueError("ar must be 0 or 1")
        if self.ar == 0 and self.da != 0:
            raise ValueError("no attack implies zero divergent attack")
        if self.ar == 1 and self.da != self.dr:
            raise ValueError("attacked pair must carry da == dr")


@dataclass(frozen=True)
class BinnedDistribution:
    counts: tuple[int, int, int, int, int]
    median: Fraction
    median_bin: int              # 1-based

    def as_dict(self) -> dict:
        return {
            "counts": list(self.counts),
            "median": float(self.median),
            "median_bin": self.median_bin,
        }


def attack_rate(verdicts) -> Fraction:
    """Fraction of per-problem suite verdicts that failed (detected a bug)."""
    verdicts = list(verdicts)
    if not verdicts:
        raise ValueError("attack_rate of an empty verdict list")
    failed = sum(1 for v in verdicts if not v.passed)
    return Fraction(failed, len(verdicts))


def divergence_rate(t_pass: Trace, t_fail: Trace, outputs) -> Fraction:
    """Fraction of cycles on which any output differs between the traces."""
    outputs = list(outputs)
    if t_pass.cycles != t_fail.cycles:
        raise TraceShapeMismatch(
            f"trace lengths differ: {t_pass.cycles} vs {t_fail.cycles}"
        )
    for name in outputs:
        if name not in t_pass.values or name not in t_fail.values:
            raise TraceShapeMismatch(f"output {name!r} missing from a trace")
    divergent = 0
    for n in range(t_pass.cycles):
        if any(t_pass.values[o][n] != t_fail.values[o][n] for o in outputs):
            divergent += 1
    return Fraction(divergent, t_pass.cycles)


def divergent_attack(ar: int, dr: Fraction) -> Fraction:
    """DR gated by attack success; (1, 0) is rejected as inconsistent since
    a failing run diverges on at least one cycle by construction."""
    if ar not in (0, 1):
        raise ValueError("ar must be 0 or 1")
    dr = Fraction(dr)
    if not 0 <= dr <= 1:
        raise ValueError("dr must lie in [0, 1]")
    if ar == 0:
        return Fraction(0)
    if dr == 0:
        raise ValueError("inconsistent pair: attack succeeded but divergence is zero")
    return dr


def bin_index(value) -> int:
    """1-based bin for a ratio: [0,.2) [.2,.4) [.4,.6) [.6,.8) [.8,1]."""
    value = Fraction(value)
    if not 0 <= value <= 1:
        raise ValueError(f"ratio {value} outside [0, 1]")
    for i, edge in enumerate(BIN_EDGES):
        if value < edge:
            return i + 1
    return 5


def bin_values(values) -> BinnedDistribution:
    """Equally spaced 5-bin histogram with the lower-middle median.

    Order-independent; boundary values fall upward except 100%, which
    closes the top bin.
    """
    values = [Fraction(v) for v in values]
    if not values:
        raise ValueError("cannot bin an empty value list")
    counts = [0, 0, 0, 0, 0]
    for v in values:
        counts[bin_index(v) - 1] += 1
    ordered = sorted(values)
    median = ordered[(len(ordered) - 1) // 2]
    return BinnedDistribution(tuple(counts), median, bin_index(median))


def cross_check_pair(result: PairResult) -> None:
    """Invariant audit used by tests and report emission."""
    assert result.da <= result.dr
    assert result.da <= result.ar
    assert 0 <= result.dr <= 1
