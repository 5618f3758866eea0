"""The two closed loops.

Test generation: combinational designs get a single round; sequential
designs iterate with coverage feedback and accept a new test only when
the scalar coverage strictly increases. Debugging: a patch is accepted
only when it strictly increases the fraction of passing unit tests, for
at most five iterations. Malformed provider output is a logged,
budget-consuming rejection, never a crash.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import GatewayError, SimulationError, SvLoopError
from .frontend.ast import DesignSource
from .frontend.elaborate import ElaboratedDesign, elaborate_source
from .gateway.config import GenConfig, NLSC, ProblemSpec
from .gateway.extract import parse_patch, parse_unit_test
from .gateway.prompts import build_debug_prompt, build_testgen_prompt
from .sim.coverage import collect_coverage
from .sim.engine import run
from .sim.stimulus import UnitTest
from .verdict import (
    DEFAULT_MISMATCH_LIMIT,
    MismatchSummary,
    compare,
    pass_fraction,
    summarize,
)

DEFAULT_ITERATION_CAP = 5


@dataclass(frozen=True)
class Rejection:
    iteration: int
    reason: str
    detail: str


@dataclass(frozen=True)
class Exchange:
    iteration: int
    prompt: str
    response: Optional[str]


@dataclass
class TestGenState:
    tests: list[UnitTest] = field(default_factory=list)
    best_coverage: Fraction = Fraction(0)
    accepted_coverage: list[Fraction] = field(default_factory=list)
    iterations: int = 0
    provider_calls: int = 0
    rejections: list[Rejection] = field(default_factory=list)
    exchanges: list[Exchange] = field(default_factory=list)


@dataclass(frozen=True)
class PatchAttempt:
    iteration: int
    accepted: bool
    pass_fraction: Optional[Fraction]
    reason: str


@dataclass
class DebugState:
    design: DesignSource
    best_pass: Fraction
    initial_pass: Fraction
    iterations: int = 0
    provider_calls: int = 0
    history: list[PatchAttempt] = field(default_factory=list)
    rejections: list[Rejection] = field(default_factory=list)
    exchanges: list[Exchange] = field(default_factory=list)

    @property
    def solved(self) -> bool:
        return self.best_pass == 1


def generate_tests(
    spec: ProblemSpec,
    source_mutant: Optional[DesignSource],
    cfg: GenConfig,
    provider,
    iteration_cap: int = DEFAULT_ITERATION_CAP,
    test_prefix: str = "t",
) -> TestGenState:
    """Run the coverage-gated generation loop against the oracle.

    The oracle must elaborate (fatal otherwise). Tests are valid when they
    are well-formed for the signature and simulatable on the oracle;
    passing the (unknown) candidate design is not required.
    """
    oracle = elaborate_source(spec.reference)
    signature = spec.signature
    buggy = source_mutant if cfg.strategy == NLSC else None
    if cfg.strategy == NLSC and source_mutant is None:
        raise ValueError("NLSC generation requires a source mutant")

    state = TestGenState()
    one_shot = not oracle.is_sequential
    rounds = 1 if one_shot else iteration_cap
    feedback = None

    for iteration in range(1, rounds + 1):
        state.iterations = iteration
        try:
            prompt = build_testgen_prompt(cfg, spec, buggy, feedback)
        except GatewayError as exc:
            state.rejections.append(Rejection(iteration, "prompt", str(exc)))
            continue
        try:
            response = provider.complete(prompt, cfg)
            state.provider_calls += 1
        except GatewayError as exc:
            state.exchanges.append(Exchange(iteration, prompt, None))
            state.rejections.append(Rejection(iteration, "provider", str(exc)))
            continue
        state.exchanges.append(Exchange(iteration, prompt, response))
        try:
            test = parse_unit_test(
                response, signature, f"{test_prefix}{iteration:02d}"
            )
        except GatewayError as exc:
            state.rejections.append(Rejection(iteration, "parse", str(exc)))
            continue
        try:
            report = collect_coverage(oracle, state.tests + [test], signature)
        except (SimulationError, SvLoopError) as exc:
            state.rejections.append(Rejection(iteration, "simulate", str(exc)))
            continue
        if one_shot:
            state.tests.append(test)
            state.best_coverage = report.scalar
            state.accepted_coverage.append(report.scalar)
            feedback = (report, test)
            break
        if report.scalar > state.best_coverage:
            state.tests.append(test)
            state.best_coverage = report.scalar
            state.accepted_coverage.append(report.scalar)
        else:
            state.rejections.append(
                Rejection(
                    iteration,
                    "coverage",
                    f"scalar {float(report.scalar):.4f} did not improve on "
                    f"{float(state.best_coverage):.4f}",
                )
            )
        feedback = (report, test)
        if state.best_coverage == 1:
            break
    return state


def _suite_verdicts(design: ElaboratedDesign, tests, oracle_traces, outputs, signature):
    verdicts = []
    traces = []
    for test in tests:
        trace = run(design, test, signature)
        traces.append(trace)
        verdicts.append(compare(trace, oracle_traces[test.id], outputs))
    return verdicts, traces


def debug(
    spec: ProblemSpec,
    buggy: DesignSource,
    tests,
    cfg: GenConfig,
    provider,
    iteration_cap: int = DEFAULT_ITERATION_CAP,
    mismatch_limit: int = DEFAULT_MISMATCH_LIMIT,
) -> DebugState:
    """Run the pass-fraction-gated repair loop.

    Expected values always come from simulating the oracle on the same
    tests. The loop makes at most ``iteration_cap`` provider calls and
    never returns a design with a lower pass fraction than its input.
    """
    tests = list(tests)
    if not tests:
        raise ValueError("debug requires at least one unit test")
    oracle = elaborate_source(spec.reference)
    signature = spec.signature
    outputs = [p.name for p in signature.outputs]
    oracle_traces = {t.id: run(oracle, t, signature) for t in tests}

    current_source = buggy
    current_design = elaborate_source(buggy)
    verdicts, traces = _suite_verdicts(
        current_design, tests, oracle_traces, outputs, signature
    )
    best = pass_fraction(verdicts)
    state = DebugState(design=current_source, best_pass=best, initial_pass=best)

    for iteration in range(1, iteration_cap + 1):
        if state.best_pass == 1:
            break
        state.iterations = iteration
        failing_at = next(i for i, v in enumerate(verdicts) if not v.passed)
        summary: MismatchSummary = summarize(
            traces[failing_at],
            oracle_traces[tests[failing_at].id],
            verdicts[failing_at],
            outputs,
            test_id=tests[failing_at].id,
            limit=mismatch_limit,
        )
        prompt = build_debug_prompt(spec, current_source, tests[failing_at], summary)
        try:
            response = provider.complete(prompt, cfg)
            state.provider_calls += 1
        except GatewayError as exc:
            state.exchanges.append(Exchange(iteration, prompt, None))
            state.rejections.append(Rejection(iteration, "provider", str(exc)))
            state.history.append(PatchAttempt(iteration, False, None, f"provider: {exc}"))
            continue
        state.exchanges.append(Exchange(iteration, prompt, response))
        try:
            patch_source = parse_patch(response, signature)
            patched = elaborate_source(patch_source)
            new_verdicts, new_traces = _suite_verdicts(
                patched, tests, oracle_traces, outputs, signature
            )
        except (GatewayError, SimulationError, SvLoopError) as exc:
            state.rejections.append(Rejection(iteration, "patch", str(exc)))
            state.history.append(PatchAttempt(iteration, False, None, f"patch: {exc}"))
            continue
        fraction = pass_fraction(new_verdicts)
        if fraction > state.best_pass:
            current_source = patch_source
            current_design = patched
            verdicts, traces = new_verdicts, new_traces
            state.best_pass = fraction
            state.design = current_source
            state.history.append(
                PatchAttempt(iteration, True, fraction, "pass fraction increased")
            )
        else:
            state.history.append(
                PatchAttempt(
                    iteration,
                    False,
                    fraction,
                    f"pass fraction {float(fraction):.3f} did not improve on "
                    f"{float(state.best_pass):.3f}",
                )
            )
            state.rejections.append(
                Rejection(iteration, "pass-fraction", "patch did not improve pass fraction")
            )
    return state
