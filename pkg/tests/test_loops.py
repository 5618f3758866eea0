from fractions import Fraction

import pytest

from support import ListProvider, valid_arbiter_stimulus
from svloop.frontend import DesignSource, elaborate_source, extract_signature
from svloop.gateway import GenConfig, ProblemSpec
from svloop.loops import debug, generate_tests
from svloop.sim import UnitTest, collect_coverage, parse_stimulus

CFG = GenConfig(strategy="nlsc", shots=0)

RISING_A = "inputs: rst[1], r1[1], r2[1]\n1 0 0\n1 0 0\n"
FLAT_B = RISING_A
RISING_C = "inputs: rst[1], r1[1], r2[1]\n1 0 0\n0 1 0\n0 1 0\n0 0 0\n"
RISING_D = valid_arbiter_stimulus() + "0 1 1\n0 1 0\n0 0 1\n"

CMP_REF = "module cmp3 (\n  input [2:0] x,\n  output y\n);\n  assign y = x >= 3'd4;\nendmodule\n"
CMP_BUGGY = CMP_REF.replace("3'd4", "3'd6")
CMP_HALF = CMP_REF.replace("3'd4", "3'd5")
CMP_X_VALUES = [4, 5, 4, 5, 4, 5, 0, 1, 2, 7]


def cmp_problem():
    design = elaborate_source(CMP_REF)
    signature = extract_signature(design)
    spec = ProblemSpec(
        "Output y is 1 when the 3-bit input x is at least 4.",
        signature,
        DesignSource(CMP_REF),
    )
    tests = [
        UnitTest(f"t{i}", signature.stimulus_inputs, ((x,),))
        for i, x in enumerate(CMP_X_VALUES)
    ]
    return spec, tests


def test_cmp_fixture_fractions_are_as_derived():
    # independent arithmetic check of the staged pass fractions
    buggy_pass = sum((x >= 6) == (x >= 4) for x in CMP_X_VALUES)
    half_pass = sum((x >= 5) == (x >= 4) for x in CMP_X_VALUES)
    assert buggy_pass == 4 and half_pass == 7


class TestGenerateLoop:
    def test_combinational_is_one_shot(self, problems):
        p = problems["full_adder"]
        provider = ListProvider([
            "inputs: a[1], b[1], c[1]\n0 0 0\n1 1 1\n",
            "inputs: a[1], b[1], c[1]\n0 0 1\n",
        ])
        state = generate_tests(p.spec(), p.reference, CFG, provider)
        assert provider.calls_made == 1
        assert len(state.tests) == 1
        assert state.iterations == 1

    def test_combinational_accepts_if_parseable(self, problems):
        p = problems["full_adder"]
        state = generate_tests(p.spec(), p.reference, CFG, ListProvider(["garbage"]))
        assert state.tests == []
        assert state.rejections and state.rejections[0].reason == "parse"

    def test_rising_flat_rising(self, problems):
        p = problems["arbiter2"]
        provider = ListProvider([RISING_A, FLAT_B, RISING_C, RISING_D, RISING_D])
        state = generate_tests(p.spec(), p.reference, CFG, provider)
        assert len(state.tests) == 3
        history = state.accepted_coverage
        assert all(b > a for a, b in zip(history, history[1:]))
        flat = [r for r in state.rejections if r.reason == "coverage"]
        assert flat and flat[0].iteration == 2
        # recompute the accepted coverage independently
        accepted = []
        for i, test in enumerate(state.tests):
            report = collect_coverage(p.design, state.tests[: i + 1], p.signature)
            accepted.append(report.scalar)
        assert accepted == history

    def test_flat_test_not_added_to_suite(self, problems):
        p = problems["arbiter2"]
        provider = ListProvider([RISING_A, FLAT_B, RISING_C, RISING_D, RISING_D])
        state = generate_tests(p.spec(), p.reference, CFG, provider)
        texts = [t.to_text() for t in state.tests]
        assert texts.count(RISING_A) == 1

    def test_sequential_iteration_cap(self, problems):
        p = problems["arbiter2"]
        provider = ListProvider([RISING_A] * 9)
        state = generate_tests(p.spec(), p.reference, CFG, provider, iteration_cap=5)
        assert state.iterations == 5
        assert provider.calls_made == 5
        assert len(state.tests) == 1

    def test_provider_errors_absorbed(self, problems):
        p = problems["arbiter2"]
        provider = ListProvider([RISING_A])  # exhausts after one call
        state = generate_tests(p.spec(), p.reference, CFG, provider, iteration_cap=3)
        assert len(state.tests) == 1
        assert sum(1 for r in state.rejections if r.reason == "provider") == 2

    def test_nls_ignores_source(self, problems):
        p = problems["full_adder"]
        cfg = GenConfig(strategy="nls")
        provider = ListProvider(["inputs: a[1], b[1], c[1]\n1 0 1\n"])
        state = generate_tests(p.spec(), None, cfg, provider)
        assert len(state.tests) == 1


class TestDebugLoop:
    def failing_suite(self, problems, bc_id="BC06"):
        p = problems["arbiter2"]
        mutants = {bc: (src, wit) for bc, src, wit in p.mutants()}
        source, witness = mutants[bc_id]
        return p, source, [witness]

    def test_reference_patch_terminates_first_iteration(self, problems):
        p, source, tests = self.failing_suite(problems)
        provider = ListProvider([p.reference.text])
        state = debug(p.spec(), source, tests, CFG, provider)
        assert state.solved
        assert state.iterations == 1
        assert state.best_pass == 1

    def test_useless_patches_run_the_full_budget(self, problems):
        p, source, tests = self.failing_suite(problems)
        provider = ListProvider([source.text] * 5)
        state = debug(p.spec(), source, tests, CFG, provider)
        assert state.iterations == 5
        assert state.provider_calls == 5
        assert state.design is source
        assert state.best_pass == state.initial_pass
        fractions = [h.pass_fraction for h in state.history]
        assert all(f is not None and f <= state.initial_pass for f in fractions)

    def test_partial_then_full_fix(self):
        spec, tests = cmp_problem()
        buggy = DesignSource(CMP_BUGGY, "mutant BC02")
        provider = ListProvider([CMP_HALF, CMP_REF])
        state = debug(spec, buggy, tests, CFG, provider)
        assert state.initial_pass == Fraction(2, 5)
        accepted = [h.pass_fraction for h in state.history if h.accepted]
        assert accepted == [Fraction(7, 10), Fraction(1)]
        assert state.solved and state.iterations == 2

    def test_best_pass_monotone_under_noise(self, problems):
        p, source, tests = self.failing_suite(problems)
        provider = ListProvider(
            ["nonsense", source.text, p.reference.text, "unused", "unused"]
        )
        state = debug(p.spec(), source, tests, CFG, provider)
        assert state.solved and state.iterations == 3
        seen = state.initial_pass
        for h in state.history:
            if h.accepted:
                assert h.pass_fraction > seen
                seen = h.pass_fraction

    def test_budget_is_at_most_five_provider_calls(self, problems):
        p, source, tests = self.failing_suite(problems)
        provider = ListProvider(["junk"] * 12)
        state = debug(p.spec(), source, tests, CFG, provider)
        assert state.provider_calls == 5

    def test_requires_tests(self, problems):
        p, source, _ = self.failing_suite(problems)
        with pytest.raises(ValueError):
            debug(p.spec(), source, [], CFG, ListProvider([]))

    def test_already_passing_suite_short_circuits(self, problems):
        p = problems["arbiter2"]
        mutants = {bc: src for bc, src, _ in p.mutants()}
        quiet = parse_stimulus("inputs: rst[1], r1[1], r2[1]\n1 0 0\n1 0 0\n", p.signature, "quiet")
        provider = ListProvider([])
        state = debug(p.spec(), mutants["BC06"], [quiet], CFG, provider)
        assert state.solved and state.iterations == 0 and state.provider_calls == 0
