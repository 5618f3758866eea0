"""Cycle-based two-phase simulator.

Each cycle: drive the stimulus row (asynchronous edge events fire
immediately), settle combinational logic to a fixed point, raise the
harness clock, commit nonblocking updates, settle again, then sample
every signal. The harness clock is lowered at the start of the next
cycle, which is when ``negedge``-clocked processes fire.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import SettleDivergence, StimulusMismatch
from ..frontend.ast import Assignment, Case, If
from ..frontend.elaborate import ElaboratedDesign
from ..frontend.signature import DesignSignature, signature_of
from .stimulus import UnitTest

SETTLE_CAP = 1000

SAMPLE_DISCIPLINE = "sampled once per cycle after clock edge, commit, and settle"


@dataclass(frozen=True)
class Trace:
    values: dict[str, tuple[int, ...]]
    cycles: int
    discipline: str = SAMPLE_DISCIPLINE

    def restricted_to(self, names) -> "Trace":
        return Trace({n: self.values[n] for n in names}, self.cycles, self.discipline)


class _Machine:
    def __init__(self, design: ElaboratedDesign, collector=None):
        self.design = design
        self.signals = design.signals
        self.values = {name: 0 for name in design.signals}
        self.collector = collector
        self.changed = False
        self._masks = {name: (1 << info.width) - 1 for name, info in design.signals.items()}

    # --- expression evaluation ---

    def eval(self, expr):
        kind = type(expr).__name__
        if kind == "Ident":
            return self.values[expr.name]
        if kind == "Literal":
            return expr.value & ((1 << expr.eval_width) - 1)
        if kind == "Binary":
            op = expr.op
            if op == "&&":
                return 1 if (self.eval(expr.left) and self.eval(expr.right)) else 0
            if op == "||":
                return 1 if (self.eval(expr.left) or self.eval(expr.right)) else 0
            left = self.eval(expr.left)
            right = self.eval(expr.right)
            if op == "&":
                return left & right
            if op == "|":
                return left | right
            if op == "^":
                return left ^ right
            if op == "+":
                return (left + right) & ((1 << expr.eval_width) - 1)
            if op == "-":
                return (left - right) & ((1 << expr.eval_width) - 1)
            if op == "==":
                return 1 if left == right else 0
            if op == "!=":
                return 1 if left != right else 0
            if op == "<":
                return 1 if left < right else 0
            if op == "<=":
                return 1 if left <= right else 0
            if op == ">":
                return 1 if left > right else 0
            if op == ">=":
                return 1 if left >= right else 0
            if op == ">>":
                return left >> right
            if op == "<<":
                if right >= expr.eval_width:
                    return 0
                return (left << right) & ((1 << expr.eval_width) - 1)
            raise ValueError(f"unknown operator {op}")
        if kind == "Unary":
            if expr.op == "!":
                return 0 if self.eval(expr.operand) else 1
            value = self.eval(expr.operand)
            if expr.op == "~":
                return ~value & ((1 << expr.eval_width) - 1)
            return (-value) & ((1 << expr.eval_width) - 1)
        if kind == "Ternary":
            if self.eval(expr.cond):
                return self.eval(expr.then)
            return self.eval(expr.other)
        raise TypeError(kind)

    # --- statement execution ---

    def write(self, target: str, value: int):
        value &= self._masks[target]
        if self.values[target] != value:
            self.values[target] = value
            self.changed = True

    def exec_body(self, body, nba: dict):
        collector = self.collector
        for stmt in body:
            if collector is not None:
                collector.stmts.add(stmt.stmt_id)
            if isinstance(stmt, Assignment):
                value = self.eval(stmt.expr)
                if stmt.blocking:
                    self.write(stmt.target, value)
                else:
                    nba[stmt.target] = value & self._masks[stmt.target]
            elif isinstance(stmt, If):
                taken = bool(self.eval(stmt.cond))
                if collector is not None:
                    collector.arms.add((stmt.stmt_id, "then" if taken else "else"))
                if taken:
                    self.exec_body(stmt.then_body, nba)
                elif stmt.else_body is not None:
                    self.exec_body(stmt.else_body, nba)
            elif isinstance(stmt, Case):
                subject = self.eval(stmt.subject)
                for i, item in enumerate(stmt.items):
                    if any(self.eval(lbl) == subject for lbl in item.labels):
                        if collector is not None:
                            collector.arms.add((stmt.stmt_id, i))
                        self.exec_body(item.body, nba)
                        break
                else:
                    if stmt.default_body is not None:
                        if collector is not None:
                            collector.arms.add((stmt.stmt_id, "default"))
                        self.exec_body(stmt.default_body, nba)
            else:
                raise TypeError(type(stmt).__name__)

    def run_comb_node(self, node):
        kind, idx = node
        if kind == "assign":
            item = self.design.cont_assigns[idx]
            if self.collector is not None:
                self.collector.stmts.add(item.stmt_id)
            self.write(item.target, self.eval(item.expr))
        else:
            nba: dict = {}
            self.exec_body(self.design.comb_processes[idx].body, nba)
            for target, value in nba.items():
                self.write(target, value)

    def settle(self):
        # Convergence is judged on end-of-sweep values: intermediate blocking
        # writes inside one body (default-then-override) are not oscillation.
        order = self.design.comb_order
        if not order:
            return
        values = self.values
        for _ in range(SETTLE_CAP):
            before = dict(values)
            for node in order:
                self.run_comb_node(node)
            if values == before:
                return
        raise SettleDivergence(
            f"combinational logic did not settle within {SETTLE_CAP} sweeps"
        )

    def fire_seq(self, processes):
        nba: dict = {}
        for proc in processes:
            self.exec_body(proc.body, nba)
        for target, value in nba.items():
            self.write(target, value)


def run(
    design: ElaboratedDesign,
    test: UnitTest,
    signature: DesignSignature | None = None,
    collector=None,
) -> Trace:
    """Simulate a unit test, returning the per-cycle sampled trace.

    Deterministic: identical inputs yield bit-identical traces.
    """
    sig = signature if signature is not None else signature_of(design)
    if test.columns != sig.stimulus_inputs:
        raise StimulusMismatch(
            "unit test columns {} do not match signature inputs {}".format(
                [f"{p.name}[{p.width}]" for p in test.columns],
                [f"{p.name}[{p.width}]" for p in sig.stimulus_inputs],
            )
        )

    machine = _Machine(design, collector)
    clock = sig.clock
    seq = design.seq_processes
    posedge_clock = [
        p for p in seq if any(ev.signal == clock and ev.edge == "posedge" for ev in p.events)
    ]
    negedge_clock = [
        p for p in seq if any(ev.signal == clock and ev.edge == "negedge" for ev in p.events)
    ]
    columns = [p.name for p in test.columns]
    samples: dict[str, list[int]] = {name: [] for name in design.signals}

    machine.settle()
    for n in range(test.cycles):
        if clock is not None and n > 0 and machine.values[clock] == 1:
            machine.values[clock] = 0
            if negedge_clock:
                machine.fire_seq(negedge_clock)
                machine.settle()
        row = test.rows[n]
        triggered = []
        for name, value in zip(columns, row):
            old = machine.values[name]
            if old == value:
                continue
            machine.values[name] = value
            edge = "posedge" if old == 0 and value != 0 else "negedge"
            for proc in seq:
                if any(ev.signal == name and ev.edge == edge for ev in proc.events):
                    if proc not in triggered:
                        triggered.append(proc)
        if triggered:
            ordered = [p for p in seq if p in triggered]
            machine.fire_seq(ordered)
        machine.settle()
        if clock is not None:
            machine.values[clock] = 1
            if posedge_clock:
                machine.fire_seq(posedge_clock)
            machine.settle()
        for name in samples:
            samples[name].append(machine.values[name])
        if collector is not None:
            collector.sample(machine.values)

    return Trace({name: tuple(vals) for name, vals in samples.items()}, test.cycles)
