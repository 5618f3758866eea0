"""Value Change Dump export and a matching reader.

Output is deliberately timestamp-free in the header so reruns are
byte-identical; one ``#n`` marker is emitted per cycle and only value
changes follow each marker.
"""

from __future__ import annotations

from ..errors import SvLoopError
from ..frontend.signature import DesignSignature, SignaturePort
from .engine import Trace

_ID_CHARS = (
    "!\"#$%&'()*+-./:;<=>?@ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    "[\\]^_`abcdefghijklmnopqrstuvwxyz{|}~"
)


def _var_id(index: int) -> str:
    if index < len(_ID_CHARS):
        return _ID_CHARS[index]
    return _ID_CHARS[index // len(_ID_CHARS) - 1] + _ID_CHARS[index % len(_ID_CHARS)]


def export_vcd(trace: Trace, signature: DesignSignature) -> bytes:
    """Serialize the signature-visible part of a trace as VCD."""
    ports = list(signature.inputs) + list(signature.outputs)
    missing = [p.name for p in ports if p.name not in trace.values]
    if missing:
        raise SvLoopError(f"trace lacks signature signals: {', '.join(missing)}")

    out = ["$version svloop $end", "$timescale 1ns $end",
           f"$scope module {signature.module_name} $end"]
    ids = {}
    for i, port in enumerate(ports):
        ids[port.name] = _var_id(i)
        out.append(f"$var wire {port.width} {ids[port.name]} {port.name} $end")
    out.append("$upscope $end")
    out.append("$enddefinitions $end")

    def value_text(port: SignaturePort, value: int) -> str:
        if port.width == 1:
            return f"{value}{ids[port.name]}"
        return f"b{value:b} {ids[port.name]}"

    last: dict[str, int] = {}
    for cycle in range(trace.cycles):
        out.append(f"#{cycle}")
        if cycle == 0:
            out.append("$dumpvars")
        for port in ports:
            value = trace.values[port.name][cycle]
            if cycle == 0 or last[port.name] != value:
                out.append(value_text(port, value))
                last[port.name] = value
        if cycle == 0:
            out.append("$end")
    return ("\n".join(out) + "\n").encode("ascii")


def read_vcd(data: bytes) -> tuple[Trace, DesignSignature]:
    """Parse VCD produced by export_vcd back into a trace.

    The reconstructed signature has no clock/reset roles; it only carries
    names and widths, with every signal listed as an input-order port.
    """
    lines = data.decode("ascii").splitlines()
    widths: dict[str, int] = {}
    by_id: dict[str, str] = {}
    order: list[str] = []
    module = "unknown"
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if line.startswith("$scope"):
            parts = line.split()
            if len(parts) >= 3:
                module = parts[2]
        elif line.startswith("$var"):
            _, _, width_text, var_id, name = line.split()[:5]
            widths[name] = int(width_text)
            by_id[var_id] = name
            order.append(name)
        elif line.startswith("$enddefinitions"):
            break

    values: dict[str, list[int]] = {name: [] for name in order}
    current: dict[str, int] = {name: 0 for name in order}
    cycle = -1

    def close_cycle():
        if cycle >= 0:
            for name in order:
                values[name].append(current[name])

    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line or line in ("$dumpvars", "$end"):
            continue
        if line.startswith("#"):
            close_cycle()
            cycle = int(line[1:])
            continue
        if line.startswith("b"):
            value_text, var_id = line[1:].split()
            current[by_id[var_id]] = int(value_text, 2)
        else:
            current[by_id[line[1:]]] = int(line[0], 2)
    close_cycle()

    trace = Trace({name: tuple(vals) for name, vals in values.items()}, cycle + 1)
    ports = tuple(SignaturePort(name, widths[name]) for name in order)
    return trace, DesignSignature(module, ports, ())
