"""svloop: closed-loop unit-test generation, mutation benchmarking, and
LLM-assisted debugging for small SystemVerilog designs."""

__version__ = "0.1.0"
