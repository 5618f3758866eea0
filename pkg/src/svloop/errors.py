"""Exception hierarchy shared across the toolkit.

Frontend errors carry source positions so the CLI can print
``file:line:col: message`` diagnostics.
"""


class SvLoopError(Exception):
    """Base class for all toolkit errors."""


# --- frontend ---------------------------------------------------------------

class FrontendError(SvLoopError):
    def __init__(self, message, line=None, col=None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col

    def diagnostic(self, filename="<input>"):
        line = self.line if self.line is not None else 0
        col = self.col if self.col is not None else 0
        return f"{filename}:{line}:{col}: {self.message}"


class ParseError(FrontendError):
    """Malformed source text within the supported grammar."""


class UnsupportedConstruct(FrontendError):
    """Syntactically recognizable construct outside the supported subset.

    Kept distinct from ParseError so that mutants or patches using exotic
    syntax are rejected explicitly rather than misparsed.
    """


class ElaborationError(FrontendError):
    pass


class CombinationalLoop(ElaborationError):
    pass


class MultipleDrivers(ElaborationError):
    pass


class WidthMismatch(ElaborationError):
    pass


class AmbiguousClock(ElaborationError):
    pass


# --- simulator --------------------------------------------------------------

class SimulationError(SvLoopError):
    pass


class StimulusMismatch(SimulationError):
    """Unit-test columns do not match the design signature."""


class SettleDivergence(SimulationError):
    """Combinational settling did not reach a fixed point within the cap."""


# --- verdict / metrics ------------------------------------------------------

class TraceShapeMismatch(SvLoopError):
    """Traces being compared disagree on length or signal set."""


class CalledOnPass(SvLoopError):
    """Mismatch summary requested for a passing verdict."""


# --- mutation ---------------------------------------------------------------

class MutationError(SvLoopError):
    pass


class NoApplicableSite(MutationError):
    pass


class NoDistinctMutant(MutationError):
    """Every applicable site produced a semantic equivalent of the reference."""


# --- llm gateway ------------------------------------------------------------

class GatewayError(SvLoopError):
    pass


class PromptOverflow(GatewayError):
    """Rendered prompt exceeds the configured input token window."""


class ProviderTimeout(GatewayError):
    pass


class ProviderRejection(GatewayError):
    pass


class ScriptExhausted(GatewayError):
    """Scripted mock ran out of replayable responses."""


class NoStimulusFound(GatewayError):
    pass


class MalformedStimulus(GatewayError):
    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class NoModuleFound(GatewayError):
    pass


class PatchRejected(GatewayError):
    """Patch text failed parse, elaboration, or signature preservation."""

    def __init__(self, reason, detail=""):
        super().__init__(f"patch rejected ({reason}): {detail}" if detail else f"patch rejected ({reason})")
        self.reason = reason
        self.detail = detail


# --- dataset / reporting ----------------------------------------------------

class ManifestError(SvLoopError):
    pass


class ReportError(SvLoopError):
    pass
