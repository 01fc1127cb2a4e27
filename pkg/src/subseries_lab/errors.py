"""Exception hierarchy shared by every module.

Each error carries a stable ``code`` so the CLI can emit a machine-readable
error object.
"""


class SubseriesError(Exception):
    code = "SubseriesError"

    def to_json(self) -> dict:
        return {"error": self.code, "message": str(self)}


class UnresolvableVerdict(SubseriesError):
    """The oracle cannot classify a subseries from declarations or rules."""

    code = "UnresolvableVerdict"


class DepthExhausted(SubseriesError):
    """A construction needed more terms than the configured depth cap."""

    code = "DepthExhausted"


class InstanceContradiction(SubseriesError):
    """Declared verdicts are inconsistent with conditional convergence."""

    code = "InstanceContradiction"


class PreconditionViolated(SubseriesError):
    code = "PreconditionViolated"


class OutOfRange(SubseriesError):
    code = "OutOfRange"
