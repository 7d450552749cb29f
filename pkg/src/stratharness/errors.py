"""Exception hierarchy shared across the harness."""

from __future__ import annotations


class HarnessError(Exception):
    """Base class for all harness errors."""


class ConfigError(HarnessError):
    """A scenario, scoring or placement configuration is invalid."""


class IncompleteDataError(HarnessError):
    """Run records required for scoring are missing."""

    def __init__(self, message: str, missing: list[tuple[str, int]] | None = None):
        super().__init__(message)
        self.missing = list(missing or [])


class IllegalActionError(HarnessError):
    """An action was rejected by a game environment; the state is unchanged."""


class EnvInvariantError(HarnessError):
    """A game environment detected a broken internal invariant."""


class AgentFailure(HarnessError):
    """An agent could not produce a usable decision (transport error, reject policy)."""


class ResponseParseError(HarnessError):
    """A model response could not be reduced to an action."""


class TemplateError(HarnessError):
    """A prompt template references a placeholder that cannot be resolved."""


class MetricError(HarnessError):
    pass


class MissingCounterError(MetricError, KeyError):
    def __init__(self, counter: str, metric_id: str | None = None):
        self.counter = counter
        self.metric_id = metric_id
        where = f" (needed by {metric_id})" if metric_id else ""
        super().__init__(f"missing counter {counter!r}{where}")

    def __str__(self) -> str:
        return self.args[0]


class UndefinedMetricError(MetricError, ZeroDivisionError):
    """A metric's denominator is zero; the value is undefined, not zero."""

    def __init__(self, metric_id: str, detail: str = "zero denominator"):
        self.metric_id = metric_id
        super().__init__(f"{metric_id} undefined: {detail}")


class SchemaError(HarnessError):
    """An ingested or persisted record violates its schema."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if field is not None:
            loc.append(f"field {field!r}")
        prefix = f"{', '.join(loc)}: " if loc else ""
        super().__init__(prefix + message)
