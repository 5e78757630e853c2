"""Exception hierarchy.

Validation problems (bad chromosomes, configs, tables, run directories) derive
from :class:`ValidationError`; failures raised while a search is running derive
from :class:`RuntimeFailure`. The CLI maps the two families to exit codes 1 and 2.
"""


class ValidationError(ValueError):
    """Input rejected before any work was done."""


class RuntimeFailure(RuntimeError):
    """A run started and could not complete."""


class DomainError(ValidationError):
    """Argument outside the domain of an operation."""


class ChromosomeParseError(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class LatencyTableError(ValidationError):
    """Raised by the LUT loader; ``problems`` lists every violation found."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class RunArtifactError(ValidationError):
    pass


class ContractViolation(RuntimeError):
    """Ranking data used before the sorting/crowding passes set it."""


class EvaluationError(RuntimeFailure):
    def __init__(self, chromosome, cause: BaseException | None = None):
        self.chromosome = tuple(chromosome)
        text = ",".join(str(g) for g in self.chromosome)
        msg = f"evaluation failed for chromosome {text}"
        if cause is not None:
            msg += f": {cause}"
        super().__init__(msg)


class AccuracyLookupError(RuntimeFailure, KeyError):
    def __init__(self, chromosome):
        self.chromosome = tuple(chromosome)
        text = ",".join(str(g) for g in self.chromosome)
        super().__init__(f"chromosome {text} not found in accuracy table")

    def __str__(self) -> str:
        return self.args[0]
