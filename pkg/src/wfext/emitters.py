"""Abstract class for result emitters. An emitter renders a run result as text."""

import csv
import io
import json
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import structlog


@dataclass
class RunResult:
    """What a subcommand produced: a document for JSON, a table for CSV"""

    document: dict
    columns: Sequence[str] = ()
    rows: list[Sequence[Any]] = field(default_factory=list)


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, Fraction):
        return str(value)
    if value is None:
        return ""
    return str(value)


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


class ResultEmitter(ABC):
    """A ResultEmitter renders a RunResult into one output format"""

    def __init__(self, logger: structlog.BoundLogger):
        """
        Initialize the emitter with a logger.

        :param logger: The logger instance to use for logging.
        """
        self.logger = logger

    @abstractmethod
    def render(self, result: RunResult) -> str:
        """
        Abstract method to render a result.

        :param result: Result of a subcommand run.
        :return: The rendered text, newline terminated.
        """
        pass


class CsvEmitter(ResultEmitter):
    """Header row plus one row per record; floats use their shortest round-trip form"""

    def render(self, result: RunResult) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(result.columns)
        for row in result.rows:
            writer.writerow([_cell(value) for value in row])
        self.logger.debug("Rendered CSV", rows=len(result.rows))
        return buffer.getvalue()


class JsonEmitter(ResultEmitter):
    """The result document, indented, keys in insertion order"""

    def render(self, result: RunResult) -> str:
        text = json.dumps(result.document, indent=2, default=_jsonable)
        self.logger.debug("Rendered JSON", size=len(text))
        return text + "\n"
