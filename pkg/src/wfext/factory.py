"""Emitter factory"""

import structlog

from wfext.emitters import CsvEmitter, JsonEmitter, ResultEmitter
from wfext.enums import OutputFormat


class EmitterFactory:
    """A factory class to create result emitters"""

    @staticmethod
    def get_emitter(**kwargs) -> ResultEmitter:
        """
        Factory method to return the emitter for an output format.

        :param format: The output format ('csv', 'json').
        :param logger: Structlog logger instance.
        :return: An instance of a concrete emitter class.

        Raises:
            ValueError: If the format is not supported.
        """
        output_format = kwargs.get("format")
        if isinstance(output_format, OutputFormat):
            output_format = output_format.value
        logger: structlog.BoundLogger = kwargs.get("logger")
        logger.debug("Initializing emitter", output_format=output_format)

        if output_format == OutputFormat.CSV.value:
            return CsvEmitter(logger)
        elif output_format == OutputFormat.JSON.value:
            return JsonEmitter(logger)
        else:
            supported = [f.value for f in OutputFormat]
            raise ValueError(f"Unsupported output format: {output_format}. Supported values: {supported}.")
