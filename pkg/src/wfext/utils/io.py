import json
import os

import click
import yaml

from wfext.errors import ArgumentError
from wfext.hierarchy import StratifiedFinalCondition
from wfext.logging import logger


def load_config(file_path: str) -> dict:
    """Loads a given config file"""
    with open(file_path, "r", encoding="utf-8") as file:
        return yaml.safe_load(file) or {}


def load_final_condition(file_path: str, n: int) -> StratifiedFinalCondition:
    """Reads a final-condition JSON document for the n-simplex"""
    try:
        with open(file_path, "r", encoding="utf-8") as file:
            document = json.load(file)
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"Final-condition file {file_path} is not valid JSON: {exc.msg}.") from exc
    return StratifiedFinalCondition.from_document(document, n)


def write_output(text: str, destination: str = "-"):
    """Writes rendered output to a file, or to standard output for '-'"""
    if destination == "-":
        click.echo(text, nl=False)
        return
    directory = os.path.dirname(destination)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(destination, "w", encoding="utf-8", newline="") as file:
        file.write(text)
    logger.info(f"{destination} has been written.")
