"""Access to the bundled corpus, index table, and example scenarios."""

from __future__ import annotations

from importlib import resources

from .facts import CpiTable, TaxpayerFacts, load_cpi_table, load_facts
from .model import Statute
from .parser import parse_statute


def read_data_text(relpath: str) -> str:
    """Text of a file under the package's data directory."""
    node = resources.files("statutelab").joinpath("data")
    for part in relpath.split("/"):
        node = node.joinpath(part)
    return node.read_text("utf-8")


def load_default_statute() -> Statute:
    return parse_statute(read_data_text("irc_excerpt.txt"))


def load_default_cpi() -> CpiTable:
    return load_cpi_table(read_data_text("ccpiu.tsv"))


def load_example_facts(name: str) -> TaxpayerFacts:
    """A bundled scenario by name, e.g. "example1"."""
    return load_facts(read_data_text(f"facts/{name}.facts"))
