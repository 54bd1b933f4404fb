import pytest

from statutelab import (
    load_default_cpi,
    load_default_statute,
    load_example_facts,
    read_data_text,
)


@pytest.fixture(scope="session")
def statute():
    return load_default_statute()


@pytest.fixture(scope="session")
def cpi():
    return load_default_cpi()


@pytest.fixture(scope="session")
def examples():
    names = ("example1", "example2", "example3", "example4", "example5", "single2024")
    return {name: load_example_facts(name) for name in names}


@pytest.fixture(scope="session")
def facts_path(tmp_path_factory):
    """Writable copies of the bundled facts files, for CLI invocations."""
    root = tmp_path_factory.mktemp("facts")

    def path_for(name: str) -> str:
        p = root / f"{name}.facts"
        if not p.exists():
            p.write_text(read_data_text(f"facts/{name}.facts"), encoding="utf-8")
        return str(p)

    return path_for


@pytest.fixture(scope="session")
def mutations_path(tmp_path_factory):
    root = tmp_path_factory.mktemp("mutations")

    def path_for(name: str) -> str:
        p = root / f"{name}.mut"
        if not p.exists():
            p.write_text(read_data_text(f"mutations/{name}.mut"), encoding="utf-8")
        return str(p)

    return path_for
