import pytest

from dnaids.dataset import load_schema, load_taxonomy

NORMAL_LINE = (
    "0,tcp,http,SF,181,5450,0,0,0,0,0,1,0,0,0,0,0,0,0,0,0,0,8,8,0.00,0.00,0.00,0.00,"
    "1.00,0.00,0.00,9,9,1.00,0.00,0.11,0.00,0.00,0.00,0.00,0.00,normal"
)


def make_line(label="normal", difficulty=None, **overrides):
    """An NSL-KDD line built from NORMAL_LINE with features replaced by name."""
    schema = load_schema()
    fields = NORMAL_LINE.split(",")
    for name, value in overrides.items():
        fields[next(d.index for d in schema if d.name == name)] = str(value)
    fields[41] = label
    if difficulty is not None:
        fields.append(str(difficulty))
    return ",".join(fields)


@pytest.fixture(scope="session")
def schema():
    return load_schema()


@pytest.fixture(scope="session")
def taxonomy():
    return load_taxonomy()


_acceptance_lines = []


def record_acceptance(line):
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
