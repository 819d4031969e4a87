import functools

import pytest

from extpicard.analysis import reproduce_table

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def cached_table(table_id):
    return reproduce_table(table_id)


@pytest.fixture(scope="session")
def table():
    return cached_table


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
