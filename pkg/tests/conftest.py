import pytest

from iswo.model import Instance, Rules

LOOSE = Rules(
    min_work_time=1, max_work_time=600, min_ratio=0, max_ratio=100, max_spells=4,
    max_spreadover=900, min_break_between_spells=0,
)


@pytest.fixture
def loose_rules():
    return LOOSE


@pytest.fixture
def two_block():
    return Instance.from_times("two", {"A": [0, 60, 120], "B": [300, 345]}, LOOSE)


# -- acceptance report --------------------------------------------------------

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str) -> bool:
    ACCEPTANCE[n] = (bool(ok), detail)
    print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
