import pytest

from twistlab.modforms import corpus, get_form


@pytest.fixture(scope="session")
def forms():
    return corpus(10_000)


@pytest.fixture(scope="session")
def forms_1e5():
    return corpus(100_000)


@pytest.fixture(scope="session")
def delta(forms):
    return get_form("delta")


@pytest.fixture(scope="session")
def f11(forms):
    return get_form("11.2")


ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[n]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
