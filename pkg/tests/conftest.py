import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one pass/fail line for an acceptance criterion and return the verdict."""

    def record(label: str, checks: dict[str, bool], elapsed: float | None = None) -> bool:
        ok = all(checks.values())
        failed = [name for name, good in checks.items() if not good]
        line = f"[{'PASS' if ok else 'FAIL'}] {label}"
        if elapsed is not None:
            line += f" ({elapsed:.2f} s)"
        if failed:
            line += " -- failed: " + "; ".join(failed)
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
