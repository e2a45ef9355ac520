import pytest

_CRITERIA: dict[int, list[tuple[bool, str]]] = {}


class Criterion:
    """Collects the sub-checks of one acceptance criterion."""

    def __init__(self, number: int):
        self.number = number
        self.parts = _CRITERIA.setdefault(number, [])

    def check(self, ok: bool, detail: str) -> bool:
        self.parts.append((bool(ok), detail))
        return bool(ok)

    def assert_all(self):
        failed = [d for ok, d in self.parts if not ok]
        assert not failed, "; ".join(failed)


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        parts = _CRITERIA[k]
        status = "PASS" if parts and all(ok for ok, _ in parts) else "FAIL"
        detail = "; ".join(("" if ok else "FAILED ") + d for ok, d in parts)
        terminalreporter.write_line(f"criterion {k}: {status} - {detail}")
