from __future__ import annotations

import pytest

# criterion number -> (passed, detail), filled in by the acceptance suite
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def steane():
    from blockft.registry import protocol_code

    return protocol_code("steane7")


@pytest.fixture(scope="session")
def rm15():
    from blockft.rm15 import build_rm15

    return build_rm15()


@pytest.fixture(scope="session")
def golay():
    from blockft.classical import golay23

    return golay23()
