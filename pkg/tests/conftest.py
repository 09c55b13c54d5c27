import pytest

from whorlsim import _backend
from whorlsim.dynamics import whorl_family

BACKENDS = [_backend.PyFieldKernel]
if _backend.CompiledFieldKernel is not None:
    BACKENDS.append(_backend.CompiledFieldKernel)


@pytest.fixture(params=BACKENDS, ids=lambda k: k.backend)
def kernel_cls(request):
    return request.param


@pytest.fixture
def whorl0():
    return whorl_family(0.0)



_ACCEPTANCE: dict[str, list[bool]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or report.failed:
        name = report.nodeid.split("::")[-1].split("[")[0]
        _ACCEPTANCE.setdefault(name, []).append(not report.failed)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        results = _ACCEPTANCE[name]
        num = int(name.split("_")[2])
        label = " ".join(name.split("_")[3:])
        status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(
            f"criterion {num:2d} {label}: {status} ({sum(results)}/{len(results)} cases)"
        )
