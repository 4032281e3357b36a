import numpy as np
import pytest

from bellsim import gates

I2 = np.eye(2)


def kron(*ms):
    """Left-to-right Kronecker product: the first factor is qubit 0."""
    out = np.array([[1.0 + 0j]])
    for m in ms:
        out = np.kron(out, m)
    return out


def controlled_full(u, control, target, n):
    """Oracle for a controlled gate built from projectors, independent of the simulator kernels."""
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    idle = [I2] * n
    on = list(idle)
    idle[control] = p0
    on[control] = p1
    on[target] = u
    return kron(*idle) + kron(*on)


def single_full(u, q, n):
    ms = [I2] * n
    ms[q] = u
    return kron(*ms)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Record a named acceptance criterion's outcome for the terminal summary."""
    entry = {"name": None, "detail": ""}

    def record(name, detail=""):
        entry["name"] = name
        entry["detail"] = detail

    yield record
    if entry["name"] is not None:
        rep = getattr(request.node, "rep_call", None)
        passed = rep is not None and rep.passed
        _ACCEPTANCE.append((entry["name"], passed, entry["detail"]))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in sorted(_ACCEPTANCE, key=lambda e: e[0]):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status}  {name}  {detail}".rstrip())


THEORY = {"QS": gates.SQRT1_2, "RS": gates.SQRT1_2, "RT": gates.SQRT1_2, "QT": -gates.SQRT1_2}
