import pytest

_RESULTS: dict[str, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion checked by this test")


@pytest.fixture
def detail(request):
    """Attach a measured-value summary to the criterion line of this test."""

    def put(text: str) -> None:
        request.node.user_properties.append(("detail", text))

    return put


@pytest.fixture
def soft_status(request):
    """Override the PASS/FAIL column for a soft criterion."""

    def put(passed: bool) -> None:
        request.node.user_properties.append(("soft_status", "SOFT-PASS" if passed else "SOFT-FAIL"))

    return put


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    label = str(mark.args[0])
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        info = "; ".join(v for k, v in item.user_properties if k == "detail")
        status = {"passed": "PASS", "failed": "FAIL"}.get(rep.outcome, rep.outcome.upper())
        # soft criteria report their own verdict without failing the run
        status = dict(item.user_properties).get("soft_status", status)
        _RESULTS[label] = [status, info]


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")

    def order(label):
        head = label.split("-")[0]
        return (int(head) if head.isdigit() else 99, label)

    for label in sorted(_RESULTS, key=order):
        status, info = _RESULTS[label]
        tr.write_line(f"criterion {label:<7} {status}  {info}")
