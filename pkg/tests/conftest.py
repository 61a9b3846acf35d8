import re

import pytest
from hypothesis import HealthCheck, settings

from stab.corpus import encoding_programs, m_n, random_programs, standard_corpus
from stab.report import full_report

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def corpus():
    return standard_corpus()


@pytest.fixture(scope="session")
def random_corpus():
    return random_programs()


@pytest.fixture(scope="session")
def encodings_corpus():
    return encoding_programs()


@pytest.fixture(scope="session")
def m2():
    return m_n(2)


@pytest.fixture(scope="session")
def reports(corpus):
    return {e.name: full_report(e.term, e.derivation, e.name) for e in corpus}


# ---------------------------------------------------------------- acceptance summary

_CRITERION = re.compile(r"test_criterion_(\d+)")
_outcomes = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m or "test_acceptance" not in report.nodeid:
        return
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    name = report.nodeid.split("::")[-1]
    if hasattr(report, "wasxfail"):
        outcome = "xfail" if report.skipped else "xpass"
    else:
        outcome = report.outcome
    _outcomes.setdefault(int(m.group(1)), []).append((name, outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(_outcomes):
        parts = _outcomes[k]
        bad = [n for n, o in parts if o not in ("passed", "xfail")]
        notes = [n for n, o in parts if o == "xfail"]
        line = f"criterion {k}: {'PASS' if not bad else 'FAIL'}"
        if bad:
            line += f" (failing: {', '.join(bad)})"
        if notes:
            line += f" (literal reading fails as recorded: {', '.join(notes)})"
        tr.write_line(line)
