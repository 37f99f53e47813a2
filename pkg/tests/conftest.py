import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, whatever the verbosity."""
    rows = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" not in getattr(rep, "nodeid", "") or rep.when != "call" and outcome != "error":
                continue
            props = dict(getattr(rep, "user_properties", []))
            if "criterion" in props:
                rows.append((props["criterion"], "PASS" if outcome == "passed" else "FAIL", props.get("detail", "")))
    if rows:
        terminalreporter.section("acceptance criteria")
        for crit, status, detail in sorted(rows, key=lambda r: int(r[0].split()[0])):
            terminalreporter.write_line(f"criterion {crit}: {status}  {detail}")
