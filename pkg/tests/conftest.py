def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, with whatever the test recorded."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py::" not in getattr(rep, "nodeid", ""):
                continue
            if rep.when != "call" and outcome != "error":
                continue
            props = dict(rep.user_properties)
            label = props.pop("criterion", rep.nodeid.split("::")[-1])
            detail = "; ".join(f"{k}={v}" for k, v in props.items())
            lines.append((label, "PASS" if outcome == "passed" else "FAIL", detail))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for label, status, detail in sorted(lines):
        terminalreporter.write_line(f"{status}  {label}  {detail}")
