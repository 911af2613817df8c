import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for r in results:
        terminalreporter.write_line(r.line())
    passed = sum(r.passed for r in results)
    terminalreporter.write_line("%d/%d criteria passed" % (passed, len(results)))
