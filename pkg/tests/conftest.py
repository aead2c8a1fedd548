import sys


def pytest_terminal_summary(terminalreporter):
    log = sys.modules.get("acceptance_log")
    if log is None or not log.ITEMS:
        return
    terminalreporter.section("acceptance criteria")
    for line in log.summary_lines():
        terminalreporter.write_line(line)
    for k in sorted(log.ITEMS):
        for label, ok, detail in log.ITEMS[k]:
            terminalreporter.write_line(f"  [{k}] {'ok  ' if ok else 'MISS'} {label}: {detail}")
    for line in log.INFO:
        terminalreporter.write_line(f"  info: {line}")
