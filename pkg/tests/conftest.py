import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # one verdict line per acceptance criterion, shown after the run;
    # the module is fetched from sys.modules so we report against the
    # instance pytest actually executed, whatever the import mode named it
    mod = None
    for name, m in sys.modules.items():
        if name.rpartition(".")[2] == "test_acceptance" and hasattr(m, "RESULTS"):
            if getattr(m, "STARTED", None):
                mod = m
                break
            mod = mod or m
    if mod is None:
        return
    results = mod.RESULTS
    started = mod.STARTED
    if not started:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria")
    for n in sorted(started):
        if n in results:
            desc, ok = results[n]
            tag = "PASS" if ok else "FAIL"
            terminalreporter.write_line(f"[{tag}] criterion {n:2d}: {desc}")
        else:
            terminalreporter.write_line(
                f"[FAIL] criterion {n:2d}: errored before reaching a verdict"
            )
