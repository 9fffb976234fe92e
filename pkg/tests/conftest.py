import pytest

from crowdmarket import simharness as sh

# session-scoped: several suites reuse the same seeded crowd
POPULATION_SEED = 42
POPULATION_SIZE = 600


@pytest.fixture(scope="session")
def population_600():
    spec = sh.PopulationSpec(n_workers=POPULATION_SIZE, seed=POPULATION_SEED)
    return sh.generate_population(spec)


@pytest.fixture(scope="session")
def registry_600(population_600):
    from crowdmarket.core import WorkerRegistry

    profiles, _latents = population_600
    return WorkerRegistry.from_profiles(profiles)


def _criterion_number(nodeid: str) -> int | None:
    name = nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return None
    digits = name[len("test_criterion_"):].split("_")[0]
    return int(digits) if digits.isdigit() else None


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One acceptance line per criterion, printed after the run."""
    results: dict[int, str] = {}
    for outcome in ("passed", "failed", "error", "skipped"):
        for report in terminalreporter.stats.get(outcome, []):
            num = _criterion_number(getattr(report, "nodeid", ""))
            if num is None:
                continue
            if outcome == "passed":
                status = "PASS"
            elif outcome == "skipped":
                status = "SKIP"
            else:
                status = "FAIL"
            # a criterion with several phases fails if any phase failed
            if results.get(num) != "FAIL":
                results[num] = status
    if not results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for num in sorted(results):
        terminalreporter.write_line(f"criterion {num}: {results[num]}")
