import pytest

from mezzopt.generator import GenSpec, generate_instance

TINY = dict(size="small", floors=1, lanes=1, cross_aisles=2, bays=3, assortment_size=40, fill_fraction=0.2,
            n_orders=5, order_lines=4)
MINI = dict(size="small", floors=2, lanes=2, cross_aisles=3, bays=4, assortment_size=120, fill_fraction=0.3,
            n_orders=20, order_lines=6)


@pytest.fixture(scope="session")
def tiny():
    return generate_instance(GenSpec(**TINY), 1)


@pytest.fixture(scope="session")
def mini():
    return generate_instance(GenSpec(**MINI), 2)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
