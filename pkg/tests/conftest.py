import pytest

from eppa.fixtures import s4_counterexample


@pytest.fixture(scope="session")
def s4():
    t, c1, c2, d1, ext1 = s4_counterexample()
    return {"T": t, "C1": c1, "C2": c2, "D1": d1, "ext1": ext1}
