import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "optomo",
    deadline=None,
    derandomize=True,
    max_examples=30,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("optomo")


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile the jitted kernels once so tests measure steady-state runtimes
    from optomo import kernels

    kernels.warm_up()
