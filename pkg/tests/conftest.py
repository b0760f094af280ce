import hypothesis
import pytest

import recurlab as rl

# Property tests must replay identically run to run; all example generation
# derives from the test body itself, never from wall-clock entropy.
hypothesis.settings.register_profile(
    "deterministic",
    derandomize=True,
    max_examples=60,
    deadline=None,
)
hypothesis.settings.load_profile("deterministic")


@pytest.fixture(scope="session")
def default_op() -> rl.PerturbedRotation:
    """Fold-2 operator with the stock mesh schedule, shared across tests."""
    return rl.build_operator(2, dim_cap=64)


@pytest.fixture(scope="session")
def deep_op() -> rl.PerturbedRotation:
    """Fold-2 operator with extra ladder depth for large-time probes."""
    return rl.build_operator(2, min_levels=18, dim_cap=64)
