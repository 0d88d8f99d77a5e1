import pytest

from richads import harness


@pytest.fixture(scope="session")
def small_corpus():
    """300 mixed instances for module-level checks (seed pinned)."""
    cfg = harness.ExperimentConfig(seed=7, instances=300, max_advertisers=4, max_ads=3)
    return harness.generate_corpus(cfg)


@pytest.fixture(scope="session")
def tie_corpus():
    """Tie-heavy instances: tiny integer grids where exact ties are routine."""
    return harness.generate_corpus(harness.tie_prone_config(seed=3, instances=60))
