import pytest

from core.timeshare import TimeSharingDist


@pytest.fixture(scope="session")
def tardos():
    return TimeSharingDist.tardos()


@pytest.fixture(scope="session")
def flat():
    return TimeSharingDist.flat()
