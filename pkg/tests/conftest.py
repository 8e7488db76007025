import pytest

from ecdsim import SweepSpec, SystemParams, build_cd_profile


@pytest.fixture(scope="session")
def params():
    return SystemParams()


@pytest.fixture(scope="session")
def tan_profile(params):
    spec = SweepSpec.for_params("tan", params)
    return build_cd_profile(spec, params, 2001)


@pytest.fixture(scope="session")
def pl_profile(params):
    spec = SweepSpec.for_params("pl", params)
    return build_cd_profile(spec, params, 2001)
