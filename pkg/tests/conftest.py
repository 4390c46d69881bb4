import pytest

from nilalg import f_basis, load_algebra


@pytest.fixture(scope="session")
def fb_h():
    return f_basis(load_algebra("heisenberg3"))


@pytest.fixture(scope="session")
def fb_ab():
    return f_basis(load_algebra("abelian_4"))


@pytest.fixture(scope="session")
def fb_f7():
    return f_basis(load_algebra("favre7"))


@pytest.fixture(scope="session")
def all_bases(fb_h, fb_ab, fb_f7):
    return {"heisenberg3": fb_h, "abelian_4": fb_ab, "favre7": fb_f7}
