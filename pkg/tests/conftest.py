import pytest

from hyplab import compile_cyclicprod, free_group, sphere_sizes_exact


@pytest.fixture(scope="session")
def free2():
    return free_group(2)


@pytest.fixture(scope="session")
def free1():
    return free_group(1)


@pytest.fixture(scope="session")
def cp23():
    return compile_cyclicprod((2, 3))


@pytest.fixture(scope="session")
def free2_sizes():
    return sphere_sizes_exact(free_group(2), 64)


@pytest.fixture(scope="session")
def cp23_sizes():
    return sphere_sizes_exact(compile_cyclicprod((2, 3)), 32)
