"""Shared fixtures: the two workhorse instances and their focal frames.

Frame and form construction is exact but not free, so everything heavy is
session-scoped.  frame38_generic is a point where Condition A fails, which
several tests need to exercise the nontrivial branch of the pencil code.
"""

import pytest

from isoparam.clifford import build_clifford_system
from isoparam.focalgeom import build_frame, find_focal_point, third_forms


@pytest.fixture(scope="session")
def sys14():
    return build_clifford_system(1, 4)


@pytest.fixture(scope="session")
def sys38():
    return build_clifford_system(3, 8)


@pytest.fixture(scope="session")
def frame14(sys14):
    return find_focal_point(sys14)


@pytest.fixture(scope="session")
def frame38(sys38):
    return find_focal_point(sys38)


@pytest.fixture(scope="session")
def frame38_generic(sys38):
    # Condition A fails here; the u-w/v-w blocks of the p_a are nonzero.
    return build_frame(sys38, [1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0])


@pytest.fixture(scope="session")
def forms14(frame14):
    return third_forms(frame14)


@pytest.fixture(scope="session")
def forms38(frame38):
    return third_forms(frame38)


@pytest.fixture(scope="session")
def forms38_generic(frame38_generic):
    return third_forms(frame38_generic)
