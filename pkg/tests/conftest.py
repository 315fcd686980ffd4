import math

import pytest

from todalab import (
    ShootSpec,
    SystemKind,
    Variant,
    enumerate_su3,
    find_decaying,
    shoot,
)

LOG8 = math.log(8.0)


@pytest.fixture(scope="session")
def liouville_profile():
    """Regular bubble shot out to r = 1e3."""
    return shoot(ShootSpec(SystemKind(Variant.LIOUVILLE), (LOG8,), r_max=1e3))


@pytest.fixture(scope="session")
def liouville_profile_fine():
    """Same shot on a dense grid for radius-resolution tests."""
    return shoot(
        ShootSpec(
            SystemKind(Variant.LIOUVILLE),
            (LOG8,),
            r_max=1e3,
            samples_per_decade=400,
        )
    )


@pytest.fixture(scope="session")
def limitpair_target():
    """Mass-targeted fully decaying two-component solution."""
    return find_decaying(
        SystemKind(Variant.LIMIT_PAIR), 0, LOG8, (-5.0, 5.0), tol=1e-4
    )


@pytest.fixture(scope="session")
def su3_ladder_profile():
    """Symmetric (u1 = u2) three-component shot tall enough to show two
    mass plateaus with simultaneous fast decay."""
    return shoot(
        ShootSpec(SystemKind(Variant.AFFINE_SU3), (-28.0, -28.0, 28.0), r_max=1e3)
    )


@pytest.fixture(scope="session")
def su4_bubble_profile():
    """Three-component symmetric shot with a clean fast-decay annulus."""
    return shoot(
        ShootSpec(SystemKind(Variant.AFFINE_SU4), (-12.0, -12.0, 24.0), r_max=1e3)
    )


@pytest.fixture(scope="session")
def spectrum_400():
    return enumerate_su3(400)
