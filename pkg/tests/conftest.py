import pytest

from wirelay.mesh import build_mesh, rest_motion
from wirelay.strain import MaterialParams, compute_strain_field
from wirelay.synthetic import gen_sleeve_bend


@pytest.fixture
def square_mesh():
    """Unit square split into 2 triangles, pattern equal to the plane."""
    verts = [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)]
    patt = [(0, 0), (1, 0), (1, 1), (0, 1)]
    faces = [(0, 1, 2), (0, 2, 3)]
    return build_mesh(verts, faces, patt)


@pytest.fixture
def material():
    return MaterialParams.from_young_poisson()


@pytest.fixture(scope="session")
def small_sleeve():
    """Coarse sleeve-bend scenario shared by graph/layout/solver tests."""
    res = gen_sleeve_bend(
        n_around=32, n_along=16, radius=0.2, length=1.0, theta_max_deg=90.0, frames=12
    )
    field = compute_strain_field(res.mesh, res.motions)
    return res, field


def grid_mesh(nx, ny, size=1.0):
    """Flat plane helper available to tests via plain import."""
    from wirelay.synthetic import _plane_mesh

    return _plane_mesh(nx, ny, size, size)


@pytest.fixture
def flat_mesh():
    return grid_mesh(8, 8, 1.0)


@pytest.fixture
def flat_zero_field(flat_mesh, material):
    motions = rest_motion(flat_mesh, frames=2)
    return compute_strain_field(flat_mesh, motions, material)
