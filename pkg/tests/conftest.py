import numpy as np
import pytest


@pytest.fixture(scope="session")
def rp2_faces():
    """The 6-vertex triangulation of the real projective plane (antipodal
    icosahedron quotient): every pair of vertices is an edge, 10 triangles.

    Returned as lex-sorted face arrays per dimension, ready for boundary
    matrices; the classical H_1 = Z/2 makes it the torsion oracle.
    """
    triangles = sorted(
        [
            (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
            (1, 2, 4), (2, 3, 5), (1, 3, 4), (2, 4, 5), (1, 3, 5),
        ]
    )
    edges = sorted({(t[i], t[j]) for t in triangles for i in range(3) for j in range(i + 1, 3)})
    vertices = [(v,) for v in range(6)]
    assert len(edges) == 15 and len(triangles) == 10
    return [
        np.array(vertices, dtype=np.int32),
        np.array(edges, dtype=np.int32),
        np.array(triangles, dtype=np.int32),
    ]
