"""Fast surface-integral-equation scattering solver.

Far-zone box-to-box interactions run through a three-stage group-by-group
scheme (dipole mapping, translation, inverse mapping) with exact and
learned translation backends. See the README for the CLI and file formats.
"""

from ._core import (
    Medium,
    TriangleMesh,
    __version__,
    dense_solve,
    dyadic_green,
    fibonacci_lattice,
    icosphere,
    load_mesh,
    mie_far_field,
    pattern_rel_error,
    rwg_count,
    select_dipole_count,
    solve,
)

__all__ = [
    "Medium",
    "TriangleMesh",
    "__version__",
    "dense_solve",
    "dyadic_green",
    "fibonacci_lattice",
    "icosphere",
    "load_mesh",
    "mie_far_field",
    "pattern_rel_error",
    "rwg_count",
    "select_dipole_count",
    "solve",
]
