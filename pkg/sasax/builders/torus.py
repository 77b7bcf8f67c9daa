from itertools import combinations

from sasax.lattice import IntegerMatrix
from sasax.manifold import (
    AuxiliaryObject,
    Flag,
    ManifoldModel,
    Pi1State,
    Pi1Status,
    SurfaceClass,
)

# Tori in Gram order; complementary pairs meet once
TORUS_NAMES = ("T12", "T34", "T23", "T14", "T13", "T24")

FORM_TAG = (
    "dx1^dx2 + dx3^dx4 + dx2^dx3 + δ dx1^dx4 + dx2^dx4 - δ dx1^dx3"
)


def _coordinates(name: str) -> frozenset:
    return frozenset(f"x{c}" for c in name[1:])


def new_t4() -> ManifoldModel:
    """The 4-torus T⁴ = R⁴/Z⁴ with its six coordinate 2-tori.

    The tori Tᵢⱼ span H₂(T⁴); Tᵢⱼ·Tₖₗ = 1 for complementary index pairs and 0
    otherwise. T13 is recorded with reversed orientation, which keeps all
    three complementary pairings positive. All six are symplectic for the
    recorded form when 0 < δ ≪ 1.

    The Lagrangian cylinders C1, C2 and the Lagrangian tori T1, T2 living in
    the complement of the necks are registered as auxiliary objects.

    Returns:
        The ManifoldModel of T⁴.
    """
    surfaces = [
        SurfaceClass(
            name=name,
            genus=1,
            self_intersection=0,
            flags=frozenset({Flag.SYMPLECTIC, Flag.TORUS}),
            provenance=(f"coordinate torus {name} of T⁴",),
            pi1_image=_coordinates(name),
            orientation=-1 if name == "T13" else 1,
        )
        for name in TORUS_NAMES
    ]
    n = len(TORUS_NAMES)
    gram = [[0] * n for _ in range(n)]
    for i, j in combinations(range(n), 2):
        a, b = _coordinates(TORUS_NAMES[i]), _coordinates(TORUS_NAMES[j])
        if not a & b:
            gram[i][j] = gram[j][i] = 1

    auxiliary = (
        AuxiliaryObject(
            name="C1",
            kind="cylinder",
            attrs=(("ends", "T12,T13"), ("sphere", "L1")),
        ),
        AuxiliaryObject(
            name="C2",
            kind="cylinder",
            attrs=(("ends", "T12,T14"), ("sphere", "L2")),
        ),
        AuxiliaryObject(
            name="T1",
            kind="lagrangian_torus",
            attrs=(("boundary", "T13"), ("meets", "C1")),
        ),
        AuxiliaryObject(
            name="T2",
            kind="lagrangian_torus",
            attrs=(("boundary", "T14"), ("meets", "C2")),
        ),
    )
    return ManifoldModel(
        euler_characteristic=0,
        pi1=Pi1State(
            status=Pi1Status.NO,
            generators=frozenset({"x1", "x2", "x3", "x4"}),
            provenance=("π₁(T⁴) = Z⁴",),
        ),
        surfaces=tuple(surfaces),
        gram=IntegerMatrix.from_rows(gram),
        symplectic_form_tag=FORM_TAG,
        auxiliary=auxiliary,
    )
