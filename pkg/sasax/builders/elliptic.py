from sasax.lattice import IntegerMatrix
from sasax.manifold import (
    AuxiliaryObject,
    Flag,
    ManifoldModel,
    Pi1State,
    Pi1Status,
    SurfaceClass,
)

NUM_VANISHING_CYCLES = 12


def new_e1(prefix: str = "") -> ManifoldModel:
    """The rational elliptic surface E(1) = CP² # 9 CP̄².

    Tracked classes, in the basis h, e₁, ..., e₉ of H₂ with h² = 1, eᵢ² = -1:

        h          the line class
        e1 .. e9   exceptional sections, eᵢ·F = 1
        F          the fiber 3h - Σeᵢ, F² = 0, with simply connected complement
        L          a sphere in the class h disjoint from all eᵢ, L·F = 3

    Twelve vanishing cycle slots over F are registered in two packets of six
    homologous cycles each.

    Args:
        prefix: Prepended to every name, e.g. "E2." for a second copy.

    Returns:
        The ManifoldModel of E(1).
    """
    coefficients = (
        [("h", [1] + [0] * 9)]
        + [(f"e{i}", [0] * i + [1] + [0] * (9 - i)) for i in range(1, 10)]
        + [("F", [3] + [-1] * 9), ("L", [1] + [0] * 9)]
    )
    form = [1] + [-1] * 9

    def dot(u: list, v: list) -> int:
        return sum(q * a * b for q, a, b in zip(form, u, v))

    gram = [[dot(u, v) for _, v in coefficients] for _, u in coefficients]

    def flags(name: str) -> set:
        if name == "F":
            return {Flag.SYMPLECTIC, Flag.TORUS, Flag.FIBER}
        if name.startswith("e"):
            return {
                Flag.SYMPLECTIC,
                Flag.SPHERE,
                Flag.SECTION,
                Flag.EXCEPTIONAL,
            }
        return {Flag.SYMPLECTIC, Flag.SPHERE}

    surfaces = tuple(
        SurfaceClass(
            name=prefix + name,
            genus=1 if name == "F" else 0,
            self_intersection=gram[i][i],
            flags=frozenset(flags(name)),
            provenance=(f"class {name} of E(1)",),
            complement_simply_connected=name == "F",
        )
        for i, (name, _) in enumerate(coefficients)
    )
    slots = tuple(
        AuxiliaryObject(
            name=f"{prefix}v{k}",
            kind="vanishing_cycle",
            attrs=(
                ("fiber", prefix + "F"),
                ("packet", "a" if k <= NUM_VANISHING_CYCLES // 2 else "b"),
            ),
        )
        for k in range(1, NUM_VANISHING_CYCLES + 1)
    )
    return ManifoldModel(
        euler_characteristic=12,
        pi1=Pi1State(
            status=Pi1Status.YES,
            generators=frozenset(),
            provenance=("E(1) = CP² # 9 CP̄² is simply connected",),
        ),
        surfaces=surfaces,
        gram=IntegerMatrix.from_rows(gram),
        symplectic_form_tag="kähler",
        auxiliary=slots,
    )
