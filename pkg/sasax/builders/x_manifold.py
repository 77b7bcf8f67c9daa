from typing import List, Sequence

from sasax.builder_base import Stage, SurgeryBuilder
from sasax.builders.elliptic import new_e1
from sasax.builders.torus import new_t4
from sasax.manifold import (
    GluingSpec,
    ManifoldModel,
    Pairing,
    cap_cylinders,
    disjoin_pair,
    forget,
    gompf_sum,
    make_symplectic,
    parallel_copy,
    rename,
)

# (neck in the torus side, torus whose copies are glued, E(1) prefix, offset)
FIBER_SUMS = (
    ("T12", "T34", "E2.", 0),
    ("T13", "T24", "E3.", 10),
    ("T14", "T23", "E4.", 20),
)

SIGN_NOTE = (
    "S10, S20, S30 have self-intersection +1 as constructed (a sphere of "
    "square 1 glued to three square-zero tori); a value of -1 for these "
    "classes is not reproduced and is not used"
)


def sum_with_elliptic(
    model: ManifoldModel, neck: str, torus: str, prefix: str, offset: int
) -> ManifoldModel:
    """Sum along a coordinate torus with a fiber of a fresh E(1).

    The coordinate torus complementary to the neck meets it once, so twelve
    parallel copies of it meet the fiber F in twelve points. Each exceptional
    section eᵢ is glued to one copy, giving a torus of square -1, and the
    line L is glued to the three remaining copies, giving a genus 3 surface
    of square 1.

    Args:
        model: The current manifold, containing the neck and the torus.
        neck: The torus along which the fiber sum is done.
        torus: The square-zero torus meeting the neck once.
        prefix: Name prefix for the E(1) summand.
        offset: Glued surfaces are named S{offset + 1} .. S{offset + 10}.

    Returns:
        The fiber sum.
    """
    copies = [torus]
    for k in range(1, 12):
        model = parallel_copy(model, torus, name=f"{torus}'{k}")
        copies.append(f"{torus}'{k}")

    elliptic = forget(new_e1(prefix), [prefix + "h"])
    pairings: List[Pairing] = [
        Pairing(copies[i - 1], f"{prefix}e{i}", 1) for i in range(1, 10)
    ] + [Pairing(c, prefix + "L", 1) for c in copies[9:]]
    names = {f"{prefix}e{i}": f"S{offset + i}" for i in range(1, 10)}
    names[prefix + "L"] = f"S{offset + 10}"

    return gompf_sum(
        model,
        elliptic,
        GluingSpec(
            left_neck=neck,
            right_neck=prefix + "F",
            pairings=tuple(pairings),
            names=names,
        ),
    )


def disjoin_both(model: ManifoldModel) -> ManifoldModel:
    """Apply disjoin_pair to (L1, T1) and then (L2, T2)."""
    for k, base in ((1, 30), (2, 33)):
        model = disjoin_pair(
            model,
            f"L{k}",
            f"T{k}",
            names={
                "torus": f"S{base + 1}",
                "resolved": f"S{base + 2}",
                "sigma": f"S{base + 3}",
            },
        )
    return model


def finalize(model: ManifoldModel) -> ManifoldModel:
    """Order the generators S1 .. S36 and record the sign remark."""
    order = [f"S{i}" for i in range(1, len(model.surfaces) + 1)]
    model = rename(model, {}, order=order)
    return model.replace(notes=model.notes + (SIGN_NOTE,))


class XManifoldBuilder(SurgeryBuilder):
    """Simply connected symplectic X with b₂ = 36 and 36 disjoint generators.

    T⁴ is summed three times with E(1) along the tori T12, T13, T14. The
    result Z is simply connected with χ = 36. Two Lagrangian spheres made
    from capped cylinders and two Lagrangian tori are then made symplectic,
    and each sphere-torus pair is traded for three disjoint surfaces. The
    result X = Z # 2CP̄² has 36 disjoint symplectic surfaces S1, ..., S36
    whose classes form a basis of H₂(X; Z) with diagonal intersection form.
    """

    @property
    def initial_stage_name(self) -> str:
        """The construction starts at T⁴."""
        return "t4"

    def initial(self) -> ManifoldModel:
        """The 4-torus."""
        return new_t4()

    def stages(self) -> Sequence[Stage]:
        """Three fiber sums, capping, perturbing, disjoining, ordering."""
        sums = [
            Stage(
                name=f"sum{neck[1:]}",
                apply=lambda m, args=(neck, torus, prefix, offset): (
                    sum_with_elliptic(m, *args)
                ),
                description=f"fiber sum along {neck} with E(1)",
            )
            for neck, torus, prefix, offset in FIBER_SUMS
        ]
        return sums + [
            Stage(
                name="z",
                apply=cap_cylinders,
                description="cap Lagrangian cylinders into spheres",
            ),
            Stage(
                name="symplectic",
                apply=lambda m: make_symplectic(m, ["L1", "T1", "L2", "T2"]),
                description="perturb the form",
            ),
            Stage(
                name="disjoin",
                apply=disjoin_both,
                description="trade sphere-torus pairs for disjoint surfaces",
            ),
            Stage(
                name="x",
                apply=finalize,
                description="order the generators",
            ),
        ]


def build_x() -> ManifoldModel:
    """Run the full construction of X."""
    return XManifoldBuilder().run()
