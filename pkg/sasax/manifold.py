import logging
from enum import Enum
from typing import (
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

from flax.struct import dataclass, field

from sasax.errors import SurgeryError
from sasax.lattice import IntegerMatrix, determinant, rank

logger = logging.getLogger(__name__)


class Flag(str, Enum):
    """Tags attached to a tracked surface."""

    SYMPLECTIC = "symplectic"
    LAGRANGIAN = "lagrangian"
    SPHERE = "sphere"
    TORUS = "torus"
    SECTION = "section"
    FIBER = "fiber"
    EXCEPTIONAL = "exceptional"


class Pi1Status(str, Enum):
    """Tri-state answer to "is the manifold simply connected?"."""

    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass
class SurfaceClass:
    """An embedded closed oriented surface tracked in a 4-manifold.

    Attributes:
        name: Unique name within the manifold.
        genus: The genus g ≥ 0.
        self_intersection: [S]·[S], always equal to the Gram diagonal entry.
        flags: Subset of Flag.
        provenance: Ordered log of the operations that produced the surface.
        pi1_image: Free abelian generators of π₁ hit by π₁(S), when known.
        orientation: +1, or -1 when the natural orientation is reversed.
        complement_simply_connected: Whether π₁ of the complement is trivial.
    """

    name: str
    genus: int
    self_intersection: int
    flags: FrozenSet[Flag]
    provenance: Tuple[str, ...] = ()
    pi1_image: FrozenSet[str] = frozenset()
    orientation: int = 1
    complement_simply_connected: bool = False

    def __post_init__(self):
        """Check the flag invariants."""
        if self.genus < 0:
            raise SurgeryError(f"{self.name}: negative genus {self.genus}")
        if Flag.SYMPLECTIC in self.flags and Flag.LAGRANGIAN in self.flags:
            raise SurgeryError(
                f"{self.name}: cannot be both symplectic and Lagrangian"
            )
        if Flag.SPHERE in self.flags and self.genus != 0:
            raise SurgeryError(f"{self.name}: sphere with genus {self.genus}")
        if Flag.TORUS in self.flags and self.genus != 1:
            raise SurgeryError(f"{self.name}: torus with genus {self.genus}")
        if self.orientation not in (1, -1):
            raise SurgeryError(f"{self.name}: orientation must be ±1")

    @property
    def euler_characteristic(self) -> int:
        """χ(S) = 2 - 2g."""
        return 2 - 2 * self.genus

    def has(self, flag: Flag) -> bool:
        """Whether the surface carries the given flag."""
        return flag in self.flags


def topology_flags(genus: int) -> FrozenSet[Flag]:
    """The sphere or torus flag implied by a genus, if any."""
    return frozenset({0: {Flag.SPHERE}, 1: {Flag.TORUS}}.get(genus, set()))


@dataclass
class Pi1State:
    """What the ledger knows about π₁.

    Attributes:
        status: yes, no, or unknown.
        generators: Surviving free abelian generators, or None when untracked.
        provenance: The chain of rules that established the status.
    """

    status: Pi1Status
    generators: Optional[FrozenSet[str]] = None
    provenance: Tuple[str, ...] = ()


@dataclass
class AuxiliaryObject:
    """Untracked geometric data that later operations consume.

    Examples are Lagrangian cylinders, Lagrangian tori not yet in the Gram
    matrix, vanishing cycle slots of an elliptic fibration, and records of
    performed fiber sums.
    """

    name: str
    kind: str
    attrs: Tuple[Tuple[str, str], ...] = ()

    def attr(self, key: str, default: str = None) -> str:
        """Look up an attribute by key."""
        return dict(self.attrs).get(key, default)


@dataclass
class ManifoldModel:
    """Closed symplectic 4-manifold bookkeeping.

    Attributes:
        euler_characteristic: χ(M).
        pi1: What is known about π₁(M).
        surfaces: The tracked surfaces, in Gram order.
        gram: Symmetric intersection matrix of the tracked surfaces.
        symplectic_form_tag: Name of the symplectic form, if recorded.
        auxiliary: Untracked objects consumed by later operations.
        notes: Free-form remarks recorded along the construction.
    """

    euler_characteristic: int
    pi1: Pi1State
    surfaces: Tuple[SurfaceClass, ...]
    gram: IntegerMatrix
    symplectic_form_tag: Optional[str] = None
    auxiliary: Tuple[AuxiliaryObject, ...] = ()
    notes: Tuple[str, ...] = ()

    def __post_init__(self):
        """Check the structural invariants."""
        n = len(self.surfaces)
        if self.gram.shape != (n, n) or not self.gram.is_symmetric():
            raise SurgeryError("Gram matrix must be symmetric and n x n")
        names = [s.name for s in self.surfaces]
        if len(set(names)) != n:
            raise SurgeryError(f"duplicate surface names in {names}")
        for i, s in enumerate(self.surfaces):
            if s.self_intersection != self.gram[i, i]:
                raise SurgeryError(
                    f"{s.name}: self-intersection {s.self_intersection} "
                    f"disagrees with Gram entry {self.gram[i, i]}"
                )
        b2 = self.b2
        if b2 is None:
            return
        if b2 < 0:
            raise SurgeryError(
                f"simply connected with χ = {self.euler_characteristic} "
                f"gives b₂ = {b2} < 0"
            )
        if n > b2 and determinant(self.gram) != 0:
            raise SurgeryError(
                f"{n} surfaces with nondegenerate Gram matrix exceed b₂ = {b2}"
            )

    @property
    def simply_connected(self) -> Pi1Status:
        """The π₁ status."""
        return self.pi1.status

    @property
    def b2(self) -> Optional[int]:
        """b₂ = χ - 2, known only when the manifold is simply connected."""
        if self.pi1.status != Pi1Status.YES:
            return None
        return self.euler_characteristic - 2

    @property
    def names(self) -> Tuple[str, ...]:
        """Surface names in Gram order."""
        return tuple(s.name for s in self.surfaces)

    def index(self, name: str) -> int:
        """Gram index of a named surface."""
        for i, s in enumerate(self.surfaces):
            if s.name == name:
                return i
        raise SurgeryError(f"no tracked surface named {name!r}")

    def surface(self, name: str) -> SurfaceClass:
        """Look up a tracked surface by name."""
        return self.surfaces[self.index(name)]

    def pairing(self, a: str, b: str) -> int:
        """The intersection number [a]·[b]."""
        return self.gram[self.index(a), self.index(b)]

    def auxiliary_of_kind(self, kind: str) -> Tuple[AuxiliaryObject, ...]:
        """All auxiliary objects of a given kind."""
        return tuple(obj for obj in self.auxiliary if obj.kind == kind)


def fresh_name(model: ManifoldModel, base: str) -> str:
    """A name derived from base that no tracked surface uses yet."""
    taken = set(model.names) | {obj.name for obj in model.auxiliary}
    if base not in taken:
        return base
    k = 2
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def assemble(
    model: ManifoldModel,
    surfaces: Sequence[SurfaceClass],
    gram: Sequence[Sequence[int]],
    **changes,
) -> ManifoldModel:
    """Replace the tracked surfaces, syncing self-intersections with the Gram.

    Args:
        model: The model to update.
        surfaces: The new surfaces, in Gram order.
        gram: The new Gram matrix as a list of rows.
        **changes: Any other fields to replace.

    Returns:
        The updated model.
    """
    surfaces = tuple(
        s.replace(self_intersection=gram[i][i]) for i, s in enumerate(surfaces)
    )
    return model.replace(
        surfaces=surfaces,
        gram=IntegerMatrix.from_rows(gram, cols=len(surfaces)),
        **changes,
    )


def _with_provenance(s: SurfaceClass, entry: str) -> SurfaceClass:
    return s.replace(provenance=s.provenance + (entry,))


def blow_up(
    model: ManifoldModel,
    through: Sequence[str] = (),
    multiplicities: Optional[Mapping[str, int]] = None,
    *,
    name: Optional[str] = None,
    allow_triple_point: bool = False,
) -> ManifoldModel:
    """Blow up a point lying on the given surfaces.

    A surface S passing k times through the point becomes S - k·E, so
    S² drops by k² and two surfaces through the point once each lose one
    intersection.

    Args:
        model: The manifold to blow up.
        through: Names of the surfaces through the point.
        multiplicities: Multiplicity of each surface at the point (default 1).
        name: Name of the new exceptional sphere.
        allow_triple_point: Accept three or more surfaces through the point.
            The point must have been recorded as a triple point.

    Returns:
        The blown-up manifold, with χ increased by 1.
    """
    through = list(through)
    if len(set(through)) != len(through):
        raise SurgeryError(f"repeated surface in blow-up point {through}")
    multiplicities = dict(multiplicities or {})
    mult = {s: multiplicities.get(s, 1) for s in through}
    if any(k < 1 for k in mult.values()):
        raise SurgeryError("multiplicities must be positive")

    triple = None
    if len(through) > 2:
        if not allow_triple_point:
            raise SurgeryError(
                f"blow-up through {len(through)} surfaces at one point"
            )
        members = ",".join(sorted(through))
        triple = next(
            (
                obj
                for obj in model.auxiliary_of_kind("triple_point")
                if obj.attr("members") == members
            ),
            None,
        )
        if triple is None:
            raise SurgeryError(f"no recorded triple point on {members}")
    for i, a in enumerate(through):
        for b in through[i + 1 :]:
            if model.pairing(a, b) < 1:
                raise SurgeryError(f"surfaces {a} and {b} do not meet")

    name = name or fresh_name(model, "E")
    old = model.gram.to_rows()
    n = len(old)
    idx = {s: model.index(s) for s in through}
    k = [0] * n
    for s, i in idx.items():
        k[i] = mult[s]

    gram = [[old[i][j] - k[i] * k[j] for j in range(n)] for i in range(n)]
    for i in range(n):
        gram[i].append(k[i])
    gram.append(k + [-1])

    surfaces = [
        _with_provenance(s, f"blow-up {name}") if s.name in idx else s
        for s in model.surfaces
    ]
    surfaces.append(
        SurfaceClass(
            name=name,
            genus=0,
            self_intersection=-1,
            flags=frozenset(
                {Flag.SYMPLECTIC, Flag.SPHERE, Flag.EXCEPTIONAL}
            ),
            provenance=(f"exceptional sphere of blow-up through {through}",),
        )
    )
    auxiliary = tuple(obj for obj in model.auxiliary if obj is not triple)

    logger.debug("blow-up %s through %s", name, through)
    return assemble(
        model,
        surfaces,
        gram,
        euler_characteristic=model.euler_characteristic + 1,
        auxiliary=auxiliary,
    )


def resolve(
    model: ManifoldModel, s1: str, s2: str, *, name: Optional[str] = None
) -> ManifoldModel:
    """Smooth the positive transverse intersections of two symplectic surfaces.

    The result represents [S₁] + [S₂] and has genus g₁ + g₂ + d - 1 where
    d = S₁·S₂. It takes the Gram position of S₁; S₂ is removed.
    """
    a, b = model.surface(s1), model.surface(s2)
    d = model.pairing(s1, s2)
    if d == 0:
        raise SurgeryError(f"nothing to resolve: {s1} and {s2} are disjoint")
    if d < 0:
        raise SurgeryError(
            f"intersections of {s1} and {s2} must be positive, got {d}"
        )
    for s in (a, b):
        if not s.has(Flag.SYMPLECTIC):
            raise SurgeryError(f"{s.name} is not symplectic")

    i, j = model.index(s1), model.index(s2)
    old = model.gram.to_rows()
    n = len(old)
    combined = [old[i][k] + old[j][k] for k in range(n)]
    combined[i] = old[i][i] + 2 * d + old[j][j]
    for k in range(n):
        old[i][k] = old[k][i] = combined[k]
    keep = [k for k in range(n) if k != j]
    gram = [[old[r][c] for c in keep] for r in keep]

    genus = a.genus + b.genus + d - 1
    merged = SurfaceClass(
        name=name or f"{s1}+{s2}",
        genus=genus,
        self_intersection=combined[i],
        flags=frozenset({Flag.SYMPLECTIC}) | topology_flags(genus),
        provenance=a.provenance
        + (f"resolve {s1} and {s2} at {d} point(s)",),
        pi1_image=a.pi1_image | b.pi1_image,
        orientation=a.orientation,
    )
    surfaces = [
        merged if k == i else model.surfaces[k] for k in keep
    ]
    logger.debug("resolve %s and %s into %s", s1, s2, merged.name)
    return assemble(model, surfaces, gram)


def parallel_copy(
    model: ManifoldModel, s: str, *, name: Optional[str] = None
) -> ManifoldModel:
    """Add a disjoint homologous push-off of a square-zero surface."""
    source = model.surface(s)
    if source.self_intersection != 0:
        raise SurgeryError(
            f"no homologous disjoint displacement tracked for {s} "
            f"with self-intersection {source.self_intersection}"
        )
    name = name or fresh_name(model, f"{s}'")
    i = model.index(s)
    old = model.gram.to_rows()
    gram = [row + [row[i]] for row in old]
    gram.append(list(old[i]) + [0])

    copy = _with_provenance(
        source.replace(name=name), f"parallel copy of {s}, disjoint from it"
    )
    return assemble(model, list(model.surfaces) + [copy], gram)


@dataclass
class Pairing:
    """Surfaces on either side whose punctured pieces are glued.

    Attributes:
        left: Surface on the left summand.
        right: Surface on the right summand.
        count: Number of boundary circles matched, d ≥ 1.
    """

    left: str
    right: str
    count: int = 1


@dataclass
class GluingSpec:
    """How two symplectic 4-manifolds are summed along a pair of necks.

    Attributes:
        left_neck: Neck surface N₁ in the left summand.
        right_neck: Neck surface N₂ in the right summand.
        pairings: Which surfaces meeting the necks are glued together.
        names: Name of each glued surface, keyed by any member name.
    """

    left_neck: str
    right_neck: str
    pairings: Tuple[Pairing, ...] = ()
    names: Dict[str, str] = field(pytree_node=False, default_factory=dict)


def _component_name(members: List[Tuple[str, str]], names: Mapping) -> str:
    for _, member in members:
        if member in names:
            return names[member]
    return "#".join(member for _, member in members)


def _pi1_after_sum(
    left: ManifoldModel,
    right: ManifoldModel,
    left_neck: SurfaceClass,
    right_neck: SurfaceClass,
) -> Pi1State:
    """Apply the only rule the ledger knows for π₁ of a fiber sum.

    When one neck has simply connected complement and lies in a simply
    connected summand, π₁ of the sum is the other summand's π₁ modulo the
    image of its neck. The ledger tracks π₁ as free abelian generators.
    """
    results = []
    for here, neck, there, other in (
        (left, left_neck, right, right_neck),
        (right, right_neck, left, left_neck),
    ):
        if (
            there.pi1.status == Pi1Status.YES
            and other.complement_simply_connected
            and here.pi1.generators is not None
        ):
            survivors = here.pi1.generators - neck.pi1_image
            entry = (
                f"sum along {left_neck.name}={right_neck.name} kills "
                f"{sorted(here.pi1.generators & neck.pi1_image)}"
            )
            results.append(
                Pi1State(
                    status=Pi1Status.NO if survivors else Pi1Status.YES,
                    generators=frozenset(survivors),
                    provenance=here.pi1.provenance + (entry,),
                )
            )
    if not results:
        return Pi1State(
            status=Pi1Status.UNKNOWN,
            provenance=(
                f"no π₁ rule applies to sum along "
                f"{left_neck.name}={right_neck.name}",
            ),
        )
    return min(results, key=lambda p: len(p.generators))


def gompf_sum(
    left: ManifoldModel, right: ManifoldModel, spec: GluingSpec
) -> ManifoldModel:
    """Symplectic sum of two manifolds along necks of equal genus.

    Surfaces meeting the necks must all appear in the pairings. Each connected
    component of the pairing graph becomes one glued surface whose class
    pairs as the side-wise sums of its members and whose genus follows from
    χ = Σχ(members) - 2·Σd. Survivors from different sides become disjoint.

    Args:
        left: The left summand M₁.
        right: The right summand M₂.
        spec: Necks, pairings, and names of glued surfaces.

    Returns:
        The sum, with χ = χ₁ + χ₂ - 2χ(N).
    """
    n1 = left.surface(spec.left_neck)
    n2 = right.surface(spec.right_neck)
    if n1.genus != n2.genus:
        raise SurgeryError(
            f"neck genera differ: {n1.name} has genus {n1.genus}, "
            f"{n2.name} has genus {n2.genus}"
        )
    if n1.self_intersection != -n2.self_intersection:
        raise SurgeryError(
            f"neck self-intersections {n1.self_intersection} and "
            f"{n2.self_intersection} are not opposite"
        )

    sides = {"L": (left, n1.name), "R": (right, n2.name)}
    totals: Dict[Tuple[str, str], int] = {}
    parent: Dict[Tuple[str, str], Tuple[str, str]] = {}

    def find(node: Tuple[str, str]) -> Tuple[str, str]:
        while parent[node] != node:
            parent[node] = parent[parent[node]]
            node = parent[node]
        return node

    for p in spec.pairings:
        if p.count < 1:
            raise SurgeryError(f"pairing {p.left}~{p.right} has count < 1")
        for side, member in (("L", p.left), ("R", p.right)):
            model, neck = sides[side]
            model.surface(member)
            if member == neck:
                raise SurgeryError(f"neck {neck} cannot be paired")
            node = (side, member)
            parent.setdefault(node, node)
            totals[node] = totals.get(node, 0) + p.count
        parent[find(("L", p.left))] = find(("R", p.right))

    for side, (model, neck) in sides.items():
        for s in model.surfaces:
            if s.name == neck:
                continue
            meets = model.pairing(s.name, neck)
            given = totals.get((side, s.name))
            if given is None and meets != 0:
                raise SurgeryError(
                    f"class does not survive the sum: {s.name} meets "
                    f"{neck} {meets} time(s)"
                )
            if given is not None and given != meets:
                raise SurgeryError(
                    f"pairing counts for {s.name} sum to {given} but it "
                    f"meets {neck} {meets} time(s)"
                )
            if given is not None and not s.has(Flag.SYMPLECTIC):
                raise SurgeryError(f"{s.name} is not symplectic")

    # Glued components, in order of first appearance in the pairing list
    components: Dict[Tuple[str, str], List[Tuple[str, str]]] = {}
    for p in spec.pairings:
        for node in (("L", p.left), ("R", p.right)):
            members = components.setdefault(find(node), [])
            if node not in members:
                members.append(node)
    edge_count: Dict[Tuple[str, str], int] = {}
    for p in spec.pairings:
        root = find(("L", p.left))
        edge_count[root] = edge_count.get(root, 0) + p.count

    # Express every resulting class as a vector of (side, member) terms
    vectors: List[List[Tuple[str, str]]] = []
    surfaces: List[SurfaceClass] = []
    glued_nodes = set(totals)
    for s in left.surfaces:
        if s.name != n1.name and ("L", s.name) not in glued_nodes:
            vectors.append([("L", s.name)])
            surfaces.append(s)

    for root, members in components.items():
        chi = sum(
            sides[side][0].surface(member).euler_characteristic
            for side, member in members
        ) - 2 * edge_count[root]
        if chi % 2:
            raise SurgeryError(f"glued surface {members} has odd χ = {chi}")
        genus = 1 - chi // 2
        parts = [sides[side][0].surface(member) for side, member in members]
        image = frozenset().union(*(s.pi1_image for s in parts))
        vectors.append(members)
        surfaces.append(
            SurfaceClass(
                name=_component_name(members, spec.names),
                genus=genus,
                self_intersection=0,
                flags=frozenset({Flag.SYMPLECTIC}) | topology_flags(genus),
                provenance=(
                    "glued "
                    + " + ".join(member for _, member in members)
                    + f" in sum along {n1.name}={n2.name}",
                ),
                pi1_image=image,
            )
        )

    for s in right.surfaces:
        if s.name != n2.name and ("R", s.name) not in glued_nodes:
            vectors.append([("R", s.name)])
            surfaces.append(s)

    def pair(u: List[Tuple[str, str]], v: List[Tuple[str, str]]) -> int:
        return sum(
            sides[a_side][0].pairing(a, b)
            for a_side, a in u
            for b_side, b in v
            if a_side == b_side
        )

    gram = [[pair(u, v) for v in vectors] for u in vectors]
    names = [s.name for s in surfaces]
    if len(set(names)) != len(names):
        raise SurgeryError(f"surface names collide after the sum: {names}")

    pi1 = _pi1_after_sum(left, right, n1, n2)
    if pi1.generators is not None:
        surfaces = [
            s.replace(pi1_image=s.pi1_image & pi1.generators) for s in surfaces
        ]

    record = AuxiliaryObject(
        name=f"sum:{n1.name}={n2.name}",
        kind="sum",
        attrs=(("left_neck", n1.name), ("right_neck", n2.name)),
    )
    logger.info(
        "sum along %s=%s: χ = %d, %d glued surface(s), π₁ %s",
        n1.name,
        n2.name,
        left.euler_characteristic
        + right.euler_characteristic
        - 2 * n1.euler_characteristic,
        len(components),
        pi1.status.value,
    )
    return assemble(
        left,
        surfaces,
        gram,
        euler_characteristic=left.euler_characteristic
        + right.euler_characteristic
        - 2 * n1.euler_characteristic,
        pi1=pi1,
        symplectic_form_tag=left.symplectic_form_tag
        or right.symplectic_form_tag,
        auxiliary=left.auxiliary + right.auxiliary + (record,),
        notes=left.notes + right.notes,
    )


def make_symplectic(
    model: ManifoldModel, targets: Iterable[str]
) -> ManifoldModel:
    """Perturb the form so that given Lagrangian surfaces become symplectic.

    The Lagrangians must be linearly independent in homology and no three of
    them may share a recorded triple point. Untargeted symplectic surfaces
    stay symplectic.
    """
    targets = list(targets)
    for t in targets:
        if not model.surface(t).has(Flag.LAGRANGIAN):
            raise SurgeryError(f"{t} is not Lagrangian")
    rows = model.gram.submatrix(
        [model.index(t) for t in targets], range(len(model.surfaces))
    )
    if rank(rows) != len(targets):
        raise SurgeryError(
            f"Lemma hypothesis fails: classes of {targets} are linearly "
            "dependent in H₂"
        )
    for obj in model.auxiliary_of_kind("triple_point"):
        members = obj.attr("members").split(",")
        if len(set(members) & set(targets)) >= 3:
            raise SurgeryError(f"Lagrangians {members} share a triple point")

    surfaces = [
        _with_provenance(
            s.replace(
                flags=(s.flags - {Flag.LAGRANGIAN}) | {Flag.SYMPLECTIC}
            ),
            "made symplectic by perturbing the form",
        )
        if s.name in targets
        else s
        for s in model.surfaces
    ]
    tag = model.symplectic_form_tag or "omega"
    logger.info("made %s symplectic", targets)
    return assemble(
        model,
        surfaces,
        model.gram.to_rows(),
        symplectic_form_tag=f"{tag}+perturbation({','.join(targets)})",
    )


def forget(model: ManifoldModel, names: Iterable[str]) -> ManifoldModel:
    """Stop tracking the given surfaces."""
    drop = {model.index(s) for s in names}
    keep = [i for i in range(len(model.surfaces)) if i not in drop]
    gram = model.gram.submatrix(keep, keep).to_rows()
    return assemble(model, [model.surfaces[i] for i in keep], gram)


def rename(
    model: ManifoldModel,
    mapping: Mapping[str, str],
    *,
    order: Optional[Sequence[str]] = None,
) -> ManifoldModel:
    """Rename tracked surfaces and optionally reorder them.

    Args:
        model: The manifold.
        mapping: Old name to new name. Unlisted surfaces keep their names.
        order: The new names in the desired Gram order, if reordering.

    Returns:
        The renamed manifold.
    """
    for old in mapping:
        model.surface(old)
    surfaces = [
        s.replace(name=mapping.get(s.name, s.name)) for s in model.surfaces
    ]
    gram = model.gram.to_rows()
    if order is not None:
        position = {s.name: i for i, s in enumerate(surfaces)}
        if sorted(order) != sorted(position):
            raise SurgeryError("order must be a permutation of the names")
        perm = [position[s] for s in order]
        surfaces = [surfaces[i] for i in perm]
        gram = [[gram[i][j] for j in perm] for i in perm]
    return assemble(model, surfaces, gram)


def cap_cylinders(model: ManifoldModel) -> ManifoldModel:
    """Close up Lagrangian cylinders with vanishing-cycle disks.

    Each cylinder has its boundary circles on necks that have been summed
    with elliptic surfaces. Capping both ends with Lagrangian disks over
    vanishing cycles of the glued fibration gives a Lagrangian sphere of
    self-intersection -2. The Lagrangian torus meeting the cylinder starts
    to be tracked alongside it.
    """
    sums = model.auxiliary_of_kind("sum")
    slots = list(model.auxiliary_of_kind("vanishing_cycle"))
    consumed = set()
    new_surfaces: List[SurfaceClass] = []
    links: List[Tuple[str, str]] = []

    cylinders = sorted(
        model.auxiliary_of_kind("cylinder"), key=lambda c: c.name
    )
    for cyl in cylinders:
        caps = []
        for neck in cyl.attr("ends").split(","):
            record = next(
                (r for r in sums if r.attr("left_neck") == neck),
                None,
            )
            if record is None:
                raise SurgeryError(
                    f"cylinder {cyl.name}: end on {neck} is not capped by "
                    "a summed elliptic surface"
                )
            fiber = record.attr("right_neck")
            slot = next(
                (
                    v
                    for v in slots
                    if v.attr("fiber") == fiber
                    and v.attr("packet") == "a"
                    and v.name not in consumed
                ),
                None,
            )
            if slot is None:
                raise SurgeryError(f"no vanishing cycle left over {fiber}")
            consumed.add(slot.name)
            caps.append(slot.name)

        sphere = cyl.attr("sphere")
        torus = next(
            (
                t
                for t in model.auxiliary_of_kind("lagrangian_torus")
                if t.attr("meets") == cyl.name
            ),
            None,
        )
        if torus is None:
            raise SurgeryError(f"no Lagrangian torus meets {cyl.name}")
        new_surfaces.append(
            SurfaceClass(
                name=sphere,
                genus=0,
                self_intersection=-2,
                flags=frozenset({Flag.LAGRANGIAN, Flag.SPHERE}),
                provenance=(
                    f"cylinder {cyl.name} capped by disks over "
                    f"{' and '.join(caps)}",
                ),
            )
        )
        new_surfaces.append(
            SurfaceClass(
                name=torus.name,
                genus=1,
                self_intersection=0,
                flags=frozenset({Flag.LAGRANGIAN, Flag.TORUS}),
                provenance=(f"Lagrangian torus near {torus.attr('boundary')}",),
            )
        )
        links.append((sphere, torus.name))

    if not new_surfaces:
        raise SurgeryError("no Lagrangian cylinders to cap")

    old = model.gram.to_rows()
    n, k = len(old), len(new_surfaces)
    gram = [row + [0] * k for row in old]
    gram.extend([0] * (n + k) for _ in range(k))
    for i, s in enumerate(new_surfaces):
        gram[n + i][n + i] = s.self_intersection
    for sphere, torus in links:
        i = n + [s.name for s in new_surfaces].index(sphere)
        j = n + [s.name for s in new_surfaces].index(torus)
        gram[i][j] = gram[j][i] = 1

    used = {c.name for c in model.auxiliary_of_kind("cylinder")}
    used |= {t for _, t in links} | consumed
    auxiliary = tuple(obj for obj in model.auxiliary if obj.name not in used)
    logger.info("capped cylinders into %s", [s for s, _ in links])
    return assemble(
        model,
        list(model.surfaces) + new_surfaces,
        gram,
        auxiliary=auxiliary,
    )


def disjoin_pair(
    model: ManifoldModel,
    sphere: str,
    torus: str,
    *,
    names: Optional[Mapping[str, str]] = None,
) -> ManifoldModel:
    """Trade a (-2)-sphere meeting a square-zero torus for disjoint classes.

    With L the sphere and T the torus meeting once:

    1. T' is a parallel copy of T, and resolving T' with L gives T'' of
       genus 1 and square 0 meeting T once.
    2. Resolving copies of T and T'' gives Σ of genus 2 and square 2.
    3. Σ is isotoped through the point where T and T'' meet, and blowing up
       that triple point makes T, T'', Σ pairwise disjoint with squares
       -1, -1, 1.
    4. The exceptional sphere is forgotten.

    Args:
        model: The manifold, with both surfaces symplectic.
        sphere: The (-2)-sphere L.
        torus: The torus T with T² = 0 and L·T = 1.
        names: Optional names for the "torus", "resolved" (T'') and
            "sigma" (Σ) results.

    Returns:
        The manifold with L replaced by T'' and Σ, and χ increased by 1.
    """
    names = dict(names or {})
    L, T = model.surface(sphere), model.surface(torus)
    if not (L.genus == 0 and L.self_intersection == -2):
        raise SurgeryError(f"{sphere} is not a (-2)-sphere")
    if not (T.genus == 1 and T.self_intersection == 0):
        raise SurgeryError(f"{torus} is not a square-zero torus")
    if model.pairing(sphere, torus) != 1:
        raise SurgeryError(f"{sphere} and {torus} do not meet exactly once")

    resolved = fresh_name(model, f"{torus}''")
    sigma = fresh_name(model, f"Sigma({torus})")

    m = parallel_copy(model, torus, name=f"{torus}'")
    m = resolve(m, f"{torus}'", sphere, name=resolved)
    m = parallel_copy(m, torus, name=f"{torus}^")
    m = parallel_copy(m, resolved, name=f"{resolved}^")
    m = resolve(m, f"{torus}^", f"{resolved}^", name=sigma)

    members = [torus, resolved, sigma]
    for i, a in enumerate(members):
        for b in members[i + 1 :]:
            if m.pairing(a, b) != 1:
                raise SurgeryError(f"{a} and {b} do not meet exactly once")
    point = AuxiliaryObject(
        name=f"p({torus},{resolved})",
        kind="triple_point",
        attrs=(("members", ",".join(sorted(members))),),
    )
    m = m.replace(auxiliary=m.auxiliary + (point,))
    exceptional = fresh_name(m, "E")
    m = blow_up(m, members, name=exceptional, allow_triple_point=True)
    m = forget(m, [exceptional])

    mapping = {
        torus: names.get("torus", torus),
        resolved: names.get("resolved", resolved),
        sigma: names.get("sigma", sigma),
    }
    logger.info(
        "disjoined %s and %s into %s", sphere, torus, list(mapping.values())
    )
    return rename(m, {k: v for k, v in mapping.items() if k != v})
