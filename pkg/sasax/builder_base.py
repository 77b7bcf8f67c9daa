import logging
from abc import ABC, abstractmethod
from typing import Callable, Optional, Sequence, Tuple

from flax.struct import dataclass, field

from sasax.errors import SurgeryError
from sasax.manifold import ManifoldModel

logger = logging.getLogger(__name__)


@dataclass
class Stage:
    """One named step of a surgery construction.

    Attributes:
        name: Short identifier, used by --stop-after.
        apply: Pure function taking the model after the previous stage.
        description: Human-readable summary for logs.
    """

    name: str = field(pytree_node=False)
    apply: Callable[[ManifoldModel], ManifoldModel] = field(pytree_node=False)
    description: str = field(pytree_node=False, default="")


class SurgeryBuilder(ABC):
    """An abstract construction of a 4-manifold by a sequence of surgeries.

    Subclasses provide the starting manifold and the ordered stages. Running
    the builder threads the model through each stage and can stop early to
    expose intermediate manifolds.
    """

    @abstractmethod
    def initial(self) -> ManifoldModel:
        """The manifold the construction starts from.

        Returns:
            The starting ManifoldModel.
        """
        pass

    @abstractmethod
    def stages(self) -> Sequence[Stage]:
        """The construction steps, in order, after the initial manifold.

        Returns:
            A sequence of Stage objects with distinct names.
        """
        pass

    @property
    def initial_stage_name(self) -> str:
        """Name under which the initial manifold can be requested."""
        return "initial"

    def stage_names(self) -> Tuple[str, ...]:
        """Every name accepted by run(stop_after=...)."""
        return (self.initial_stage_name,) + tuple(
            s.name for s in self.stages()
        )

    def run(self, stop_after: Optional[str] = None) -> ManifoldModel:
        """Build the manifold.

        Args:
            stop_after: Return the model right after this stage. Runs every
                stage when None.

        Returns:
            The resulting ManifoldModel.
        """
        if stop_after is not None and stop_after not in self.stage_names():
            raise SurgeryError(
                f"unknown stage {stop_after!r}, expected one of "
                f"{list(self.stage_names())}"
            )

        model = self.initial()
        logger.info(
            "%s: χ = %d, %d tracked surfaces",
            self.initial_stage_name,
            model.euler_characteristic,
            len(model.surfaces),
        )
        if stop_after == self.initial_stage_name:
            return model

        for stage in self.stages():
            model = stage.apply(model)
            logger.info(
                "%s (%s): χ = %d, %d tracked surfaces, π₁ %s",
                stage.name,
                stage.description,
                model.euler_characteristic,
                len(model.surfaces),
                model.pi1.status.value,
            )
            if stage.name == stop_after:
                break
        return model
