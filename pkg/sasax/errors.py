"""Exception hierarchy shared by all sasax modules."""


class SasaxError(Exception):
    """Base class for every error raised on bad input or unmet hypotheses."""


class LatticeError(SasaxError):
    """Invalid input to an exact integer linear algebra routine."""


class SurgeryError(SasaxError):
    """A surgery operation was applied outside its preconditions."""


class OrbifoldError(SasaxError):
    """Orbifold, Seifert bundle, or homology criterion hypotheses fail."""


class TwistSearchError(OrbifoldError):
    """No primitive twist was found within the search bound."""

    def __init__(self, bound: int):
        """Record the L∞ bound that was exhausted."""
        super().__init__(
            f"search bound exceeded: no primitive twist with |a|∞ ≤ {bound}"
        )
        self.bound = bound


class ObstructionError(SasaxError):
    """Input lies outside the scope of the Kähler obstruction chain."""


class ManifestError(SasaxError):
    """A JSON manifest is malformed or has the wrong schema."""


class LagrangianError(SasaxError):
    """A Lagrangian piece is unknown or meets another one degenerately."""
