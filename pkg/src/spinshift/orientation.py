"""
Field orientation relative to the surface.
"""

from enum import Enum

from .errors import DomainError


class Orientation(str, Enum):
    """External field normal (PERP) or parallel (PARA) to the surface."""
    PERP = "perp"
    PARA = "para"

    @classmethod
    def parse(cls, token: str) -> "Orientation":
        try:
            return cls(str(token).strip().lower())
        except ValueError:
            raise DomainError(f"orientation must be 'perp' or 'para', got {token!r}") from None

    @property
    def boundary_weight(self) -> float:
        """Coefficient of r0 in the electrostatic boundary term."""
        return 0.75 if self is Orientation.PERP else 1.0
