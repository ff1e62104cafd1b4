"""
Surface material models - dielectric functions on the imaginary frequency
axis, static mirror coefficients and Fresnel reflection coefficients.

Frequencies are inverse lengths. A model scaled by a distance z (see
``MaterialModel.scaled``) carries dimensionless frequencies, so the same
formulas evaluate epsilon at u = xi z.
"""

import math
import logging
from dataclasses import dataclass
from enum import Enum
from typing import ClassVar, Dict, Optional, Tuple

from .errors import DomainError

logger = logging.getLogger(__name__)


class ModelKind(str, Enum):
    NONDISPERSIVE = "nondispersive"
    PLASMA = "plasma"
    LORENTZ = "lorentz"
    PERFECT = "perfect"


def _require_positive(name: str, value: float) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")


@dataclass(frozen=True)
class MaterialModel:
    """Common interface of the four surface models."""

    kind: ClassVar[ModelKind]

    @property
    def static_susceptibility(self) -> Optional[float]:
        """chi(0), or None when the static response is unbounded."""
        return None

    @property
    def has_finite_static_response(self) -> bool:
        return self.static_susceptibility is not None

    def susceptibility(self, xi: float) -> float:
        """epsilon(i xi) - 1, evaluated without forming epsilon first."""
        raise DomainError(f"{self.kind.value} surface has no dielectric function")

    def mirror_gap(self, xi: float) -> float:
        """r(xi) - r0 with r(xi) = (eps - 1)/(eps + 1), free of cancellation."""
        raise DomainError(f"{self.kind.value} surface has no dielectric function")

    def scaled(self, z: float) -> "MaterialModel":
        """Same surface with every frequency multiplied by z."""
        return self

    def characteristic_scales(self) -> Tuple[float, ...]:
        return ()

    def parameters(self) -> Dict[str, float]:
        return {}


@dataclass(frozen=True)
class NonDispersive(MaterialModel):
    n: float
    kind: ClassVar[ModelKind] = ModelKind.NONDISPERSIVE

    def __post_init__(self):
        if not (isinstance(self.n, (int, float)) and math.isfinite(self.n) and self.n >= 1):
            raise DomainError(f"refractive index must satisfy n >= 1, got {self.n!r}")

    @property
    def static_susceptibility(self) -> float:
        return (self.n - 1.0) * (self.n + 1.0)

    def susceptibility(self, xi: float) -> float:
        return (self.n - 1.0) * (self.n + 1.0)

    def mirror_gap(self, xi: float) -> float:
        return 0.0

    def parameters(self) -> Dict[str, float]:
        return {"n": self.n}


@dataclass(frozen=True)
class Plasma(MaterialModel):
    omega_p: float
    kind: ClassVar[ModelKind] = ModelKind.PLASMA

    def __post_init__(self):
        _require_positive("omega_p", self.omega_p)

    def susceptibility(self, xi: float) -> float:
        ratio = self.omega_p / xi
        return ratio * ratio

    def mirror_gap(self, xi: float) -> float:
        # r0 = 1
        return -2.0 / (self.susceptibility(xi) + 2.0)

    def scaled(self, z: float) -> "Plasma":
        return Plasma(self.omega_p * z)

    def characteristic_scales(self) -> Tuple[float, ...]:
        # surface plasmon and bulk plasma frequencies
        return (self.omega_p / math.sqrt(2.0), self.omega_p)

    def parameters(self) -> Dict[str, float]:
        return {"omega_p": self.omega_p}


@dataclass(frozen=True)
class LorentzDielectric(MaterialModel):
    omega_p: float
    omega_T: float
    kind: ClassVar[ModelKind] = ModelKind.LORENTZ

    def __post_init__(self):
        _require_positive("omega_p", self.omega_p)
        _require_positive("omega_T", self.omega_T)

    @property
    def static_susceptibility(self) -> float:
        ratio = self.omega_p / self.omega_T
        return ratio * ratio

    def susceptibility(self, xi: float) -> float:
        return self.omega_p * self.omega_p / (xi * xi + self.omega_T * self.omega_T)

    def mirror_gap(self, xi: float) -> float:
        chi = self.susceptibility(xi)
        chi0 = self.static_susceptibility
        eps_minus_eps0 = -chi * (xi / self.omega_T) ** 2
        return 2.0 * eps_minus_eps0 / ((chi + 2.0) * (chi0 + 2.0))

    def scaled(self, z: float) -> "LorentzDielectric":
        return LorentzDielectric(self.omega_p * z, self.omega_T * z)

    def characteristic_scales(self) -> Tuple[float, ...]:
        wt2 = self.omega_T * self.omega_T
        wp2 = self.omega_p * self.omega_p
        return (self.omega_T, math.sqrt(wt2 + 0.5 * wp2), math.sqrt(wt2 + wp2))

    def parameters(self) -> Dict[str, float]:
        return {"omega_p": self.omega_p, "omega_T": self.omega_T}


@dataclass(frozen=True)
class PerfectReflector(MaterialModel):
    """R_TE = -1 and R_TM = +1 at every frequency; closed forms only."""

    kind: ClassVar[ModelKind] = ModelKind.PERFECT

    R_TE: ClassVar[float] = -1.0
    R_TM: ClassVar[float] = 1.0


def model_from_name(name: str, n: Optional[float] = None, omega_p: Optional[float] = None,
                    omega_T: Optional[float] = None) -> MaterialModel:
    """Build a model from its CLI name and the parameters it needs."""
    try:
        kind = ModelKind(name.lower())
    except ValueError:
        raise DomainError(f"unknown surface model {name!r}") from None

    required = {
        ModelKind.NONDISPERSIVE: {"n": n},
        ModelKind.PLASMA: {"omega_p": omega_p},
        ModelKind.LORENTZ: {"omega_p": omega_p, "omega_T": omega_T},
        ModelKind.PERFECT: {},
    }[kind]
    missing = [key for key, value in required.items() if value is None]
    if missing:
        raise DomainError(f"model {kind.value} needs {', '.join(missing)}")

    if kind is ModelKind.NONDISPERSIVE:
        return NonDispersive(n)
    if kind is ModelKind.PLASMA:
        return Plasma(omega_p)
    if kind is ModelKind.LORENTZ:
        return LorentzDielectric(omega_p, omega_T)
    return PerfectReflector()


def epsilon_imaginary(model: MaterialModel, xi: float) -> float:
    """Dielectric function epsilon(i xi) >= 1."""
    if isinstance(model, PerfectReflector):
        raise DomainError("perfect reflector has no dielectric function")
    if not xi > 0:
        raise DomainError(f"imaginary frequency must be positive, got {xi!r}")
    return 1.0 + model.susceptibility(xi)


def static_mirror_coefficient(model: MaterialModel) -> float:
    """r0 = (eps(0) - 1)/(eps(0) + 1); 1 for unbounded static response."""
    chi0 = model.static_susceptibility
    if chi0 is None:
        return 1.0
    return chi0 / (chi0 + 2.0)


def _check_eps_eta(eps: float, eta: float) -> None:
    if not eps >= 1.0:
        raise DomainError(f"eps must be >= 1, got {eps!r}")
    if not (eta >= 1.0 and math.isfinite(eta)):
        raise DomainError(f"eta must be finite and >= 1, got {eta!r}")


def reflection_te(eps: float, eta: float) -> float:
    """TE Fresnel coefficient at imaginary frequency, in (-1, 0]."""
    _check_eps_eta(eps, eta)
    if math.isinf(eps):
        return -1.0
    chi = eps - 1.0
    root = math.sqrt(chi + eta * eta)
    return -chi / ((eta + root) * (eta + root))


def reflection_tm(eps: float, eta: float) -> float:
    """TM Fresnel coefficient at imaginary frequency, in [0, 1)."""
    _check_eps_eta(eps, eta)
    if math.isinf(eps):
        return 1.0
    root = math.sqrt(eps - 1.0 + eta * eta)
    return (eta * eps - root) / (eta * eps + root)


def te_coefficient(chi: float, eta: float) -> float:
    """R_TE from the susceptibility, unchecked (integrand inner loop)."""
    root = math.sqrt(chi + eta * eta)
    return -chi / ((eta + root) * (eta + root))


def tm_minus_static(chi: float, eta: float, mirror_gap: float) -> float:
    """R_TM - r0 from the susceptibility, unchecked and cancellation free."""
    root = math.sqrt(chi + eta * eta)
    eps = 1.0 + chi
    # R_TM - r(xi) = -2 eps chi / ((eta + s)(eta eps + s)(eps + 1)), divided through by eps^2
    reduced = -2.0 * (chi / eps) / ((eta + root) * (eta + root / eps) * (1.0 + 1.0 / eps))
    return reduced + mirror_gap


def reflection_te_real_axis(omega_p: float, k_z: float) -> complex:
    """Plasma TE coefficient for real k_z, root branch decaying into the medium."""
    _require_positive("omega_p", omega_p)
    if not k_z >= 0:
        raise DomainError(f"k_z must be >= 0, got {k_z!r}")
    if k_z <= omega_p:
        root = 1j * math.sqrt((omega_p - k_z) * (omega_p + k_z))
        return (k_z - root) / (k_z + root)
    root = math.sqrt((k_z - omega_p) * (k_z + omega_p))
    return complex(omega_p * omega_p / ((k_z + root) * (k_z + root)), 0.0)
