"""
Pinned physical constants and unit conversions.

Lengths are nanometres and frequencies inverse nanometres inside the library;
electron-volts only appear at the command-line boundary.
"""

import math
from dataclasses import dataclass, asdict
from typing import Dict


@dataclass(frozen=True)
class PhysicalConstants:
    """Conversion constants (CODATA 2018 values, pinned)."""
    hbar_c: float = 197.3269804          # eV nm
    alpha: float = 7.2973525693e-3
    electron_mass_energy: float = 510998.95  # eV

    @property
    def electron_mass(self) -> float:
        """Electron mass as an inverse length, nm^-1."""
        return self.electron_mass_energy / self.hbar_c

    def ev_to_inverse_nm(self, energy_ev: float) -> float:
        return energy_ev / self.hbar_c

    def inverse_nm_to_ev(self, frequency: float) -> float:
        return frequency * self.hbar_c

    def relative_shift(self, shape_factor: float, z: float) -> float:
        """Delta mu / mu_B = (alpha / 2 pi) S / (m z)^2 for z in nm."""
        mz = self.electron_mass * z
        return self.alpha / (2.0 * math.pi) * shape_factor / (mz * mz)

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


PINNED = PhysicalConstants()
