"""Unit conventions.

Energies and tunneling rates are stored as angular frequencies in rad/us,
i.e. 2*pi times the linear frequency in MHz.  Times are in us.  Conversion
from the MHz values used in configuration files happens exactly once, at
parse time.
"""
import math

RAD_PER_US_PER_MHZ = 2.0 * math.pi


def angular(f_mhz: float) -> float:
    """Linear frequency in MHz -> angular frequency in rad/us."""
    return RAD_PER_US_PER_MHZ * f_mhz


def mhz(w: float) -> float:
    """Angular frequency in rad/us -> linear frequency in MHz."""
    return w / RAD_PER_US_PER_MHZ
