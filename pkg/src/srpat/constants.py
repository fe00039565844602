"""Golden-ratio constants used throughout the package.

PHI is the positive root of x^2 - x - 1 = 0; PSI = 1/PHI = PHI - 1 is the
degree-growth exponent.  Note psi + 1 = 1/psi, used in the Gamma bound.
"""

import math

PHI: float = (1.0 + math.sqrt(5.0)) / 2.0
PSI: float = 1.0 / PHI

#: Master seed of the acceptance suite.
DEFAULT_SEED: int = 20240612
