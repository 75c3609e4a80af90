"""Exception types shared across the kinematics modules."""


class TrirailError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(TrirailError):
    """A geometric parameter or numeric input violates an invariant."""

    def __init__(self, name: str, reason: str):
        self.name = name
        self.reason = reason
        super().__init__(f"{name}: {reason}")


class IndeterminateGamma(TrirailError):
    """yA1 - l3 - yA2 = 0: the planar-loop angle is undetermined.

    The two coaxial rails are at the spacing where links B1C1 and B2C2 are
    parallel; the loop gains a shear freedom and direct kinematics cannot
    pick a pose (parallel singularity).
    """


class GammaOutOfRange(TrirailError):
    """|yA1 - l3 - yA2| > 2*l2: the planar loop cannot close."""


class ChainIIUnreachable(TrirailError):
    """|y - yA3| > l6: the parallelogram chain cannot reach the platform."""


class AlphaUnreachable(TrirailError):
    """No real distal-link angle closes the second loop for the given t."""


class Unreachable(TrirailError):
    """Target x lies outside the arccos domain of a distal link."""


class CotangentSingular(TrirailError):
    """sin(alpha) or sin(beta) vanishes: the velocity model is undefined.

    A distal link is folded onto the X axis, which is the fold of the
    pose-to-input map in the x direction.
    """


class NonComparable(TrirailError):
    """A finite-difference check lost track of the solution branch."""


class InvalidAkc(TrirailError):
    """Loop constraint degrees do not sum to zero."""


class OutOfRange(TrirailError):
    """Requested cross-section value lies outside the scan bounds."""
