"""Exception types shared across the package."""


class MagneticBilliardsError(Exception):
    """Base class for errors raised by magbilliards."""


class ZeroGradient(MagneticBilliardsError):
    """Boundary gradient vanished where a normal direction was required."""


class QuadratureFailure(MagneticBilliardsError):
    """Adaptive quadrature hit its depth cap before reaching tolerance."""


class RootFindFailure(MagneticBilliardsError):
    """Trajectory/boundary intersection search failed to converge."""


class VelocityOutOfRange(MagneticBilliardsError):
    """Velocity does not point into the table interior."""


class DegenerateTangency(MagneticBilliardsError):
    """Arrival direction is tangential beyond the admissible angular range."""


class ProbeFailure(MagneticBilliardsError):
    """A finite-difference or round-trip diagnostic could not be completed."""


class NoSecondIntersection(MagneticBilliardsError):
    """Larmor circle does not cross the table circle at a second point."""


class InvalidGeometry(MagneticBilliardsError):
    """Requested table parameters do not bound a valid convex domain."""
