"""Exception types raised across the package."""


class WeakScatterError(Exception):
    """Base class for all package-specific errors."""


class OrthogonalSelection(WeakScatterError):
    """Pre- and post-selection are (numerically) orthogonal; weak values diverge."""


class InvalidField(WeakScatterError):
    """Magnetic-field gradients violate the source-free Maxwell constraints."""


class ZeroField(WeakScatterError):
    """All field gradients vanish; no coupling can be derived."""


class ResolutionError(WeakScatterError):
    """Grid too coarse for the requested packet."""


class ContainmentError(WeakScatterError):
    """Packet (or its displaced image) reaches the edge of the grid."""


class RepresentationError(WeakScatterError):
    """Operation applied to a field in the wrong representation."""


class NonGaussianComplexShift(WeakScatterError):
    """Complex displacement requested for a field without analytic Gaussian backing."""


class AxisError(WeakScatterError):
    """Requested axis is missing from the grid or otherwise invalid."""


class NullPostSelection(WeakScatterError):
    """Post-selection overlap vanishes; the relative state is undefined."""


class StabilityError(WeakScatterError):
    """Time step too large for the interaction strength on this grid."""


class QuadratureError(WeakScatterError):
    """Independent evaluations of the same matrix element disagree."""


class DivergentInteraction(WeakScatterError):
    """Longitudinal momentum too close to zero; effective interaction time diverges."""


class GeometryError(WeakScatterError):
    """Scattering geometry invalid (packet not asymptotically separated)."""


class ConfigError(WeakScatterError):
    """Configuration document invalid."""

    def __init__(self, key, reason):
        self.key = key
        self.reason = reason
        super().__init__(f"{key}: {reason}")


class IoError(WeakScatterError):
    """Output file could not be produced."""
