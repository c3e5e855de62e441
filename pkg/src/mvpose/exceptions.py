"""Exception types shared across the package."""


class MvposeError(Exception):
    """Base class for package-specific errors."""


class InvariantViolation(MvposeError, ValueError):
    """A domain-type invariant does not hold (e.g. a non-rotation matrix)."""


class OutOfBoundsError(MvposeError, ValueError):
    """Pixel coordinate outside the feature map / image."""


class BehindCameraError(MvposeError, ValueError):
    """Point has non-positive depth in the camera frame."""


class DegenerateRotationError(MvposeError, ValueError):
    """6D rotation input is degenerate (zero norm or parallel vectors)."""


class EmptyRenderError(MvposeError, RuntimeError):
    """Object is fully outside the camera frustum."""


class NoValidPairError(MvposeError, RuntimeError):
    """Camera rejection sampling exhausted its attempt budget."""


class ConfigurationError(MvposeError, ValueError):
    """Inconsistent configuration (shape/mode/view-count mismatch)."""


class CapacityError(MvposeError, ValueError):
    """More annotated objects than available queries."""


class AnnotationError(MvposeError, ValueError):
    """Malformed or missing annotation file."""
