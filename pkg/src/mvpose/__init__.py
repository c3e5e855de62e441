"""Multi-view rigid-object pose estimation with line-of-sight feature fusion."""

__version__ = "0.1.0"
