"""Training losses. All functions are differentiable torch ops.

Shapes: rotations (..., 3, 3), translations (..., 3); losses reduce over the
trailing matrix/vector axes only, so batched inputs return batched losses.
"""

from dataclasses import dataclass

import torch

from .exceptions import InvariantViolation


@dataclass(frozen=True)
class LossWeights:
    lambda_rot: float = 1.0
    lambda_t: float = 2.0

    def __post_init__(self):
        if self.lambda_rot < 0 or self.lambda_t < 0:
            raise InvariantViolation("loss weights must be non-negative")
        if self.lambda_rot == 0 and self.lambda_t == 0:
            raise InvariantViolation("loss weights must not both be zero")


class _ClampedAcos(torch.autograd.Function):
    """arccos with the argument clamped to [-1, 1].

    The forward value is exact (arccos(1) = 0). The backward pass guards the
    1/sqrt(1 - x^2) pole so coincident rotations do not emit inf/NaN grads;
    the guard only bites within ~5e-13 of |x| = 1.
    """

    @staticmethod
    def forward(ctx, x):
        x = x.clamp(-1.0, 1.0)
        ctx.save_for_backward(x)
        return torch.arccos(x)

    @staticmethod
    def backward(ctx, grad_output):
        (x,) = ctx.saved_tensors
        denom = torch.sqrt((1.0 - x * x).clamp_min(1e-12))
        return -grad_output / denom


def _check_rotations(r, tol):
    eye = torch.eye(3, dtype=r.dtype, device=r.device)
    err = (r.transpose(-1, -2) @ r - eye).abs().max()
    if err > tol:
        raise InvariantViolation(f"rotation input not orthonormal (err={err:.3e})")
    det_err = (torch.linalg.det(r) - 1.0).abs().max()
    if det_err > tol:
        raise InvariantViolation(f"rotation input has det != +1 (err={det_err:.3e})")


def translation_loss(t_pred, t_gt):
    """Euclidean distance between predicted and ground-truth translations."""
    return torch.linalg.vector_norm(t_pred - t_gt, dim=-1)


def rotation_loss(r_pred, r_gt, validate=True):
    """Geodesic angle in radians: arccos((trace(R_gt R_pred^T) - 1) / 2)."""
    if validate:
        tol = 1e-5 if r_pred.dtype == torch.float64 else 1e-3
        _check_rotations(r_pred, tol)
        _check_rotations(r_gt, tol)
    prod = r_gt @ r_pred.transpose(-1, -2)
    trace = prod.diagonal(dim1=-2, dim2=-1).sum(-1)
    return _ClampedAcos.apply((trace - 1.0) / 2.0)


def total_loss(l_rot, l_t, weights: LossWeights):
    return weights.lambda_rot * l_rot + weights.lambda_t * l_t
