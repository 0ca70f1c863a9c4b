"""Exponential and logarithmic maps at the origin of the Poincare ball.

Every map here is radial, y = g(|x|) x row-wise, so each one is described by g and by
g'(r) / r; the backward pass of a radial map is

    dL/dx = g dL/dy + (g'(r) / r) (x . dL/dy) x

All functions act on the last axis and accept a single vector or a matrix of rows.
"""

from typing import Callable, Tuple

import numpy as np

from event_geoloc.types import HyperbolicConfig

ARTANH_CLAMP = 1.0 - 1e-12
# below this s = sqrt(c) |x| the closed forms of g'(r) / r cancel badly; use their series
SERIES_THRESHOLD = 1e-3

Radial = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]


def _check_finite(x: np.ndarray) -> None:
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite input components")


def _norm(x: np.ndarray) -> np.ndarray:
    return np.linalg.norm(x, axis=-1, keepdims=True)


def _apply(x: np.ndarray, radial: Radial) -> np.ndarray:
    g, _ = radial(_norm(x))
    return g * x


def _backward(x: np.ndarray, grad_y: np.ndarray, radial: Radial) -> np.ndarray:
    g, dg_over_r = radial(_norm(x))
    return g * grad_y + dg_over_r * np.sum(x * grad_y, axis=-1, keepdims=True) * x


def _rescale(max_norm: float) -> Radial:
    """Shrinks rows longer than max_norm onto the sphere of that radius."""

    def radial(r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        over = r > max_norm
        safe_r = np.where(over, r, max_norm)
        g = np.where(over, max_norm / safe_r, 1.0)
        dg_over_r = np.where(over, -max_norm / safe_r**3, 0.0)
        return g, dg_over_r

    return radial


def _tanh_ratio(c: float) -> Radial:
    """g(r) = tanh(sqrt(c) r) / (sqrt(c) r)."""
    sqrt_c = np.sqrt(c)

    def radial(r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        s = sqrt_c * r
        small = s < SERIES_THRESHOLD
        safe_s = np.where(small, 1.0, s)
        t = np.tanh(safe_s)
        g = np.where(small, 1.0 - s**2 / 3.0, t / safe_s)
        exact = c * (safe_s * (1.0 - t**2) - t) / safe_s**3
        dg_over_r = np.where(small, c * (-2.0 / 3.0 + 8.0 * s**2 / 15.0), exact)
        return g, dg_over_r

    return radial


def _artanh_ratio(c: float) -> Radial:
    """g(r) = artanh(sqrt(c) r) / (sqrt(c) r), argument clamped below 1."""
    sqrt_c = np.sqrt(c)

    def radial(r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        s = np.minimum(sqrt_c * r, ARTANH_CLAMP)
        small = s < SERIES_THRESHOLD
        safe_s = np.where(small, 0.5, s)
        a = np.arctanh(safe_s)
        g = np.where(small, 1.0 + s**2 / 3.0, a / safe_s)
        exact = c * (safe_s / (1.0 - safe_s**2) - a) / safe_s**3
        dg_over_r = np.where(small, c * (2.0 / 3.0 + 4.0 * s**2 / 5.0), exact)
        return g, dg_over_r

    return radial


def ball_radius(cfg: HyperbolicConfig) -> float:
    """Largest norm a stored ball point may have: (1 - margin) / sqrt(c)."""
    return (1.0 - cfg.ball_margin) / np.sqrt(cfg.curvature_c)


def clip_tangent(x: np.ndarray, cfg: HyperbolicConfig) -> np.ndarray:
    return _apply(x, _rescale(cfg.max_tangent_norm))


def project(x: np.ndarray, cfg: HyperbolicConfig) -> np.ndarray:
    return _apply(x, _rescale(ball_radius(cfg)))


def exp_map(alpha: np.ndarray, cfg: HyperbolicConfig) -> np.ndarray:
    """Tangent space at the origin -> ball: tanh(sqrt(c)|a|) a / (sqrt(c)|a|).

    Inputs are clipped to max_tangent_norm and the result is projected inside the
    ball by ball_margin, so every output row has norm < 1/sqrt(c).
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    _check_finite(alpha)
    clipped = clip_tangent(alpha, cfg)
    return project(_apply(clipped, _tanh_ratio(cfg.curvature_c)), cfg)


def log_map(beta: np.ndarray, cfg: HyperbolicConfig) -> np.ndarray:
    """Ball -> tangent space at the origin: artanh(sqrt(c)|b|) b / (sqrt(c)|b|)."""
    beta = np.asarray(beta, dtype=np.float64)
    _check_finite(beta)
    return _apply(project(beta, cfg), _artanh_ratio(cfg.curvature_c))


def exp_map_backward(alpha: np.ndarray, grad_out: np.ndarray, cfg: HyperbolicConfig) -> np.ndarray:
    clipped = clip_tangent(alpha, cfg)
    ball = _apply(clipped, _tanh_ratio(cfg.curvature_c))
    grad = _backward(ball, grad_out, _rescale(ball_radius(cfg)))
    grad = _backward(clipped, grad, _tanh_ratio(cfg.curvature_c))
    return _backward(alpha, grad, _rescale(cfg.max_tangent_norm))


def log_map_backward(beta: np.ndarray, grad_out: np.ndarray, cfg: HyperbolicConfig) -> np.ndarray:
    projected = project(beta, cfg)
    grad = _backward(projected, grad_out, _artanh_ratio(cfg.curvature_c))
    return _backward(beta, grad, _rescale(ball_radius(cfg)))
