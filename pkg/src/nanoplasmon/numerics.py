"""Small numerical helpers shared by the solvers."""

import math
from dataclasses import dataclass


class ConvergenceError(ArithmeticError):
    """An iterative solver stopped without meeting its tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class RootResult:
    root: complex
    residual: float
    iterations: int


def damped_secant(f, x0, x1=None, tol=1e-10, maxiter=200, step_tol=1e-15):
    """Complex secant iteration with step halving on residual increase.

    A trial step is accepted only if it lowers ``|f|``; otherwise it is halved
    up to 30 times. Convergence means ``|f(x)| < tol``.

    Parameters
    ----------
    f : callable
        Complex function of one complex variable. It may raise
        ``ArithmeticError`` or ``ValueError`` outside its domain; such points
        are treated as rejected steps.
    x0, x1 : complex
        Starting points. ``x1`` defaults to a small relative perturbation.
    tol : float
        Residual tolerance.
    maxiter : int

    Returns
    -------
    RootResult

    Raises
    ------
    ConvergenceError
        Carries the best point, its residual and the iteration count.
    """
    x0 = complex(x0)
    if x1 is None:
        x1 = x0 * (1 + 1e-4) + 1e-6
    x1 = complex(x1)
    f0 = f(x0)
    f1 = f(x1)
    if abs(f0) < abs(f1):
        x0, x1, f0, f1 = x1, x0, f1, f0
    for it in range(1, maxiter + 1):
        if abs(f1) < tol:
            return RootResult(x1, abs(f1), it - 1)
        denom = f1 - f0
        if denom == 0:
            break
        step = -f1 * (x1 - x0) / denom
        accepted = False
        for _ in range(30):
            trial = x1 + step
            try:
                ft = f(trial)
            except (ArithmeticError, ValueError):
                ft = None
            if ft is not None and math.isfinite(abs(ft)) and abs(ft) < abs(f1):
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        x0, f0 = x1, f1
        x1, f1 = trial, ft
        if abs(x1 - x0) <= step_tol * max(1.0, abs(x1)) and abs(f1) >= tol:
            break
    if abs(f1) < tol:
        return RootResult(x1, abs(f1), maxiter)
    raise ConvergenceError(
        "secant iteration stalled at x=%r with |f|=%.3e" % (x1, abs(f1)),
        {"x": x1, "residual": abs(f1), "seed": x0},
    )


def golden_section_max(g, a, b, rtol=1e-6, maxiter=200):
    """Maximise a unimodal ``g`` on ``[a, b]``; returns ``(x, g(x))``.

    Stops when the bracket width falls below ``rtol * max(|x|, tiny)``.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(maxiter):
        if abs(b - a) <= rtol * max(abs(c) + abs(d), 1e-300) * 0.5:
            break
        if gc > gd:
            b, d, gd = d, c, gc
            c = b - invphi * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + invphi * (b - a)
            gd = g(d)
    if gc > gd:
        return c, gc
    return d, gd
