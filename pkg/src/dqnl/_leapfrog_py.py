"""Numpy fallback for the compiled leapfrog kernel (same operation order)."""
import numpy as np


def leapfrog_double_well(x, p, n_steps, dt, mass, spring, half_sep):
    if p.shape[0] != x.shape[0]:
        raise ValueError("x and p must have the same length")
    hdt = 0.5 * dt
    dtm = dt / mass
    xi = np.array(x, dtype=float)
    pi = np.array(p, dtype=float)
    for _ in range(int(n_steps)):
        c = np.where(xi < 0.0, -half_sep, half_sep)
        pi = pi + hdt * (-spring * (xi - c))
        xi = xi + dtm * pi
        c = np.where(xi < 0.0, -half_sep, half_sep)
        pi = pi + hdt * (-spring * (xi - c))
    x[:] = xi
    p[:] = pi
