"""Chaotic reference generators: Lorenz attractor and Mackey-Glass delay system.

Both integrate in their own time units at ``dt_sim`` and emit one path
sample per integration step; the path itself is stamped with the control
step ``dt``. Workspace placement and speed are left to
``rescale_to_workspace`` and ``limit_speed``.
"""

from typing import Tuple

import numpy as np

from app.trajectory.base import ReferencePath


def _lorenz_rhs(
    x: float, y: float, z: float, sigma: float, rho: float, beta: float
) -> Tuple[float, float, float]:
    return sigma * (y - x), x * (rho - z) - y, x * y - beta * z


def lorenz_rk4_step(
    state: Tuple[float, float, float],
    h: float,
    sigma: float = 10.0,
    rho: float = 28.0,
    beta: float = 8.0 / 3.0,
) -> Tuple[float, float, float]:
    """One classical fourth-order Runge-Kutta step of the Lorenz system."""
    x, y, z = state
    k1 = _lorenz_rhs(x, y, z, sigma, rho, beta)
    k2 = _lorenz_rhs(
        x + 0.5 * h * k1[0], y + 0.5 * h * k1[1], z + 0.5 * h * k1[2], sigma, rho, beta
    )
    k3 = _lorenz_rhs(
        x + 0.5 * h * k2[0], y + 0.5 * h * k2[1], z + 0.5 * h * k2[2], sigma, rho, beta
    )
    k4 = _lorenz_rhs(x + h * k3[0], y + h * k3[1], z + h * k3[2], sigma, rho, beta)
    return (
        x + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        z + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    )


def lorenz_series(
    n: int,
    dt_sim: float = 0.01,
    initial: Tuple[float, float, float] = (1.0, 1.0, 1.0),
    sigma: float = 10.0,
    rho: float = 28.0,
    beta: float = 8.0 / 3.0,
    transient: float = 10.0,
) -> np.ndarray:
    """n x 3 Lorenz states after discarding ``transient`` time units."""
    state = tuple(float(v) for v in initial)
    for _ in range(int(round(transient / dt_sim))):
        state = lorenz_rk4_step(state, dt_sim, sigma, rho, beta)
    out = np.empty((n, 3))
    for k in range(n):
        out[k] = state
        state = lorenz_rk4_step(state, dt_sim, sigma, rho, beta)
    return out


def gen_lorenz(
    n: int,
    dt_sim: float = 0.01,
    projection: Tuple[int, int] = (0, 2),
    initial: Tuple[float, float, float] = (1.0, 1.0, 1.0),
    sigma: float = 10.0,
    rho: float = 28.0,
    beta: float = 8.0 / 3.0,
    transient: float = 10.0,
    dt: float = 0.01,
) -> ReferencePath:
    """Two axes of the Lorenz attractor, in attractor units.

    ``projection`` picks the axes (0 = x, 1 = y, 2 = z); the default (x, z)
    gives the familiar butterfly.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    states = lorenz_series(n, dt_sim, initial, sigma, rho, beta, transient)
    i, j = projection
    return ReferencePath(points=states[:, [i, j]], dt=dt, name="lorenz")


def mackey_glass_series(
    n: int,
    dt_sim: float = 0.1,
    tau_delay: float = 17.0,
    a: float = 0.2,
    b: float = 0.1,
    exponent: float = 10.0,
    history: float = 1.2,
    transient: float = 500.0,
) -> Tuple[np.ndarray, np.ndarray]:
    """x(t) and x(t - tau) sampled every ``dt_sim``, transient discarded.

    Forward Euler on

        dx/dt = a x(t - tau) / (1 + x(t - tau)^exponent) - b x(t)

    with a constant ``history`` for t < 0. The delayed values live in a ring
    buffer of round(tau / dt_sim) slots.
    """
    if tau_delay <= 0:
        raise ValueError("tau_delay must be positive")
    delay = max(1, int(round(tau_delay / dt_sim)))
    ring = np.full(delay, float(history))
    head = 0
    x = float(history)

    skip = int(round(transient / dt_sim))
    now = np.empty(n)
    lagged = np.empty(n)
    for k in range(skip + n):
        x_tau = float(ring[head])
        if k >= skip:
            now[k - skip] = x
            lagged[k - skip] = x_tau
        ring[head] = x
        head = (head + 1) % delay
        x += dt_sim * (a * x_tau / (1.0 + x_tau**exponent) - b * x)
    return now, lagged


def gen_mackey_glass(
    n: int,
    dt_sim: float = 0.1,
    tau_delay: float = 17.0,
    a: float = 0.2,
    b: float = 0.1,
    exponent: float = 10.0,
    history: float = 1.2,
    transient: float = 500.0,
    dt: float = 0.01,
) -> ReferencePath:
    """Delay embedding (x(t), x(t - tau)) of the Mackey-Glass signal."""
    if n <= 0:
        raise ValueError("n must be positive")
    now, lagged = mackey_glass_series(
        n, dt_sim, tau_delay, a, b, exponent, history, transient
    )
    return ReferencePath(
        points=np.column_stack([now, lagged]), dt=dt, name="mackey_glass"
    )
