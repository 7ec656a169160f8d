"""Compiled RK4 loop for linearly coupled networks of the shipped node systems.

The loop mirrors ``sim._rk4_numpy`` step for step; only the arithmetic is
compiled. Node kinds are dispatched by integer so the compiled function can
be cached on disk.
"""
import numba
import numpy as np

KIND_IDS = {"sprott_tanh": 0, "sprott_sin": 1, "cubic": 2, "linear": 3}


@numba.njit(cache=True)
def _node_field(kind, params, x, out):
    n, d = x.shape
    if kind == 0 or kind == 1:
        mu = params[0]
        for i in range(n):
            for k in range(3):
                y = x[i, (k + 1) % 3]
                g = np.tanh(y) if kind == 0 else np.sin(y)
                out[i, k] = -mu * x[i, k] - g
    elif kind == 2:
        for i in range(n):
            for k in range(d):
                out[i, k] = -x[i, k] ** 3
    else:
        for i in range(n):
            for k in range(d):
                acc = 0.0
                for m in range(d):
                    acc += params[k * d + m] * x[i, m]
                out[i, k] = acc


@numba.njit(cache=True)
def _network_field(kind, params, lap, chan, x, out):
    _node_field(kind, params, x, out)
    n, d = x.shape
    for i in range(n):
        for j in range(n):
            c = lap[i, j]
            if c != 0.0:
                for k in range(d):
                    out[i, k] += c * x[j, k] * chan[k]


@numba.njit(cache=True)
def rk4_linear_network(kind, params, lap, chan, x0, h, n_steps, record_every, threshold):
    """Integrate ``n_steps`` RK4 steps of size ``h`` from ``x0`` (shape (N, d)).

    Returns ``(records, step_index, n_recorded, diverged)``; ``records`` rows
    are flattened joint states, ``step_index`` the step count of each row.
    """
    n, d = x0.shape
    cap = n_steps // record_every + 2
    records = np.empty((cap, n * d))
    steps = np.empty(cap, dtype=np.int64)
    x = x0.copy()
    k1 = np.empty_like(x)
    k2 = np.empty_like(x)
    k3 = np.empty_like(x)
    k4 = np.empty_like(x)
    tmp = np.empty_like(x)
    records[0] = x.ravel()
    steps[0] = 0
    count = 1
    diverged = False
    for s in range(1, n_steps + 1):
        _network_field(kind, params, lap, chan, x, k1)
        for i in range(n):
            for k in range(d):
                tmp[i, k] = x[i, k] + 0.5 * h * k1[i, k]
        _network_field(kind, params, lap, chan, tmp, k2)
        for i in range(n):
            for k in range(d):
                tmp[i, k] = x[i, k] + 0.5 * h * k2[i, k]
        _network_field(kind, params, lap, chan, tmp, k3)
        for i in range(n):
            for k in range(d):
                tmp[i, k] = x[i, k] + h * k3[i, k]
        _network_field(kind, params, lap, chan, tmp, k4)
        peak = 0.0
        for i in range(n):
            for k in range(d):
                x[i, k] = x[i, k] + (h / 6.0) * (k1[i, k] + 2.0 * k2[i, k] + 2.0 * k3[i, k] + k4[i, k])
                a = abs(x[i, k])
                if a > peak or a != a:
                    peak = a if a == a else np.inf
        if peak > threshold:
            diverged = True
        if diverged or s % record_every == 0 or s == n_steps:
            records[count] = x.ravel()
            steps[count] = s
            count += 1
        if diverged:
            break
    return records[:count], steps[:count], count, diverged
