"""Minimal Nelder-Mead simplex refinement for smooth low-dimensional objectives.

Used to polish coarse grid minima of the measurement-optimization objectives;
two parameters, a few hundred evaluations, fully deterministic.
"""

from __future__ import annotations

from typing import Callable

import numpy as np


def nelder_mead(
    fn: Callable[[np.ndarray], float],
    x0: np.ndarray,
    step: np.ndarray,
    fatol: float = 1e-10,
    max_evals: int = 500,
) -> tuple[np.ndarray, float, int]:
    """Minimize ``fn`` from ``x0``, returning (best point, best value, evals).

    Terminates when the simplex function spread drops below ``fatol`` or the
    evaluation budget is exhausted.  Ties never displace an earlier vertex,
    so a flat landscape returns ``x0`` itself.
    """
    x0 = np.asarray(x0, dtype=float)
    step = np.asarray(step, dtype=float)
    n = x0.size
    vertices = [x0.copy()]
    for i in range(n):
        v = x0.copy()
        v[i] += step[i]
        vertices.append(v)
    values = [float(fn(v)) for v in vertices]
    evals = n + 1

    while evals < max_evals:
        order = np.argsort(values, kind="stable")
        vertices = [vertices[i] for i in order]
        values = [values[i] for i in order]
        if values[-1] - values[0] <= fatol:
            break
        centroid = np.mean(vertices[:-1], axis=0)
        reflected = centroid + (centroid - vertices[-1])
        f_reflected = float(fn(reflected))
        evals += 1
        if f_reflected < values[0]:
            expanded = centroid + 2.0 * (reflected - centroid)
            f_expanded = float(fn(expanded))
            evals += 1
            if f_expanded < f_reflected:
                vertices[-1], values[-1] = expanded, f_expanded
            else:
                vertices[-1], values[-1] = reflected, f_reflected
        elif f_reflected < values[-2]:
            vertices[-1], values[-1] = reflected, f_reflected
        else:
            if f_reflected < values[-1]:
                contracted = centroid + 0.5 * (reflected - centroid)
            else:
                contracted = centroid + 0.5 * (vertices[-1] - centroid)
            f_contracted = float(fn(contracted))
            evals += 1
            if f_contracted < min(f_reflected, values[-1]):
                vertices[-1], values[-1] = contracted, f_contracted
            else:
                # shrink toward the current best vertex
                for i in range(1, n + 1):
                    vertices[i] = vertices[0] + 0.5 * (vertices[i] - vertices[0])
                    values[i] = float(fn(vertices[i]))
                evals += n

    best = int(np.argmin(values))
    return vertices[best].copy(), values[best], evals
