import numpy as np

from garch.models import ModelSpec


# bounds on the log-scale coordinates, keeping exp() finite and positive
LOG_BOUNDS = (-40.0, 40.0)
POSITIVE_FLOOR = 1e-12


def parameter_groups(spec: ModelSpec) -> dict:
    """Index arrays of the k, g, a, l and nu coordinates in the parameter order of `spec`."""
    names = spec.param_names()
    groups = {'k': [], 'g': [], 'a': [], 'l': [], 'nu': []}
    for i, name in enumerate(names):
        if name == "k" or name == "nu":
            groups[name].append(i)
        elif name[0] in "gal" and name[1:].isdigit():
            groups[name[0]].append(i)
    return {key: np.array(value, dtype=int) for key, value in groups.items()}


def _exp(u):
    return np.exp(np.clip(u, *LOG_BOUNDS))


def _log(x):
    return np.log(np.maximum(x, POSITIVE_FLOOR))


def to_natural(u: np.ndarray, spec: ModelSpec) -> np.ndarray:
    """
    Map unconstrained coordinates to model parameters: k, A, G = exp(u), nu = 2 + exp(u) and,
    for GJR, L = exp(v) - A so that A + L stays positive. EGARCH and mean coefficients pass
    through unchanged.
    """
    groups = parameter_groups(spec)
    theta = np.array(u, dtype=float)
    if spec.variance.family != "egarch":
        for key in ("k", "g", "a"):
            theta[groups[key]] = _exp(u[groups[key]])
        if spec.variance.family == "gjr":
            theta[groups['l']] = _exp(u[groups['l']]) - theta[groups['a']]
    theta[groups['nu']] = 2.0 + _exp(u[groups['nu']])
    return theta


def to_unconstrained(theta: np.ndarray, spec: ModelSpec) -> np.ndarray:
    groups = parameter_groups(spec)
    u = np.array(theta, dtype=float)
    if spec.variance.family != "egarch":
        for key in ("k", "g", "a"):
            u[groups[key]] = _log(theta[groups[key]])
        if spec.variance.family == "gjr":
            u[groups['l']] = _log(theta[groups['a']] + theta[groups['l']])
    u[groups['nu']] = _log(theta[groups['nu']] - 2.0)
    return u


def positive_mask(spec: ModelSpec) -> np.ndarray:
    """Coordinates that must stay strictly positive (nu is measured as nu - 2)."""
    groups = parameter_groups(spec)
    mask = np.zeros(spec.n_params, dtype=bool)
    if spec.variance.family != "egarch":
        for key in ("k", "g", "a"):
            mask[groups[key]] = True
    mask[groups['nu']] = True
    return mask
