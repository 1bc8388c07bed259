"""Built-in dynamical systems used to generate benchmark time series.

Flows (lorenz, vanderpol) are integrated with classical fixed-step RK4,
subdividing each sampling interval so the local step never exceeds
min(dt, 0.005). Maps (circle, torus, linear) are applied exactly; angles
are reduced mod 2*pi. Trajectories are deterministic given the spec.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .embed import TimeSeries
from .errors import IntegrationError

# Largest RK4 substep used when integrating flows, in seconds.
MAX_SUBSTEP = 0.005

FLOW_KINDS = ("lorenz", "vanderpol")
MAP_KINDS = ("circle", "torus", "linear")

_REQUIRED_PARAMS = {
    "lorenz": ("sigma", "rho", "beta"),
    "vanderpol": ("mu",),
    "circle": ("omega",),
    "torus": ("omega1", "omega2"),
    "linear": ("matrix",),
}

_STATE_DIM = {"lorenz": 3, "vanderpol": 2, "circle": 1, "torus": 2}

# Classical parameter values and initial states used by the bundled recipes.
LORENZ_PARAMS = {"sigma": 10.0, "rho": 28.0, "beta": 8.0 / 3.0}
VDP_MU = 0.3
VDP_Z1 = (4.0, 4.0)
VDP_Z2 = (0.0, 4.0)


@dataclass(frozen=True)
class SystemSpec:
    """One system, one initial state, one sampling grid."""

    kind: str
    params: dict
    z0: np.ndarray
    dt: float
    steps: int

    def __post_init__(self):
        if self.kind not in FLOW_KINDS + MAP_KINDS:
            raise ValueError(f"unknown system kind {self.kind!r}")
        missing = [p for p in _REQUIRED_PARAMS[self.kind] if p not in self.params]
        if missing:
            raise ValueError(f"{self.kind}: missing parameters {missing}")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive and finite, got {self.dt}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        z = np.asarray(self.z0, dtype=float)
        if z.ndim != 1 or not np.all(np.isfinite(z)):
            raise ValueError("z0 must be a finite 1-D state vector")
        if self.kind == "linear":
            mat = np.asarray(self.params["matrix"], dtype=float)
            if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
                raise ValueError(f"linear map matrix must be square, got {mat.shape}")
            if not np.all(np.isfinite(mat)):
                raise ValueError("linear map matrix has non-finite entries")
            if z.size != mat.shape[0]:
                raise ValueError(
                    f"z0 dimension {z.size} does not match matrix dimension {mat.shape[0]}"
                )
        elif z.size != _STATE_DIM[self.kind]:
            raise ValueError(
                f"{self.kind} needs a {_STATE_DIM[self.kind]}-dimensional state, got {z.size}"
            )
        for key, val in self.params.items():
            if key == "matrix":
                continue
            if not np.isfinite(float(val)):
                raise ValueError(f"parameter {key} is not finite: {val}")
        object.__setattr__(self, "z0", z)


@dataclass(frozen=True)
class Trajectory:
    """States sampled every dt: states[i] is the state after i steps."""

    states: np.ndarray
    dt: float
    kind: str

    def __len__(self) -> int:
        return self.states.shape[0]


def lorenz(z0, dt: float, steps: int, sigma: float = 10.0, rho: float = 28.0,
           beta: float = 8.0 / 3.0) -> SystemSpec:
    return SystemSpec("lorenz", {"sigma": sigma, "rho": rho, "beta": beta}, z0, dt, steps)


def van_der_pol(z0, dt: float, steps: int, mu: float = VDP_MU) -> SystemSpec:
    return SystemSpec("vanderpol", {"mu": mu}, z0, dt, steps)


def circle_rotation(omega: float, z0, dt: float, steps: int) -> SystemSpec:
    return SystemSpec("circle", {"omega": omega}, z0, dt, steps)


def torus_rotation(omega1: float, omega2: float, z0, dt: float, steps: int) -> SystemSpec:
    return SystemSpec("torus", {"omega1": omega1, "omega2": omega2}, z0, dt, steps)


def linear_map(matrix, z0, dt: float, steps: int) -> SystemSpec:
    return SystemSpec("linear", {"matrix": np.asarray(matrix, dtype=float)}, z0, dt, steps)


def lorenz_initial_state(seed: int) -> np.ndarray:
    """Seeded perturbation of (1, 1, 1); pair with a transient skip."""
    rng = np.random.default_rng(seed)
    return np.array([1.0, 1.0, 1.0]) + 0.05 * rng.standard_normal(3)


def _lorenz_deriv(sigma, rho, beta):
    def deriv(z):
        x, y, w = z
        return np.array([sigma * (y - x), x * (rho - w) - y, x * y - beta * w])

    return deriv


def _vdp_deriv(mu):
    def deriv(z):
        x, y = z
        return np.array([y, mu * (1.0 - x * x) * y - x])

    return deriv


def rk4_step(deriv, z: np.ndarray, h: float) -> np.ndarray:
    k1 = deriv(z)
    k2 = deriv(z + 0.5 * h * k1)
    k3 = deriv(z + 0.5 * h * k2)
    k4 = deriv(z + h * k3)
    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_flow(deriv, z0, dt: float, steps: int,
                   max_substep: float = MAX_SUBSTEP) -> np.ndarray:
    """Fixed-step RK4 sampling every dt; substeps keep the local step
    at or below min(dt, max_substep). Returns (steps+1) x dim states."""
    nsub = max(1, math.ceil(dt / max_substep))
    h = dt / nsub
    z = np.asarray(z0, dtype=float)
    out = np.empty((steps + 1, z.size))
    out[0] = z
    for i in range(steps):
        for _ in range(nsub):
            z = rk4_step(deriv, z, h)
        if not np.all(np.isfinite(z)):
            raise IntegrationError(f"state became non-finite at step {i + 1}")
        out[i + 1] = z
    return out


def integrate(spec: SystemSpec) -> Trajectory:
    """Sample the system for spec.steps steps (steps+1 recorded states)."""
    if spec.kind == "lorenz":
        deriv = _lorenz_deriv(**spec.params)
        states = integrate_flow(deriv, spec.z0, spec.dt, spec.steps)
    elif spec.kind == "vanderpol":
        deriv = _vdp_deriv(**spec.params)
        states = integrate_flow(deriv, spec.z0, spec.dt, spec.steps)
    elif spec.kind in ("circle", "torus"):
        if spec.kind == "circle":
            omega = np.array([spec.params["omega"]])
        else:
            omega = np.array([spec.params["omega1"], spec.params["omega2"]])
        k = np.arange(spec.steps + 1)[:, None]
        states = np.mod(spec.z0[None, :] + k * (omega[None, :] * spec.dt), 2.0 * np.pi)
    elif spec.kind == "linear":
        mat = np.asarray(spec.params["matrix"], dtype=float)
        states = np.empty((spec.steps + 1, spec.z0.size))
        states[0] = spec.z0
        z = spec.z0
        for i in range(spec.steps):
            z = mat @ z
            if not np.all(np.isfinite(z)):
                raise IntegrationError(f"state became non-finite at step {i + 1}")
            states[i + 1] = z
    else:  # pragma: no cover - rejected by SystemSpec
        raise ValueError(f"unknown system kind {spec.kind!r}")
    return Trajectory(states=states, dt=spec.dt, kind=spec.kind)


def transient_skip(traj: Trajectory, skip: int) -> Trajectory:
    """Drop the first skip states (skip samples of transient)."""
    if skip < 0:
        raise ValueError(f"skip must be >= 0, got {skip}")
    if skip >= len(traj) - 1:
        raise ValueError(f"skip={skip} leaves fewer than 2 of {len(traj)} states")
    if skip == 0:
        return traj
    return replace(traj, states=traj.states[skip:])


@dataclass(frozen=True)
class Observable:
    """Scalar function of the state, evaluated along a trajectory.

    kinds: coordinate (z_{index+1}), sum (sum of listed coordinates),
    cos_angle (cos of one angle coordinate), kinetic_energy
    (0.5 * |z|^2), custom (expression over z1..zd and numpy math names).
    """

    kind: str
    index: int = 0
    indices: tuple[int, ...] = ()
    expression: str = ""
    label: str = ""

    def __post_init__(self):
        kinds = ("coordinate", "sum", "cos_angle", "kinetic_energy", "custom")
        if self.kind not in kinds:
            raise ValueError(f"unknown observable kind {self.kind!r}")
        if self.kind == "sum" and not self.indices:
            raise ValueError("sum observable needs a non-empty indices tuple")
        if self.kind == "custom" and not self.expression.strip():
            raise ValueError("custom observable needs an expression")
        if not self.label:
            object.__setattr__(self, "label", self._default_label())
        object.__setattr__(self, "indices", tuple(self.indices))

    def _default_label(self) -> str:
        if self.kind == "coordinate":
            return f"z{self.index + 1}"
        if self.kind == "sum":
            return "+".join(f"z{i + 1}" for i in self.indices)
        if self.kind == "cos_angle":
            return f"cos_z{self.index + 1}"
        if self.kind == "kinetic_energy":
            return "ke"
        return self.expression.replace(",", ";")

    def evaluate(self, states: np.ndarray) -> np.ndarray:
        dim = states.shape[1]
        if self.kind == "coordinate":
            self._check_index(self.index, dim)
            return states[:, self.index].copy()
        if self.kind == "sum":
            for i in self.indices:
                self._check_index(i, dim)
            return states[:, list(self.indices)].sum(axis=1)
        if self.kind == "cos_angle":
            self._check_index(self.index, dim)
            return np.cos(states[:, self.index])
        if self.kind == "kinetic_energy":
            return 0.5 * np.sum(states * states, axis=1)
        env = {f"z{i + 1}": states[:, i] for i in range(dim)}
        env.update(
            cos=np.cos, sin=np.sin, tan=np.tan, exp=np.exp, log=np.log,
            sqrt=np.sqrt, abs=np.abs, pi=np.pi,
        )
        try:
            vals = eval(self.expression, {"__builtins__": {}}, env)  # noqa: S307
        except Exception as exc:
            raise ValueError(f"bad observable expression {self.expression!r}: {exc}") from exc
        vals = np.asarray(vals, dtype=float)
        if vals.shape != (states.shape[0],):
            raise ValueError(
                f"expression {self.expression!r} must map states to one scalar per sample"
            )
        return vals

    @staticmethod
    def _check_index(i: int, dim: int) -> None:
        if not 0 <= i < dim:
            raise ValueError(f"coordinate index {i} out of range for dimension {dim}")


def observe(traj: Trajectory, observable: Observable) -> TimeSeries:
    """Evaluate the observable along the trajectory as a TimeSeries."""
    values = observable.evaluate(traj.states)
    return TimeSeries(values=values, dt=traj.dt, label=observable.label)


def seeded_linear_system(seed: int, dim: int = 4, steps: int | None = None) -> SystemSpec:
    """Random linear map with well-separated eigenvalues and a generic z0.

    Draws matrices (spectral radius normalized to 0.95) until the minimum
    pairwise eigenvalue gap is at least 0.05 and the sequential data matrix
    [z0, A z0, ..., A^{dim-1} z0] has condition number below 1e6, so the
    companion-basis variant stays well-posed. Deterministic per seed.
    """
    rng = np.random.default_rng(seed)
    if steps is None:
        steps = dim
    for _ in range(1000):
        a = rng.standard_normal((dim, dim))
        radius = np.max(np.abs(np.linalg.eigvals(a)))
        if radius == 0.0:
            continue
        a = 0.95 * a / radius
        vals = np.linalg.eigvals(a)
        gap = min(
            abs(vals[i] - vals[j]) for i in range(dim) for j in range(i + 1, dim)
        )
        if gap < 0.05:
            continue
        z0 = rng.standard_normal(dim)
        cols = [z0]
        for _ in range(dim - 1):
            cols.append(a @ cols[-1])
        if np.linalg.cond(np.column_stack(cols)) > 1e6:
            continue
        return linear_map(a, z0, dt=1.0, steps=steps)
    raise RuntimeError(f"no admissible linear system found for seed {seed}")  # pragma: no cover
