"""Coarsened measurement reference: Gaussian-averaged rotations about an axis.

Averaging exp(-i*S_a*phi) rho exp(i*S_a*phi) over a centered Gaussian of width
eta damps every coherence between levels split by k quanta along the axis by
exp(-eta^2 k^2 / 2). The channel is an explicit mixture of unitaries, hence
trace preserving and completely positive for every spin and axis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError
from .spincore import FieldParams, SpinSystem, rotation_y, spin_operators, thermal_state

AXES = ("x", "y", "z")


def gamma(eta: float) -> float:
    """Coherence retention factor exp(-eta^2/2) for unit level splitting."""
    if not (np.isfinite(eta) and eta >= 0):
        raise DomainError(f"eta must be a non-negative real, got {eta!r}")
    with np.errstate(under="ignore"):
        return float(np.exp(-(eta**2) / 2.0))


@dataclass(frozen=True)
class CoarseningModel:
    """Reference jitter about one axis: axis label plus Gaussian spread eta."""

    axis: str
    eta: float

    def __post_init__(self):
        if self.axis not in AXES:
            raise DomainError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not (np.isfinite(self.eta) and self.eta >= 0):
            raise DomainError(f"eta must be a non-negative real, got {self.eta!r}")

    @property
    def gamma(self) -> float:
        return gamma(self.eta)


@dataclass(frozen=True)
class BlochVector:
    """Dimensionless 3-vector representation of a qubit state."""

    r: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        if r.shape != (3,):
            raise DomainError("Bloch vector must have exactly 3 components")
        if np.linalg.norm(r) > 1 + 1e-12:
            raise DomainError("Bloch vector length exceeds 1")
        object.__setattr__(self, "r", r)


def bloch_vector(rho: np.ndarray) -> BlochVector:
    """Extract the Bloch vector of a 2x2 density matrix."""
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        raise DomainError("Bloch extraction needs a 2x2 density matrix")
    rx = 2.0 * rho[0, 1].real
    ry = -2.0 * rho[0, 1].imag
    rz = (rho[0, 0] - rho[1, 1]).real
    return BlochVector(r=np.array([rx, ry, rz]))


def dephase_z(rho: np.ndarray, sys: SpinSystem, eta: float) -> np.ndarray:
    """Damp coherences in the sz eigenbasis: rho_mm' *= exp(-eta^2 (m-m')^2 / 2)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (sys.dim, sys.dim):
        raise DomainError(
            f"state dimension {rho.shape} does not match spin system dim {sys.dim}"
        )
    if not (np.isfinite(eta) and eta >= 0):
        raise DomainError(f"eta must be a non-negative real, got {eta!r}")
    m = sys.m_values
    k = m[:, None] - m[None, :]
    with np.errstate(under="ignore"):
        damping = np.exp(-(eta**2) * k**2 / 2.0)
    return rho * damping


def _axis_to_z_conjugator(sys: SpinSystem, axis: str) -> np.ndarray:
    """Unitary v with v sz v^dag equal to the requested axis operator."""
    if axis == "z":
        return np.eye(sys.dim, dtype=complex)
    if axis == "x":
        return rotation_y(sys, np.pi / 2.0)
    # axis == "y": exp(+i*sx*pi/2) rotates sz onto sy
    w, p = np.linalg.eigh(sys.sx)
    return (p * np.exp(1j * w * np.pi / 2.0)) @ p.conj().T


def coarsen_axis(rho: np.ndarray, sys: SpinSystem, model: CoarseningModel) -> np.ndarray:
    """Apply the Gaussian-averaged rotation channel about the model's axis.

    For axis x or y the state is rotated into the frame where that axis is
    diagonal, dephased there, and rotated back; for z no basis change is needed.
    """
    if model.axis == "z":
        return dephase_z(rho, sys, model.eta)
    v = _axis_to_z_conjugator(sys, model.axis)
    rotated = v.conj().T @ np.asarray(rho, dtype=complex) @ v
    return v @ dephase_z(rotated, sys, model.eta) @ v.conj().T


@dataclass(frozen=True)
class StateFamily:
    """Parametrized state map over (theta, omega) with a nominal point attached."""

    point0: tuple[float, float]
    _evaluate: Callable[[float, float], np.ndarray]

    def __call__(self, point) -> np.ndarray:
        theta, omega = float(point[0]), float(point[1])
        return self._evaluate(theta, omega)


def coarsened_family(
    spin: float,
    theta: float,
    omega: float,
    temperature: float,
    model: CoarseningModel,
) -> StateFamily:
    """Thermal state followed by the coarsening channel, as a map over (theta, omega).

    The jitter strength eta is a fixed property of the apparatus and does not
    vary with the estimated parameters.
    """
    sys = spin_operators(spin)

    def evaluate(th: float, om: float) -> np.ndarray:
        state = thermal_state(sys, FieldParams(theta=th, omega=om, temperature=temperature))
        return coarsen_axis(state.rho, sys, model)

    return StateFamily(point0=(float(theta), float(omega)), _evaluate=evaluate)
