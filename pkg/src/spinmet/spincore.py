"""Spin operators, y-axis rotations, thermal states, and closed-form moments.

Units: hbar = k_B = 1. The single thermal knob is the dimensionless ratio
delta = omega / temperature; omega and temperature carry the same energy unit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError

DEFAULT_DIM_CAP = 64

# Below this scaled argument the coth expressions for the moments lose
# precision to cancellation, so a power series takes over.
_SERIES_SWITCH = 0.1


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _check_half_integer(spin: float) -> int:
    """Return 2*spin as an int, rejecting anything but non-negative half-integers."""
    two_s = 2.0 * spin
    if not np.isfinite(two_s) or two_s < 0 or abs(two_s - round(two_s)) > 1e-12:
        raise DomainError(f"spin must be a non-negative half-integer, got {spin!r}")
    return int(round(two_s))


@dataclass(frozen=True)
class SpinSystem:
    """Operator triple (sx, sy, sz) for a single spin on the ladder basis.

    The basis is ordered by decreasing magnetic number, so sz is diagonal
    with entries spin, spin-1, ..., -spin.
    """

    spin: float
    dim: int
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray

    @property
    def m_values(self) -> np.ndarray:
        """Magnetic quantum numbers in basis order (spin down to -spin)."""
        return np.real(np.diag(self.sz))


@dataclass(frozen=True)
class FieldParams:
    """Field orientation and thermal scales: polar angle, gap, temperature."""

    theta: float
    omega: float
    temperature: float

    def __post_init__(self):
        if not np.isfinite(self.theta):
            raise DomainError("theta must be finite")
        if not np.isfinite(self.omega):
            raise DomainError("omega must be finite")
        if not (np.isfinite(self.temperature) and self.temperature > 0):
            raise DomainError("temperature must be positive and finite")

    @property
    def delta(self) -> float:
        """Dimensionless gap-to-temperature ratio (k_B = 1)."""
        return self.omega / self.temperature

    @property
    def alpha(self) -> float:
        """Half the omega-sensitivity of a qubit's population imbalance.

        p1 - p2 = -tanh(delta/2), so alpha = sech^2(delta/2) / (4 T).
        """
        return (1.0 - np.tanh(self.delta / 2.0) ** 2) / (4.0 * self.temperature)


@dataclass(frozen=True)
class ThermalSpinState:
    """Gibbs state of the spin in the rotated field frame."""

    rho: np.ndarray
    partition: float
    populations: np.ndarray


@dataclass(frozen=True)
class Moments:
    """Second-moment data of the thermal spin state in the field frame."""

    mz: float
    mz2: float
    mx2: float


def spin_operators(spin: float, dim_cap: int = DEFAULT_DIM_CAP) -> SpinSystem:
    """Build the spin operator triple for a given half-integer spin.

    Raises DomainError for non-half-integer spin and CapacityError when the
    matrix dimension 2*spin+1 would exceed ``dim_cap``.
    """
    two_s = _check_half_integer(spin)
    dim = two_s + 1
    if dim > dim_cap:
        raise CapacityError(f"dimension {dim} exceeds the cap of {dim_cap}")
    s = float(spin)
    m = s - np.arange(dim, dtype=float)
    sp = np.zeros((dim, dim), dtype=complex)
    if dim > 1:
        # <m | S+ | m-1> = sqrt(S(S+1) - m(m-1)) on the superdiagonal
        lower = m[1:]
        sp[np.arange(dim - 1), np.arange(1, dim)] = np.sqrt(
            s * (s + 1) - lower * (lower + 1)
        )
    sm = sp.conj().T
    sx = (sp + sm) / 2.0
    sy = (sp - sm) / 2.0j
    sz = np.diag(m).astype(complex)
    return SpinSystem(
        spin=s, dim=dim, sx=_readonly(sx), sy=_readonly(sy), sz=_readonly(sz)
    )


def rotation_y(sys: SpinSystem, theta: float) -> np.ndarray:
    """Unitary exp(-i * sy * theta) rotating the z-axis toward x by theta."""
    if not np.isfinite(theta):
        raise DomainError("theta must be finite")
    w, v = np.linalg.eigh(sys.sy)
    u = (v * np.exp(-1j * w * theta)) @ v.conj().T
    return u


def boltzmann_populations(sys: SpinSystem, delta: float) -> tuple[np.ndarray, float]:
    """Normalized weights exp(-delta*m)/Z in basis order, plus the partition sum."""
    x = -delta * sys.m_values
    shift = x.max()
    w = np.exp(x - shift)
    total = w.sum()
    return w / total, float(np.exp(shift) * total)


def thermal_state(sys: SpinSystem, params: FieldParams) -> ThermalSpinState:
    """Equilibrium state: Boltzmann mixture of field-frame sz eigenstates."""
    pops, partition = boltzmann_populations(sys, params.delta)
    u = rotation_y(sys, params.theta)
    rho = (u * pops) @ u.conj().T
    rho = (rho + rho.conj().T) / 2.0
    return ThermalSpinState(
        rho=_readonly(rho), partition=partition, populations=_readonly(pops)
    )


def thermal_state_derivatives(
    sys: SpinSystem, params: FieldParams
) -> tuple[np.ndarray, np.ndarray]:
    """Exact partial derivatives of the thermal state in the (theta, delta) chart.

    d(rho)/d(theta) = -i [sy, rho]; d(rho)/d(delta) rotates the population
    derivative (mz - m) * p_m into the field frame.
    """
    state = thermal_state(sys, params)
    rho = state.rho
    drho_theta = -1j * (sys.sy @ rho - rho @ sys.sy)
    pops = state.populations
    m = sys.m_values
    mz = float(pops @ m)
    u = rotation_y(sys, params.theta)
    drho_delta = (u * ((mz - m) * pops)) @ u.conj().T
    drho_theta = (drho_theta + drho_theta.conj().T) / 2.0
    drho_delta = (drho_delta + drho_delta.conj().T) / 2.0
    return drho_theta, drho_delta


def _moment_series(spin: float, delta: float) -> tuple[float, float]:
    # Power series around delta = 0, accurate to ~1e-13 relative error for
    # |delta| * (2*spin + 1) < _SERIES_SWITCH.
    a2 = (spin + 0.5) ** 2
    c1 = -(4.0 * a2 - 1.0) / 12.0
    c3 = (16.0 * a2 * a2 - 1.0) / 720.0
    c5 = -(64.0 * a2**3 - 1.0) / 30240.0
    c7 = (256.0 * a2**4 - 1.0) / 1209600.0
    d2 = delta * delta
    mz = delta * (c1 + d2 * (c3 + d2 * (c5 + d2 * c7)))
    # mz2 = S(S+1) + coth(delta/2) * mz with the 1/delta pole cancelled
    t0 = 2.0 * c1
    t2 = 2.0 * c3 + c1 / 6.0
    t4 = 2.0 * c5 + c3 / 6.0 - c1 / 360.0
    t6 = 2.0 * c7 + c5 / 6.0 - c3 / 360.0 + c1 / 15120.0
    ss1 = spin * (spin + 1.0)
    mz2 = ss1 + t0 + d2 * (t2 + d2 * (t4 + d2 * t6))
    return mz, mz2


def moments(spin: float, delta: float) -> Moments:
    """Closed-form <S_Z>, <S_Z^2>, <S_X^2> of the thermal state.

    The coth expressions are replaced by their power series near delta = 0,
    where the closed form has a removable singularity.
    """
    _check_half_integer(spin)
    if not np.isfinite(delta):
        raise DomainError("delta must be finite")
    s = float(spin)
    a = s + 0.5
    if abs(delta) * 2.0 * a < _SERIES_SWITCH:
        mz, mz2 = _moment_series(s, delta)
    else:
        coth_half = 1.0 / np.tanh(delta / 2.0)
        mz = 0.5 * coth_half - a / np.tanh(a * delta)
        mz2 = s * (s + 1.0) + coth_half * mz
    mx2 = (s * (s + 1.0) - mz2) / 2.0
    return Moments(mz=float(mz), mz2=float(mz2), mx2=float(mx2))
