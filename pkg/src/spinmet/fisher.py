"""Quantum Fisher information: SLDs, information matrices, precision functionals.

Two routes coexist everywhere. The closed forms below are derived from the
Bloch-vector expression for qubit families and from the field-frame moments
for general spin; ``qfi_spectral`` is the finite-difference eigenbasis route
that every closed form is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .coarsen import CoarseningModel, bloch_vector, coarsen_axis, coarsened_family
from .errors import DomainError, SingularityError, UnsupportedSpinError
from .spincore import FieldParams, SpinSystem, moments, rotation_y, spin_operators

# Eigenvalue pairs with combined population at or below this are outside the
# state's numerical support and are skipped in SLD/QFI sums.
SUPPORT_CUTOFF = 1e-12

# Smallest-to-largest eigenvalue ratio below which an information matrix is
# reported as singular (infinite simultaneous uncertainty).
SINGULAR_EIG_RATIO = 1e-12

_DEFAULT_STEP = 1e-5


@dataclass(frozen=True)
class FisherMatrix:
    """Symmetric positive-semidefinite information matrix with parameter labels."""

    entries: np.ndarray
    labels: tuple[str, ...] = ("theta", "omega")

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError("information matrix must be square")
        if np.abs(m - m.T).max() > 1e-10:
            raise DomainError("information matrix is not symmetric")
        m = (m + m.T) / 2.0
        if np.linalg.eigvalsh(m).min() < -1e-9:
            raise DomainError("information matrix is not positive semidefinite")
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    def eigenvalue_ratio(self) -> float:
        """Smallest over largest eigenvalue; 0 for the zero matrix."""
        eigs = np.linalg.eigvalsh(self.entries)
        largest = eigs.max()
        if largest <= 0:
            return 0.0
        return float(max(eigs.min(), 0.0) / largest)


@dataclass(frozen=True)
class SldOperator:
    """Hermitian operator solving (rho L + L rho)/2 = d(rho)."""

    matrix: np.ndarray


@dataclass(frozen=True)
class ParamChart:
    """Differentiable reparametrization lambda -> (theta, delta) at a point.

    ``jacobian`` has rows (theta, delta) and one column per estimated
    parameter: jacobian[0, i] = d theta / d lambda_i.
    """

    jacobian: np.ndarray
    map: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        j = np.asarray(self.jacobian, dtype=float)
        if j.ndim != 2 or j.shape[0] != 2:
            raise DomainError("chart jacobian must have two rows (theta, delta)")
        if not np.all(np.isfinite(j)):
            raise DomainError("chart jacobian entries must be finite")
        j.flags.writeable = False
        object.__setattr__(self, "jacobian", j)

    @property
    def det(self) -> float:
        if self.jacobian.shape != (2, 2):
            raise DomainError("determinant needs a two-parameter chart")
        j = self.jacobian
        return float(j[0, 0] * j[1, 1] - j[0, 1] * j[1, 0])

    @property
    def is_singular(self) -> bool:
        return abs(self.det) < 1e-12

    @classmethod
    def identity(cls) -> "ParamChart":
        """Estimate (theta, delta) directly."""
        return cls(jacobian=np.eye(2), map=lambda lam: (lam[0], lam[1]))

    @classmethod
    def theta_omega(cls, temperature: float) -> "ParamChart":
        """Estimate (theta, omega) at fixed temperature, so delta = omega/T."""
        if temperature <= 0:
            raise DomainError("temperature must be positive")
        return cls(
            jacobian=np.array([[1.0, 0.0], [0.0, 1.0 / temperature]]),
            map=lambda lam: (lam[0], lam[1] / temperature),
        )


def _require_hermitian(a: np.ndarray, name: str, tol: float = 1e-9) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"{name} must be a square matrix")
    if np.abs(a - a.conj().T).max() > tol:
        raise DomainError(f"{name} is not Hermitian")
    return a


def sld_spectral(
    rho: np.ndarray, drho: np.ndarray, support_cutoff: float = SUPPORT_CUTOFF
) -> SldOperator:
    """Symmetric logarithmic derivative built in the eigenbasis of rho.

    Matrix elements are 2 <k|drho|l> / (p_k + p_l); pairs whose combined
    population falls at or below ``support_cutoff`` are omitted.
    """
    rho = _require_hermitian(rho, "rho")
    drho = _require_hermitian(drho, "drho")
    if rho.shape != drho.shape:
        raise DomainError("rho and drho must share a dimension")
    p, v = np.linalg.eigh(rho)
    d = v.conj().T @ drho @ v
    denom = p[:, None] + p[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        l_eig = np.where(denom > support_cutoff, 2.0 * d / denom, 0.0)
    l = v @ l_eig @ v.conj().T
    return SldOperator(matrix=(l + l.conj().T) / 2.0)


def sld_analytic(
    sys: SpinSystem, params: FieldParams, chart: ParamChart, param_index: int
) -> SldOperator:
    """Closed-form SLD of the thermal family for one chart parameter.

    In the rotated field frame the theta direction contributes
    -2 tanh(delta/2) S_X and the delta direction contributes <S_Z> - S_Z,
    weighted by the chart partials. The sign of the theta term is pinned by
    the Lyapunov equation: at theta = 0, (rho L + L rho)/2 = (p1 - p2) sx
    with p1 - p2 = -tanh(delta/2).
    """
    j = chart.jacobian
    if not 0 <= param_index < j.shape[1]:
        raise DomainError(f"param_index {param_index} out of range")
    u = rotation_y(sys, params.theta)
    sx_rot = u @ sys.sx @ u.conj().T
    sz_rot = u @ sys.sz @ u.conj().T
    delta = params.delta
    mz = moments(sys.spin, delta).mz
    dtheta = j[0, param_index]
    ddelta = j[1, param_index]
    l = (
        -2.0 * dtheta * np.tanh(delta / 2.0) * sx_rot
        + ddelta * (mz * np.eye(sys.dim) - sz_rot)
    )
    return SldOperator(matrix=(l + l.conj().T) / 2.0)


def weak_commutativity(rho: np.ndarray, l_i: np.ndarray, l_j: np.ndarray) -> float:
    """tr(rho [L_i, L_j]) / i as a real number; zero iff the SLD bound is attainable."""
    rho = np.asarray(rho, dtype=complex)
    l_i = np.asarray(l_i, dtype=complex)
    l_j = np.asarray(l_j, dtype=complex)
    if not (rho.shape == l_i.shape == l_j.shape):
        raise DomainError("operator dimensions disagree")
    value = np.trace(rho @ (l_i @ l_j - l_j @ l_i)) / 1j
    return float(value.real)


def _central_differences(
    family: Callable, point: Sequence[float], step: float | Sequence[float] | None
) -> list[np.ndarray]:
    point = np.asarray(point, dtype=float)
    n = point.size
    if step is None:
        base = np.full(n, _DEFAULT_STEP)
    else:
        base = np.broadcast_to(np.asarray(step, dtype=float), (n,)).copy()
    if np.any(base <= 0):
        raise DomainError("finite-difference step must be positive")
    derivs = []
    for i in range(n):
        h = base[i] * max(1.0, abs(point[i]))
        offset = np.zeros(n)
        offset[i] = h
        derivs.append((np.asarray(family(point + offset)) - np.asarray(family(point - offset))) / (2.0 * h))
    return derivs


def qfi_spectral(
    family: Callable,
    point: Sequence[float],
    step: float | Sequence[float] | None = None,
    labels: tuple[str, ...] = ("theta", "omega"),
) -> FisherMatrix:
    """Information matrix from central differences in the eigenbasis of rho.

    This is the project-wide numerical oracle: F_ij sums
    2 Re[<k|d_i rho|l><l|d_j rho|k>] / (p_k + p_l) over supported pairs.
    """
    point = np.asarray(point, dtype=float)
    derivs = _central_differences(family, point, step)
    rho = np.asarray(family(point))
    p, v = np.linalg.eigh(rho)
    denom = p[:, None] + p[None, :]
    mask = denom > SUPPORT_CUTOFF
    safe_denom = np.where(mask, denom, 1.0)
    rotated = [v.conj().T @ d @ v for d in derivs]
    n = point.size
    f = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            terms = np.where(mask, 2.0 * np.real(rotated[i] * rotated[j].T) / safe_denom, 0.0)
            f[i, j] = f[j, i] = terms.sum()
    if len(labels) < n:
        labels = tuple(f"p{i}" for i in range(n))
    return FisherMatrix(entries=f, labels=tuple(labels[:n]))


def qfi_bloch(r: Sequence[float], dr_list: Sequence[Sequence[float]]) -> FisherMatrix:
    """Qubit information matrix from a Bloch vector and its parameter derivatives.

    F_ij = dr_i . dr_j + (r . dr_i)(r . dr_j) / (1 - |r|^2); on the pure-state
    shell the second term requires tangency (r . dr = 0) and is set to zero.
    """
    r = np.asarray(r, dtype=float)
    drs = [np.asarray(d, dtype=float) for d in dr_list]
    if r.shape != (3,) or any(d.shape != (3,) for d in drs):
        raise DomainError("Bloch vectors must have 3 components")
    norm2 = float(r @ r)
    if norm2 > (1.0 + 1e-12) ** 2:
        raise DomainError("Bloch vector length exceeds 1")
    n = len(drs)
    f = np.zeros((n, n))
    radial = [float(r @ d) for d in drs]
    pure = norm2 >= (1.0 - 1e-12) ** 2
    if pure:
        for i, rad in enumerate(radial):
            if abs(rad) >= 1e-12:
                raise SingularityError(
                    f"derivative {i} has a radial component on the pure-state shell"
                )
    for i in range(n):
        for j in range(i, n):
            val = float(drs[i] @ drs[j])
            if not pure:
                val += radial[i] * radial[j] / (1.0 - norm2)
            f[i, j] = f[j, i] = val
    return FisherMatrix(entries=f, labels=tuple(f"p{i}" for i in range(n)))


def thermal_qfi_diagonal(spin: float, delta: float) -> tuple[float, float]:
    """Diagonal of the uncoarsened information matrix in the (theta, delta) chart.

    The theta entry is 4 tanh^2(delta/2) <S_X^2>; the delta entry is Var(S_Z).
    Cross terms vanish because the delta-SLD commutes with the state.
    """
    mom = moments(spin, delta)
    f_theta = 4.0 * np.tanh(delta / 2.0) ** 2 * mom.mx2
    f_delta = mom.mz2 - mom.mz**2
    return float(f_theta), float(f_delta)


def coarsened_qfi_closed_form(
    axis: str,
    theta: float,
    tanh_half_delta: float,
    alpha: float,
    gamma_value: float,
    labels: tuple[str, str] = ("theta", "omega"),
) -> FisherMatrix:
    """Closed-form qubit information matrix over (theta, omega) under coarsening.

    ``alpha`` is half the sensitivity of the population imbalance to omega,
    |d(p1 - p2)/d omega| / 2, and ``gamma_value`` the coherence retention
    factor. All entries follow from the Bloch-vector rule; the y-axis matrix
    is exactly diagonal because both retained components scale together.
    """
    t = float(tanh_half_delta)
    c, s = np.cos(theta), np.sin(theta)
    g2 = gamma_value**2
    if axis == "y":
        denom = 1.0 - t**2 * g2
        f11 = g2 * t**2
        f22 = 4.0 * alpha**2 * g2 * (1.0 + g2 * t**2 / denom)
        entries = np.array([[f11, 0.0], [0.0, f22]])
        return FisherMatrix(entries=entries, labels=labels)
    if axis == "z":
        q = c**2 + g2 * s**2
        plane = g2 * c**2 + s**2
        sign = 1.0
    elif axis == "x":
        q = s**2 + g2 * c**2
        plane = g2 * s**2 + c**2
        sign = -1.0
    else:
        raise DomainError(f"axis must be one of ('x', 'y', 'z'), got {axis!r}")
    denom = 1.0 - t**2 * q  # positive for t < 1, keeping the matrix PSD
    f11 = t**2 * plane + t**4 * s**2 * c**2 * (g2 - 1.0) ** 2 / denom
    f22 = 4.0 * alpha**2 * q / denom
    f12 = sign * 2.0 * alpha * t * s * c * (g2 - 1.0) / denom
    return FisherMatrix(entries=np.array([[f11, f12], [f12, f22]]), labels=labels)


def physical_alpha(delta: float, temperature: float) -> float:
    """Half the omega-sensitivity of the population imbalance of a qubit.

    p1 - p2 = -tanh(delta/2), so alpha = sech^2(delta/2) / (4 T).
    """
    if temperature <= 0:
        raise DomainError("temperature must be positive")
    return float((1.0 - np.tanh(delta / 2.0) ** 2) / (4.0 * temperature))


def qfi_coarsened_analytic(
    axis: str, params: FieldParams, eta: float, spin: float = 0.5
) -> FisherMatrix:
    """Closed-form coarsened information matrix over (theta, omega) for spin 1/2."""
    if spin != 0.5:
        raise UnsupportedSpinError(
            "closed-form coarsened information exists only for spin 1/2; "
            "use qfi_spectral on a coarsened family"
        )
    model = CoarseningModel(axis=axis, eta=eta)
    delta = params.delta
    return coarsened_qfi_closed_form(
        axis=axis,
        theta=params.theta,
        tanh_half_delta=np.tanh(delta / 2.0),
        alpha=physical_alpha(delta, params.temperature),
        gamma_value=model.gamma,
    )


def simultaneous_precision(f: FisherMatrix) -> float:
    """Trace of the inverse information matrix; +inf when numerically singular."""
    eigs = np.linalg.eigvalsh(f.entries)
    largest = eigs.max()
    if largest <= 0 or eigs.min() < SINGULAR_EIG_RATIO * largest:
        return float("inf")
    return float(np.sum(1.0 / eigs))


def independent_precision(f: FisherMatrix) -> float:
    """Summed single-parameter uncertainties when each estimate gets half the probes."""
    diag = np.diag(f.entries)
    if np.any(diag <= 0):
        return float("inf")
    return float(2.0 * np.sum(1.0 / diag))


def simultaneous_precision_z_closed_form(
    theta: float, tanh2_half_delta: float, alpha: float, gamma_value: float
) -> float:
    """One-line trace-of-inverse for the z-axis coarsened qubit matrix."""
    t2 = float(tanh2_half_delta)
    g2 = gamma_value**2
    if g2 == 0.0 or alpha == 0.0 or t2 == 0.0:
        return float("inf")
    num = (
        4.0 * alpha**2
        + t2
        + (4.0 * alpha**2 - (2.0 * t2 - 1.0) * t2) * g2
        + (t2 - 4.0 * alpha**2) * (g2 - 1.0) * np.cos(2.0 * theta)
    )
    return float(num / (8.0 * g2 * alpha**2 * t2))


def crbound_general(
    spin: float, delta: float, theta: float, chart: ParamChart
) -> float:
    """Summed two-parameter uncertainty bound for any spin, any two-parameter chart.

    Evaluates the closed form built from the field-frame moments; the result
    does not depend on theta (the information is rotation covariant), which is
    kept as an argument to pin the evaluation point.
    """
    del theta
    j = chart.jacobian
    if j.shape != (2, 2):
        raise DomainError("the two-parameter bound needs a 2x2 chart jacobian")
    if chart.is_singular:
        return float("inf")
    f_theta, f_delta = thermal_qfi_diagonal(spin, delta)
    if f_theta <= 0 or f_delta <= 0:
        return float("inf")
    det2 = chart.det**2
    dtheta_sq = j[0, 0] ** 2 + j[0, 1] ** 2
    ddelta_sq = j[1, 0] ** 2 + j[1, 1] ** 2
    return float(ddelta_sq / (f_theta * det2) + dtheta_sq / (f_delta * det2))


def multiparam_rank_check(
    partials: Sequence[Sequence[float]], spin: float, delta: float, theta: float
) -> int:
    """Numerical rank of the m-parameter information matrix via the chain rule.

    ``partials`` holds one (d theta / d lambda_i, d delta / d lambda_i) pair
    per parameter. The rank can never exceed 2: every parameter acts only
    through (theta, delta).
    """
    del theta
    j = np.asarray(partials, dtype=float).T
    if j.ndim != 2 or j.shape[0] != 2 or j.shape[1] < 2:
        raise DomainError("need (d theta, d delta) pairs for at least two parameters")
    f_theta, f_delta = thermal_qfi_diagonal(spin, delta)
    f = j.T @ np.diag([f_theta, f_delta]) @ j
    singular_values = np.linalg.svd(f, compute_uv=False)
    top = singular_values.max()
    if top <= 0:
        return 0
    rank = int(np.sum(singular_values > 1e-10 * top))
    assert rank <= 2
    return rank


def coarsened_qfi_spectral(
    spin: float,
    theta: float,
    omega: float,
    temperature: float,
    model: CoarseningModel,
    step: float | Sequence[float] | None = None,
) -> FisherMatrix:
    """Spectral-oracle information matrix of the coarsened thermal family."""
    fam = coarsened_family(spin, theta, omega, temperature, model)
    return qfi_spectral(fam, fam.point0, step=step)


def thermal_bloch_derivatives(
    theta: float, delta: float, temperature: float, model: CoarseningModel
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Coarsened qubit Bloch vector and its exact (theta, omega) derivatives."""
    d = -np.tanh(delta / 2.0)
    dd_domega = -2.0 * physical_alpha(delta, temperature)
    g = model.gamma
    s, c = np.sin(theta), np.cos(theta)
    scale = {"x": (1.0, g), "y": (g, g), "z": (g, 1.0)}[model.axis]
    r = np.array([d * scale[0] * s, 0.0, d * scale[1] * c])
    dr_theta = np.array([d * scale[0] * c, 0.0, -d * scale[1] * s])
    dr_omega = np.array([dd_domega * scale[0] * s, 0.0, dd_domega * scale[1] * c])
    return r, [dr_theta, dr_omega]
