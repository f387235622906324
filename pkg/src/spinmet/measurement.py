"""Fixed-POVM statistics: outcome probabilities, classical information, MLE.

The three-outcome qubit measurement used throughout keeps half the weight on
the z-projector, quarter weight on the +x projector, and the completing
effect. Sampling uses a counter-based generator so every experiment is
reproducible from (seed, stream) alone.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError
from .fisher import FisherMatrix

PRNG_ID = "philox4x64 (numpy.random.Philox)"

# Outcomes with probability at or below this are dropped from information sums.
PROB_CUTOFF = 1e-12


@dataclass(frozen=True)
class Povm:
    """Finite positive-operator-valued measure: effects summing to identity."""

    effects: tuple[np.ndarray, ...]

    def __post_init__(self):
        effects = tuple(np.asarray(e, dtype=complex) for e in self.effects)
        if not effects:
            raise DomainError("a POVM needs at least one effect")
        dim = effects[0].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for e in effects:
            if e.shape != (dim, dim):
                raise DomainError("all effects must share one dimension")
            if np.abs(e - e.conj().T).max() > 1e-12:
                raise DomainError("every effect must be Hermitian")
            if np.linalg.eigvalsh(e).min() < -1e-12:
                raise DomainError("every effect must be positive semidefinite")
            total += e
        if np.abs(total - np.eye(dim)).max() > 1e-12:
            raise DomainError("effects must sum to the identity")
        for e in effects:
            e.flags.writeable = False
        object.__setattr__(self, "effects", effects)

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    def __len__(self) -> int:
        return len(self.effects)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probability vector over measurement outcomes."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1:
            raise DomainError("probabilities must form a vector")
        if p.min() < -1e-14:
            raise DomainError("negative outcome probability")
        p = np.clip(p, 0.0, None)
        total = p.sum()
        if not np.isfinite(total) or total <= 0:
            raise DomainError("probabilities must have a positive finite sum")
        p = p / total
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)


@dataclass(frozen=True)
class OutcomeHistogram:
    """Sampled outcome counts with full reproducibility metadata."""

    counts: np.ndarray
    n: int
    seed: int
    stream: int
    prng: str = PRNG_ID


@dataclass(frozen=True)
class MleResult:
    """Maximum-likelihood estimate of (theta, omega) from outcome counts."""

    theta_hat: float
    omega_hat: float
    loglik: float
    counts: np.ndarray
    seed: int
    converged: bool
    flags: tuple[str, ...] = ()


def standard_povm() -> Povm:
    """The fixed three-outcome qubit measurement used by the bound reports."""
    pi1 = np.array([[0.5, 0.0], [0.0, 0.0]], dtype=complex)
    pi2 = np.array([[0.25, 0.25], [0.25, 0.25]], dtype=complex)
    pi3 = np.eye(2, dtype=complex) - pi1 - pi2
    return Povm(effects=(pi1, pi2, pi3))


def probabilities(povm: Povm, rho: np.ndarray) -> OutcomeDistribution:
    """Born-rule outcome distribution tr(E_k rho)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (povm.dim, povm.dim):
        raise DomainError(
            f"state dimension {rho.shape} does not match POVM dimension {povm.dim}"
        )
    probs = np.array([float(np.trace(e @ rho).real) for e in povm.effects])
    return OutcomeDistribution(probs=probs)


def _family_probs(prob_family: Callable, point: np.ndarray) -> np.ndarray:
    out = prob_family(point)
    if isinstance(out, OutcomeDistribution):
        return out.probs
    return np.asarray(out, dtype=float)


def cfi_matrix(
    prob_family: Callable,
    point: Sequence[float],
    step: float | Sequence[float] | None = None,
    labels: tuple[str, ...] = ("theta", "omega"),
) -> FisherMatrix:
    """Classical information matrix of an outcome-probability family.

    Central differences supply the derivatives; outcomes whose probability
    falls at or below the cutoff are dropped from the sum with a warning.
    """
    point = np.asarray(point, dtype=float)
    n = point.size
    if step is None:
        base = np.full(n, 1e-6)
    else:
        base = np.broadcast_to(np.asarray(step, dtype=float), (n,)).copy()
    if np.any(base <= 0):
        raise DomainError("finite-difference step must be positive")
    p0 = _family_probs(prob_family, point)
    derivs = []
    for i in range(n):
        h = base[i] * max(1.0, abs(point[i]))
        offset = np.zeros(n)
        offset[i] = h
        derivs.append(
            (_family_probs(prob_family, point + offset) - _family_probs(prob_family, point - offset))
            / (2.0 * h)
        )
    keep = p0 > PROB_CUTOFF
    if not np.all(keep):
        warnings.warn(
            f"dropping {int((~keep).sum())} outcome(s) with probability <= {PROB_CUTOFF}",
            stacklevel=2,
        )
    f = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            f[i, j] = f[j, i] = float(
                np.sum(derivs[i][keep] * derivs[j][keep] / p0[keep])
            )
    return FisherMatrix(entries=f, labels=tuple(labels[:n]))


def povm_probability_family(povm: Povm, state_family: Callable) -> Callable:
    """Compose a parametrized state map with the Born rule."""

    def fam(point) -> OutcomeDistribution:
        return probabilities(povm, state_family(point))

    return fam


def qubit_probability_family(temperature: float, model) -> Callable:
    """Closed-form outcome probabilities of the standard POVM on the
    coarsened thermal qubit, as a fast map over (theta, omega).

    P1 = (1 + r_z)/4 and P2 = (1 + r_x)/4 in terms of the coarsened Bloch
    vector; identical to the matrix route but cheap enough for grid searches.
    """
    if temperature <= 0:
        raise DomainError("temperature must be positive")
    g = model.gamma
    x_scale, z_scale = {"x": (1.0, g), "y": (g, g), "z": (g, 1.0)}[model.axis]

    def fam(point) -> OutcomeDistribution:
        theta, omega = float(point[0]), float(point[1])
        d = -np.tanh(omega / (2.0 * temperature))
        rx = d * x_scale * np.sin(theta)
        rz = d * z_scale * np.cos(theta)
        p1 = (1.0 + rz) / 4.0
        p2 = (1.0 + rx) / 4.0
        return OutcomeDistribution(probs=np.array([p1, p2, 1.0 - p1 - p2]))

    return fam


def generator_for(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (seed, stream); safe for parallel tasks."""
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(stream & 0xFFFFFFFFFFFFFFFF)])
    return np.random.Generator(np.random.Philox(key=key))


def sample_outcomes(
    dist: OutcomeDistribution, n: int, seed: int, stream: int = 0
) -> OutcomeHistogram:
    """Draw n outcomes from the distribution; deterministic given (seed, stream)."""
    if n < 1:
        raise DomainError("need at least one sample")
    rng = generator_for(seed, stream)
    counts = rng.multinomial(n, dist.probs)
    return OutcomeHistogram(counts=counts, n=int(n), seed=int(seed), stream=int(stream))


def _log_likelihood(counts: np.ndarray, probs: np.ndarray) -> float:
    active = counts > 0
    if np.any(probs[active] <= 0):
        return -np.inf
    return float(np.sum(counts[active] * np.log(probs[active])))


def mle_fit(
    counts,
    model: Callable,
    init: Sequence[float],
    theta_range: tuple[float, float] = (0.05, np.pi - 0.05),
    omega_range: tuple[float, float] | None = None,
    grid_size: int = 41,
    max_iter: int = 100,
    grad_tol: float = 1e-9,
) -> MleResult:
    """Multinomial maximum likelihood over (theta, omega).

    A coarse grid over the configured ranges locates the basin; damped Newton
    steps with finite-difference curvature refine it until the gradient norm
    falls below ``grad_tol``. A singular observed information matrix or an
    estimate pinned to the search boundary flags the result instead of
    raising.
    """
    seed = -1
    if isinstance(counts, OutcomeHistogram):
        seed = counts.seed
        counts = counts.counts
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total <= 0:
        raise DomainError("counts must contain at least one observation")
    init = np.asarray(init, dtype=float)
    if omega_range is None:
        omega_range = (0.25 * init[1], 2.5 * init[1])
    if omega_range[0] <= 0:
        raise DomainError("omega search range must stay positive")

    # optimize the per-observation log-likelihood so the gradient tolerance
    # is independent of the sample size
    weights = counts / total

    def loglik(point) -> float:
        return _log_likelihood(weights, _family_probs(model, np.asarray(point, dtype=float)))

    thetas = np.linspace(theta_range[0], theta_range[1], grid_size)
    omegas = np.linspace(omega_range[0], omega_range[1], grid_size)
    best_val, best_point = -np.inf, np.array([init[0], init[1]])
    for th in thetas:
        for om in omegas:
            val = loglik((th, om))
            if val > best_val:
                best_val, best_point = val, np.array([th, om])

    x = best_point.copy()
    steps = np.array([1e-5, 1e-5 * max(abs(init[1]), 1e-12)])
    converged = False
    flags: list[str] = []
    hessian = np.zeros((2, 2))
    for _ in range(max_iter):
        f0 = loglik(x)
        grad = np.zeros(2)
        hessian = np.zeros((2, 2))
        for a in range(2):
            e = np.zeros(2)
            e[a] = steps[a]
            fp, fm = loglik(x + e), loglik(x - e)
            grad[a] = (fp - fm) / (2 * steps[a])
            hessian[a, a] = (fp - 2 * f0 + fm) / steps[a] ** 2
        ex = np.array([steps[0], 0.0])
        ey = np.array([0.0, steps[1]])
        cross = (
            loglik(x + ex + ey) - loglik(x + ex - ey) - loglik(x - ex + ey) + loglik(x - ex - ey)
        ) / (4 * steps[0] * steps[1])
        hessian[0, 1] = hessian[1, 0] = cross
        if np.linalg.norm(grad) < grad_tol:
            converged = True
            break
        try:
            direction = np.linalg.solve(hessian, -grad)
        except np.linalg.LinAlgError:
            flags.append("singular_information")
            break
        if not np.all(np.isfinite(direction)):
            flags.append("singular_information")
            break
        lam = 1.0
        improved = False
        for _ in range(40):
            candidate = x + lam * direction
            if (
                theta_range[0] <= candidate[0] <= theta_range[1]
                and omega_range[0] <= candidate[1] <= omega_range[1]
                and loglik(candidate) >= f0 - 1e-12
            ):
                improved = True
                break
            lam *= 0.5
        if not improved:
            break
        x = x + lam * direction

    # observed information must be usable for identifiability
    eigs = np.linalg.eigvalsh(-(hessian + hessian.T) / 2)
    top = max(eigs.max(), 0.0)
    if top <= 0 or eigs.min() < 1e-10 * top:
        vec = np.linalg.eigh(-(hessian + hessian.T) / 2)[1][:, 0]
        which = "theta" if abs(vec[0]) >= abs(vec[1]) else "omega"
        flags.append(f"non_identifiable_{which}")
    grid_step_theta = thetas[1] - thetas[0] if grid_size > 1 else 0.0
    grid_step_omega = omegas[1] - omegas[0] if grid_size > 1 else 0.0
    if min(x[0] - theta_range[0], theta_range[1] - x[0]) <= grid_step_theta:
        flags.append("theta_at_search_boundary")
    if min(x[1] - omega_range[0], omega_range[1] - x[1]) <= grid_step_omega:
        flags.append("omega_at_search_boundary")

    return MleResult(
        theta_hat=float(x[0]),
        omega_hat=float(x[1]),
        loglik=float(total * loglik(x)),
        counts=counts,
        seed=seed,
        converged=converged,
        flags=tuple(dict.fromkeys(flags)),
    )
