"""Pure-state geometry.

An analyzer A with eigenstates φᵢ turns a preparation ψ into the outcome
distribution |⟨φᵢ, ψ⟩|²; the device-dependent distance d_A is the
Bhattacharyya angle between the two distributions. Its maximum over all
analyzers is the Hilbert-space angle arccos |⟨ψ1, ψ2⟩|, reached when an
eigenstate of A coincides with one of the preparations.
"""

import math

import numpy as np
from loguru import logger

from statdist import OPTIMIZER_MAX_SWEEPS, OPTIMIZER_RESTARTS, OPTIMIZER_STEP_TOL
from statdist.errors import DimensionError, InputError, NumericError
from statdist.models import BasisOptimum, DiscreteDistribution, MeasurementBasis, PureState
from statdist.numerics import angle_between
from statdist.runner import Task, run_all
from statdist.utils import generator

ALIGNMENT_TOL = 1e-9


def _check_dims(*dims: int) -> int:
    for dim in dims[1:]:
        if dim != dims[0]:
            raise DimensionError(dims[0], dim)
    return dims[0]


def inner(a: PureState, b: PureState) -> complex:
    _check_dims(a.dim, b.dim)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def hilbert_distance(psi1: PureState, psi2: PureState) -> float:
    """Angle between the rays, arccos |⟨ψ1, ψ2⟩|"""
    z = inner(psi1, psi2)
    modulus = abs(z)
    if modulus == 0.0:
        return math.pi / 2
    # rotate ψ2's global phase so the overlap is real and positive
    aligned = psi2.amplitudes * (z.conjugate() / modulus)
    return angle_between(psi1.amplitudes, aligned)


def amplitudes(basis: MeasurementBasis, psi: PureState) -> np.ndarray:
    """|⟨φᵢ, ψ⟩| for every eigenstate of the analyzer"""
    _check_dims(basis.dim, psi.dim)
    return np.abs(basis.vectors.conj() @ psi.amplitudes)


def outcome_distribution(basis: MeasurementBasis, psi: PureState) -> DiscreteDistribution:
    return DiscreteDistribution(probabilities=tuple(float(a) ** 2 for a in amplitudes(basis, psi)))


def device_distance(basis: MeasurementBasis, psi1: PureState, psi2: PureState) -> float:
    """arccos Σᵢ |⟨φᵢ, ψ1⟩|·|⟨φᵢ, ψ2⟩|"""
    _check_dims(basis.dim, psi1.dim, psi2.dim)
    return angle_between(amplitudes(basis, psi1), amplitudes(basis, psi2))


def alignments(
    basis: MeasurementBasis, psi1: PureState, psi2: PureState
) -> tuple[bool, bool]:
    """Whether some eigenstate equals ψ1 (resp. ψ2) up to a global phase"""
    return (
        bool(np.max(amplitudes(basis, psi1)) >= 1.0 - ALIGNMENT_TOL),
        bool(np.max(amplitudes(basis, psi2)) >= 1.0 - ALIGNMENT_TOL),
    )


def gram_schmidt(vectors: np.ndarray) -> np.ndarray:
    """Orthonormal rows spanning the same flags as the input rows.

    Modified Gram-Schmidt with one re-orthogonalisation pass per vector.
    """
    vectors = np.asarray(vectors, dtype=complex)
    basis: list[np.ndarray] = []
    for v in vectors:
        u = v.copy()
        for _ in range(2):
            for q in basis:
                u = u - np.vdot(q, u) * q
        norm = np.linalg.norm(u)
        if norm < 1e-10 * max(np.linalg.norm(v), 1.0):
            raise NumericError("linearly dependent vectors in Gram-Schmidt")
        basis.append(u / norm)
    return np.stack(basis)


def _gaussian_vectors(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    return rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))


def _check_dim(dim: int) -> int:
    if dim < 2:
        raise InputError(f"dimension must be >= 2, got {dim}")
    return dim


def random_state(dim: int, seed: int) -> PureState:
    """Uniform under the unitarily invariant measure: a normalised complex Gaussian vector"""
    _check_dim(dim)
    return PureState.normalized(_gaussian_vectors(generator(seed), 1, dim)[0])


def random_basis(dim: int, seed: int) -> MeasurementBasis:
    _check_dim(dim)
    return MeasurementBasis(vectors=gram_schmidt(_gaussian_vectors(generator(seed), dim, dim)))


def complete_basis(psi: PureState, seed: int) -> MeasurementBasis:
    """Orthonormal basis whose first eigenstate is ψ"""
    rng = generator(seed)
    rows = np.vstack([psi.amplitudes, _gaussian_vectors(rng, psi.dim - 1, psi.dim)])
    return MeasurementBasis(vectors=gram_schmidt(rows))


def real_state(theta: float) -> PureState:
    """Linear polarization at angle θ from vertical"""
    return PureState(amplitudes=[math.cos(theta), math.sin(theta)])


def circular_basis() -> MeasurementBasis:
    """Right/left circular polarization analyzer"""
    r = 1 / math.sqrt(2)
    return MeasurementBasis(vectors=[[r, 1j * r], [r, -1j * r]])


def standard_basis(dim: int) -> MeasurementBasis:
    return MeasurementBasis(vectors=np.eye(_check_dim(dim)))


def _affinity(vectors: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sum(np.abs(vectors.conj() @ a) * np.abs(vectors.conj() @ b)))


def _givens_align(vectors: np.ndarray, k: int, l: int, target: np.ndarray) -> np.ndarray | None:
    """Rotate rows k, l so that row k points along target's projection on their span.

    With x = ⟨φk, ψ⟩, y = ⟨φl, ψ⟩ and r = √(|x|² + |y|²) the pair becomes
    φk' = (x φk + y φl)/r, φl' = (−ȳ φk + x̄ φl)/r, which zeroes ⟨φl', ψ⟩.
    """
    x = np.vdot(vectors[k], target)
    y = np.vdot(vectors[l], target)
    r = math.hypot(abs(x), abs(y))
    if r == 0.0:
        return None
    rotated = vectors.copy()
    rotated[k] = (x * vectors[k] + y * vectors[l]) / r
    rotated[l] = (-y.conjugate() * vectors[k] + x.conjugate() * vectors[l]) / r
    return rotated


def ascend_basis(
    start: MeasurementBasis,
    psi1: PureState,
    psi2: PureState,
    step_tol: float = OPTIMIZER_STEP_TOL,
    max_sweeps: int = OPTIMIZER_MAX_SWEEPS,
) -> tuple[np.ndarray, float, bool, int]:
    """Coordinate ascent of d_A over the Givens planes of the basis.

    Each coordinate step rotates one pair of eigenstates to the best of two
    closed-form Givens rotations (aligning with ψ1's or ψ2's projection), which
    minimises that pair's share of the affinity. Stops when a full sweep gains
    less than `step_tol`.
    """
    a, b = psi1.amplitudes, psi2.amplitudes
    vectors = start.vectors.copy()
    dim = start.dim
    affinity = _affinity(vectors, a, b)
    best = angle_between(np.abs(vectors.conj() @ a), np.abs(vectors.conj() @ b))

    for sweep in range(1, max_sweeps + 1):
        for k in range(dim - 1):
            for l in range(k + 1, dim):
                for target in (a, b):
                    rotated = _givens_align(vectors, k, l, target)
                    if rotated is None:
                        continue
                    candidate = _affinity(rotated, a, b)
                    if candidate < affinity:
                        vectors, affinity = rotated, candidate
        value = angle_between(np.abs(vectors.conj() @ a), np.abs(vectors.conj() @ b))
        gain, best = value - best, max(best, value)
        if gain < step_tol:
            return vectors, best, True, sweep
    return vectors, best, False, max_sweeps


def optimize_basis(
    psi1: PureState,
    psi2: PureState,
    restarts: int = OPTIMIZER_RESTARTS,
    seed: int = 0,
    threads: int = 1,
) -> BasisOptimum:
    """Most discriminating analyzer for ψ1 vs ψ2, found two ways.

    The analytic route completes ψ1 to a basis; the numeric route runs
    coordinate ascent from `restarts` random bases and keeps the best.
    """
    dim = _check_dims(_check_dim(psi1.dim), psi2.dim)
    if restarts < 1:
        raise InputError(f"restarts must be >= 1, got {restarts}")

    analytic_basis = complete_basis(psi1, seed)
    analytic = device_distance(analytic_basis, psi1, psi2)

    tasks = [
        Task(f"restart {r}", ascend_basis, (random_basis(dim, seed + 1 + r), psi1, psi2))
        for r in range(restarts)
    ]
    results = [res for res in run_all(tasks, threads) if not isinstance(res, Exception)]
    if not results:
        raise NumericError("every optimizer restart failed")
    # max by value, earliest restart on ties
    vectors, numeric, converged, sweeps = max(results, key=lambda res: res[1])
    if not converged:
        logger.warning(f"Basis optimizer did not converge in {sweeps} sweeps, d_A={numeric:.12f}")

    numeric_basis = MeasurementBasis(vectors=gram_schmidt(vectors))
    basis = analytic_basis if analytic >= numeric else numeric_basis
    aligned_first, aligned_second = alignments(basis, psi1, psi2)
    return BasisOptimum(
        basis=basis,
        d_A_max=max(analytic, numeric),
        analytic=analytic,
        numeric=numeric,
        hilbert=hilbert_distance(psi1, psi2),
        converged=converged,
        sweeps=sweeps,
        restarts=restarts,
        aligned_first=aligned_first,
        aligned_second=aligned_second,
    )


def state_to_pairs(state: PureState) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in state.amplitudes]


def basis_to_pairs(basis: MeasurementBasis) -> list[list[list[float]]]:
    return [state_to_pairs(s) for s in basis.states]


def _complex(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise InputError("expected [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def state_from_pairs(pairs, normalize: bool = False) -> PureState:
    amplitudes = _complex(pairs)
    if normalize:
        return PureState.normalized(amplitudes)
    return PureState(amplitudes=amplitudes)


def basis_from_pairs(rows) -> MeasurementBasis:
    return MeasurementBasis(vectors=_complex(rows))
