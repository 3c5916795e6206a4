"""Construction of explicit Hurwitz matrices with checkable certificates.

The pipeline: a nested-chain certificate orders the vertices so that every
prefix supports a cycle decomposition; a random integer matrix on the
pattern is screened (exactly) until the reordered matrix has all leading
principal minors nonzero; a diagonal matrix with hierarchically scaled
entries then pushes the spectrum into the open left half-plane.  Every
claim in the resulting certificate re-verifies from primitive operations.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapabilityError, StabilizationError, SynthesisError
from .graphs import ChainCertificate, find_nested_chain, verify_chain
from .numerics import (
    DEFAULT_TOLERANCE,
    ExactMatrix,
    SpectralReport,
    conjugate_by_permutation,
    determinant,
    leading_principal_minors,
    random_pattern_matrix,
    spectral_abscissa,
)
from .patterns import Permutation, SparsityPattern, all_permutations

PERMUTATION_SCAN_CAP = 8


@dataclass(frozen=True)
class StabilizerConfig:
    """Knobs for the diagonal stabilizer cascade.

    The scale parameter starts at t_start and shrinks by t_factor up to
    t_cap times; jitter_attempts randomized retries run before giving up.
    """

    tolerance: float = DEFAULT_TOLERANCE
    t_start: float = 1.0
    t_factor: float = 0.5
    t_cap: int = 200
    jitter_attempts: int = 32
    retry_cap: int = 64  # resampling budget for the generic chain matrix


@dataclass(frozen=True)
class WitnessCertificate:
    """Everything needed to re-check a synthesized stable matrix.

    The final Hurwitz matrix is diag(stabilizer) @ witness; ``minors`` are
    the exact leading principal minors of the witness reordered by
    ``ordering`` (all nonzero), and ``spectral`` reports the eigenvalues of
    the final matrix.
    """

    pattern: SparsityPattern
    ordering: tuple[int, ...]
    prefix_cycles: tuple[tuple[tuple[int, ...], ...], ...]
    witness: np.ndarray
    stabilizer: np.ndarray
    minors: tuple[Fraction, ...]
    spectral: SpectralReport

    def stabilized_matrix(self) -> np.ndarray:
        return np.diag(self.stabilizer) @ self.witness


def nonsingular_assignment(p: SparsityPattern, support: Permutation) -> ExactMatrix:
    """The deterministic nonsingular matrix on a full cycle cover.

    Entries on the support permutation get n!, every other free entry gets
    1.  The dominant permutation product (n!)^n outweighs the at most
    (n! - 1) other products of size at most (n!)^{n-1}, so the determinant
    is provably nonzero; it is still computed and checked exactly.
    """
    if support.n != p.n:
        raise ValueError("size mismatch")
    missing = [(i, support(i)) for i in range(1, p.n + 1) if (i, support(i)) not in p.free]
    if missing:
        raise ValueError(f"support entries not free: {missing}")
    big = math.factorial(p.n)
    values = {pos: 1 for pos in p.free}
    for i in range(1, p.n + 1):
        values[(i, support(i))] = big
    A = ExactMatrix.from_pattern(p, values)
    if determinant(A) == 0:
        raise SynthesisError("dominant-assignment determinant vanished (bug)")
    return A


def ordering_conjugation(A: ExactMatrix, ordering) -> ExactMatrix:
    """Reorder so entry (a, b) of the result is A[ordering[a], ordering[b]].

    The leading principal minors of the result are the principal minors of
    A on the prefixes of the ordering.
    """
    sigma = Permutation(tuple(ordering)).inverse()
    return conjugate_by_permutation(A, sigma)


def chain_generic_matrix(
    p: SparsityPattern, chain: ChainCertificate, seed: int, config: StabilizerConfig | None = None
) -> ExactMatrix:
    """Random integer matrix on the pattern whose chain-ordered conjugation
    has all leading principal minors nonzero (screened exactly).

    Rejection sampling: each prefix minor vanishes only on a hypersurface,
    so acceptance is fast for any valid chain; exhausting the retry budget
    is treated as a bug signal.
    """
    config = config or StabilizerConfig()
    if not verify_chain(p, chain):
        raise ValueError("chain certificate does not verify against the pattern")
    rng = random.Random(seed)
    for _ in range(config.retry_cap):
        A = random_pattern_matrix(p, rng)
        minors = leading_principal_minors(ordering_conjugation(A, chain.ordering))
        if all(m != 0 for m in minors):
            return A
    raise SynthesisError(
        f"no generic matrix with nonzero prefix minors in {config.retry_cap} samples"
    )


def _cascade_diagonal(signs, t):
    return np.array([s * t ** (k + 1) for k, s in enumerate(signs)], dtype=float)


def diagonal_stabilize(A, config: StabilizerConfig | None = None) -> np.ndarray:
    """Find a diagonal D with D @ A Hurwitz, given nonzero leading minors.

    Hierarchical scaling: D(t) = diag(s_1 t, s_2 t^2, ..., s_n t^n) with
    s_k = -sign(det_k / det_{k-1}).  As t shrinks the eigenvalues of
    D(t) @ A split by scale and track the successive minor ratios, whose
    signs the s_k flip negative, so some t in the geometric schedule works.
    Because eigenvalue magnitudes also shrink with t, a candidate that is
    negative but inside the tolerance band is rescaled by a positive factor
    (scaling D scales the spectrum of D @ A linearly).  A randomized
    magnitude jitter with the same signs is the last resort.
    """
    config = config or StabilizerConfig()
    M = np.asarray(A, dtype=float)
    n = M.shape[0]
    exact = ExactMatrix.from_floats(M)
    minors = leading_principal_minors(exact)
    if any(m == 0 for m in minors):
        bad = [k + 1 for k, m in enumerate(minors) if m == 0]
        raise ValueError(f"leading principal minors {bad} vanish; cascade needs all nonzero")
    signs = []
    prev = Fraction(1)
    for m in minors:
        signs.append(-1.0 if m / prev > 0 else 1.0)
        prev = m

    def attempt(d):
        report = spectral_abscissa(np.diag(d) @ M, config.tolerance)
        if report.hurwitz:
            return d
        if report.abscissa < 0:
            # negative but inside the tolerance band: blow the whole
            # spectrum up by a positive factor and re-verify
            scale = min(1e-3 / -report.abscissa, 1e15)
            d2 = d * scale
            if spectral_abscissa(np.diag(d2) @ M, config.tolerance).hurwitz:
                return d2
        return None

    t = config.t_start
    for _ in range(config.t_cap):
        found = attempt(_cascade_diagonal(signs, t))
        if found is not None:
            return found
        t *= config.t_factor

    rng = random.Random(0xD1A6)
    t = config.t_start
    for _ in range(config.jitter_attempts):
        jitter = np.array([rng.uniform(0.2, 1.0) for _ in range(n)])
        found = attempt(_cascade_diagonal(signs, t) * jitter)
        if found is not None:
            return found
        t *= config.t_factor
    raise StabilizationError(
        f"no stabilizing diagonal after {config.t_cap} scale steps "
        f"and {config.jitter_attempts} jittered retries"
    )


def corollary_stabilize(A, config: StabilizerConfig | None = None):
    """Scan relabelings for all-nonzero leading minors, then stabilize.

    Returns (sigma, D) where D @ A is Hurwitz, or None when no relabeling
    produces nonzero minors.  None proves nothing: the minor condition is
    sufficient, not necessary, so A may still be diagonally stabilizable.
    """
    config = config or StabilizerConfig()
    M = np.asarray(A, dtype=float)
    n = M.shape[0]
    if n > PERMUTATION_SCAN_CAP:
        raise CapabilityError(f"permutation scan capped at n={PERMUTATION_SCAN_CAP}")
    exact = ExactMatrix.from_floats(M)
    for sigma in all_permutations(n):
        B = conjugate_by_permutation(exact, sigma)
        if any(m == 0 for m in leading_principal_minors(B)):
            continue
        d1 = diagonal_stabilize(B.to_floats(), config)
        # transport back: D = P^{-1} D_1 P puts entry k at position
        # sigma^{-1}(k), and D @ A is similar to D_1 @ B
        d = np.empty(n)
        for a in range(1, n + 1):
            d[a - 1] = d1[sigma(a) - 1]
        report = spectral_abscissa(np.diag(d) @ M, config.tolerance)
        if not report.hurwitz:
            raise StabilizationError("transported stabilizer failed verification (bug)")
        return sigma, d
    return None


def synthesize_stable_witness(
    p: SparsityPattern,
    config: StabilizerConfig | None = None,
    seed: int = 0,
    chain: ChainCertificate | None = None,
) -> WitnessCertificate:
    """End-to-end: chain -> generic matrix -> diagonal stabilizer -> certificate.

    Requires the pattern to admit a nested chain; raises SynthesisError
    with diagnostics when stabilization fails (which signals a bug, not an
    unstable pattern).
    """
    config = config or StabilizerConfig()
    if chain is None:
        chain = find_nested_chain(p)
    if chain is None:
        raise ValueError("pattern admits no nested chain; nothing to synthesize")
    A = chain_generic_matrix(p, chain, seed, config)
    ordered = ordering_conjugation(A, chain.ordering)
    minors = leading_principal_minors(ordered)
    d_ordered = diagonal_stabilize(ordered.to_floats(), config)
    stabilizer = np.empty(p.n)
    for k, vertex in enumerate(chain.ordering):
        stabilizer[vertex - 1] = d_ordered[k]
    witness = A.to_floats()
    spectral = spectral_abscissa(np.diag(stabilizer) @ witness, config.tolerance)
    if not spectral.hurwitz:
        raise SynthesisError(
            f"stabilized witness not Hurwitz (abscissa {spectral.abscissa:g})"
        )
    return WitnessCertificate(
        pattern=p,
        ordering=chain.ordering,
        prefix_cycles=chain.prefix_cycles,
        witness=witness,
        stabilizer=stabilizer,
        minors=tuple(minors),
        spectral=spectral,
    )
