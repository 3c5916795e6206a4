"""Decision pipeline: combine every test into one stability verdict.

Order of attack: the component-sink check, then the per-size cycle-cover
check (both violations are instability proofs), then the nested-chain
search with witness synthesis (a stability proof), and finally a
randomized spectral-abscissa minimization that covers the gap between the
necessary and the sufficient conditions.  Oracle success still yields a
stability proof -- an explicit verified Hurwitz matrix -- but oracle
failure proves nothing, so the remaining patterns come back Unknown.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .errors import StabilizationError, SynthesisError, ValidationError
from .graphs import (
    ChainCertificate,
    check_necessary,
    check_scc_sink,
    find_nested_chain,
    hamiltonian_k_exists,
    verify_chain,
)
from .numerics import (
    DEFAULT_TOLERANCE,
    ExactMatrix,
    SpectralReport,
    leading_principal_minors,
    spectral_abscissa,
)
from .patterns import CANONICAL_N_CAP, SparsityPattern, canonical_form
from .witness import (
    StabilizerConfig,
    WitnessCertificate,
    ordering_conjugation,
    synthesize_stable_witness,
)

PROVED_STABLE = "ProvedStable"
PROVED_UNSTABLE = "ProvedUnstable"
UNKNOWN = "Unknown"

NO_SINK = "NoSink"
SCC_WITHOUT_SINK = "SccWithoutSink"
NO_HAMILTONIAN_K = "NoHamiltonianK"
CHAIN_FOUND = "ChainFound"
ORACLE_FOUND = "OracleFound"
EXHAUSTED = "Exhausted"


@dataclass(frozen=True)
class EngineConfig:
    """All tunables of the decision pipeline; every field is positive."""

    tolerance: float = DEFAULT_TOLERANCE
    oracle_restarts: int = 64
    oracle_steps: int = 400
    t_start: float = 1.0
    t_factor: float = 0.5
    t_cap: int = 200
    jitter_attempts: int = 32
    retry_cap: int = 64

    def stabilizer(self) -> StabilizerConfig:
        return StabilizerConfig(
            tolerance=self.tolerance,
            t_start=self.t_start,
            t_factor=self.t_factor,
            t_cap=self.t_cap,
            jitter_attempts=self.jitter_attempts,
            retry_cap=self.retry_cap,
        )

    def scaled_oracle(self, factor: int) -> "EngineConfig":
        return replace(self, oracle_restarts=self.oracle_restarts * factor)


@dataclass(frozen=True)
class OracleStats:
    restarts: int
    best_abscissa: float


@dataclass(frozen=True)
class StabilityVerdict:
    """Tri-state outcome with whatever evidence backs it.

    ProvedUnstable carries the violated check (and violating vertices or
    the failing size k); ProvedStable carries either a full witness
    certificate or an oracle-found matrix with its spectral report;
    Unknown means every check was inconclusive.
    """

    tag: str
    reason: str
    k: int | None = None
    violating: frozenset[int] | None = None
    certificate: WitnessCertificate | None = None
    oracle_matrix: np.ndarray | None = None
    oracle_spectral: SpectralReport | None = None
    oracle_stats: OracleStats | None = None
    diagnostics: tuple[str, ...] = field(default=())


@dataclass(frozen=True)
class OracleResult:
    matrix: np.ndarray | None
    spectral: SpectralReport | None
    restarts_used: int
    best_abscissa: float

    @property
    def found(self) -> bool:
        return self.matrix is not None


def derive_seed(seed: int, *parts) -> int:
    """Stable per-stage seed; independent of interpreter hash randomization."""
    text = ":".join([str(seed)] + [str(x) for x in parts])
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "big")


def oracle_search(
    p: SparsityPattern, config: EngineConfig | None = None, seed: int = 0
) -> OracleResult:
    """Multi-start coordinate-descent minimization of the spectral abscissa.

    Free entries are the coordinates.  The first two starts bias the
    diagonal negative (the single best heuristic for these objectives);
    the rest are uniform in [-1, 1]^m.  Returns the first matrix whose
    abscissa clears -tolerance -- a stability proof after re-verification
    -- or the best abscissa seen.  A miss is NOT an instability proof.
    """
    config = config or EngineConfig()
    positions = p.sorted_free()
    m = len(positions)
    n = p.n
    rng = random.Random(seed)
    tol = config.tolerance

    def build(x):
        M = np.zeros((n, n))
        for val, (i, j) in zip(x, positions):
            M[i - 1, j - 1] = val
        return M

    if m == 0:
        return OracleResult(None, None, 0, 0.0)

    best_abscissa = np.inf
    for restart in range(config.oracle_restarts):
        if restart == 0:
            x = np.array([-1.0 if i == j else 0.0 for (i, j) in positions])
        elif restart == 1:
            x = np.array(
                [-1.0 if i == j else rng.uniform(-0.3, 0.3) for (i, j) in positions]
            )
        else:
            x = np.array([rng.uniform(-1.0, 1.0) for _ in range(m)])
        current = float(np.max(np.linalg.eigvals(build(x)).real))
        evals = 1
        step = 0.35
        while evals < config.oracle_steps:
            if current < -tol:
                break
            improved = False
            for coord in range(m):
                for delta in (step, -step):
                    if evals >= config.oracle_steps:
                        break
                    x[coord] += delta
                    cand = float(np.max(np.linalg.eigvals(build(x)).real))
                    evals += 1
                    if cand < current:
                        current = cand
                        improved = True
                        break
                    x[coord] -= delta
                else:
                    continue
                if current < -tol:
                    break
            if current < -tol:
                break
            if not improved:
                step *= 0.5
                if step < 1e-6:
                    break
        best_abscissa = min(best_abscissa, current)
        if current < -tol:
            M = build(x)
            report = spectral_abscissa(M, tol)
            if report.hurwitz:
                return OracleResult(M, report, restart + 1, report.abscissa)
    return OracleResult(None, None, config.oracle_restarts, float(best_abscissa))


def _transport_from_canonical(matrix: np.ndarray, info) -> np.ndarray:
    """Map a matrix on the canonical pattern back to the original support.

    canonical = relabel(transpose?(original)), so undo the relabeling with
    the inverse index map, then transpose if that was applied.  Both moves
    preserve the spectrum.
    """
    sigma = info.relabeling
    idx = [sigma(a) - 1 for a in range(1, sigma.n + 1)]
    out = matrix[np.ix_(idx, idx)]
    if info.transposed:
        out = out.T
    return out


def classify(
    p: SparsityPattern, config: EngineConfig | None = None, seed: int = 0
) -> StabilityVerdict:
    """Run all checks in order and return the first conclusive verdict.

    Deterministic given the seed.  Synthesis failures degrade to the next
    stage and surface in the diagnostics; no instability conclusion is
    ever drawn from oracle failure.
    """
    config = config or EngineConfig()
    violating = check_scc_sink(p)
    if violating:
        has_any_sink = any((i, i) in p.free for i in range(1, p.n + 1))
        return StabilityVerdict(
            tag=PROVED_UNSTABLE,
            reason=SCC_WITHOUT_SINK if has_any_sink else NO_SINK,
            violating=violating,
        )
    k = check_necessary(p)
    if k is not None:
        return StabilityVerdict(tag=PROVED_UNSTABLE, reason=NO_HAMILTONIAN_K, k=k)

    diagnostics = []
    if p.n <= CANONICAL_N_CAP:
        info = canonical_form(p)
        pattern_key = info.canonical.bitkey()
    else:
        info = None
        pattern_key = p.bitkey()

    chain = find_nested_chain(p)
    if chain is not None:
        try:
            cert = synthesize_stable_witness(
                p,
                config.stabilizer(),
                seed=derive_seed(seed, p.n, pattern_key, "witness"),
                chain=chain,
            )
            return StabilityVerdict(tag=PROVED_STABLE, reason=CHAIN_FOUND, certificate=cert)
        except (SynthesisError, StabilizationError) as exc:  # pragma: no cover
            diagnostics.append(f"witness synthesis failed: {exc}")

    # Oracle runs on the canonical representative so the verdict tag is
    # invariant across relabelings and transposition of the input.
    target = info.canonical if info is not None else p
    result = oracle_search(
        target, config, seed=derive_seed(seed, p.n, pattern_key, "oracle")
    )
    stats = OracleStats(restarts=result.restarts_used, best_abscissa=result.best_abscissa)
    if result.found:
        matrix = result.matrix if info is None else _transport_from_canonical(result.matrix, info)
        report = spectral_abscissa(matrix, config.tolerance)
        if report.hurwitz:
            return StabilityVerdict(
                tag=PROVED_STABLE,
                reason=ORACLE_FOUND,
                oracle_matrix=matrix,
                oracle_spectral=report,
                oracle_stats=stats,
                diagnostics=tuple(diagnostics),
            )
        diagnostics.append("oracle hit failed re-verification")  # pragma: no cover
    return StabilityVerdict(
        tag=UNKNOWN, reason=EXHAUSTED, oracle_stats=stats, diagnostics=tuple(diagnostics)
    )


def _classify_args(args):
    p, config, seed = args
    return classify(p, config, seed)


def classify_many(
    patterns, config: EngineConfig | None = None, seed: int = 0, workers: int = 1
) -> list[StabilityVerdict]:
    """Map classify over a pattern batch, optionally with a process pool.

    Results keep the input order; per-pattern seeds derive from the shared
    seed, so worker count never changes any verdict.
    """
    config = config or EngineConfig()
    patterns = list(patterns)
    if workers <= 1:
        return [classify(p, config, seed) for p in patterns]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(
            pool.map(_classify_args, [(p, config, seed) for p in patterns], chunksize=8)
        )


def _matrix_supported(matrix: np.ndarray, p: SparsityPattern) -> bool:
    n = p.n
    if matrix.shape != (n, n):
        return False
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if (i, j) not in p.free and matrix[i - 1, j - 1] != 0.0:
                return False
    return True


def certificate_failures(
    cert: WitnessCertificate, tolerance: float = DEFAULT_TOLERANCE
) -> list[str]:
    """Re-derive every claim of a witness certificate from primitives.

    Returns the list of failed claims (empty means the certificate is
    good).  Raises ValidationError on structurally malformed input.
    """
    p = cert.pattern
    n = p.n
    witness = np.asarray(cert.witness, dtype=float)
    stabilizer = np.asarray(cert.stabilizer, dtype=float)
    if witness.shape != (n, n) or stabilizer.shape != (n,):
        raise ValidationError(
            "certificate arrays have wrong shape",
            failures=[f"witness {witness.shape}, stabilizer {stabilizer.shape}, n={n}"],
        )
    if len(cert.ordering) != n or len(cert.prefix_cycles) != n:
        raise ValidationError("certificate ordering/prefix length mismatch")

    failures = []
    chain = ChainCertificate(ordering=cert.ordering, prefix_cycles=cert.prefix_cycles)
    if not verify_chain(p, chain):
        failures.append("prefix cycle decompositions do not verify against the pattern")
    if not _matrix_supported(witness, p):
        failures.append("witness has a nonzero entry outside the free set")
    if any(d == 0.0 for d in stabilizer):
        failures.append("stabilizer has a zero entry")

    exact = ExactMatrix.from_floats(witness)
    minors = leading_principal_minors(ordering_conjugation(exact, cert.ordering))
    if tuple(minors) != tuple(Fraction(m) for m in cert.minors):
        failures.append("recorded minors do not match a recomputation")
    if any(m == 0 for m in minors):
        failures.append("a recorded leading principal minor is zero")

    report = spectral_abscissa(np.diag(stabilizer) @ witness, tolerance)
    if not report.hurwitz:
        failures.append(f"stabilized matrix is not Hurwitz (abscissa {report.abscissa:g})")
    if not cert.spectral.hurwitz:
        failures.append("certificate spectral report does not claim Hurwitz")
    return failures


def verify_certificate(obj, p: SparsityPattern | None = None, tolerance: float = DEFAULT_TOLERANCE) -> bool:
    """True iff every claim re-verifies from primitive operations.

    Accepts a WitnessCertificate or a whole StabilityVerdict (the pattern
    argument is required for verdicts that do not embed a certificate).
    """
    if isinstance(obj, WitnessCertificate):
        return not certificate_failures(obj, tolerance)
    if isinstance(obj, StabilityVerdict):
        v = obj
        if v.tag == PROVED_STABLE:
            if v.certificate is not None:
                return not certificate_failures(v.certificate, tolerance)
            if v.oracle_matrix is None or p is None:
                raise ValidationError("stable verdict carries no evidence")
            if not _matrix_supported(np.asarray(v.oracle_matrix, dtype=float), p):
                return False
            return spectral_abscissa(v.oracle_matrix, tolerance).hurwitz
        if v.tag == PROVED_UNSTABLE:
            if p is None:
                raise ValidationError("verifying an instability verdict needs the pattern")
            if v.reason in (NO_SINK, SCC_WITHOUT_SINK):
                return bool(check_scc_sink(p))
            if v.reason == NO_HAMILTONIAN_K:
                return v.k is not None and hamiltonian_k_exists(p, v.k) is None
            return False
        if v.tag == UNKNOWN:
            if p is None:
                raise ValidationError("verifying an Unknown verdict needs the pattern")
            return (
                not check_scc_sink(p)
                and check_necessary(p) is None
                and find_nested_chain(p) is None
            )
    raise ValidationError(f"cannot verify object of type {type(obj).__name__}")
