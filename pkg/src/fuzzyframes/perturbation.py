"""Stability of K-frame certificates under operator and family perturbation.

The operator hypothesis

    ||(K1* - K2*) f||_a <= lam1 ||K1* f||_a + lam2 ||K2* f||_a

is positively homogeneous in the common level factor sqrt(scale(a)), so it
holds at one level exactly when it holds classically; the same applies to
the family hypothesis with frame sums on both sides.  Mixed sums of
operator-dependent norms are not spectral conditions, so hypothesis checks
run on seeded unit-sphere samples, eigenvector seeds, and a short projected
gradient ascent on the violation functional.  A nonpositive maximum at this
budget is reported as verified (sampled), never as proved; the lam2 = 0
slice additionally admits an exact spectral certificate through the
majorization constant of (K1 - K2, K1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .frame_core import (
    BoundCertificate,
    FrameFamily,
    VerificationResult,
    classical_frame_operator,
    optimal_frame_bounds,
    optimal_kframe_bounds,
    verify_bounds,
)
from .operator_algebra import (
    PSD_TOL,
    MatrixLike,
    RangeInclusionError,
    as_matrix,
    douglas_lambda,
    pencil_sup,
)

__all__ = [
    "PerturbationReport",
    "FamilyPerturbation",
    "PerturbedBounds",
    "EquivalenceConstant",
    "IdentityPerturbation",
    "check_operator_perturbation",
    "derive_operator_perturbed_bounds",
    "family_perturbation_constant",
    "derive_family_perturbed_bounds",
    "frame_equivalence_constant",
    "identity_perturbation_check",
]

DEFAULT_SAMPLES = 10_000
REFINE_STEPS = 50
DEFAULT_ALPHAS = (0.1, 0.5, 0.9)


def _sphere(rng: np.random.Generator, count: int, n: int, complex_field: bool) -> np.ndarray:
    x = rng.standard_normal((count, n))
    if complex_field:
        x = x + 1j * rng.standard_normal((count, n))
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return x / norms


def _eig_seeds(*mats: np.ndarray) -> np.ndarray:
    """Eigenvectors of M M* for each M, as extra sphere seeds."""
    out = []
    for m in mats:
        gram = m @ m.conj().T
        _, v = np.linalg.eigh(0.5 * (gram + gram.conj().T))
        out.append(v.T)
    return np.vstack(out)


def _ascend(f0: np.ndarray, value, grad, steps: int = REFINE_STEPS) -> tuple[np.ndarray, float]:
    """Projected gradient ascent of a functional on the unit sphere."""
    f = f0 / np.linalg.norm(f0)
    best = value(f)
    step = 0.1
    for _ in range(steps):
        g = grad(f)
        g = g - np.vdot(f, g) * f  # tangential component
        gn = np.linalg.norm(g)
        if gn < 1e-14:
            break
        cand = f + step * g / gn
        cand = cand / np.linalg.norm(cand)
        cv = value(cand)
        if cv > best:
            f, best = cand, cv
            step = min(step * 1.5, 1.0)
        else:
            step *= 0.5
            if step < 1e-12:
                break
    return f, best


@dataclass(frozen=True)
class PerturbationReport:
    kind: str  # "operator" | "family"
    constants: tuple[float, ...]
    max_violation: float
    verified: bool
    method: str  # "sampled" | "spectral"
    witness: Optional[np.ndarray]
    samples: int
    seed: int


def check_operator_perturbation(
    K1: MatrixLike,
    K2: MatrixLike,
    lambda1: float,
    lambda2: float,
    sample_count: int = DEFAULT_SAMPLES,
    seed: int = 0,
    tol: float = PSD_TOL,
) -> PerturbationReport:
    """Check ||(K1-K2)* f|| <= lam1 ||K1* f|| + lam2 ||K2* f|| on the sphere.

    The maximum of the violation functional over seeded samples, the
    eigenvectors of the three Gram matrices, and a gradient-ascent polish is
    reported; a nonpositive value means verified (sampled).  When lam2 = 0
    and the ranges permit, the minimal lam1 is computed exactly through the
    majorization constant of (K1 - K2, K1), upgrading the verdict to a
    spectral certificate.
    """
    if lambda1 < 0.0 or lambda2 < 0.0:
        raise ValueError("perturbation constants must be nonnegative")
    if lambda2 >= 1.0:
        raise ValueError("lambda2 must be < 1")
    k1 = as_matrix(K1)
    k2 = as_matrix(K2)
    if k1.shape != k2.shape or k1.shape[0] != k1.shape[1]:
        raise ValueError("operators must be square and share a space")
    delta = k1 - k2
    n = k1.shape[0]
    complex_field = bool(np.iscomplexobj(k1) or np.iscomplexobj(k2))

    da, k1a, k2a = (m.conj().T for m in (delta, k1, k2))

    def value(f: np.ndarray) -> float:
        return float(
            np.linalg.norm(da @ f)
            - lambda1 * np.linalg.norm(k1a @ f)
            - lambda2 * np.linalg.norm(k2a @ f)
        )

    def grad(f: np.ndarray) -> np.ndarray:
        out = np.zeros_like(f)
        for coef, m, ma in ((1.0, delta, da), (-lambda1, k1, k1a), (-lambda2, k2, k2a)):
            nm = np.linalg.norm(ma @ f)
            if nm > 1e-14 and coef != 0.0:
                out = out + coef * (m @ (ma @ f)) / nm
        return out

    rng = np.random.default_rng(seed)
    pool = np.vstack([_sphere(rng, sample_count, n, complex_field), _eig_seeds(delta, k1, k2)])
    # Violation over the pool, vectorized: rows f give (M* f) as rows of pool @ conj(M).
    vd = np.linalg.norm(pool @ delta.conj(), axis=1)
    v1 = np.linalg.norm(pool @ k1.conj(), axis=1)
    v2 = np.linalg.norm(pool @ k2.conj(), axis=1)
    violations = vd - lambda1 * v1 - lambda2 * v2
    top = int(np.argmax(violations))
    witness, worst = _ascend(pool[top], value, grad)

    method = "sampled"
    verified = worst <= tol * (1.0 + np.linalg.norm(delta))
    if lambda2 == 0.0:
        try:
            minimal = douglas_lambda(delta, k1, tol)
        except RangeInclusionError:
            minimal = None
        if minimal is not None:
            method = "spectral"
            verified = minimal <= lambda1 * (1.0 + 1e-9) + tol
    return PerturbationReport(
        kind="operator",
        constants=(lambda1, lambda2),
        max_violation=worst,
        verified=verified,
        method=method,
        witness=witness if not verified else None,
        samples=sample_count,
        seed=seed,
    )


@dataclass(frozen=True)
class PerturbedBounds:
    A: float
    B: float
    verification: Optional[VerificationResult] = None


def derive_operator_perturbed_bounds(
    A: float,
    B: float,
    lambda1: float,
    lambda2: float,
    family: Optional[FrameFamily] = None,
    K2: Optional[MatrixLike] = None,
    alphas: Sequence[float] = DEFAULT_ALPHAS,
    convention: str = "once",
    tol: float = PSD_TOL,
) -> PerturbedBounds:
    """Bounds transferred to the perturbed operator once the hypothesis holds:

        A' = A ((1 - lam2) / (1 + lam1))^2,    B' = B.

    Passing the family and K2 also verifies the derived pair.
    """
    if lambda2 >= 1.0:
        raise ValueError("lambda2 must be < 1")
    if lambda1 < 0.0 or lambda2 < 0.0:
        raise ValueError("perturbation constants must be nonnegative")
    a_new = A * ((1.0 - lambda2) / (1.0 + lambda1)) ** 2
    verification = None
    if family is not None and K2 is not None:
        verification = verify_bounds(family, a_new, B, K2, alphas, convention, tol)
    return PerturbedBounds(a_new, B, verification)


@dataclass(frozen=True)
class FamilyPerturbation:
    M: float
    finite: bool
    witness: Optional[np.ndarray]
    stronger_than_hypothesis: bool  # M <= 1, below the stated M > 1 regime

    @property
    def report(self) -> str:
        if not self.finite:
            return "no finite constant: some f has positive difference sum with zero frame sum"
        note = " (stronger than the M > 1 hypothesis)" if self.stronger_than_hypothesis else ""
        return f"minimal M = {self.M:.12g}{note}"


def family_perturbation_constant(F: FrameFamily, G: FrameFamily) -> FamilyPerturbation:
    """Minimal M with sum |<f, f_i - g_i>_a|^2 <= M min(frame sums of F, G).

    The pointwise ratio against the min is the max of the two pencil ratios,
    so the minimal constant is the larger of the two pencil suprema of
    (S_delta, S_F) and (S_delta, S_G).  It is +inf exactly when some f
    carries positive difference energy while one of the frame sums vanishes
    (the min is then zero).
    """
    if F.size != G.size or F.dimension != G.dimension:
        raise ValueError("families must have equal lengths and spaces")
    diff = FrameFamily(F.vectors - G.vectors, F.model)
    s_delta = classical_frame_operator(diff)
    s_f = classical_frame_operator(F)
    s_g = classical_frame_operator(G)
    sup_f = pencil_sup(s_delta, s_f)
    sup_g = pencil_sup(s_delta, s_g)
    value = max(sup_f.value, sup_g.value)
    if math.isinf(value) and value > 0:
        witness = sup_f.witness if math.isinf(sup_f.value) else sup_g.witness
        return FamilyPerturbation(math.inf, False, witness, False)
    value = max(value, 0.0)  # -inf (empty pencil: zero frame operator) -> 0
    bigger = sup_f if sup_f.value >= sup_g.value else sup_g
    return FamilyPerturbation(value, True, bigger.witness, value <= 1.0)


def derive_family_perturbed_bounds(
    A: float,
    B: float,
    M: float,
    K: Optional[MatrixLike] = None,
    perturbed: Optional[FrameFamily] = None,
    alphas: Sequence[float] = DEFAULT_ALPHAS,
    convention: str = "once",
    tol: float = PSD_TOL,
) -> PerturbedBounds:
    """Bounds carried by the perturbed family under a finite constant M:

        A' = A / (sqrt(M) + 1)^2,    B' = B (sqrt(M) + 1)^2.

    Passing the perturbed family (and K) also verifies the derived pair.
    """
    if not math.isfinite(M) or M < 0.0:
        raise ValueError(f"finite nonnegative M required, got {M}")
    factor = (math.sqrt(M) + 1.0) ** 2
    a_new = A / factor
    b_new = B * factor
    verification = None
    if perturbed is not None:
        verification = verify_bounds(perturbed, a_new, b_new, K, alphas, convention, tol)
    return PerturbedBounds(a_new, b_new, verification)


@dataclass(frozen=True)
class EquivalenceConstant:
    M: float
    source_bounds: tuple[tuple[float, float], tuple[float, float]]
    max_violation: float
    verified: bool
    samples: int
    seed: int


def frame_equivalence_constant(
    F: FrameFamily,
    G: FrameFamily,
    sample_count: int = 1000,
    seed: int = 0,
    tol: float = PSD_TOL,
) -> EquivalenceConstant:
    """Perturbation constant linking any two frames of the same space:

        M = max( (1 + sqrt(B)/sqrt(C))^2, (1 + sqrt(D)/sqrt(A))^2 )

    with (A, B) the frame bounds of F and (C, D) those of G.  The family
    hypothesis at this M is checked on seeded unit-sphere samples.
    """
    if F.size != G.size or F.dimension != G.dimension:
        raise ValueError("families must have equal lengths and spaces")
    cf = optimal_frame_bounds(F)
    cg = optimal_frame_bounds(G)
    if cf.A <= 0.0 or cg.A <= 0.0:
        raise ValueError("both families must be frames (positive lower bounds)")
    a, b = cf.A, cf.B
    c, d = cg.A, cg.B
    m = max((1.0 + math.sqrt(b) / math.sqrt(c)) ** 2, (1.0 + math.sqrt(d) / math.sqrt(a)) ** 2)

    diff = FrameFamily(F.vectors - G.vectors, F.model)
    s_delta = classical_frame_operator(diff)
    s_f = classical_frame_operator(F)
    s_g = classical_frame_operator(G)
    rng = np.random.default_rng(seed)
    pool = _sphere(rng, sample_count, F.dimension, F.model.space.field == "complex")
    # quadratic forms row-wise: <S f, f> = sum(conj(f) * (S f^T))
    def forms(s: np.ndarray) -> np.ndarray:
        return np.real(np.einsum("ij,ij->i", pool.conj(), pool @ s.T))

    q_delta = forms(s_delta)
    q_min = np.minimum(forms(s_f), forms(s_g))
    violations = q_delta - m * q_min
    worst = float(violations.max())
    scale = float(np.abs(q_delta).max(initial=1.0))
    return EquivalenceConstant(
        M=m,
        source_bounds=((a, b), (c, d)),
        max_violation=worst,
        verified=worst <= tol * (1.0 + scale),
        samples=sample_count,
        seed=seed,
    )


@dataclass(frozen=True)
class IdentityPerturbation:
    hypothesis: PerturbationReport
    certificate: Optional[BoundCertificate]
    verification: Optional[VerificationResult]


def identity_perturbation_check(
    K: MatrixLike,
    lambda1: float,
    lambda2: float,
    family: FrameFamily,
    cert: Optional[BoundCertificate] = None,
    sample_count: int = DEFAULT_SAMPLES,
    seed: int = 0,
    alphas: Sequence[float] = DEFAULT_ALPHAS,
    convention: str = "once",
    tol: float = PSD_TOL,
) -> IdentityPerturbation:
    """Specialize the operator perturbation to the identity:

        ||K* f - f||_a <= lam1 ||K* f||_a + lam2 ||f||_a

    with 0 <= lam1, lam2 < 1.  When the hypothesis verifies, a K-frame
    certificate for the family becomes an ordinary frame certificate with
    lower bound A ((1 - lam2)/(1 + lam1))^2.
    """
    if not (0.0 <= lambda1 < 1.0 and 0.0 <= lambda2 < 1.0):
        raise ValueError("identity specialization needs 0 <= lambda1, lambda2 < 1")
    k = as_matrix(K)
    eye = np.eye(k.shape[0])
    report = check_operator_perturbation(k, eye, lambda1, lambda2, sample_count, seed, tol)
    if not report.verified:
        return IdentityPerturbation(report, None, None)
    base = cert if cert is not None else optimal_kframe_bounds(family, k, convention)
    if not base.A > 0.0:
        raise ValueError("family is not a K-frame; nothing to transfer")
    a_new = base.A * ((1.0 - lambda2) / (1.0 + lambda1)) ** 2
    verification = verify_bounds(family, a_new, base.B, None, alphas, convention, tol)
    certificate = BoundCertificate(
        kind="frame",
        A=a_new,
        B=base.B,
        alpha_independent=base.alpha_independent,
        convention=convention,
    )
    return IdentityPerturbation(report, certificate, verification)
