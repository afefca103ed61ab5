"""Concrete fuzzy inner product models on finite-dimensional spaces.

Two membership profiles are supported.  The ``scaled`` profile is induced
by a classical inner product through

    mu(x, y, t) = |t| / (|t| + ||x|| ||y||)   for real t > ||x|| ||y||,
    mu(x, y, t) = 0                           otherwise,

and carries level norms ||x||_a = sqrt(a / (1 - a)) * ||x||.  The ``crisp``
profile is the 0/1 indicator mu = [t > ||x|| ||y||], whose level norms all
equal the classical norm.  Level inner products follow the same rule:
<x, y>_a = scale(a) * <x, y> with scale(a) = a/(1-a) or 1.

Every operation here is a pure function of immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

__all__ = [
    "PROFILES",
    "BaseSpace",
    "FuzzyModel",
    "AxiomResult",
    "AxiomReport",
    "OrthonormalResult",
    "ExpansionReport",
    "check_alpha",
    "mu_eval",
    "fuzzy_norm_eval",
    "level_membership",
    "alpha_norm",
    "alpha_norm_bisect",
    "alpha_inner",
    "alpha_inner_polarization",
    "check_fip_axioms",
    "orthonormal_check",
    "orthonormal_expansion_check",
]

PROFILES = ("scaled", "crisp")

#: imaginary part below this (relative) threshold counts as a positive real
IMAG_TOL = 1e-12

#: absolute tolerance and iteration cap for the generic level-set bisection
BISECT_TOL = 1e-10
BISECT_MAX_ITER = 200

Scalar = Union[float, complex]


def check_alpha(alpha: float) -> float:
    """Validate a level value, which must lie strictly inside (0, 1)."""
    a = float(alpha)
    if not 0.0 < a < 1.0:
        raise ValueError(f"level must satisfy 0 < alpha < 1, got {alpha!r}")
    return a


@dataclass(frozen=True)
class BaseSpace:
    """Finite-dimensional coefficient space over the real or complex field."""

    dimension: int
    field: str = "real"  # "real" | "complex"

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if self.field not in ("real", "complex"):
            raise ValueError(f"field must be 'real' or 'complex', got {self.field!r}")

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(np.complex128 if self.field == "complex" else np.float64)

    def vector(self, entries: Sequence[Scalar]) -> np.ndarray:
        """Coerce entries to a validated vector of this space."""
        x = np.asarray(entries, dtype=self.dtype)
        if x.shape != (self.dimension,):
            raise ValueError(
                f"expected vector of length {self.dimension}, got shape {x.shape}"
            )
        return x


@dataclass(frozen=True)
class FuzzyModel:
    """A base space together with one of the two membership profiles."""

    space: BaseSpace
    profile: str = "scaled"  # "scaled" | "crisp"

    def __post_init__(self) -> None:
        if self.profile not in PROFILES:
            raise ValueError(f"profile must be one of {PROFILES}, got {self.profile!r}")

    def scale(self, alpha: float) -> float:
        """Level scaling factor: a/(1-a) for scaled, 1 for crisp."""
        a = check_alpha(alpha)
        if self.profile == "scaled":
            return a / (1.0 - a)
        return 1.0

    def check_vector(self, x) -> np.ndarray:
        return self.space.vector(x)

    def mu(self, x, y, t: Scalar) -> float:
        """Membership of t as a value for the inner product of x and y.

        Vanishes off the positive real axis and at or below the product of
        the classical norms; above that threshold the scaled profile takes
        |t| / (|t| + ||x|| ||y||) and the crisp profile takes 1.
        """
        x = self.check_vector(x)
        y = self.check_vector(y)
        tv = _positive_real(t)
        if tv is None:
            return 0.0
        cut = float(np.linalg.norm(x) * np.linalg.norm(y))
        if tv <= cut:
            return 0.0
        if self.profile == "scaled":
            return tv / (tv + cut)
        return 1.0

    def norm_membership(self, x, t: float) -> float:
        """Fuzzy norm N(x, t) = mu(x, x, t^2) for t > 0, else 0."""
        t = float(t)
        if t <= 0.0:
            return 0.0
        return self.mu(x, x, t * t)

    def level_membership(self, x, t: float) -> float:
        """Smooth branch of the norm membership used by the level-set solver.

        For the scaled profile this is t^2 / (t^2 + ||x||^2) on t > 0, i.e.
        the expression whose alpha level set gives sqrt(a/(1-a)) ||x||.  The
        printed membership clips values at or below the norm threshold to 0,
        which would freeze the level norm at ||x|| for alpha < 1/2 and
        contradict the closed form, so the solver bisects this branch
        instead.  For the crisp profile the indicator is already consistent
        and is used as is.
        """
        x = self.check_vector(x)
        t = float(t)
        if t <= 0.0:
            return 0.0
        nx = float(np.linalg.norm(x))
        if self.profile == "scaled":
            return t * t / (t * t + nx * nx)
        return 1.0 if t > nx else 0.0

    def alpha_norm(self, x, alpha: float) -> float:
        """Closed-form level norm sqrt(scale(alpha)) * ||x||."""
        x = self.check_vector(x)
        return math.sqrt(self.scale(alpha)) * float(np.linalg.norm(x))

    def alpha_inner(self, x, y, alpha: float) -> Scalar:
        """Level inner product scale(alpha) * <x, y>.

        Linear in the first argument, conjugate-linear in the second.
        """
        x = self.check_vector(x)
        y = self.check_vector(y)
        value = self.scale(alpha) * np.vdot(y, x)
        if self.space.field == "real":
            return float(value.real) if np.iscomplexobj(value) else float(value)
        return complex(value)


def _positive_real(t: Scalar) -> Optional[float]:
    """Return t as a positive real, or None when t falls outside R+."""
    tc = complex(t)
    if tc.real <= 0.0:
        return None
    if abs(tc.imag) > IMAG_TOL * max(1.0, abs(tc)):
        return None
    return tc.real


# Module-level forms of the model operations.  These are the names the rest
# of the package (and the CLI) imports; the methods above carry the math.

def mu_eval(model: FuzzyModel, x, y, t: Scalar) -> float:
    return model.mu(x, y, t)


def fuzzy_norm_eval(model: FuzzyModel, x, t: float) -> float:
    return model.norm_membership(x, t)


def level_membership(model: FuzzyModel, x, t: float) -> float:
    return model.level_membership(x, t)


def alpha_norm(model: FuzzyModel, x, alpha: float) -> float:
    return model.alpha_norm(x, alpha)


def alpha_inner(model: FuzzyModel, x, y, alpha: float) -> Scalar:
    return model.alpha_inner(x, y, alpha)


def alpha_norm_bisect(
    model: FuzzyModel,
    x,
    alpha: float,
    tol: float = BISECT_TOL,
    max_iter: int = BISECT_MAX_ITER,
) -> float:
    """Level norm via bisection of inf{t > 0 : level_membership >= alpha}.

    Independent cross-check of :func:`alpha_norm`; the level function is
    nondecreasing in t so plain bisection applies.
    """
    x = model.check_vector(x)
    a = check_alpha(alpha)
    if not np.any(x):
        return 0.0

    nx = float(np.linalg.norm(x))
    lo = 0.0
    hi = max(nx, 1.0)
    while model.level_membership(x, hi) < a:
        hi *= 2.0
        if hi > 1e30:
            raise ArithmeticError("level membership never reaches alpha")
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if model.level_membership(x, mid) >= a:
            hi = mid
        else:
            lo = mid
    return hi


def alpha_inner_polarization(model: FuzzyModel, x, y, alpha: float) -> Scalar:
    """Level inner product recovered from level norms via polarization.

    Real field:      (||x+y||^2 - ||x-y||^2) / 4
    Complex field:   + i (||x+iy||^2 - ||x-iy||^2) / 4
    """
    x = model.check_vector(x)
    y = model.check_vector(y)
    np2 = model.alpha_norm(x + y, alpha) ** 2
    nm2 = model.alpha_norm(x - y, alpha) ** 2
    real_part = 0.25 * (np2 - nm2)
    if model.space.field == "real":
        return real_part
    ni2 = model.alpha_norm(x + 1j * y, alpha) ** 2
    nj2 = model.alpha_norm(x - 1j * y, alpha) ** 2
    return complex(real_part, 0.25 * (ni2 - nj2))


# ---------------------------------------------------------------------------
# Axiom checking


@dataclass(frozen=True)
class AxiomResult:
    axiom: str
    passed: bool
    violations: int = 0
    witness: Optional[str] = None


@dataclass(frozen=True)
class AxiomReport:
    profile: str
    sample_count: int
    seed: int
    results: tuple[AxiomResult, ...] = field(default_factory=tuple)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failed(self) -> tuple[AxiomResult, ...]:
        return tuple(r for r in self.results if not r.passed)


def _rand_vec(rng: np.random.Generator, space: BaseSpace) -> np.ndarray:
    v = rng.standard_normal(space.dimension)
    if space.field == "complex":
        v = v + 1j * rng.standard_normal(space.dimension)
    return v.astype(space.dtype)


def check_fip_axioms(
    model: FuzzyModel, sample_count: int = 1000, seed: int = 0
) -> AxiomReport:
    """Evaluate the inner-product membership axioms at seeded sample points.

    Checked pointwise on random vectors and scalars:

    * FIP1  superadditivity of memberships under vector addition
    * FIP2  product bound mu(x, y, |st|) >= min of the diagonal values
    * FIP3  conjugate symmetry mu(x, y, t) = mu(y, x, conj t)
    * FIP4  homogeneity mu(cx, y, t) = mu(x, y, t/|c|)
    * FIP5  zero membership off the positive real axis
    * FIP6  membership 1 at every t > 0 exactly for the zero vector
    * FIP7  monotonicity in t and limit 1 as t grows
    * FIP8  strictly positive diagonal membership at all t > 0 forces x = 0
    * FIP9  parallelogram law of the induced level norms (the pointwise
      min-form of this axiom is unsatisfiable for either profile, so the
      level-norm identity it exists to guarantee is what gets checked)

    Violations are collected into the report, never raised.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    space = model.space
    eq_tol = 1e-9

    counts: dict[str, int] = {}
    witnesses: dict[str, str] = {}

    def record(axiom: str, witness: str) -> None:
        counts[axiom] = counts.get(axiom, 0) + 1
        witnesses.setdefault(axiom, witness)

    zero = np.zeros(space.dimension, dtype=space.dtype)
    axioms = [f"FIP{k}" for k in range(1, 10)]

    for k in range(sample_count):
        x = _rand_vec(rng, space)
        y = _rand_vec(rng, space)
        z = _rand_vec(rng, space)
        s = complex(rng.standard_normal(), rng.standard_normal())
        t = complex(rng.standard_normal(), rng.standard_normal())
        tpos = float(rng.uniform(0.05, 8.0))
        spos = float(rng.uniform(0.05, 8.0))

        # FIP1 at nonnegative arguments |t|, |s|
        lhs = model.mu(x + y, z, abs(t) + abs(s))
        rhs = min(model.mu(x, z, abs(t)), model.mu(y, z, abs(s)))
        if lhs < rhs - eq_tol:
            record("FIP1", f"sample {k}: mu(x+y)={lhs:.6g} < min={rhs:.6g}")

        # FIP2
        lhs = model.mu(x, y, abs(s * t))
        rhs = min(model.mu(x, x, abs(s) ** 2), model.mu(y, y, abs(t) ** 2))
        if lhs < rhs - eq_tol:
            record("FIP2", f"sample {k}: mu(x,y,|st|)={lhs:.6g} < min={rhs:.6g}")

        # FIP3 at a complex argument and at a positive real one
        for targ in (t, tpos):
            if abs(model.mu(x, y, targ) - model.mu(y, x, _conj(targ))) > eq_tol:
                record("FIP3", f"sample {k}: asymmetric at t={targ!r}")
                break

        # FIP4 with a nonzero scalar from the model's field
        c = s if space.field == "complex" else float(s.real) or 1.0
        if abs(c) > 1e-6:
            if abs(model.mu(c * x, y, tpos) - model.mu(x, y, tpos / abs(c))) > eq_tol:
                record("FIP4", f"sample {k}: scaling mismatch at c={c!r}")

        # FIP5: vanishing off R+
        for bad in (-tpos, complex(0.0, tpos), complex(-tpos, spos)):
            if model.mu(x, x, bad) != 0.0:
                record("FIP5", f"sample {k}: mu(x,x,{bad!r}) != 0")
                break

        # FIP6: the zero vector has full membership, nonzero vectors do not
        if abs(model.mu(zero, zero, tpos) - 1.0) > eq_tol:
            record("FIP6", f"sample {k}: mu(0,0,{tpos:.4g}) != 1")
        nx = float(np.linalg.norm(x))
        if nx > 1e-9:
            probe = 0.5 * nx * nx
            if abs(model.mu(x, x, probe) - 1.0) <= eq_tol:
                record("FIP6", f"sample {k}: nonzero x with full membership")

        # FIP7: monotone in t, limit 1
        t_lo, t_hi = sorted((tpos, spos))
        if model.mu(x, x, t_lo) > model.mu(x, x, t_hi) + eq_tol:
            record("FIP7", f"sample {k}: not monotone on [{t_lo:.4g},{t_hi:.4g}]")
        big = 1e12 * (1.0 + nx * nx)
        if model.mu(x, x, big) < 1.0 - 1e-6:
            record("FIP7", f"sample {k}: limit at large t is {model.mu(x, x, big):.6g}")

        # FIP8: positive diagonal membership at all t>0 only for x = 0
        if nx > 1e-9:
            probe_t = 0.5 * nx  # N(x, probe_t) = mu(x, x, probe_t^2), below cut
            if model.mu(x, x, probe_t * probe_t) > 0.0:
                record("FIP8", f"sample {k}: positive membership below threshold")

        # FIP9 via the parallelogram identity of the level norms
        a = float(rng.uniform(0.02, 0.98))
        try:
            lhs = model.alpha_norm(x + y, a) ** 2 + model.alpha_norm(x - y, a) ** 2
            rhs = 2.0 * model.alpha_norm(x, a) ** 2 + 2.0 * model.alpha_norm(y, a) ** 2
            bad = not math.isfinite(lhs) or abs(lhs - rhs) > 1e-8 * max(1.0, abs(rhs))
            note = f"sample {k}: parallelogram residual {lhs - rhs:.3g}" if bad else ""
        except (ValueError, ArithmeticError):
            bad = True
            note = f"sample {k}: level norm undefined at alpha={a:.3g}"
        if bad:
            record("FIP9", note)

    results = tuple(
        AxiomResult(
            axiom=name,
            passed=name not in counts,
            violations=counts.get(name, 0),
            witness=witnesses.get(name),
        )
        for name in axioms
    )
    return AxiomReport(
        profile=model.profile,
        sample_count=sample_count,
        seed=seed,
        results=results,
    )


def _conj(t: Scalar) -> Scalar:
    return complex(t).conjugate()


# ---------------------------------------------------------------------------
# Orthonormality


@dataclass(frozen=True)
class OrthonormalResult:
    ok: bool
    witness: Optional[tuple[int, int]] = None
    value: Optional[Scalar] = None
    clause: Optional[str] = None  # "unit" | "orthogonal"
    alpha: Optional[float] = None


#: default grid used when orthonormality is requested at every level
ALL_ALPHA_GRID = tuple(round(0.05 * k, 2) for k in range(1, 20))


def orthonormal_check(
    model: FuzzyModel,
    vectors: Sequence,
    alpha: Optional[float] = None,
    tol: float = 1e-10,
) -> OrthonormalResult:
    """Test <f_i, f_j>_a = delta_ij at one level, or across a level grid.

    With ``alpha=None`` the test must hold at every grid level.  Under the
    scaled profile the unit clause <x, x>_a = scale(a) ||x||^2 = 1 can hold
    at one level only, so all-level success is possible only for the crisp
    profile; the result names the failing clause and level.
    """
    vecs = [model.check_vector(v) for v in vectors]
    if not vecs:
        raise ValueError("family must be nonempty")
    levels = ALL_ALPHA_GRID if alpha is None else (check_alpha(alpha),)

    for a in levels:
        for i, vi in enumerate(vecs):
            val = model.alpha_inner(vi, vi, a)
            if abs(val - 1.0) > tol:
                return OrthonormalResult(False, (i, i), val, "unit", a)
            for j in range(i + 1, len(vecs)):
                val = model.alpha_inner(vi, vecs[j], a)
                if abs(val) > tol:
                    return OrthonormalResult(False, (i, j), val, "orthogonal", a)
    return OrthonormalResult(True)


@dataclass(frozen=True)
class ExpansionReport:
    reconstruction_residual: float
    parseval_residual: float
    tol: float

    @property
    def ok(self) -> bool:
        return (
            self.reconstruction_residual <= self.tol
            and self.parseval_residual <= self.tol
        )


def orthonormal_expansion_check(
    model: FuzzyModel,
    basis: Sequence,
    x,
    alpha: float,
    tol: float = 1e-9,
) -> ExpansionReport:
    """Residuals of x = sum <x, e_k>_a e_k and of the Parseval identity.

    Requires the crisp profile (scaled coefficients rescale the expansion,
    so the identity cannot hold there) and an all-level orthonormal basis.
    """
    if model.profile != "crisp":
        raise ValueError("expansion identity requires the crisp profile")
    check = orthonormal_check(model, basis, alpha=None)
    if not check.ok:
        raise ValueError(
            f"basis is not orthonormal at every level: clause={check.clause!r} "
            f"witness={check.witness!r}"
        )
    x = model.check_vector(x)
    a = check_alpha(alpha)

    coeffs = np.array([model.alpha_inner(x, e, a) for e in basis])
    recon = sum(c * model.check_vector(e) for c, e in zip(coeffs, basis))
    rec_res = float(np.linalg.norm(x - recon))
    par_res = abs(model.alpha_norm(x, a) ** 2 - float(np.sum(np.abs(coeffs) ** 2)))
    return ExpansionReport(rec_res, par_res, tol)
