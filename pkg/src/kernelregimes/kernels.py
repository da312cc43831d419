"""Kernel and domain specifications with pointwise and spectral evaluation.

Translation-invariant kernels are parameterized as ``k(x, y) =
lam^{-1} q((x - y) / sigma)`` for a fixed radial profile ``q``; the profile's
spectral density ``q_hat`` drives every Fourier-side computation.  Two
evaluation variants exist on the torus:

* ``"wrap"`` (default): the profile applied to the wrap-around distance.
  Cheap and what the Monte-Carlo experiments use.
* ``"periodized"``: Fourier synthesis ``sum_m sigma^d q_hat(sigma m)
  exp(2 i pi <m, u>)``, whose integral-operator eigenvalues equal the lattice
  values exactly.  Spectral/empirical equivalence checks use this variant;
  wrap and periodized differ by boundary leakage and, for the Gaussian
  profile, by the documented normalization of ``q_hat``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from .errors import (
    CapacityExceeded,
    DimensionMismatch,
    DomainViolation,
    TruncationTooSmall,
    UnsupportedFamily,
)
from .linalg import SymMatrix

TRANSLATION_INVARIANT = ("gaussian", "exponential", "matern", "sobolev")
FAMILIES = TRANSLATION_INVARIANT + ("polynomial",)

# Refuse to materialize feature matrices or synthesis lattices beyond these.
FEATURE_ENTRY_CAP = 10**7
LATTICE_POINT_CAP = 10**8

# Relative tail tolerance for the periodized Fourier synthesis.
SYNTHESIS_RTOL = 1e-12


# ---------------------------------------------------------------------------
# specifications


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family with its bandwidth ``sigma`` and scale ``lam``.

    ``lam`` plays the double role of kernel scale and ridge strength: the
    regression module assembles its linear system from the unit-scale Gram
    with ridge ``n * lam``, which is algebraically the same estimator as the
    ``lam``-scaled kernel with unit regularization.
    """

    family: str
    sigma: float = 1.0
    lam: float = 1.0
    beta: float | None = None
    degree: int | None = None
    normalizer: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UnsupportedFamily(f"unknown kernel family {self.family!r}")
        if not (self.sigma > 0.0):
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not (self.lam > 0.0):
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.family in ("matern", "sobolev"):
            if self.beta is None or not (self.beta > 0.0):
                raise ValueError(f"{self.family} requires beta > 0")
        if self.family == "polynomial":
            if self.degree is None or self.degree < 0 or int(self.degree) != self.degree:
                raise ValueError("polynomial requires integer degree >= 0")
            object.__setattr__(self, "degree", int(self.degree))
            norm = 1.0 if self.normalizer is None else float(self.normalizer)
            if not (norm > 0.0):
                raise ValueError("polynomial normalizer must be positive")
            object.__setattr__(self, "normalizer", norm)

    # -- constructors ------------------------------------------------------

    @classmethod
    def gaussian(cls, sigma: float = 1.0, lam: float = 1.0) -> "KernelSpec":
        return cls("gaussian", sigma=sigma, lam=lam)

    @classmethod
    def exponential(cls, sigma: float = 1.0, lam: float = 1.0) -> "KernelSpec":
        return cls("exponential", sigma=sigma, lam=lam)

    @classmethod
    def matern(cls, beta: float, sigma: float = 1.0, lam: float = 1.0) -> "KernelSpec":
        return cls("matern", sigma=sigma, lam=lam, beta=beta)

    @classmethod
    def sobolev(cls, beta: float, sigma: float = 1.0, lam: float = 1.0) -> "KernelSpec":
        return cls("sobolev", sigma=sigma, lam=lam, beta=beta)

    @classmethod
    def polynomial(
        cls, degree: int, normalizer: float = 1.0, lam: float = 1.0
    ) -> "KernelSpec":
        return cls("polynomial", lam=lam, degree=degree, normalizer=normalizer)

    @property
    def translation_invariant(self) -> bool:
        return self.family in TRANSLATION_INVARIANT

    def to_jsonable(self) -> dict:
        out = {"family": self.family, "sigma": self.sigma, "lambda": self.lam}
        if self.beta is not None:
            out["beta"] = self.beta
        if self.family == "polynomial":
            out["degree"] = self.degree
            out["normalizer"] = self.normalizer
        return out


@dataclass(frozen=True)
class DomainSpec:
    """Input domain and sampling distribution.

    Kinds: ``"torus"`` (unit torus, uniform), ``"cube"`` (uniform on
    ``[lower, upper]^d``), ``"euclidean"`` (R^d with a standard Gaussian or a
    bounded density whose sup is ``rho_inf``).
    """

    kind: str
    d: int
    lower: float = 0.0
    upper: float = 1.0
    density: str = "gaussian"
    rho_inf: float | None = None

    def __post_init__(self):
        if self.kind not in ("torus", "cube", "euclidean"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.d < 1 or int(self.d) != self.d:
            raise ValueError(f"d must be a positive integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        if self.kind == "cube" and not (self.upper > self.lower):
            raise ValueError("cube requires upper > lower")
        if self.kind == "euclidean":
            if self.density not in ("gaussian", "bounded"):
                raise ValueError(f"unknown density {self.density!r}")
            if self.density == "bounded" and self.rho_inf is None:
                raise ValueError("bounded density requires rho_inf")
        if self.rho_inf is None:
            if self.kind == "torus":
                object.__setattr__(self, "rho_inf", 1.0)
            elif self.kind == "cube":
                object.__setattr__(self, "rho_inf", (self.upper - self.lower) ** -self.d)
            elif self.density == "gaussian":
                object.__setattr__(self, "rho_inf", (2.0 * math.pi) ** (-self.d / 2.0))

    @classmethod
    def torus(cls, d: int) -> "DomainSpec":
        return cls("torus", d)

    @classmethod
    def cube(cls, d: int, lower: float = 0.0, upper: float = 1.0) -> "DomainSpec":
        return cls("cube", d, lower=lower, upper=upper)

    @classmethod
    def euclidean(
        cls, d: int, density: str = "gaussian", rho_inf: float | None = None
    ) -> "DomainSpec":
        return cls("euclidean", d, density=density, rho_inf=rho_inf)

    def to_jsonable(self) -> dict:
        out = {"kind": self.kind, "d": self.d}
        if self.kind == "cube":
            out["lower"] = self.lower
            out["upper"] = self.upper
        if self.kind == "euclidean":
            out["density"] = self.density
            if self.density == "bounded":
                out["rho_inf"] = self.rho_inf
        return out


# ---------------------------------------------------------------------------
# distances and radial profiles


def _check_points(domain: DomainSpec, pts: np.ndarray, name: str) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(pts, dtype=float))
    if arr.shape[-1] != domain.d:
        raise DimensionMismatch(
            f"{name} has dimension {arr.shape[-1]}, domain has d={domain.d}"
        )
    if domain.kind == "cube":
        tol = 1e-12 * (abs(domain.lower) + abs(domain.upper) + 1.0)
        if np.any(arr < domain.lower - tol) or np.any(arr > domain.upper + tol):
            raise DomainViolation(
                f"{name} outside [{domain.lower}, {domain.upper}]^{domain.d}"
            )
    return arr


def torus_diff(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Signed per-coordinate difference folded into [-1/2, 1/2)."""
    delta = (np.asarray(x, dtype=float) - np.asarray(y, dtype=float)) % 1.0
    return np.where(delta >= 0.5, delta - 1.0, delta)


def pairwise_distance(domain: DomainSpec, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Pairwise metric distances, wrap-around on the torus."""
    xs = np.atleast_2d(xs)
    ys = np.atleast_2d(ys)
    if domain.kind == "torus":
        diff = torus_diff(xs[:, None, :], ys[None, :, :])
    else:
        diff = xs[:, None, :] - ys[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def _radial_profile(kernel: KernelSpec, r: np.ndarray, d: int) -> np.ndarray:
    """Unit-bandwidth profile q(r) for translation-invariant families."""
    if kernel.family == "gaussian":
        return np.exp(-(r * r))
    if kernel.family == "exponential":
        return np.exp(-r)
    if kernel.family == "matern":
        return _matern_profile(kernel.beta, d, r)
    if kernel.family == "sobolev":
        raise UnsupportedFamily("sobolev kernels are defined spectrally only")
    raise UnsupportedFamily(f"no radial profile for family {kernel.family!r}")


def _matern_profile(beta: float, d: int, r: np.ndarray) -> np.ndarray:
    """Closed-form Matern radial profile, normalized so q(0) = 1.

    Requires the smoothness ``nu = beta - d/2`` to be a half-odd integer
    ``p + 1/2`` so that the Bessel function degenerates to elementary terms:

        q(r) = (2^p p! / (2p)!) e^{-r} sum_i C(p, i) (p+i)!/p! 2^{-i} r^{p-i}.
    """
    if not (2.0 * beta > d):
        raise UnsupportedFamily(f"matern pointwise needs 2*beta > d, got beta={beta}, d={d}")
    nu = beta - d / 2.0
    p = nu - 0.5
    if abs(p - round(p)) > 1e-9 or p < 0:
        raise UnsupportedFamily(
            f"matern pointwise needs half-odd-integer smoothness, got nu={nu}"
        )
    p = int(round(p))
    prefactor = 2.0**p * math.factorial(p) / math.factorial(2 * p)
    acc = np.zeros_like(r)
    for i in range(p + 1):
        coeff = (
            math.factorial(p + i)
            / (math.factorial(i) * math.factorial(p - i))
            * 2.0**-i
        )
        acc += coeff * r ** (p - i)
    return prefactor * np.exp(-r) * acc


# ---------------------------------------------------------------------------
# spectral densities


def _spectral_density_sq(kernel: KernelSpec, omega_sq: np.ndarray, d: int) -> np.ndarray:
    """q_hat as a function of the squared frequency norm (vectorized)."""
    w2 = np.asarray(omega_sq, dtype=float)
    if kernel.family == "gaussian":
        return math.pi ** (-d / 2.0) * np.exp(-math.pi**2 * w2)
    if kernel.family in ("matern", "sobolev"):
        return (1.0 + w2) ** -kernel.beta
    if kernel.family == "exponential":
        const = 2.0**d * math.pi ** ((d - 1) / 2.0) * math.gamma((d + 1) / 2.0)
        return const * (1.0 + w2) ** (-(d + 1) / 2.0)
    raise UnsupportedFamily(f"no spectral density for family {kernel.family!r}")


def spectral_density(kernel: KernelSpec, omega) -> float:
    """Spectral density ``q_hat`` of the unit-bandwidth profile at one frequency.

    ``omega`` is a frequency vector in R^d (a scalar is treated as d = 1).
    The exponential family's density carries the closed-form constant of the
    Fourier pair of ``exp(-|x|)``, so it is a fixed multiple of the
    Matern(beta = (d+1)/2) density.
    """
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    if w.ndim != 1:
        raise DimensionMismatch("omega must be a single frequency vector")
    return float(_spectral_density_sq(kernel, float(w @ w), w.shape[0]))


# ---------------------------------------------------------------------------
# lattice enumeration (shared with the spectral module)


def shell_points(d: int, s: int) -> np.ndarray:
    """Integer lattice points with sup-norm exactly ``s``, shape (count, d)."""
    if s == 0:
        return np.zeros((1, d), dtype=np.int64)
    pieces = []
    for i in range(d):
        axes = []
        for j in range(d):
            if j < i:
                axes.append(np.arange(-s, s + 1, dtype=np.int64))
            elif j == i:
                axes.append(np.array([-s, s], dtype=np.int64))
            else:
                axes.append(np.arange(-(s - 1), s, dtype=np.int64))
        grid = np.meshgrid(*axes, indexing="ij")
        pieces.append(np.stack(grid, axis=-1).reshape(-1, d))
    return np.concatenate(pieces, axis=0)


def unit_eigenvalue_on_shell(
    kernel: KernelSpec, d: int, s: int
) -> tuple[np.ndarray, np.ndarray]:
    """Unit-scale torus eigenvalues ``sigma^d q_hat(sigma m)`` on ``|m|_inf = s``.

    Returns the eigenvalue array and the matching lattice points.
    """
    pts = shell_points(d, s)
    w2 = kernel.sigma**2 * np.sum(pts * pts, axis=1).astype(float)
    return kernel.sigma**d * _spectral_density_sq(kernel, w2, d), pts


def _periodized_terms(kernel: KernelSpec, d: int):
    """Adaptively enumerated (eigenvalue, lattice) pairs for Fourier synthesis.

    Shells accumulate until the newest shell's eigenvalue mass drops below
    ``SYNTHESIS_RTOL`` of the running total; exceeding LATTICE_POINT_CAP
    raises TruncationTooSmall.
    """
    eigs, pts, total = [], [], 0.0
    s = 0
    while True:
        e, p = unit_eigenvalue_on_shell(kernel, d, s)
        eigs.append(e)
        pts.append(p)
        shell_mass = float(np.sum(e))
        total += shell_mass
        if s > 0 and shell_mass <= SYNTHESIS_RTOL * total:
            break
        s += 1
        if (2 * s + 1) ** d > LATTICE_POINT_CAP:
            raise TruncationTooSmall(
                f"periodized synthesis for {kernel.family} needs more than "
                f"{LATTICE_POINT_CAP} lattice points in d={d}"
            )
    return np.concatenate(eigs), np.concatenate(pts, axis=0)


def periodized_profile(kernel: KernelSpec, d: int, diffs: np.ndarray) -> np.ndarray:
    """Periodized kernel values at difference vectors ``diffs`` (shape (..., d)).

    Synthesizes ``sum_m sigma^d q_hat(sigma m) cos(2 pi <m, u>)`` so the
    resulting kernel's torus eigenvalues equal the lattice values exactly.
    Returns unit-scale values (no ``lam`` division).
    """
    eigs, pts = _periodized_terms(kernel, d)
    u = np.atleast_2d(np.asarray(diffs, dtype=float))
    flat = u.reshape(-1, d)
    out = np.zeros(flat.shape[0])
    chunk = max(1, int(2**22 / max(flat.shape[0], 1)))
    for start in range(0, pts.shape[0], chunk):
        block_pts = pts[start : start + chunk]
        block_eigs = eigs[start : start + chunk]
        phases = 2.0 * math.pi * flat @ block_pts.T
        out += np.cos(phases) @ block_eigs
    return out.reshape(u.shape[:-1])


# ---------------------------------------------------------------------------
# evaluation


def eval(kernel: KernelSpec, domain: DomainSpec, x, y, variant: str = "wrap") -> float:
    """Evaluate ``k(x, y)`` including the ``lam^{-1}`` scale.

    Torus coordinates are folded modulo 1, so the value is invariant under
    integer shifts of any coordinate.  ``variant="periodized"`` selects the
    Fourier synthesis of translation-invariant kernels on the torus.
    """
    xs = _check_points(domain, x, "x")
    ys = _check_points(domain, y, "y")
    if xs.shape[0] != 1 or ys.shape[0] != 1:
        raise DimensionMismatch("eval takes single points; use gram for batches")
    if kernel.family == "polynomial":
        inner = float(xs[0] @ ys[0])
        return ((1.0 + inner) / kernel.normalizer) ** kernel.degree / kernel.lam
    if variant == "periodized":
        if domain.kind != "torus":
            raise DomainViolation("periodized evaluation requires the torus")
        val = periodized_profile(kernel, domain.d, torus_diff(xs[0], ys[0]))
        return float(val) / kernel.lam
    if variant != "wrap":
        raise ValueError(f"unknown variant {variant!r}")
    r = pairwise_distance(domain, xs, ys)[0, 0] / kernel.sigma
    return float(_radial_profile(kernel, np.asarray(r), domain.d)) / kernel.lam


def gram(
    kernel: KernelSpec, domain: DomainSpec, points, variant: str = "wrap"
) -> SymMatrix:
    """Gram matrix of pairwise evaluations ``K[i, j] = k(x_i, x_j)``.

    Includes the ``lam^{-1}`` scale, matching ``eval``.  The regression
    module builds its linear system from the unit-scale Gram (``lam = 1``)
    plus the ridge ``n * lam``, which is the same estimator assembled from a
    better-conditioned matrix.
    """
    pts = _check_points(domain, points, "points")
    n = pts.shape[0]
    if kernel.family == "polynomial":
        inner = pts @ pts.T
        mat = ((1.0 + inner) / kernel.normalizer) ** kernel.degree
    elif variant == "periodized":
        if domain.kind != "torus":
            raise DomainViolation("periodized evaluation requires the torus")
        diffs = torus_diff(pts[:, None, :], pts[None, :, :]).reshape(-1, domain.d)
        # Values depend only on the difference vector; deduplicate before the
        # synthesis sum, which dominates the cost.
        keys = np.round(diffs, 12)
        uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
        vals = periodized_profile(kernel, domain.d, uniq)
        mat = vals[inverse].reshape(n, n)
    elif variant == "wrap":
        r = pairwise_distance(domain, pts, pts) / kernel.sigma
        mat = _radial_profile(kernel, r, domain.d)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    mat = mat / kernel.lam
    return SymMatrix(0.5 * (mat + mat.T))


def kernel_sections(
    kernel: KernelSpec, domain: DomainSpec, points, at, variant: str = "wrap"
) -> np.ndarray:
    """Cross matrix ``K[i, j] = k(x_i, z_j)`` (shape n x m), ``lam`` included."""
    pts = _check_points(domain, points, "points")
    zs = _check_points(domain, at, "at")
    if kernel.family == "polynomial":
        inner = pts @ zs.T
        return ((1.0 + inner) / kernel.normalizer) ** kernel.degree / kernel.lam
    if variant == "periodized":
        if domain.kind != "torus":
            raise DomainViolation("periodized evaluation requires the torus")
        diffs = torus_diff(pts[:, None, :], zs[None, :, :])
        return periodized_profile(kernel, domain.d, diffs) / kernel.lam
    r = pairwise_distance(domain, pts, zs) / kernel.sigma
    return _radial_profile(kernel, r, domain.d) / kernel.lam


# ---------------------------------------------------------------------------
# polynomial features


def polynomial_feature_count(d: int, degree: int) -> int:
    """Number of monomials of total degree <= degree in d variables."""
    if d < 1 or degree < 0:
        raise ValueError("need d >= 1 and degree >= 0")
    return math.comb(d + degree, d)


def polynomial_features(x, degree: int) -> np.ndarray:
    """Monomial features of total degree <= degree, in graded-lex order.

    Degree blocks come first (1; then the linear terms; then quadratics,
    ...), and within a block exponents decrease lexicographically, e.g. for
    d = 2: ``1, x, y, x^2, xy, y^2, ...``.  Materialization beyond
    ``FEATURE_ENTRY_CAP`` output entries raises CapacityExceeded carrying the
    per-point feature count.
    """
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    pts = np.atleast_2d(arr)
    n, d = pts.shape
    count = polynomial_feature_count(d, degree)
    if n * count > FEATURE_ENTRY_CAP:
        raise CapacityExceeded(
            f"{n} x {count} feature entries exceed the cap {FEATURE_ENTRY_CAP}",
            count=count,
        )
    cols = [np.ones(n)]
    for k in range(1, degree + 1):
        for idx in combinations_with_replacement(range(d), k):
            cols.append(np.prod(pts[:, idx], axis=1))
    out = np.stack(cols, axis=1)
    return out[0] if single else out
