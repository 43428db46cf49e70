"""Sampling of real Gaussian matrices and Monte Carlo estimators.

Conventions
-----------
* Matrix entries are iid N(0, 1/2), the density proportional to
  exp(-Tr M M^T).  ENTRY_VARIANCE records this, and every estimator works
  in the matrix units this normalization induces.
* Under this normalization the bulk-limit closed forms of :mod:`.kernel`
  apply at unit spacing with no rescaling: BULK_DILATION = 1.0.  The
  constant is selected empirically against the candidate dilations
  {1/sqrt(2), 1, sqrt(2)} at several matrix sizes (see the sampler tests)
  and is applied explicitly so the convention cannot drift silently.
* Every estimator draws sample ``i`` from the RNG stream keyed by
  (seed, i) and reduces in index order, so results are bit-reproducible
  for any worker partition of the index range.

Spin variables: spin(x) of a matrix is (-1)**(number of real eigenvalues
strictly below x), equivalently the sign of det(M - xI) away from the
spectrum.  At an eigenvalue the strictly-below count (left limit) is used,
which makes the weighted counting measures below well defined.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma

from ._rng import stream
from .linalg import Spectrum, real_schur, sign_det

ENTRY_VARIANCE = 0.5
BULK_DILATION = 1.0
MIN_MOMENT_SAMPLES = 100


class DegenerateShiftError(RuntimeError):
    """The shifted matrix M - xI is numerically singular."""


@dataclass(frozen=True)
class GinOESample:
    """One draw: the matrix, its structurally classified spectrum, a stream tag."""

    matrix: np.ndarray
    spectrum: Spectrum
    seed_tag: str = ""

    def __post_init__(self):
        tr = float(np.trace(self.matrix))
        resid = abs(self.spectrum.eigenvalue_sum() - tr)
        if resid > 1e-8 * max(1.0, abs(tr)):
            raise ValueError(f"spectrum inconsistent with matrix trace: residual {resid:.3e}")


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo result with its provenance."""

    mean: float
    stderr: float
    n_samples: int
    seed: int

    def __post_init__(self):
        if self.stderr < 0 or self.n_samples < 1:
            raise ValueError("invalid estimate fields")


@dataclass(frozen=True)
class BinnedDensity:
    """K-dimensional binned signed density estimate.

    ``weighted_counts`` are the accumulated per-sample weights per cell;
    ``normalization`` converts them to a density (1 / (samples * cell
    volume)).  Cells whose index tuple repeats a bin are not products of
    disjoint intervals and are NaN.
    """

    intervals: np.ndarray  # (m, 2) disjoint half-open bins
    k: int
    weighted_counts: np.ndarray
    normalization: np.ndarray
    stderr: np.ndarray
    n_samples: int
    seed: int

    def __post_init__(self):
        if self.weighted_counts.shape != (len(self.intervals),) * self.k:
            raise ValueError("counts shape does not match bins")

    @property
    def values(self) -> np.ndarray:
        return self.weighted_counts * self.normalization


def sample_ginoe(n: int, rng: np.random.Generator, seed_tag: str = "") -> GinOESample:
    """Draw an n x n matrix with iid N(0, 1/2) entries and classify its spectrum."""
    if n < 1:
        raise ValueError(f"matrix size must be positive, got {n}")
    m = rng.normal(scale=np.sqrt(ENTRY_VARIANCE), size=(n, n))
    return GinOESample(matrix=m, spectrum=real_schur(m), seed_tag=seed_tag)


def spin(sample: GinOESample, x: float, check: bool = True) -> int:
    """(-1)**(number of real eigenvalues strictly below x).

    With ``check`` the value is cross-verified against the sign of
    det(M - xI); a zero determinant sign raises DegenerateShiftError and a
    mismatch (which would indicate a classification bug) raises RuntimeError.
    """
    reals = sample.spectrum.real_eigenvalues
    below = int(np.searchsorted(reals, x, side="left"))
    val = -1 if below % 2 else 1
    if check:
        n = sample.matrix.shape[0]
        sd = sign_det(sample.matrix - x * np.eye(n))
        if sd == 0:
            raise DegenerateShiftError(f"det(M - {x} I) is numerically zero; resample")
        if sd != val:
            raise RuntimeError(
                f"spin mismatch at x={x}: parity {val} vs determinant sign {sd}"
            )
    return val


def _spin_products(reals: np.ndarray, points: np.ndarray) -> float:
    below = np.searchsorted(reals, points, side="left")
    return -1.0 if int(below.sum()) % 2 else 1.0


def _validate_config(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1)
    if not np.all(np.isfinite(pts)):
        raise ValueError("positions must be finite")
    if len(pts) % 2:
        raise ValueError(f"spin products need an even number of positions, got {len(pts)}")
    return BULK_DILATION * pts


def estimate_spin_moments(n: int, configs, samples: int, seed: int) -> list:
    """Estimates of E[prod_k spin(x_k)] for several configs from one sample set.

    Each config gets its own mean/stderr; the matrix draws are shared, which
    is what the experiment campaigns want (correlated errors cancel in
    comparisons across configs).
    """
    if samples < MIN_MOMENT_SAMPLES:
        raise ValueError(f"need at least {MIN_MOMENT_SAMPLES} samples, got {samples}")
    cfgs = [_validate_config(c) for c in configs]
    vals = np.empty((len(cfgs), samples))
    for i in range(samples):
        rng = stream(seed, i)
        m = rng.normal(scale=np.sqrt(ENTRY_VARIANCE), size=(n, n))
        reals = real_schur(m).real_eigenvalues
        for c, cfg in enumerate(cfgs):
            vals[c, i] = _spin_products(reals, cfg)
    out = []
    for c in range(len(cfgs)):
        v = vals[c]
        out.append(
            Estimate(
                mean=float(v.mean()),
                stderr=float(v.std(ddof=1) / np.sqrt(samples)),
                n_samples=samples,
                seed=seed,
            )
        )
    return out


def estimate_spin_moment(n: int, points, samples: int, seed: int) -> Estimate:
    """Mean and standard error of the spin product at one configuration."""
    return estimate_spin_moments(n, [points], samples, seed)[0]


def _as_intervals(bins) -> np.ndarray:
    b = np.asarray(bins, dtype=float)
    if b.ndim == 1:
        if len(b) < 2 or np.any(np.diff(b) <= 0):
            raise ValueError("edges must be strictly increasing")
        b = np.column_stack([b[:-1], b[1:]])
    if b.ndim != 2 or b.shape[1] != 2 or np.any(b[:, 1] <= b[:, 0]):
        raise ValueError("bins must be an edge array or an (m, 2) interval array")
    order = np.argsort(b[:, 0])
    b = b[order]
    if np.any(b[1:, 0] < b[:-1, 1]):
        raise ValueError("bins overlap; the signed-density estimator needs disjoint bins")
    return b


def _tuple_parity(idx) -> int:
    perm = list(np.argsort(idx, kind="stable"))
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def estimate_signed_density(
    n: int,
    bins,
    k: int,
    samples: int,
    seed: int,
    oriented: bool = False,
) -> BinnedDensity:
    """Binned estimator of the signed k-point eigenvalue density (k even).

    For each sample, every k-tuple of distinct real eigenvalues landing in a
    product of k distinct bins contributes the product of spins evaluated at
    the eigenvalues (strictly-below counts).  The raw measure is symmetric
    under coordinate swaps; with ``oriented`` each cell additionally carries
    the parity of its bin-index tuple, producing the antisymmetric
    (Vandermonde) orientation that matches the closed-form signed density on
    unordered cells.
    """
    if k % 2 or k <= 0 or k > 4:
        raise ValueError(f"supported k are 2 and 4, got {k}")
    intervals = _as_intervals(np.asarray(bins, dtype=float) * BULK_DILATION)
    m = len(intervals)
    if m < k:
        raise ValueError(f"need at least k={k} disjoint bins, got {m}")
    shape = (m,) * k
    acc = np.zeros(shape)
    acc2 = np.zeros(shape)
    for i in range(samples):
        rng = stream(seed, i)
        mat = rng.normal(scale=np.sqrt(ENTRY_VARIANCE), size=(n, n))
        reals = real_schur(mat).real_eigenvalues
        par = np.where(np.arange(len(reals)) % 2, -1.0, 1.0)
        s = np.array(
            [par[(reals >= lo) & (reals < hi)].sum() for lo, hi in intervals]
        )
        cell = s
        for _ in range(k - 1):
            cell = np.multiply.outer(cell, s)
        acc += cell
        acc2 += cell * cell
    mean = acc / samples
    var = np.maximum(acc2 / samples - mean * mean, 0.0)
    widths = intervals[:, 1] - intervals[:, 0]
    vol = widths
    for _ in range(k - 1):
        vol = np.multiply.outer(vol, widths)
    norm = 1.0 / vol
    stderr = np.sqrt(var / samples) * norm
    counts = acc.copy()
    # cells repeating a bin are not disjoint products
    for idx in np.ndindex(shape):
        if len(set(idx)) != k:
            counts[idx] = np.nan
            stderr[idx] = np.nan
        elif oriented:
            counts[idx] *= _tuple_parity(idx)
    return BinnedDensity(
        intervals=intervals / BULK_DILATION,
        k=k,
        weighted_counts=counts,
        normalization=norm / samples * (BULK_DILATION ** k),
        stderr=stderr * (BULK_DILATION ** k),
        n_samples=samples,
        seed=seed,
    )


def estimate_charpoly_moment(
    n: int,
    points,
    samples: int,
    seed: int,
    log_domain: bool = False,
) -> Estimate:
    """Monte Carlo moment E[prod_l det(M - x_l I)] over n x n draws.

    Determinants are accumulated in the log-magnitude domain; a product
    magnitude beyond the double range raises OverflowError and suggests
    ``log_domain``, which estimates the mean log magnitude instead.
    """
    pts = np.asarray(points, dtype=float).reshape(-1)
    if samples < 2:
        raise ValueError("need at least 2 samples")
    eye = np.eye(n)
    vals = np.empty(samples)
    for i in range(samples):
        rng = stream(seed, i)
        m = rng.normal(scale=np.sqrt(ENTRY_VARIANCE), size=(n, n))
        sign = 1.0
        logmag = 0.0
        for x in pts:
            s, l = np.linalg.slogdet(m - x * eye)
            sign *= s
            logmag += l
        if log_domain:
            vals[i] = logmag
        else:
            if logmag > 700.0:
                raise OverflowError(
                    "determinant product exceeds the double range; "
                    "rerun with log_domain=True"
                )
            vals[i] = sign * np.exp(logmag)
    return Estimate(
        mean=float(vals.mean()),
        stderr=float(vals.std(ddof=1) / np.sqrt(samples)),
        n_samples=samples,
        seed=seed,
    )


def estimate_real_count(n: int, samples: int, seed: int) -> Estimate:
    """Mean number of real eigenvalues of an n x n draw."""
    vals = np.empty(samples)
    for i in range(samples):
        rng = stream(seed, i)
        m = rng.normal(scale=np.sqrt(ENTRY_VARIANCE), size=(n, n))
        vals[i] = len(real_schur(m).real_eigenvalues)
    return Estimate(
        mean=float(vals.mean()),
        stderr=float(vals.std(ddof=1) / np.sqrt(samples)),
        n_samples=samples,
        seed=seed,
    )


def sphere_area(m: int) -> float:
    """Surface area of the unit sphere in R**(m+1): 2 pi**((m+1)/2) / Gamma((m+1)/2)."""
    return float(2.0 * np.pi ** ((m + 1) / 2.0) / gamma((m + 1) / 2.0))


@dataclass(frozen=True)
class DualityReport:
    """Binned signed density against the characteristic-polynomial formula."""

    points: tuple
    lhs: float
    lhs_stderr: float
    rhs: float
    rhs_stderr: float
    ratio: float
    ratio_stderr: float
    n: int
    n_samples: int
    seed: int
    moment_method: str


def duality_check(
    n: int,
    points,
    samples: int,
    seed: int,
    halfwidth: float = 0.125,
    moment: str = "quadrature",
    min_snr: float = 3.0,
) -> DualityReport:
    """Ratio of the binned signed pair density to its determinant-moment formula.

    LHS: the (0, 1) cell of the binned signed density around the two points.
    RHS: V(x) / 16 * prod_{k=1,2} |S_{n-k}| pi**(-(n-k)/2) exp(-x_k**2)
         times E_{n-2}[det(M - x_1) det(M - x_2)], the latter either by
         deterministic quadrature ("quadrature") or Monte Carlo ("mc").

    The ratio should not depend on the configuration; the absolute constant
    is reported, not asserted.  Raises if the LHS is too noisy to be
    informative, with a suggested sample count.
    """
    pts = np.sort(np.asarray(points, dtype=float).reshape(-1))
    if len(pts) != 2 or pts[1] - pts[0] < 2 * halfwidth:
        raise ValueError("need two points separated by at least the bin width")
    if n <= 2:
        raise ValueError("matrix size must exceed the number of points")
    bins = np.array([[pts[0] - halfwidth, pts[0] + halfwidth],
                     [pts[1] - halfwidth, pts[1] + halfwidth]])
    # bin in raw matrix units: this identity is exact at finite n
    density = estimate_signed_density(n, bins / BULK_DILATION, 2, samples, seed)
    lhs = float(density.values[0, 1]) / BULK_DILATION**2
    lhs_se = float(density.stderr[0, 1]) / BULK_DILATION**2
    if lhs_se > 0 and abs(lhs) < min_snr * lhs_se:
        need = int(np.ceil(samples * (min_snr * lhs_se / max(abs(lhs), 1e-300)) ** 2))
        raise RuntimeError(
            f"signed-density estimate too noisy ({lhs:.3e} +- {lhs_se:.3e}); "
            f"roughly {need} samples required"
        )
    prefactor = (
        (pts[1] - pts[0])
        / 16.0
        * np.prod([sphere_area(n - k) * np.pi ** (-(n - k) / 2.0) for k in (1, 2)])
        * np.exp(-pts[0] ** 2 - pts[1] ** 2)
    )
    if moment == "quadrature":
        from .group_integrals import charpoly_moment_quadrature

        mom = charpoly_moment_quadrature(n - 2, pts[0], pts[1])
        mom_se = 0.0
    elif moment == "mc":
        est = estimate_charpoly_moment(n - 2, pts, samples, seed + 1)
        mom, mom_se = est.mean, est.stderr
    else:
        raise ValueError(f"unknown moment method {moment!r}")
    rhs = prefactor * mom
    rhs_se = abs(prefactor) * mom_se
    ratio = lhs / rhs
    ratio_se = abs(ratio) * np.sqrt(
        (lhs_se / lhs) ** 2 + ((rhs_se / rhs) ** 2 if rhs_se else 0.0)
    )
    return DualityReport(
        points=tuple(pts),
        lhs=lhs,
        lhs_stderr=lhs_se,
        rhs=float(rhs),
        rhs_stderr=float(rhs_se),
        ratio=float(ratio),
        ratio_stderr=float(ratio_se),
        n=n,
        n_samples=samples,
        seed=seed,
        moment_method=moment,
    )
