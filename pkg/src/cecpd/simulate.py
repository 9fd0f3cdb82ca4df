"""Simulation generators for the benchmark change-point scenarios.

A `SimulationSpec` is an ordered list of segment specifications plus a
seed; `simulate` turns one into a `TimeSeries` and the list of true
change points (first index of each new regime, 1-based, i.e. cumulative
segment lengths + 1).  The canonical univariate and multivariate suites -
four 50-point segments each, three true change points at [51, 101, 151] -
are available through `gen_univariate_case` and `gen_multivariate_case`.

Distributions are plain JSON-friendly dicts tagged by ``kind``:

    {"kind": "univariate_normal", "mu": 0.0, "delta": 1.0}
    {"kind": "bivariate_normal", "mean": [0.0, 0.0], "cov": 0.2}
    {"kind": "copula", "family": "frank", "parameter": 0.9,
     "marginals": [{"kind": "normal", "mu": 0.0, "delta": 2.0},
                   {"kind": "exponential", "rate": 0.5}]}

``delta`` is a variance (normal samplers take its square root); bivariate
normal segments have unit variances with the stated off-diagonal
covariance.
"""

import json
import math

import numpy as np
from dataclasses import dataclass
from scipy import stats

from .dataio import TimeSeries

__all__ = [
    "SegmentSpec",
    "SimulationSpec",
    "simulate",
    "gen_univariate_case",
    "gen_multivariate_case",
    "sample_gaussian_copula",
    "sample_frank_copula",
    "UNIVARIATE_CASES",
    "MULTIVARIATE_CASES",
]


@dataclass(frozen=True)
class SegmentSpec:
    """One homogeneous stretch of a simulated series."""

    distribution: dict
    length: int = 50

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("segment length must be positive")
        if "kind" not in self.distribution:
            raise ValueError("distribution needs a 'kind' tag")


@dataclass(frozen=True)
class SimulationSpec:
    """A full scenario: ordered segments, a seed, and a name."""

    segments: tuple
    seed: int = 0
    name: str = ""

    def __post_init__(self):
        if len(self.segments) < 2:
            raise ValueError("a change-point scenario needs at least 2 segments")
        object.__setattr__(self, "segments", tuple(self.segments))

    def truth(self):
        """True change points: cumulative segment lengths + 1 (1-based)."""
        out = []
        total = 0
        for seg in self.segments[:-1]:
            total += seg.length
            out.append(total + 1)
        return out

    def to_dict(self):
        return {
            "name": self.name,
            "seed": self.seed,
            "segments": [
                {"length": s.length, "distribution": s.distribution}
                for s in self.segments
            ],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, doc):
        segments = tuple(
            SegmentSpec(length=s["length"], distribution=s["distribution"])
            for s in doc["segments"]
        )
        return cls(segments=segments, seed=doc.get("seed", 0), name=doc.get("name", ""))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _marginal_ppf(marginal, u):
    kind = marginal["kind"]
    if kind == "normal":
        return stats.norm.ppf(u, loc=marginal["mu"], scale=math.sqrt(marginal["delta"]))
    if kind == "exponential":
        return stats.expon.ppf(u, scale=1.0 / marginal["rate"])
    if kind == "uniform":
        return np.asarray(u, dtype=np.float64)
    raise ValueError("unknown marginal kind: %r" % (kind,))


def _open_uniform(rng, n):
    """Uniforms strictly inside (0, 1)."""
    return rng.integers(1, 2**53, size=n) / 2.0**53


def _correlated_normals(rng, n, rho):
    z = rng.standard_normal((n, 2))
    x1 = z[:, 0]
    x2 = rho * z[:, 0] + math.sqrt(1.0 - rho * rho) * z[:, 1]
    return x1, x2


def sample_gaussian_copula(n, rho, marginals, seed=0, rng=None):
    """Draw n pairs from the Gaussian copula with the given marginals.

    Correlated standard-normal pairs (correlation ``rho``) are mapped
    through the standard-normal CDF onto (0,1) and then through each
    marginal's inverse CDF.

    Parameters
    ----------
    n : int
    rho : float
        Copula correlation, |rho| < 1.
    marginals : pair of dict
        Marginal specs (see module docstring); ``{"kind": "uniform"}``
        leaves a coordinate on (0,1).
    seed : int
    rng : numpy Generator, optional
        Draw from an existing stream instead of seeding a new one.

    Returns
    -------
    ndarray, shape (n, 2)
    """
    if not abs(rho) < 1:
        raise ValueError("need |rho| < 1, got %r" % (rho,))
    if rng is None:
        rng = np.random.default_rng(seed)
    x1, x2 = _correlated_normals(rng, n, rho)
    u1 = stats.norm.cdf(x1)
    u2 = stats.norm.cdf(x2)
    return np.column_stack([_marginal_ppf(marginals[0], u1), _marginal_ppf(marginals[1], u2)])


def sample_frank_copula(n, theta, marginals, seed=0, rng=None):
    """Draw n pairs from the Frank copula with the given marginals.

    Conditional inversion: u1 ~ U(0,1), t ~ U(0,1), and u2 solves
    dC/du1 = t, which has the closed form

        u2 = -(1/theta) * log(1 + t*(e^-theta - 1) /
                                  (e^(-theta*u1)*(1 - t) + t)).

    (Verified against bisection on dC/du1 = t in the test suite.)  Both
    coordinates are strictly inside (0,1) before the marginals apply.

    Parameters
    ----------
    n : int
    theta : float
        Frank dependence parameter, nonzero.
    marginals : pair of dict
    seed : int
    rng : numpy Generator, optional

    Returns
    -------
    ndarray, shape (n, 2)
    """
    if theta == 0:
        raise ValueError("theta must be nonzero (theta=0 is independence)")
    if rng is None:
        rng = np.random.default_rng(seed)
    u1 = _open_uniform(rng, n)
    t = _open_uniform(rng, n)
    ratio = t * math.expm1(-theta) / (np.exp(-theta * u1) * (1.0 - t) + t)
    u2 = -np.log1p(ratio) / theta
    return np.column_stack([_marginal_ppf(marginals[0], u1), _marginal_ppf(marginals[1], u2)])


def _sample_segment(spec, rng):
    dist = spec.distribution
    kind = dist["kind"]
    n = spec.length
    if kind == "univariate_normal":
        sd = math.sqrt(dist["delta"])
        return rng.normal(dist["mu"], sd, size=(n, 1))
    if kind == "bivariate_normal":
        cov = dist["cov"]
        if not abs(cov) < 1:
            raise ValueError("unit-variance bivariate normal needs |cov| < 1")
        x1, x2 = _correlated_normals(rng, n, cov)
        mean = dist["mean"]
        return np.column_stack([x1 + mean[0], x2 + mean[1]])
    if kind == "copula":
        family = dist["family"]
        if family == "frank":
            return sample_frank_copula(n, dist["parameter"], dist["marginals"], rng=rng)
        if family == "gaussian":
            return sample_gaussian_copula(n, dist["parameter"], dist["marginals"], rng=rng)
        raise ValueError("unknown copula family: %r" % (family,))
    raise ValueError("unknown distribution kind: %r" % (kind,))


def simulate(spec):
    """Generate the series a SimulationSpec describes.

    One seeded stream drives all segments in order, so the whole series
    is reproducible bit-for-bit from (spec, seed).

    Returns
    -------
    (TimeSeries, list of int)
        The series and its true change points (1-based).
    """
    rng = np.random.default_rng(spec.seed)
    parts = [_sample_segment(seg, rng) for seg in spec.segments]
    widths = {p.shape[1] for p in parts}
    if len(widths) != 1:
        raise ValueError("all segments must have the same dimension")
    series = TimeSeries(values=np.vstack(parts), name=spec.name)
    return series, spec.truth()


def _uni(mu, delta):
    return {"kind": "univariate_normal", "mu": mu, "delta": delta}


def _biv(mean, cov):
    return {"kind": "bivariate_normal", "mean": list(mean), "cov": cov}


_COPULA_MARGINALS = [
    {"kind": "normal", "mu": 0.0, "delta": 2.0},
    {"kind": "exponential", "rate": 0.5},
]

UNIVARIATE_CASES = {
    "mean": [_uni(0, 1), _uni(5, 1), _uni(10, 1), _uni(3, 1)],
    "mean-var": [_uni(0, 1), _uni(5, 3), _uni(10, 1), _uni(3, 10)],
    "var": [_uni(0, 1), _uni(0, 10), _uni(0, 5), _uni(0, 1)],
}

MULTIVARIATE_CASES = {
    "mean": [
        _biv((0, 0), 0.2),
        _biv((10, 10), 0.2),
        _biv((5, 5), 0.2),
        _biv((1, 0), 0.2),
    ],
    "mean-var": [
        _biv((0, 0), 0.2),
        _biv((10, 10), 0.8),
        _biv((5, 5), 0.1),
        _biv((1, 0), 0.9),
    ],
    "var": [
        _biv((0, 0), 0.2),
        _biv((0, 0), 0.8),
        _biv((0, 0), 0.1),
        _biv((0, 0), 0.9),
    ],
    "copula": [
        _biv((0, 0), 0.2),
        {
            "kind": "copula",
            "family": "frank",
            "parameter": 0.9,
            "marginals": _COPULA_MARGINALS,
        },
        _biv((5, 5), 0.1),
        {
            "kind": "copula",
            "family": "gaussian",
            "parameter": 0.3,
            "marginals": _COPULA_MARGINALS,
        },
    ],
}


def _case_spec(table, case, seed, name):
    try:
        dists = table[case]
    except KeyError:
        raise ValueError(
            "unknown case %r (choose from %s)" % (case, ", ".join(sorted(table)))
        ) from None
    segments = tuple(SegmentSpec(distribution=d, length=50) for d in dists)
    return SimulationSpec(segments=segments, seed=seed, name=name)


def gen_univariate_case(case, seed=0):
    """One of the standard univariate scenarios: mean, mean-var, or var.

    Four 50-point normal segments; returns (TimeSeries, [51, 101, 151]).
    """
    return simulate(_case_spec(UNIVARIATE_CASES, case, seed, "uni-%s" % case))


def gen_multivariate_case(case, seed=0):
    """One of the standard bivariate scenarios: mean, mean-var, var, copula.

    Four 50-point segments of bivariate normals (unit variances, stated
    covariance) or copula draws; returns (TimeSeries, [51, 101, 151]).
    """
    return simulate(_case_spec(MULTIVARIATE_CASES, case, seed, "multi-%s" % case))
