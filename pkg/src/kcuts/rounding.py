"""Gaussian argmax rounding of the spectral embedding and the many-sparse-cuts driver."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from . import kernels
from ._accel import thread_cap
from .certify import Certificate, verify_lower_bound
from .graph import Cut, GraphError, WeightedGraph, expansion
from .spectral import DEFAULT_TOL, SpectralData, spectral_data

log = logging.getLogger(__name__)


def default_trials(k: int) -> int:
    return 8 * math.ceil(math.log2(k + 1))


def num_selected(k: int, fraction: float) -> int:
    """``ceil(fraction * k)``, robust to float noise in the product."""
    return max(1, math.ceil(round(fraction * k, 9)))


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    """Independent stream for one trial, a pure function of ``(seed, trial_index)``."""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(int(trial_index),)))


def sample_gaussians(k: int, dim: int, seed) -> np.ndarray:
    """``k`` standard normal vectors in ``R^dim`` as the rows of a ``(k, dim)`` array.

    :param seed: int, :class:`numpy.random.SeedSequence` or ``Generator``
    """
    if k < 1 or dim < 1:
        raise ValueError("k and dim must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return rng.standard_normal((k, dim))


def normal_quantile(q: float) -> float:
    """Upper quantile ``t`` with ``P[X >= t] = q`` for standard normal ``X``."""
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    return float(-ndtri(q))


@dataclass(frozen=True, eq=False)
class RoundedFamily:
    """Vectors ``h_1..h_k`` with disjoint supports, stored as one label per vertex.

    ``labels[i]`` is the index ``l`` with ``h_l(i) != 0`` (``-1`` for vertices
    with ``u_i = 0``) and ``values[i] = h_l(i)``.
    """

    k: int
    labels: np.ndarray
    values: np.ndarray
    seed: object = None
    trial_index: int | None = None
    zero_vertices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def vector(self, l: int) -> np.ndarray:
        return np.where(self.labels == l, self.values, 0.0)

    def support(self, l: int) -> np.ndarray:
        return np.flatnonzero(self.labels == l)

    @property
    def vectors(self) -> np.ndarray:
        """Dense ``(k, n)`` array of all ``h_l``."""
        return np.stack([self.vector(l) for l in range(self.k)])


def round_embedding(sd: SpectralData, gaussians: np.ndarray, seed=None, trial_index=None) -> RoundedFamily:
    """Assign each vertex to ``argmax_l <ũ_i, g_l>`` and keep ``h_l(i) = <u_i, g_l>``.

    Ties go to the smallest ``l`` (``numpy.argmax`` semantics); vertices with
    ``u_i = 0`` are left out of every support.
    """
    g = np.asarray(gaussians, dtype=np.float64)
    if g.ndim != 2 or g.shape[1] != sd.k:
        raise ValueError(f"gaussians must have shape (k, {sd.k}), got {g.shape}")
    proj = sd.embedding @ g.T
    # ||u_i|| > 0 scales the row, so argmax over <u_i, g_l> equals argmax over <ũ_i, g_l>
    labels = np.argmax(proj, axis=1).astype(np.int64)
    values = proj[np.arange(proj.shape[0]), labels]
    if sd.zero_vertices.size:
        labels[sd.zero_vertices] = -1
        values[sd.zero_vertices] = 0.0
    labels.setflags(write=False)
    values.setflags(write=False)
    return RoundedFamily(g.shape[0], labels, values, seed, trial_index, sd.zero_vertices)


def _level_prefixes(x_sorted: np.ndarray, full: bool) -> np.ndarray:
    """Prefix lengths that end between two distinct values (a level set boundary)."""
    m = x_sorted.size
    ends = np.flatnonzero(x_sorted[:-1] > x_sorted[1:]) + 1
    ends = np.append(ends, m)
    if full:
        ends = ends[ends < m]
    return ends


def sweep_order(g: WeightedGraph, order, values=None, allow_full: bool = False):
    """Best-expansion prefix of ``order``.

    :param values: nonincreasing values along ``order``; only prefixes at value
        boundaries are eligible.  ``None`` makes every prefix eligible.
    :return: ``(prefix_length, phi_profile_at_eligible, eligible_lengths)``
    """
    order = np.asarray(order, dtype=np.int64)
    cut, vol = kernels.sweep_profile(order, g.kernel_arrays)
    covers_all = order.size == g.n
    if values is None:
        ends = np.arange(1, order.size + 1)
        if covers_all and not allow_full:
            ends = ends[ends < order.size]
    else:
        ends = _level_prefixes(np.asarray(values), covers_all and not allow_full)
    if ends.size == 0:
        raise GraphError("no proper level set to sweep")
    c = np.maximum(cut[ends - 1], 0.0)
    v = vol[ends - 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = c / np.minimum(v, g.total_weight - v)
    phi = np.where(np.isfinite(phi), phi, np.inf)
    best = int(kernels.near_min_indices(phi)[0])
    return int(ends[best]), phi, ends


def sweep_cut(g: WeightedGraph, x) -> Cut:
    """Best level set ``{i : x_i >= t}`` over the distinct positive values ``t`` of ``x``.

    Ties in expansion go to the smaller level set.

    :raises GraphError: if ``x`` has no positive entry or is negative somewhere
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n,):
        raise GraphError(f"x must have length {g.n}")
    if np.any(x < 0):
        raise GraphError("sweep_cut needs a nonnegative vector")
    support = np.flatnonzero(x > 0)
    if support.size == 0:
        raise GraphError("x is identically zero (empty support)")
    order = support[np.lexsort((support, -x[support]))]
    length, _, _ = sweep_order(g, order, x[order])
    return expansion(g, order[:length])


def cheeger_bound(g: WeightedGraph, x) -> float:
    """``2 Σ w_ij |x_i - x_j| / Σ d_i x_i``, the level-set guarantee for ``x >= 0``."""
    x = np.asarray(x, dtype=np.float64)
    num = float(np.sum(g.weight * np.abs(x[g.src] - x[g.dst])))
    den = float(np.sum(g.degrees * x))
    return 2.0 * num / den if den > 0 else math.inf


@dataclass(frozen=True)
class TrialDiagnostics:
    """Per-index moments of one rounding: ``D_l = Σ d h_l²``, ``N_l = Σ w |h_l(i)² - h_l(j)²|``."""

    trial_index: int
    denominators: tuple[float, ...]
    numerators: tuple[float, ...]
    expansions: tuple[float | None, ...]
    support_sizes: tuple[int, ...]

    def ratio(self, l: int) -> float:
        return self.numerators[l] / self.denominators[l] if self.denominators[l] > 0 else math.inf

    def to_json(self) -> dict:
        return {
            "trial_index": self.trial_index,
            "denominators": list(self.denominators),
            "numerators": list(self.numerators),
            "expansions": list(self.expansions),
            "support_sizes": list(self.support_sizes),
        }


@dataclass
class TrialResult:
    trial_index: int
    candidates: list[Cut]
    labels: list[int]
    diagnostics: TrialDiagnostics

    def score(self, m: int) -> float:
        """Expansion of the ``m``-th best candidate (``inf`` if fewer exist)."""
        if len(self.candidates) < m:
            return math.inf
        return sorted(c.expansion for c in self.candidates)[m - 1]


@dataclass
class CutReport:
    """Outcome of :func:`many_sparse_cuts`."""

    cuts: list[Cut]
    chosen_trial: int
    eigenvalues: np.ndarray
    certificate: Certificate
    family_certificate: Certificate
    trials: list[TrialResult]
    config: dict
    solver: dict = field(default_factory=dict)

    @property
    def lambda_k(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def max_phi(self) -> float:
        return max(c.expansion for c in self.cuts)

    @property
    def family(self) -> list[Cut]:
        return self.trials[self.chosen_trial].candidates

    def to_json(self) -> dict:
        return {
            "cuts": [c.to_json() for c in self.cuts],
            "max_phi": self.max_phi,
            "chosen_trial": self.chosen_trial,
            "lambda_k": self.lambda_k,
            "eigenvalues": self.eigenvalues.tolist(),
            "certificate": self.certificate.to_json(),
            "family_certificate": self.family_certificate.to_json(),
            "trials": [
                {
                    "trial_index": t.trial_index,
                    "candidate_expansions": [c.expansion for c in t.candidates],
                    "candidate_labels": t.labels,
                    "diagnostics": t.diagnostics.to_json(),
                }
                for t in self.trials
            ],
            "config": dict(self.config),
            "solver": dict(self.solver),
        }


def rounding_moments(g: WeightedGraph, family: RoundedFamily):
    """``(D_l, N_l)`` arrays for every index of a rounded family."""
    h2 = family.vectors**2
    den = h2 @ g.degrees
    num = np.abs(h2[:, g.src] - h2[:, g.dst]) @ g.weight
    return den, num


def run_trial(g: WeightedGraph, sd: SpectralData, seed: int, trial_index: int) -> TrialResult:
    """One rounding plus a sweep of every nonempty ``h_l²``."""
    gauss = sample_gaussians(sd.k, sd.k, trial_rng(seed, trial_index))
    fam = round_embedding(sd, gauss, seed=seed, trial_index=trial_index)
    den, num = rounding_moments(g, fam)
    candidates, labels, phis, sizes = [], [], [], []
    for l in range(sd.k):
        x = fam.vector(l) ** 2
        support = x > 0
        sizes.append(int(support.sum()))
        if not support.any():
            phis.append(None)
            continue
        try:
            cut = sweep_cut(g, x)
        except GraphError:
            # support is all of V with a constant value: no proper level set
            phis.append(None)
            continue
        if cut.set_weight > g.total_weight / 2:
            comp = np.ones(g.n, dtype=bool)
            comp[list(cut.members)] = False
            if np.all(support[comp]):
                cut = expansion(g, np.flatnonzero(comp))
        candidates.append(cut)
        labels.append(l)
        phis.append(cut.expansion)
    diag = TrialDiagnostics(trial_index, tuple(den.tolist()), tuple(num.tolist()), tuple(phis), tuple(sizes))
    return TrialResult(trial_index, candidates, labels, diag)


def many_sparse_cuts(
    g: WeightedGraph,
    k: int,
    trials: int | None = None,
    seed: int = 0,
    fraction: float = 0.5,
    tol: float = DEFAULT_TOL,
    mode: str = "auto",
    sd: SpectralData | None = None,
    threads: int | None = None,
) -> CutReport:
    """Find ``ceil(fraction*k)`` disjoint low-expansion sets.

    Embeds once, then runs ``trials`` independent roundings (seeded from
    ``(seed, trial_index)``) and keeps the trial whose ``ceil(fraction*k)``-th
    best candidate is smallest, ties to the lower trial index.

    :param sd: precomputed spectral data for ``(g, k)``, skipping the eigensolve
    :param threads: worker cap for concurrent trials (default ``KCUTS_THREADS``)
    """
    if not 2 <= k <= g.n:
        raise GraphError(f"k must lie in [2, n={g.n}], got {k}")
    trials = default_trials(k) if trials is None else int(trials)
    if trials < 1:
        raise GraphError("trials must be at least 1")
    if not 0 < fraction <= 1:
        raise GraphError("fraction must lie in (0, 1]")
    if sd is None:
        sd = spectral_data(g, k, tol=tol, mode=mode, seed=seed)
    elif sd.k != k:
        raise ValueError("spectral data dimension does not match k")
    if sd.zero_vertices.size == g.n:
        raise GraphError("embedding vanishes on every vertex")
    m = num_selected(k, fraction)

    workers = min(trials, threads or thread_cap())
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda t: run_trial(g, sd, seed, t), range(trials)))
    else:
        results = [run_trial(g, sd, seed, t) for t in range(trials)]

    def rank(t: TrialResult):
        # trials short of m candidates fall back to (most candidates, best max)
        short = len(t.candidates) < m
        worst = max((c.expansion for c in t.candidates), default=math.inf)
        return (t.score(m), short, -len(t.candidates), worst, t.trial_index)

    best = min(results, key=rank)
    if not best.candidates:
        raise GraphError("every trial produced empty supports")
    if len(best.candidates) < m:
        log.warning("best trial has %d candidates, fewer than the %d requested", len(best.candidates), m)
    chosen = sorted(best.candidates, key=lambda c: (c.expansion, c.members))[:m]
    lam = sd.eigenvalues
    cert = verify_lower_bound(g, chosen, float(lam[len(chosen) - 1]), tol=1e-8)
    fam_cert = verify_lower_bound(g, best.candidates, float(lam[len(best.candidates) - 1]), tol=1e-8)
    config = {"k": k, "trials": trials, "seed": int(seed), "fraction": fraction, "selected": m, "tol": tol}
    return CutReport(chosen, best.trial_index, lam, cert, fam_cert, results, config, dict(sd.solver))


@dataclass(frozen=True)
class MomentEstimate:
    """Monte Carlo moments of ``f = h_1`` over independent roundings."""

    samples: int
    k: int
    lambda_k: float
    mean_denominator: float
    se_denominator: float
    var_denominator: float
    se_var_denominator: float
    mean_numerator: float
    se_numerator: float

    @property
    def ratio(self) -> float:
        return self.mean_numerator / self.mean_denominator

    def to_json(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["ratio"] = self.ratio
        return out


def rounding_samples(g: WeightedGraph, sd: SpectralData, samples: int, seed: int, index: int = 0, batch: int = 512):
    """Draw ``samples`` roundings and return ``(D, N)`` for ``f = h_index`` in each."""
    rng = np.random.default_rng(seed)
    k = sd.k
    u = sd.embedding
    live = np.ones(g.n, dtype=bool)
    live[sd.zero_vertices] = False
    den = np.empty(samples)
    num = np.empty(samples)
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        gauss = rng.standard_normal((b, k, k))
        proj = np.einsum("nd,bld->bnl", u, gauss)
        win = proj.argmax(axis=2) == index
        f = np.where(win & live, proj[:, :, index], 0.0)
        f2 = f * f
        den[done : done + b] = f2 @ g.degrees
        num[done : done + b] = np.abs(f2[:, g.src] - f2[:, g.dst]) @ g.weight
        done += b
    return den, num


def moment_probe(g: WeightedGraph, k: int, samples: int = 10_000, seed: int = 0, sd: SpectralData | None = None) -> MomentEstimate:
    """Estimate ``E[Σ d f²]``, ``Var[Σ d f²]`` and ``E[Σ w |f_i² - f_j²|]`` with standard errors."""
    if samples < 2:
        raise ValueError("need at least two samples")
    if sd is None:
        sd = spectral_data(g, k, seed=seed)
    den, num = rounding_samples(g, sd, samples, seed)
    mean = den.mean()
    centred = den - mean
    var = centred.var(ddof=1)
    # delta-method standard error of the sample variance
    se_var = math.sqrt(max(np.mean(centred**4) - var**2, 0.0) / samples)
    return MomentEstimate(
        samples,
        sd.k,
        sd.lambda_k,
        float(mean),
        float(den.std(ddof=1) / math.sqrt(samples)),
        float(var),
        se_var,
        float(num.mean()),
        float(num.std(ddof=1) / math.sqrt(samples)),
    )
