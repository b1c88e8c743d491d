"""Sampler and oracles for the joint limit law of centered motif counts.

The limit of the count vector (after per-motif scaling) couples linear and
bilinear Wiener-Ito integrals driven by one Brownian motion with an
independent Gaussian block.  On a grid of m cells the Brownian increments
become iid N(0, 1/m) variables eta_i; an irregular motif contributes the
linear form sum_i g(x_i) eta_i and a regular motif the quadratic form
eta' K eta - tr(K)/m plus its Gaussian coordinate.  The diagonal correction
implements the Wiener-Ito exclusion of diagonal squares on the grid.

A closed-form log moment generating function of any linear combination of the
limit coordinates is provided as an independent numeric oracle: an absolutely
convergent series in path compositions of the combined quadratic kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphon import (CovMatrix, Graphon, conditional_1pt, conditional_kernel_2pt,
                      degree_constant, gamma_matrix, hom_density,
                      regularity_R_graphon, sigma_matrix)
from .motifs import Motif, edge_join

DEFAULT_SAMPLE_GRID = 512
DEFAULT_SPECTRUM_GRID = 256
REGULARITY_TOL = 1e-9
_PSD_TOL = 1e-8
_CHUNK = 8192


@dataclass(frozen=True)
class LimitSpec:
    """Everything needed to sample the joint limit of a motif collection.

    regular[i] says whether the graphon is H_i-regular (quadratic marginal);
    sigma is the Gaussian-block covariance over the regular motifs.
    """

    motifs: tuple[Motif, ...]
    regular: tuple[bool, ...]
    graphon: Graphon
    grid: int = DEFAULT_SAMPLE_GRID
    sigma: CovMatrix | None = None

    def __post_init__(self):
        if len(self.motifs) != len(self.regular):
            raise ValueError("motifs and regular flags must align")
        n_reg = sum(self.regular)
        if self.sigma is not None and self.sigma.r != n_reg:
            raise ValueError(f"sigma has dimension {self.sigma.r}, expected {n_reg}")

    @property
    def r(self) -> int:
        return len(self.motifs)

    @property
    def regular_motifs(self) -> tuple[Motif, ...]:
        return tuple(h for h, reg in zip(self.motifs, self.regular) if reg)


def build_limit_spec(motifs, w: Graphon, grid: int = DEFAULT_SAMPLE_GRID,
                     tol: float = REGULARITY_TOL) -> LimitSpec:
    """Classify each motif by the regularity functional and fill in sigma."""
    motifs = tuple(motifs)
    regular = tuple(regularity_R_graphon(h, w) < tol for h in motifs)
    reg_motifs = tuple(h for h, r in zip(motifs, regular) if r)
    sigma = sigma_matrix(reg_motifs, w) if reg_motifs else None
    return LimitSpec(motifs, regular, w, grid, sigma)


def linear_profile(h: Motif, w: Graphon, grid: int) -> np.ndarray:
    """Integrand of the irregular marginal on grid midpoints.

    g(x) = (1/|Aut|) sum_a t_a(x,h,w) - (|V|/|Aut|) t(h,w); integral of g^2 is
    the Gaussian limit variance of the scaled centered count.
    """
    x = (np.arange(grid) + 0.5) / grid
    total = np.zeros(grid)
    for a in range(1, h.k + 1):
        total += conditional_1pt(h, a, x, w)
    return total / h.aut - (h.k / h.aut) * hom_density(h, w)


def centered_kernel(h: Motif, w: Graphon, grid: int) -> np.ndarray:
    """W_H on the grid minus the constant |V|(|V|-1) t(h,w) / (2|Aut|)."""
    return conditional_kernel_2pt(h, w, grid).values - degree_constant(h, w)


def _sigma_factor(sigma: CovMatrix | None, n_reg: int) -> np.ndarray:
    if n_reg == 0:
        return np.zeros((0, 0))
    ent = sigma.entries
    vals, vecs = np.linalg.eigh(ent)
    scale = max(1.0, float(np.abs(vals).max()))
    if vals.min() < -_PSD_TOL * scale:
        raise ValueError(f"sigma is not positive semidefinite: min eigenvalue {vals.min()}")
    return vecs @ np.diag(np.sqrt(np.clip(vals, 0.0, None)))


def sample_limit(spec: LimitSpec, draws: int, seed) -> np.ndarray:
    """Joint draws of the limit vector; one row per draw, one column per motif.

    All coordinates of a draw share the same Brownian increments, and the
    Gaussian block uses a separate substream, so removing a regular motif
    from the spec leaves the remaining irregular columns bit-identical.
    """
    m = spec.grid
    if m < 32:
        raise ValueError(f"grid must be >= 32, got {m}")
    profiles = {}
    kernels = {}
    for i, (h, reg) in enumerate(zip(spec.motifs, spec.regular)):
        if reg:
            kernels[i] = centered_kernel(h, spec.graphon, m)
        else:
            profiles[i] = linear_profile(h, spec.graphon, m)
    n_reg = len(kernels)
    sigma_fac = _sigma_factor(spec.sigma, n_reg)
    traces = {i: np.trace(k) / m for i, k in kernels.items()}

    ss = np.random.SeedSequence(seed)
    eta_seed, g_seed = ss.spawn(2)
    eta_rng = np.random.default_rng(eta_seed)
    g_rng = np.random.default_rng(g_seed)

    out = np.empty((draws, spec.r))
    done = 0
    while done < draws:
        c = min(_CHUNK, draws - done)
        eta = eta_rng.standard_normal((m, c)) / np.sqrt(m)
        if n_reg:
            gauss = sigma_fac @ g_rng.standard_normal((n_reg, c))
        reg_pos = 0
        for i in range(spec.r):
            if i in profiles:
                out[done:done + c, i] = profiles[i] @ eta
            else:
                k = kernels[i]
                quad = np.einsum("xc,xc->c", eta, k @ eta) - traces[i]
                out[done:done + c, i] = quad + gauss[reg_pos]
                reg_pos += 1
        done += c
    return out


def sample_limit_projection(spec: LimitSpec, alpha, draws: int, seed) -> np.ndarray:
    """Draws of alpha' Z via the spectral form of the combined quadratic kernel.

    Distribution-equal to alpha @ sample_limit(...) rows but O(grid) per draw,
    which makes million-draw moment checks cheap.
    """
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (spec.r,):
        raise ValueError(f"alpha must have length {spec.r}")
    m = spec.grid
    v = np.zeros(m)
    u = np.zeros((m, m))
    for i, (h, reg) in enumerate(zip(spec.motifs, spec.regular)):
        if alpha[i] == 0:
            continue
        if reg:
            u += alpha[i] * centered_kernel(h, spec.graphon, m)
        else:
            v += alpha[i] * linear_profile(h, spec.graphon, m)
    lam, phi = np.linalg.eigh(u / m)
    b = (phi.T @ v) / np.sqrt(m)
    a_reg = alpha[np.asarray(spec.regular, dtype=bool)]
    gauss_var = float(a_reg @ spec.sigma.entries @ a_reg) if len(a_reg) else 0.0

    ss = np.random.SeedSequence(seed)
    chi_rng, g_rng = (np.random.default_rng(s) for s in ss.spawn(2))
    out = np.empty(draws)
    done = 0
    while done < draws:
        c = min(_CHUNK * 4, draws - done)
        chi = chi_rng.standard_normal((m, c))
        vals = lam @ (chi ** 2 - 1) + b @ chi
        if gauss_var > 0:
            vals = vals + np.sqrt(gauss_var) * g_rng.standard_normal(c)
        out[done:done + c] = vals
        done += c
    return out


@dataclass(frozen=True)
class RegularMarginalLaw:
    """Parameters of the marginal limit sigma*Z + sum_l lambda_l (Z_l^2 - 1)."""

    motif: Motif
    sigma: float                  # standard deviation of the Gaussian part
    spectrum: np.ndarray          # eigenvalues with one copy of d_WH removed
    removed_eigenvalue: float
    d_wh: float
    degeneracy_warning: bool
    grid: int

    def variance(self) -> float:
        return self.sigma ** 2 + 2 * float((self.spectrum ** 2).sum())


def marginal_regular_law(h: Motif, w: Graphon,
                         grid: int = DEFAULT_SPECTRUM_GRID) -> RegularMarginalLaw:
    """Marginal law of a regular motif: Gaussian std plus the reduced spectrum.

    The spectrum is that of (1/m) [W_H on the grid] with one copy of the
    eigenvalue nearest d_WH removed; a warning flag is set when no eigenvalue
    is close to d_WH (possible higher-order degeneracy or h-irregularity).
    """
    kern = conditional_kernel_2pt(h, w, grid).values
    lam = np.linalg.eigvalsh(kern / grid)
    d = degree_constant(h, w)
    idx = int(np.argmin(np.abs(lam - d)))
    removed = float(lam[idx])
    spectrum = np.delete(lam, idx)
    warning = abs(removed - d) > 0.05 * max(1.0, abs(d))
    var = sigma_matrix([h], w).entries[0, 0]
    sigma = float(np.sqrt(max(var, 0.0)))
    return RegularMarginalLaw(h, sigma, spectrum, removed, d, warning, grid)


def sample_marginal_regular(law: RegularMarginalLaw, draws: int, seed) -> np.ndarray:
    """Draws of sigma*Z + sum_l lambda_l (Z_l^2 - 1) from the reduced spectrum."""
    rng = np.random.default_rng(seed)
    lam = law.spectrum
    out = np.empty(draws)
    done = 0
    while done < draws:
        c = min(_CHUNK * 4, draws - done)
        z = rng.standard_normal((len(lam), c))
        vals = lam @ (z ** 2 - 1)
        vals += law.sigma * rng.standard_normal(c)
        out[done:done + c] = vals
        done += c
    return out


# -- log moment generating function oracle -------------------------------------

def mgf_radius_constant(spec: LimitSpec, alpha) -> float:
    """C = sum over regular motifs of |alpha_i| |V|(|V|-1)/|Aut|.

    The series for the log-MGF converges absolutely for |theta| < 1/(32 C);
    with no regular motifs (C = 0) the combination is Gaussian and the MGF is
    entire.
    """
    alpha = np.asarray(alpha, dtype=float)
    c = 0.0
    for i, (h, reg) in enumerate(zip(spec.motifs, spec.regular)):
        if reg:
            c += abs(alpha[i]) * h.k * (h.k - 1) / h.aut
    return c


def _eta_irregular(spec: LimitSpec, alpha) -> float:
    idx = [i for i, reg in enumerate(spec.regular) if not reg]
    if not idx:
        return 0.0
    motifs = [spec.motifs[i] for i in idx]
    a = np.asarray(alpha, dtype=float)[idx]
    gam = gamma_matrix(motifs, spec.graphon).entries
    return float(a @ gam @ a)


def _eta_regular(spec: LimitSpec, alpha) -> float:
    idx = [i for i, reg in enumerate(spec.regular) if reg]
    if not idx:
        return 0.0
    a = np.asarray(alpha, dtype=float)
    w = spec.graphon
    cache: dict = {}
    total = 0.0
    c_sum = 0.0
    for i in idx:
        hi = spec.motifs[i]
        c_sum += a[i] * degree_constant(hi, w)
        for j in idx:
            hj = spec.motifs[j]
            s = 0.0
            for pa in ((x, y) for x in range(1, hi.k + 1) for y in range(1, hi.k + 1) if x != y):
                for pb in ((x, y) for x in range(1, hj.k + 1) for y in range(1, hj.k + 1) if x != y):
                    join = edge_join(hi, pa, hj, pb, "weak", strict=False)
                    key = join.canonical_key()
                    if key not in cache:
                        cache[key] = hom_density(join, w)
                    s += cache[key]
            total += a[i] * a[j] * s / (2 * hi.aut * hj.aut)
    return total - 2 * c_sum ** 2


def log_mgf_oracle(spec: LimitSpec, alpha, theta: float,
                   series_tol: float = 1e-12, max_terms: int = 200) -> float:
    """log E[exp(theta alpha' Z)] via the absolutely convergent series.

    Quadratic term (eta + eta~) theta^2/2 from join densities, then for L >= 1
    the V' U^(L) V terms (path compositions of the combined kernel evaluated
    by iterated grid matrix products) and for L >= 3 the cycle-trace terms.
    Requires |theta| < 1/(32 C); any theta is allowed when C = 0.
    """
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (spec.r,):
        raise ValueError(f"alpha must have length {spec.r}")
    c_const = mgf_radius_constant(spec, alpha)
    if c_const > 0 and abs(theta) >= 1 / (32 * c_const):
        raise ValueError(
            f"theta={theta} outside the convergence radius 1/(32C)={1 / (32 * c_const)}")
    if theta == 0:
        return 0.0

    total = (_eta_irregular(spec, alpha) + _eta_regular(spec, alpha)) * theta ** 2 / 2

    reg_idx = [i for i, reg in enumerate(spec.regular) if reg]
    if not reg_idx:
        return float(total)

    m = spec.grid
    u = np.zeros((m, m))
    for i in reg_idx:
        u += alpha[i] * centered_kernel(spec.motifs[i], spec.graphon, m)
    v = np.zeros(m)
    for i, reg in enumerate(spec.regular):
        if not reg and alpha[i] != 0:
            v += alpha[i] * linear_profile(spec.motifs[i], spec.graphon, m)

    a_op = u / m
    lam = np.linalg.eigvalsh(a_op)
    w_l = v.copy()
    for ell in range(1, max_terms + 1):
        w_l = a_op @ w_l
        term_v = 2.0 ** (ell - 1) * theta ** (ell + 2) * float(v @ w_l) / m
        term_t = 0.0
        if ell >= 3:
            term_t = 0.5 * (2 * theta) ** ell / ell * float((lam ** ell).sum())
        total += term_v + term_t
        if ell >= 3 and abs(term_v) < series_tol and abs(term_t) < series_tol:
            return float(total)
    raise RuntimeError(f"log-MGF series did not reach {series_tol} in {max_terms} terms")


def empirical_log_mgf(samples: np.ndarray, theta: float) -> float:
    """log of the empirical moment generating function at theta."""
    return float(np.log(np.mean(np.exp(theta * np.asarray(samples)))))
