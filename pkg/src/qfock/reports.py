"""Verification orchestration and report records.

``run_suite`` executes the named check suites over a parameter grid and
returns structured records.  Runs are deterministic for a fixed seed: every
check derives its generator from (seed, suite index, grid index), and the
emitters use stable field ordering with fixed-precision floats.  Wall times
are recorded in memory but excluded from emitted files by default so that
identical runs produce byte-identical reports.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from . import haagerup, quantize, toeplitz, wick
from . import spaces as sp
from .fock import (FockContext, GradedOperator, GradedVector, annihilation,
                   c_constant, creation, factorization_residual,
                   first_quantization, id_embedding_norm, r_star,
                   rstar_adjoint_residual, rstar_deformed_norm,
                   rstar_free_norm, s_q)
from .spaces import BlockSpectrum, build_space

SUITES = ("symmetrizer", "wick", "quantization", "toeplitz", "haagerup")

DEFAULT_Q_VALUES = (-0.9, -0.5, 0.0, 0.3, 0.5, 0.9)
DEFAULT_SPECTRA = ("t1", "t2", "b2", "b2+t1")

DEFAULT_SAMPLES = {
    "wick_vacuum": 100,
    "covariance": 50,
    "kadison_schwarz": 100,
    "functoriality": 3,
    "dilate": 20,
    "balanced": 3,
    "state_preservation": 8,
}

DEFAULT_TOLERANCES = {
    "exact": 1e-12,
    "algebraic": 1e-10,
    "norm": 1e-8,
    "product": 1e-9,
    "strong": 1e-6,
}


def parse_spectrum(text: str) -> BlockSpectrum:
    """Parse a compact spectrum string: terms joined by '+', each either
    ``t<count>`` (trivial directions) or ``b<lam>[x<mult>]`` (a rotation
    block).  Example: ``b2x2+t1``."""
    blocks, trivial = [], 0
    for term in text.split("+"):
        term = term.strip()
        if not term:
            raise ValueError(f"empty term in spectrum {text!r}")
        if term[0] == "t":
            trivial += int(term[1:])
        elif term[0] == "b":
            body = term[1:]
            if "x" in body:
                lam, mult = body.split("x", 1)
                blocks.append((float(lam), int(mult)))
            else:
                blocks.append((float(body), 1))
        else:
            raise ValueError(f"unknown spectrum term {term!r} (expected t<n> or b<lam>)")
    return BlockSpectrum(blocks, trivial)


@dataclass
class SweepConfig:
    q_values: tuple = DEFAULT_Q_VALUES
    spectra: tuple = DEFAULT_SPECTRA
    degree: int = 5
    seed: int = 12345
    samples: dict = field(default_factory=lambda: dict(DEFAULT_SAMPLES))
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def __post_init__(self):
        self.q_values = tuple(float(q) for q in self.q_values)
        for q in self.q_values:
            if not -1.0 < q < 1.0:
                raise ValueError(f"q={q} outside the open interval (-1, 1)")
        self.spectra = tuple(self.spectra)
        for text in self.spectra:
            parse_spectrum(text)  # fail fast on bad grammar
        if not 2 <= self.degree <= 6:
            raise ValueError("truncation degree must be in 2..6")
        samples = dict(DEFAULT_SAMPLES)
        samples.update(self.samples)
        self.samples = samples
        tolerances = dict(DEFAULT_TOLERANCES)
        tolerances.update(self.tolerances)
        self.tolerances = tolerances

    @classmethod
    def from_file(cls, path: str) -> "SweepConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
        known = {"q_values", "spectra", "degree", "seed", "samples", "tolerances"}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"{path}: unknown config fields {sorted(unknown)}")
        return cls(**raw)


@dataclass
class VerificationReport:
    check: str
    params: dict
    residual: float
    bound: float
    passed: bool
    wall_time: float = 0.0

    @classmethod
    def measure(cls, check: str, params: dict, residual: float, bound: float,
                started: float) -> "VerificationReport":
        return cls(check=check, params=params, residual=float(residual),
                   bound=float(bound), passed=bool(residual <= bound),
                   wall_time=time.perf_counter() - started)


def channel_degree(combined_dim: int, requested: int) -> int:
    """Truncation for channel (combined-space) contexts: dense desk scale
    caps the degree as the doubled base dimension grows."""
    if combined_dim <= 2:
        return requested
    if combined_dim <= 4:
        return min(requested, 4)
    return min(requested, 3)


class _Workspace:
    """Shared per-run caches: spaces and Fock contexts keyed by parameters."""

    def __init__(self, config: SweepConfig):
        self.config = config
        self._spaces = {}
        self._ctxs = {}

    def space(self, spectrum: str):
        if spectrum not in self._spaces:
            self._spaces[spectrum] = build_space(parse_spectrum(spectrum))
        return self._spaces[spectrum]

    def ctx(self, spectrum: str, q: float, degree: int) -> FockContext:
        key = (spectrum, q, degree)
        if key not in self._ctxs:
            self._ctxs[key] = FockContext(self.space(spectrum), q, degree)
        return self._ctxs[key]

    def channel_ctxs(self, spectrum: str, q: float):
        """(src_ctx, comb_ctx) pair at the channel truncation degree; source
        and target coincide for same-space channels."""
        space = self.space(spectrum)
        n_ch = channel_degree(2 * space.dim, self.config.degree)
        src = self.ctx(spectrum, q, n_ch)
        key = (spectrum + "(+)self", q, n_ch)
        if key not in self._ctxs:
            comb_space = sp.direct_sum(space, space)
            self._ctxs[key] = FockContext(comb_space, q, n_ch)
        return src, self._ctxs[key]

    def grid(self):
        for spectrum in self.config.spectra:
            for q in self.config.q_values:
                yield spectrum, q


def _rng(config: SweepConfig, suite: str, grid_index: int):
    return np.random.default_rng([config.seed, SUITES.index(suite), grid_index])


# ---------------------------------------------------------------------------
# suite collectors
# ---------------------------------------------------------------------------


def _collect_symmetrizer(ws: _Workspace) -> list:
    cfg = ws.config
    tol = cfg.tolerances
    out = []
    for gi, (spectrum, q) in enumerate(ws.grid()):
        rng = _rng(cfg, "symmetrizer", gi)
        ctx = ws.ctx(spectrum, q, cfg.degree)
        base = {"spectrum": spectrum, "q": q, "degree": cfg.degree}
        t0 = time.perf_counter()
        min_eig = min(float(np.linalg.eigvalsh(ctx.sym(n))[0]) for n in range(cfg.degree + 1))
        out.append(VerificationReport.measure("symmetrizer/positivity", base,
                                              -min_eig, 0.0, t0))
        t0 = time.perf_counter()
        res = max(factorization_residual(ctx, n, k)
                  for n in range(cfg.degree + 1) for k in range(cfg.degree + 1 - n))
        out.append(VerificationReport.measure("symmetrizer/factorization", base,
                                              res, tol["algebraic"], t0))
        t0 = time.perf_counter()
        cq = c_constant(q)
        res = max(rstar_free_norm(ctx, n, k) - cq
                  for n in range(cfg.degree + 1) for k in range(cfg.degree + 1 - n))
        out.append(VerificationReport.measure("symmetrizer/rstar_free_norm", base,
                                              res, tol["norm"], t0))
        t0 = time.perf_counter()
        res = max(max(id_embedding_norm(ctx, n, k), rstar_deformed_norm(ctx, n, k))
                  - np.sqrt(cq)
                  for n in range(cfg.degree + 1) for k in range(cfg.degree + 1 - n))
        out.append(VerificationReport.measure("symmetrizer/deformed_norm_bounds", base,
                                              res, tol["norm"], t0))
        t0 = time.perf_counter()
        res = max(rstar_adjoint_residual(ctx, n, k)
                  for n in range(cfg.degree + 1) for k in range(cfg.degree + 1 - n))
        out.append(VerificationReport.measure("symmetrizer/adjoint_pairing", base,
                                              res, tol["algebraic"], t0))
        t0 = time.perf_counter()
        out.append(VerificationReport.measure("symmetrizer/q_commutation", base,
                                              _q_commutation_residual(ctx, rng),
                                              tol["algebraic"], t0))
        t0 = time.perf_counter()
        out.append(VerificationReport.measure("symmetrizer/creation_adjoint", base,
                                              _creation_adjoint_residual(ctx, rng),
                                              tol["algebraic"], t0))
    return out


def _q_commutation_residual(ctx: FockContext, rng, n_samples: int = 3) -> float:
    res = 0.0
    for _ in range(n_samples):
        v = rng.standard_normal(ctx.dim) + 1j * rng.standard_normal(ctx.dim)
        w = rng.standard_normal(ctx.dim) + 1j * rng.standard_normal(ctx.dim)
        comm = annihilation(ctx, v) @ creation(ctx, w) - ctx.q * (
            creation(ctx, w) @ annihilation(ctx, v))
        scalar = sp.deformed_inner(ctx.space, v, w)
        for n in range(ctx.degree):  # safe window: below the truncation cut
            diff = comm.block(n, n) - scalar * np.eye(ctx.block_size(n))
            res = max(res, ctx.block_norm(diff, n, n))
    return res


def _creation_adjoint_residual(ctx: FockContext, rng, n_samples: int = 3) -> float:
    res = 0.0
    for _ in range(n_samples):
        v = rng.standard_normal(ctx.dim) + 1j * rng.standard_normal(ctx.dim)
        res = max(res, creation(ctx, v).adjoint().max_diff(annihilation(ctx, v)))
    return res


def _collect_wick(ws: _Workspace) -> list:
    cfg = ws.config
    tol = cfg.tolerances
    out = []
    for gi, (spectrum, q) in enumerate(ws.grid()):
        rng = _rng(cfg, "wick", gi)
        ctx = ws.ctx(spectrum, q, cfg.degree)
        base = {"spectrum": spectrum, "q": q, "degree": cfg.degree}
        deg_max = min(3, cfg.degree)
        t0 = time.perf_counter()
        res = 0.0
        for _ in range(cfg.samples["wick_vacuum"]):
            n = int(rng.integers(1, deg_max + 1))
            xi = rng.standard_normal(ctx.block_size(n)) + 1j * rng.standard_normal(ctx.block_size(n))
            res = max(res, wick.vacuum_residual(ctx, xi, n))
        out.append(VerificationReport.measure("wick/vacuum", base, res,
                                              tol["algebraic"], t0))
        t0 = time.perf_counter()
        res = 0.0
        for _ in range(3):
            n = int(rng.integers(1, deg_max + 1))
            xi = _real_wick_tensor(ctx, rng, n)
            res = max(res, wick.self_adjoint_residual(ctx, wick.wick_word(ctx, xi, n)))
        # the degree-N metric is ill-conditioned near |q| = 1
        sa_tol = tol["algebraic"] if abs(q) <= 0.5 else tol["norm"]
        out.append(VerificationReport.measure("wick/self_adjoint", base, res,
                                              sa_tol, t0))
        t0 = time.perf_counter()
        n = min(2, deg_max)
        xi = rng.standard_normal(ctx.block_size(n)) + 1j * rng.standard_normal(ctx.block_size(n))
        eta = rng.standard_normal(ctx.block_size(n)) + 1j * rng.standard_normal(ctx.block_size(n))
        a, b = complex(rng.standard_normal(), rng.standard_normal()), complex(
            rng.standard_normal(), rng.standard_normal())
        combined = wick.wick_word(ctx, a * xi + b * eta, n).op
        split = a * wick.wick_word(ctx, xi, n).op + b * wick.wick_word(ctx, eta, n).op
        out.append(VerificationReport.measure("wick/linearity", base,
                                              combined.max_diff(split), tol["exact"], t0))
    return out


def _real_wick_tensor(ctx: FockContext, rng, n: int) -> np.ndarray:
    """Degree-n tensor fixed by the Wick adjoint involution, so its Wick word
    is self-adjoint."""
    xi = rng.standard_normal(ctx.block_size(n)) + 1j * rng.standard_normal(ctx.block_size(n))
    return (xi + wick.adjoint_tensor(ctx, xi, n)) / 2.0


def _collect_quantization(ws: _Workspace) -> list:
    cfg = ws.config
    tol = cfg.tolerances
    out = []
    for gi, (spectrum, q) in enumerate(ws.grid()):
        rng = _rng(cfg, "quantization", gi)
        space = ws.space(spectrum)
        src_ctx, comb_ctx = ws.channel_ctxs(spectrum, q)
        base = {"spectrum": spectrum, "q": q, "degree": src_ctx.degree}

        t0 = time.perf_counter()
        res = 0.0
        for _ in range(cfg.samples["dilate"]):
            T = sp.random_contraction(rng, space, space, norm=0.5)
            res = max(res, _dilation_residual(T))
        out.append(VerificationReport.measure("quantization/dilation", base, res,
                                              tol["algebraic"], t0))

        t0 = time.perf_counter()
        res_cov = res_unital = res_vac = res_gns = 0.0
        deg_max = max(1, min(2, src_ctx.degree - 1))
        for _ in range(cfg.samples["covariance"]):
            T = sp.random_jti_contraction(rng, space, space, norm=0.7)
            channel = quantize.QuantizationChannel(T, src_ctx, src_ctx, comb_ctx)
            n = int(rng.integers(1, deg_max + 1))
            xi = rng.standard_normal(src_ctx.block_size(n)) + 1j * rng.standard_normal(
                src_ctx.block_size(n))
            word = wick.wick_word(src_ctx, xi, n)
            res_cov = max(res_cov, channel.covariance_residual(word))
            res_unital = max(res_unital, channel.unitality_residual())
            image = channel.apply_word(word)
            res_vac = max(res_vac, channel.vacuum_state_residual([word.op], [image]))
            res_gns = max(res_gns, quantize.gns_residual(channel, word))
        out.append(VerificationReport.measure("quantization/wick_covariance", base,
                                              res_cov, tol["norm"], t0))
        out.append(VerificationReport.measure("quantization/unitality", base,
                                              res_unital, tol["algebraic"], t0))
        out.append(VerificationReport.measure("quantization/vacuum_state", base,
                                              res_vac, tol["algebraic"], t0))
        out.append(VerificationReport.measure("quantization/gns", base,
                                              res_gns, tol["norm"], t0))

        t0 = time.perf_counter()
        res = 0.0
        for _ in range(cfg.samples["functoriality"]):
            res = max(res, _functoriality_residual(ws, spectrum, q, rng))
        out.append(VerificationReport.measure("quantization/functoriality", base,
                                              res, tol["norm"], t0))

        t0 = time.perf_counter()
        ks_min, tp_min = _positivity_minima(ws, spectrum, q, rng,
                                            cfg.samples["kadison_schwarz"])
        out.append(VerificationReport.measure("quantization/kadison_schwarz", base,
                                              -ks_min, tol["norm"], t0))
        out.append(VerificationReport.measure("quantization/two_positivity", base,
                                              -tp_min, tol["norm"], t0))

        t0 = time.perf_counter()
        out.append(VerificationReport.measure(
            "quantization/projection_monomials", base,
            _projection_monomial_residual(ws, spectrum, q, rng), tol["algebraic"], t0))

        t0 = time.perf_counter()
        out.append(VerificationReport.measure(
            "quantization/embedding_multiplicative", base,
            _embed_multiplicativity_residual(ws, spectrum, q, rng), tol["product"], t0))
    return out


def _dilation_residual(T: sp.DeformedContraction) -> float:
    src, tgt = T.source, T.target
    comb = sp.direct_sum(src, tgt)
    U = sp.dilate(T)
    Uadj = sp.deformed_adjoint(comb, comb, U)
    res = np.linalg.norm(Uadj @ U - np.eye(comb.dim), ord=2)
    res = max(res, np.linalg.norm(U @ Uadj - np.eye(comb.dim), ord=2))
    corner = sp.projection_matrix(src, tgt) @ U @ sp.inclusion_matrix(src, tgt)
    return float(max(res, np.linalg.norm(corner - T.matrix, ord=2)))


def _functoriality_residual(ws: _Workspace, spectrum: str, q: float, rng) -> float:
    src_ctx, comb_ctx = ws.channel_ctxs(spectrum, q)
    space = ws.space(spectrum)
    S = sp.random_jti_contraction(rng, space, space, norm=0.8)
    T = sp.random_jti_contraction(rng, space, space, norm=0.8)
    ST = sp.DeformedContraction(space, space, S.matrix @ T.matrix)
    ch_s = quantize.QuantizationChannel(S, src_ctx, src_ctx, comb_ctx)
    ch_t = quantize.QuantizationChannel(T, src_ctx, src_ctx, comb_ctx)
    ch_st = quantize.QuantizationChannel(ST, src_ctx, src_ctx, comb_ctx)
    n = max(1, min(2, src_ctx.degree - 1))
    xi = rng.standard_normal(src_ctx.block_size(n)) + 1j * rng.standard_normal(
        src_ctx.block_size(n))
    word = wick.wick_word(src_ctx, xi, n)
    mid = ch_t.apply_word(word).apply(GradedVector.vacuum(src_ctx)).blocks[n]
    lhs = ch_s.apply_word(wick.wick_word(src_ctx, mid, n))
    rhs = ch_st.apply_word(word)
    res = 0.0
    for p in range(src_ctx.degree - n + 1):
        for m in range(src_ctx.degree + 1):
            res = max(res, src_ctx.block_norm(lhs.block(m, p) - rhs.block(m, p), m, p))
    return res


def _positivity_minima(ws: _Workspace, spectrum: str, q: float, rng, n_samples: int):
    src_ctx, comb_ctx = ws.channel_ctxs(spectrum, q)
    space = ws.space(spectrum)
    n_channels = max(1, n_samples // 20)
    per_channel = max(1, n_samples // n_channels)
    ks_min, tp_min = np.inf, np.inf
    for _ in range(n_channels):
        T = sp.random_jti_contraction(rng, space, space, norm=0.7)
        channel = quantize.QuantizationChannel(T, src_ctx, src_ctx, comb_ctx)
        probe = quantize.positivity_probe(channel, rng, per_channel, degree_max=1)
        ks_min = min(ks_min, probe["kadison_schwarz_min"])
        tp_min = min(tp_min, probe["two_positivity_min"])
    return float(ks_min), float(tp_min)


def _projection_monomial_residual(ws: _Workspace, spectrum: str, q: float, rng) -> float:
    """The displayed conjugation identity for the orthogonal projection onto
    the second summand, checked on random monomials."""
    src_ctx, comb_ctx = ws.channel_ctxs(spectrum, q)
    space = ws.space(spectrum)
    P = sp.projection_matrix(space, space)
    channel = quantize.conjugation_channel(comb_ctx, src_ctx, P)
    res = 0.0
    for _ in range(3):
        k = int(rng.integers(0, 2))
        m = int(rng.integers(0 if k else 1, 2))
        vs = [rng.standard_normal(comb_ctx.dim) + 1j * rng.standard_normal(comb_ctx.dim)
              for _ in range(k)]
        wsv = [rng.standard_normal(comb_ctx.dim) + 1j * rng.standard_normal(comb_ctx.dim)
               for _ in range(m)]
        lhs = channel(toeplitz.monomial(comb_ctx, vs, wsv).op)
        rhs = toeplitz.monomial(src_ctx, [P @ v for v in vs], [P @ w for w in wsv]).op
        for p in range(src_ctx.degree - k + 1):
            for mm in range(src_ctx.degree + 1):
                res = max(res, src_ctx.block_norm(lhs.block(mm, p) - rhs.block(mm, p), mm, p))
    return res


def _embed_multiplicativity_residual(ws: _Workspace, spectrum: str, q: float, rng) -> float:
    src_ctx, comb_ctx = ws.channel_ctxs(spectrum, q)
    deg = 1 if src_ctx.degree < 4 else 2
    res = 0.0
    for _ in range(2):
        xi = rng.standard_normal(src_ctx.block_size(deg)) + 1j * rng.standard_normal(
            src_ctx.block_size(deg))
        eta = rng.standard_normal(src_ctx.block_size(deg)) + 1j * rng.standard_normal(
            src_ctx.block_size(deg))
        wx = wick.wick_word(src_ctx, xi, deg)
        wy = wick.wick_word(src_ctx, eta, deg)
        ex = quantize.embed_wick(src_ctx, comb_ctx, wx).op
        ey = quantize.embed_wick(src_ctx, comb_ctx, wy).op
        prod_src = wx.op @ wy.op
        prod_emb = ex @ ey
        # the sub-Fock space over the source coordinates is invariant; the
        # embedded product must restrict to the source product there
        for p in range(comb_ctx.degree - 2 * deg + 1):
            for m in range(comb_ctx.degree + 1):
                rows = _embed_indices(src_ctx, comb_ctx, m)
                cols = _embed_indices(src_ctx, comb_ctx, p)
                restricted = prod_emb.block(m, p)[np.ix_(rows, cols)]
                res = max(res, src_ctx.block_norm(restricted - prod_src.block(m, p), m, p))
    return res


def _embed_indices(src_ctx: FockContext, comb_ctx: FockContext, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros(1, dtype=int)
    digits = src_ctx._digits[n]
    weights = comb_ctx.dim ** np.arange(n - 1, -1, -1)
    return digits @ weights


def _collect_toeplitz(ws: _Workspace) -> list:
    cfg = ws.config
    tol = cfg.tolerances
    out = []
    for gi, (spectrum, q) in enumerate(ws.grid()):
        rng = _rng(cfg, "toeplitz", gi)
        ctx = ws.ctx(spectrum, q, cfg.degree)
        base = {"spectrum": spectrum, "q": q, "degree": cfg.degree}

        t0 = time.perf_counter()
        out.append(VerificationReport.measure("toeplitz/degree_expectation", base,
                                              _expectation_residual(ctx, rng),
                                              tol["algebraic"], t0))

        t0 = time.perf_counter()
        res_corner = res_identity = 0.0
        margin_min = np.inf
        for _ in range(cfg.samples["balanced"]):
            n = int(rng.integers(1, max(2, cfg.degree // 2) + 1))
            elem = toeplitz.random_balanced(ctx, rng, n)
            res_corner = max(res_corner, toeplitz.low_degree_residual(ctx, elem))
            for k in range(cfg.degree - 2 * n + 1):
                res_identity = max(res_identity,
                                   toeplitz.compression_identity_residual(ctx, elem, k))
            margin_min = min(margin_min, toeplitz.norm_bound_margin(ctx, elem))
        out.append(VerificationReport.measure("toeplitz/length_corners", base,
                                              res_corner, tol["exact"], t0))
        out.append(VerificationReport.measure("toeplitz/compression_identity", base,
                                              res_identity, tol["algebraic"], t0))
        out.append(VerificationReport.measure("toeplitz/norm_bound", base,
                                              -float(margin_min), tol["norm"], t0))

        t0 = time.perf_counter()
        res = 0.0
        for _ in range(3):
            n = min(2, cfg.degree)
            v = rng.standard_normal(ctx.block_size(n)) + 1j * rng.standard_normal(ctx.block_size(n))
            w = rng.standard_normal(ctx.block_size(n)) + 1j * rng.standard_normal(ctx.block_size(n))
            e = rng.standard_normal(ctx.block_size(n)) + 1j * rng.standard_normal(ctx.block_size(n))
            res = max(res, toeplitz.flip_pairing_residual(ctx, v, w, e, n))
        out.append(VerificationReport.measure("toeplitz/flip_pairing", base, res,
                                              tol["algebraic"], t0))

        t0 = time.perf_counter()
        res = _compression_residual(ws, spectrum, q, rng)
        out.append(VerificationReport.measure("toeplitz/compression_multiplicative",
                                              base, res, tol["product"], t0))

        t0 = time.perf_counter()
        rank = toeplitz.finkernel_rank(ctx, _subspace_indices(ctx.space),
                                       max_length=min(2, cfg.degree // 2))
        res = 0.0 if rank["full_rank"] else 1.0
        out.append(VerificationReport.measure("toeplitz/finkernel_rank", base, res,
                                              0.0, t0))

        t0 = time.perf_counter()
        margin = np.inf
        for n in range(cfg.degree + 1):
            for k in range(cfg.degree + 1 - n):
                check = toeplitz.majorisation_check(
                    ctx.sym(n + k), np.kron(ctx.sym(n), ctx.sym(k)), r_star(ctx, n, k))
                if not check["consistent"]:
                    margin = -np.inf
                margin = min(margin, check["margin"])
        out.append(VerificationReport.measure("toeplitz/majorisation", base,
                                              -float(margin), tol["algebraic"], t0))
    return out


def _subspace_indices(space) -> list:
    """A proper conjugation-invariant subspace when one exists, else everything."""
    if space.dim == 1:
        return [0]
    first = 0
    indices = {first, int(space.partner[first])}
    return sorted(indices)


def _expectation_residual(ctx: FockContext, rng) -> float:
    op = _random_graded(ctx, rng)
    ex = toeplitz.degree_expectation(op)
    res = toeplitz.degree_expectation(ex).max_diff(ex)  # idempotent
    ident = GradedOperator.identity(ctx)
    res = max(res, toeplitz.degree_expectation(ident).max_diff(ident))  # unital
    psd = op.adjoint() @ op
    ex_psd = toeplitz.degree_expectation(psd)
    scale = max(ex_psd.op_norm(), 1.0)
    min_eig = min(float(np.linalg.eigvalsh(_hermitize(ctx, ex_psd.block(n, n), n))[0])
                  for n in range(ctx.degree + 1))
    res = max(res, max(-min_eig, 0.0) / scale)  # positive, relative scale
    vac = GradedVector.vacuum(ctx)
    lhs = ctx.q_inner(vac.blocks[0], ex.apply(vac).blocks[0], 0)
    rhs = ctx.q_inner(vac.blocks[0], op.apply(vac).blocks[0], 0)
    return max(res, abs(lhs - rhs))  # vacuum-state compatible


def _hermitize(ctx: FockContext, B, n: int) -> np.ndarray:
    gauged = ctx.metric_sqrt(n) @ B @ ctx.metric_invsqrt(n)
    return (gauged + np.conj(gauged).T) / 2.0


def _random_graded(ctx: FockContext, rng) -> GradedOperator:
    blocks = {}
    for _ in range(4):
        m = int(rng.integers(0, ctx.degree + 1))
        n = int(rng.integers(0, ctx.degree + 1))
        blocks[(m, n)] = rng.standard_normal((ctx.block_size(m), ctx.block_size(n))) \
            + 1j * rng.standard_normal((ctx.block_size(m), ctx.block_size(n)))
    return GradedOperator(ctx, ctx, blocks)


def _compression_residual(ws: _Workspace, spectrum: str, q: float, rng) -> float:
    cfg = ws.config
    ctx = ws.ctx(spectrum, q, cfg.degree)
    indices = _subspace_indices(ctx.space)
    sub_key = f"{spectrum}|sub"
    if sub_key not in ws._spaces:
        ws._spaces[sub_key] = toeplitz.subspace(ctx.space, indices)
    ctx_small = ws.ctx(sub_key, q, cfg.degree)
    res = 0.0
    for _ in range(2):
        vs = [_embedded_vector(ctx, indices, rng) for _ in range(2)]
        x = toeplitz.monomial(ctx, [vs[0]], [vs[1]]).op
        y = toeplitz.monomial(ctx, [vs[1]], []).op
        lhs = toeplitz.compression(ctx, ctx_small, indices, x @ y)
        rhs = toeplitz.compression(ctx, ctx_small, indices, x) @ \
            toeplitz.compression(ctx, ctx_small, indices, y)
        for p in range(cfg.degree - 1):
            for m in range(cfg.degree + 1):
                res = max(res, ctx_small.block_norm(lhs.block(m, p) - rhs.block(m, p), m, p))
    return res


def _embedded_vector(ctx: FockContext, indices, rng) -> np.ndarray:
    v = np.zeros(ctx.dim, dtype=complex)
    for i in indices:
        v[i] = rng.standard_normal() + 1j * rng.standard_normal()
    return v


def _collect_haagerup(ws: _Workspace) -> list:
    cfg = ws.config
    tol = cfg.tolerances
    out = []
    for gi, (spectrum, q) in enumerate(ws.grid()):
        rng = _rng(cfg, "haagerup", gi)
        space = ws.space(spectrum)
        ctx = ws.ctx(spectrum, q, cfg.degree)
        base = {"spectrum": spectrum, "q": q, "degree": cfg.degree}
        family = haagerup.ApproximantFamily.default(space)

        t0 = time.perf_counter()
        res = max(max(haagerup.admissible_residuals(space, k).values())
                  for k in family.ks)
        out.append(VerificationReport.measure("haagerup/admissible", base, res,
                                              tol["exact"], t0))

        t0 = time.perf_counter()
        margin = -np.inf
        crosscheck = 0.0
        for k in family.ks:
            T = family.base_map(k).matrix
            per_degree = haagerup.degree_norms(ctx, T)
            for t in family.ts:
                for n in range(cfg.degree):
                    tail = haagerup.tail_norm(ctx, T, t, n, per_degree=per_degree)
                    margin = max(margin, tail - float(np.exp(-t * (n + 1))))
            crosscheck = max(crosscheck,
                             haagerup.free_reduction_crosscheck(ctx, T, 1.0, 1))
        out.append(VerificationReport.measure("haagerup/tail_bound", base,
                                              float(margin), tol["algebraic"], t0))
        cross_tol = tol["norm"] if abs(q) <= 0.5 else 1e-6
        out.append(VerificationReport.measure("haagerup/free_reduction", base,
                                              crosscheck, cross_tol, t0))

        t0 = time.perf_counter()
        vectors = [GradedVector.vacuum(ctx)] + \
            [GradedVector.random(ctx, rng) for _ in range(3)]
        sweep = haagerup.strong_convergence_sweep(family, ctx, vectors,
                                                  final_tol=tol["strong"])
        res = 0.0 if (sweep["all_monotone"] and sweep["all_converged"]) else 1.0
        out.append(VerificationReport.measure("haagerup/strong_convergence", base,
                                              res, 0.0, t0))

        t0 = time.perf_counter()
        profile = haagerup.compactness_profile(ctx, family.base_map(4).matrix, 0.5,
                                               cfg.degree - 1)
        res = 0.0 if profile["all_within_bound"] else 1.0
        out.append(VerificationReport.measure("haagerup/compactness_profile", base,
                                              res, 0.0, t0))

        t0 = time.perf_counter()
        out.append(VerificationReport.measure(
            "haagerup/state_preservation", base,
            _approximant_state_residual(ws, spectrum, q, rng,
                                        cfg.samples["state_preservation"]),
            tol["algebraic"], t0))
    return out


def _approximant_state_residual(ws: _Workspace, spectrum: str, q: float, rng,
                                n_words: int) -> float:
    src_ctx, comb_ctx = ws.channel_ctxs(spectrum, q)
    space = ws.space(spectrum)
    damped = sp.DeformedContraction(
        space, space, np.exp(-0.5) * haagerup.generate_admissible(space, 4).matrix)
    channel = quantize.QuantizationChannel(damped, src_ctx, src_ctx, comb_ctx)
    words = []
    deg_max = max(1, min(2, src_ctx.degree - 1))
    for _ in range(n_words):
        n = int(rng.integers(0, deg_max + 1))
        xi = rng.standard_normal(src_ctx.block_size(n)) + 1j * rng.standard_normal(
            src_ctx.block_size(n))
        words.append(wick.wick_word(src_ctx, xi, n))
    return haagerup.state_preservation_residual(channel, words)


_COLLECTORS = {
    "symmetrizer": _collect_symmetrizer,
    "wick": _collect_wick,
    "quantization": _collect_quantization,
    "toeplitz": _collect_toeplitz,
    "haagerup": _collect_haagerup,
}


def run_suite(config: SweepConfig, suite: str = "all") -> list:
    """Execute the selected suites over the configured grid."""
    if suite == "all":
        names = list(SUITES)
    elif suite in _COLLECTORS:
        names = [suite]
    else:
        raise ValueError(f"unknown suite {suite!r}; expected one of "
                         f"{', '.join(SUITES)} or 'all'")
    ws = _Workspace(config)
    reports = []
    for name in names:
        reports.extend(_COLLECTORS[name](ws))
    return reports


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".15g")


def _record(report: VerificationReport, include_timing: bool) -> dict:
    rec = {
        "check": report.check,
        "params": {k: report.params[k] for k in sorted(report.params)},
        "residual": _fmt(report.residual),
        "bound": _fmt(report.bound),
        "passed": report.passed,
    }
    if include_timing:
        rec["wall_time"] = _fmt(report.wall_time)
    return rec


def render(reports, fmt: str = "json", include_timing: bool = False) -> str:
    """Render reports as structured text (JSON) or tabular text (CSV)."""
    if fmt == "json":
        payload = {"reports": [_record(r, include_timing) for r in reports]}
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        fields = ["check", "params", "residual", "bound", "passed"]
        if include_timing:
            fields.append("wall_time")
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for r in reports:
            rec = _record(r, include_timing)
            rec["params"] = json.dumps(rec["params"], sort_keys=True)
            rec["passed"] = "true" if rec["passed"] else "false"
            writer.writerow(rec)
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}; expected 'json' or 'csv'")


def emit(reports, fmt: str, path: str, include_timing: bool = False) -> None:
    text = render(reports, fmt, include_timing)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def load_reports(path: str) -> list:
    """Round-trip parse of an emitted JSON report file."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    out = []
    for rec in payload["reports"]:
        out.append(VerificationReport(
            check=rec["check"], params=rec["params"],
            residual=float(rec["residual"]), bound=float(rec["bound"]),
            passed=bool(rec["passed"]),
            wall_time=float(rec.get("wall_time", 0.0))))
    return out


def all_passed(reports) -> bool:
    return all(r.passed for r in reports)
