"""Spectrum pipelines: assemble, diagonalize, convergence-filter, classify.

The numeric routes exploit two exact structure facts proved in the tests:
the transverse-parity block split of both models and the axial decoupling
of the 3D model (its spectrum is the Kronecker sum of the transverse
block and an axial ladder).  Both are similarity reorderings of the same
truncated matrices, so the computed spectra are bit-compatible with the
direct dense route while being several times cheaper.

One physics caveat, verified numerically in the tests: beyond the
critical field the 3D model's pair-forming states are non-normalizable,
so any Hermitian truncation keeps a real (and non-convergent) spectrum
there.  Matrix routes therefore cannot flag its broken phase; transition
searches for that model default to the exactly solvable spectrum.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import eigensolver, models
from .eigensolver import EigenResult, SolverConfig
from .models import ModelOneParams, ModelTwoParams
from .phase_analysis import (
    DEFAULT_DRIFT_TOL,
    PhaseLabel,
    Spectrum,
    classify,
    match_drifts,
    spectral_scale,
)

__all__ = [
    "SpectrumComputation",
    "default_jobs",
    "model1_numeric_spectrum",
    "model2_numeric_spectrum",
    "matrix_numeric_spectrum",
    "analytic_levels_model1",
    "analytic_levels_model2",
    "model1_matrix_family",
    "model1_analytic_family",
    "model2_matrix_family",
    "model2_analytic_family",
    "companion_dims",
]


def default_jobs() -> int:
    env = os.environ.get("PT_SPECTRA_JOBS", "").strip()
    if env:
        try:
            n = int(env)
            if n >= 1:
                return n
        except ValueError:
            pass
    return os.cpu_count() or 1


def companion_dims(dims: tuple[int, ...], ratio: float = 0.7, floor: int = 8) -> tuple[int, ...]:
    """Coarser truncation used for the drift-based convergence flags.

    The ratio trades cost against how many levels the drift test can
    certify: 0.7 keeps the companion's own truncation error well below
    the drift tolerance for the lowest ~2x10 levels at production dims.
    """
    return tuple(max(floor, int(round(d * ratio))) for d in dims)


@dataclass(frozen=True)
class SpectrumComputation:
    """Numeric spectrum plus the evidence the pipeline attached to it."""

    spectrum: Spectrum
    scale: float
    label: PhaseLabel
    dims: tuple[int, ...]
    companion: tuple[int, ...]
    qr_sweeps: int

    def lowest(self, count: int) -> np.ndarray:
        return self.spectrum.values[:count]


def _sorted_result(res: EigenResult) -> tuple[np.ndarray, np.ndarray]:
    return res.values, res.converged  # eigenvalues() already sorts (Re, Im)


def _solve_many(mats, cfg: SolverConfig | None, jobs: int) -> list[EigenResult]:
    if jobs > 1 and len(mats) > 1:
        with ThreadPoolExecutor(min(jobs, len(mats))) as pool:
            return list(pool.map(lambda m: eigensolver.eigenvalues(m, cfg), mats))
    return [eigensolver.eigenvalues(m, cfg) for m in mats]


def _merge_sorted(parts: list[EigenResult]) -> tuple[np.ndarray, np.ndarray, int]:
    values = np.concatenate([r.values for r in parts])
    conv = np.concatenate([r.converged for r in parts])
    order = np.lexsort((values.imag, values.real))
    sweeps = sum(r.iterations for r in parts)
    return values[order], conv[order], sweeps


def _flag_by_drift(
    values: np.ndarray,
    qr_conv: np.ndarray,
    companion_values: np.ndarray,
    compare: int,
    drift_tol: float,
) -> np.ndarray:
    """Converged = QR-converged and drift against the coarser run is small."""
    conv = np.zeros(values.size, dtype=bool)
    k = min(compare, values.size, companion_values.size)
    if k == 0:
        return conv
    drifts = match_drifts(values[:k], companion_values[: min(companion_values.size, 2 * k)])
    scale = spectral_scale(values[:k])
    conv[:k] = drifts <= drift_tol * scale
    return conv & qr_conv


def _classify_converged(values: np.ndarray, conv: np.ndarray) -> tuple[PhaseLabel, float]:
    spec = Spectrum(values, conv)
    block = spec.converged_values()
    scale = spectral_scale(block if block.size else values)
    label = classify(spec if block.size else Spectrum(values), scale)
    return label, scale


def model1_numeric_spectrum(
    p: ModelOneParams,
    dims: tuple[int, int],
    levels: int = 10,
    companion: tuple[int, int] | None = None,
    cfg: SolverConfig | None = None,
    jobs: int | None = None,
    drift_tol: float = DEFAULT_DRIFT_TOL,
) -> SpectrumComputation:
    """Spectrum of the 2D model at the given truncation, sector by sector."""
    dims = tuple(dims)
    companion = companion or companion_dims(dims)
    jobs = jobs or default_jobs()
    basis_main = models.basis_for_model1(p, dims)
    basis_comp = models.basis_for_model1(p, companion)
    mats = [models.model1_sector_matrix(p, basis_main, s) for s in (0, 1)]
    mats += [models.model1_sector_matrix(p, basis_comp, s) for s in (0, 1)]
    results = _solve_many(mats, cfg, jobs)
    values, qr_conv, sweeps = _merge_sorted(results[:2])
    comp_values, _, _ = _merge_sorted(results[2:])
    compare = max(2 * levels, 24)
    conv = _flag_by_drift(values, qr_conv, comp_values, compare, drift_tol)
    label, scale = _classify_converged(values, conv)
    return SpectrumComputation(
        spectrum=Spectrum(values, conv),
        scale=scale,
        label=label,
        dims=dims,
        companion=companion,
        qr_sweeps=sweeps,
    )


def _model2_block_values(
    p: ModelTwoParams,
    dims3: tuple[int, int, int],
    reduced: bool,
    cfg: SolverConfig | None,
    jobs: int,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Model-2 spectrum via the exact transverse/axial decomposition."""
    dx, dy, dz = dims3
    basis_xy = models.BasisSpec(
        dims=(dx, dy), scale_freqs=(p.omega, p.omega), mass=p.m, hbar=p.hbar
    )
    block = models.model2_xy_block(p, basis_xy, reduced=reduced)
    even, odd = models.parity_sector_indices((dx, dy))
    mats = [
        np.asfortranarray(block[np.ix_(even, even)]),
        np.asfortranarray(block[np.ix_(odd, odd)]),
        models.model2_axial_levels(p, dz),
    ]
    results = _solve_many(mats, cfg, jobs)
    xy_values, xy_conv, sweeps = _merge_sorted(results[:2])
    z_values, z_conv = _sorted_result(results[2])
    values = (xy_values[:, None] + z_values[None, :]).ravel()
    conv = (xy_conv[:, None] & z_conv[None, :]).ravel()
    order = np.lexsort((values.imag, values.real))
    return values[order], conv[order], sweeps + results[2].iterations


def model2_numeric_spectrum(
    p: ModelTwoParams,
    dims: tuple[int, int, int],
    levels: int = 10,
    companion: tuple[int, int, int] | None = None,
    cfg: SolverConfig | None = None,
    jobs: int | None = None,
    drift_tol: float = DEFAULT_DRIFT_TOL,
    reduced: bool = False,
) -> SpectrumComputation:
    """Spectrum of the 3D model (gauge-coupled block unless ``reduced``)."""
    dims = tuple(dims)
    companion = companion or companion_dims(dims)
    jobs = jobs or default_jobs()
    values, qr_conv, sweeps = _model2_block_values(p, dims, reduced, cfg, jobs)
    comp_values, _, _ = _model2_block_values(p, companion, reduced, cfg, jobs)
    compare = max(2 * levels, 24)
    conv = _flag_by_drift(values, qr_conv, comp_values, compare, drift_tol)
    label, scale = _classify_converged(values, conv)
    return SpectrumComputation(
        spectrum=Spectrum(values, conv),
        scale=scale,
        label=label,
        dims=dims,
        companion=companion,
        qr_sweeps=sweeps,
    )


def matrix_numeric_spectrum(
    main,
    companion_matrix,
    levels: int = 10,
    cfg: SolverConfig | None = None,
    jobs: int | None = None,
    drift_tol: float = DEFAULT_DRIFT_TOL,
    dims: tuple[int, ...] = (),
    companion: tuple[int, ...] = (),
) -> SpectrumComputation:
    """Generic route for compiled expressions: no structure assumed."""
    jobs = jobs or default_jobs()
    results = _solve_many([main, companion_matrix], cfg, jobs)
    values, qr_conv = _sorted_result(results[0])
    comp_values, _ = _sorted_result(results[1])
    compare = max(2 * levels, 24)
    conv = _flag_by_drift(values, qr_conv, comp_values, compare, drift_tol)
    label, scale = _classify_converged(values, conv)
    return SpectrumComputation(
        spectrum=Spectrum(values, conv),
        scale=scale,
        label=label,
        dims=dims,
        companion=companion,
        qr_sweeps=results[0].iterations,
    )


# --- closed-form level enumerations ------------------------------------------


def analytic_levels_model1(
    p: ModelOneParams, count: int
) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """Lowest ``count`` closed-form levels with their (n1, n2) labels."""
    nmax = count + 2
    pairs = [(n1, n2) for n1 in range(nmax) for n2 in range(nmax)]
    values = np.array([models.spectrum_model1(p, n1, n2) for n1, n2 in pairs])
    order = np.lexsort((values.imag, values.real))[:count]
    return values[order], [pairs[i] for i in order]


def analytic_levels_model2(
    p: ModelTwoParams, count: int
) -> tuple[np.ndarray, list[tuple[int, int, int, int]]]:
    """Lowest ``count`` closed-form levels with (nx, ny, nz, branch) labels.

    In the broken regime each transverse excitation contributes both
    conjugate branches.
    """
    nmax = count + 2
    broken = models.omega1_squared(p) < 0.0
    entries = []
    for nx in range(nmax):
        for ny in range(nmax):
            for nz in range(nmax):
                branches = (1, -1) if broken and nx + ny + 1 > 0 else (1,)
                for b in branches:
                    entries.append(
                        (models.spectrum_model2(p, nx, ny, nz, branch=b), (nx, ny, nz, b))
                    )
    values = np.array([e[0] for e in entries])
    order = np.lexsort((values.imag, values.real))[:count]
    return values[order], [entries[i][1] for i in order]


# --- parameterized families for the transition search -------------------------


def model1_matrix_family(
    p: ModelOneParams,
    dims: tuple[int, int],
    levels: int = 10,
    companion: tuple[int, int] | None = None,
    cfg: SolverConfig | None = None,
    jobs: int | None = None,
):
    """lambda -> converged-flagged numeric Spectrum of the 2D model."""

    def family(lam: float) -> Spectrum:
        comp = model1_numeric_spectrum(
            replace(p, lam=lam), dims, levels=levels, companion=companion, cfg=cfg, jobs=jobs
        )
        return comp.spectrum

    return family


def model1_analytic_family(p: ModelOneParams, levels: int = 12):
    """lambda -> closed-form Spectrum (all levels marked converged)."""

    def family(lam: float) -> Spectrum:
        values, _ = analytic_levels_model1(replace(p, lam=lam), levels)
        return Spectrum(values, np.ones(values.size, dtype=bool))

    return family


def model2_matrix_family(
    p: ModelTwoParams,
    dims: tuple[int, int, int],
    levels: int = 10,
    companion: tuple[int, int, int] | None = None,
    cfg: SolverConfig | None = None,
    jobs: int | None = None,
):
    """B -> numeric Spectrum of the 3D model.

    Sound below the critical field only: the broken phase of this model is
    carried by non-normalizable states, so this family never classifies
    Broken (see module docstring) and a bisection on it fails the bracket
    check by design.
    """

    def family(b: float) -> Spectrum:
        comp = model2_numeric_spectrum(
            replace(p, B=b), dims, levels=levels, companion=companion, cfg=cfg, jobs=jobs
        )
        return comp.spectrum

    return family


def model2_analytic_family(p: ModelTwoParams, levels: int = 12):
    """B -> closed-form Spectrum with both conjugate branches."""

    def family(b: float) -> Spectrum:
        values, _ = analytic_levels_model2(replace(p, B=b), levels)
        return Spectrum(values, np.ones(values.size, dtype=bool))

    return family
