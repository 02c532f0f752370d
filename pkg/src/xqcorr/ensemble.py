"""Random X-state generation and non-additivity histogram experiments.

Sampling convention (the source material leaves the measure open): the
diagonal is uniform on the 3-simplex via sorted-uniform spacings, the two
coherence magnitudes are uniform fractions of their positivity bounds
(rho14 = u * sqrt(rho11*rho44), rho23 = v * sqrt(rho22*rho33)), and phases
are uniform on [0, 2*pi) or pinned to zero.  Positivity holds by
construction.  Histogram shapes under a different measure would differ
bin-by-bin; only the sign/tail properties are measure-independent.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .closest import CaseId
from .errors import RejectionExhaustionError, SolverFailureError
from .states import XStateParams
from .tolerances import DEFAULT_TOLERANCES, Tolerances

_BATCH = 4096
_ACCEPTANCE_WINDOW = 20000
_MIN_ACCEPTANCE = 1e-4


class PhaseMode(str, enum.Enum):
    FREE = "free"
    ZERO = "zero"


class Quantity(str, enum.Enum):
    REL_RESIDUAL = "rel_residual"
    REL_RESIDUAL_WITH_L = "rel_residual_with_l"


DEFAULT_RANGES = {
    Quantity.REL_RESIDUAL: (-1.0, 0.0),
    Quantity.REL_RESIDUAL_WITH_L: (0.0, 0.5),
}


@dataclass(frozen=True)
class SamplerConfig:
    seed: int
    count: int
    case_filter: Optional[CaseId] = None
    phase_mode: PhaseMode = PhaseMode.FREE

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        object.__setattr__(self, "phase_mode", PhaseMode(self.phase_mode))
        if self.case_filter is not None:
            object.__setattr__(self, "case_filter", CaseId(self.case_filter))


@dataclass(frozen=True)
class HistogramSpec:
    bin_count: int
    lo: float
    hi: float
    quantity: Quantity

    def __post_init__(self):
        if self.bin_count < 2:
            raise ValueError("bin_count must be >= 2")
        if not self.lo < self.hi:
            raise ValueError("histogram range must satisfy lo < hi")
        object.__setattr__(self, "quantity", Quantity(self.quantity))

    @classmethod
    def default_for(cls, quantity, bin_count: int = 200) -> "HistogramSpec":
        quantity = Quantity(quantity)
        lo, hi = DEFAULT_RANGES[quantity]
        return cls(bin_count, lo, hi, quantity)


def _case_mask(batch: np.ndarray, case_filter: CaseId) -> np.ndarray:
    k1 = 4.0 * (batch[:, 4] + batch[:, 5]) ** 2
    k3 = 2.0 * ((batch[:, 0] - batch[:, 2]) ** 2 + (batch[:, 1] - batch[:, 3]) ** 2)
    if case_filter is CaseId.CASE1:
        return k1 <= k3
    return k1 > k3


def _draw_batch(rng: np.random.Generator, size: int,
                phase_mode: PhaseMode) -> np.ndarray:
    cuts = np.sort(rng.random((size, 3)), axis=1)
    diag = np.diff(np.concatenate(
        [np.zeros((size, 1)), cuts, np.ones((size, 1))], axis=1), axis=1)
    fracs = rng.random((size, 2))
    if phase_mode is PhaseMode.FREE:
        phases = rng.random((size, 2)) * (2.0 * math.pi)
    else:
        phases = np.zeros((size, 2))
    batch = np.empty((size, 8))
    batch[:, 0:4] = diag
    batch[:, 4] = fracs[:, 0] * np.sqrt(diag[:, 0] * diag[:, 3])
    batch[:, 5] = fracs[:, 1] * np.sqrt(diag[:, 1] * diag[:, 2])
    batch[:, 6:8] = phases
    return batch


def sample_x_arrays(cfg: SamplerConfig):
    """Sample X states as an (count, 8) parameter array.

    Returns (array, acceptance_rate).  Deterministic for a fixed config;
    raises :class:`RejectionExhaustionError` when the case filter accepts
    fewer than 1 in 10^4 draws over a sampling window.
    """
    rng = np.random.default_rng(cfg.seed)
    kept = []
    accepted = 0
    drawn = 0
    while accepted < cfg.count:
        batch = _draw_batch(rng, _BATCH, cfg.phase_mode)
        drawn += _BATCH
        if cfg.case_filter is not None:
            batch = batch[_case_mask(batch, cfg.case_filter)]
        accepted += batch.shape[0]
        kept.append(batch)
        if drawn >= _ACCEPTANCE_WINDOW and accepted / drawn < _MIN_ACCEPTANCE:
            raise RejectionExhaustionError(
                "acceptance rate %.2e below %.0e after %d draws; "
                "the requested filter looks unreachable"
                % (accepted / drawn, _MIN_ACCEPTANCE, drawn)
            )
    out = np.concatenate(kept, axis=0)[: cfg.count]
    return out, accepted / drawn


def sample_x_states(cfg: SamplerConfig):
    """Sample exactly ``cfg.count`` valid X states (validated objects)."""
    arr, _ = sample_x_arrays(cfg)
    return [XStateParams(*row) for row in arr]


@dataclass(frozen=True)
class HistogramResult:
    spec: HistogramSpec
    edges: np.ndarray
    counts: np.ndarray
    total: int
    dropped: int
    underflow: int
    overflow: int
    acceptance_rate: float
    config: SamplerConfig

    def to_csv(self) -> str:
        lines = ["bin_lo,bin_hi,count"]
        for i in range(self.counts.size):
            lines.append("%s,%s,%d" % (
                format(self.edges[i], ".17g"),
                format(self.edges[i + 1], ".17g"),
                int(self.counts[i]),
            ))
        return "\n".join(lines) + "\n"

    def sidecar_dict(self) -> dict:
        return {
            "seed": self.config.seed,
            "count": self.config.count,
            "case_filter": (None if self.config.case_filter is None
                            else int(self.config.case_filter)),
            "phase_mode": self.config.phase_mode.value,
            "quantity": self.spec.quantity.value,
            "bin_count": self.spec.bin_count,
            "range": [self.spec.lo, self.spec.hi],
            "acceptance_rate": self.acceptance_rate,
            "total_binned": self.total,
            "dropped_zero_tg": self.dropped,
            "underflow": self.underflow,
            "overflow": self.overflow,
        }


def relative_quantities(reports: np.ndarray, quantity: Quantity,
                        tols: Tolerances = DEFAULT_TOLERANCES):
    """Per-state relative residuals from a batch report array.

    States with t_g at or below ``tols.tg_floor`` carry no relative value
    and are dropped; returns (values, dropped_count).
    """
    tg = reports[:, _kernels.COL_TG]
    keep = tg > tols.tg_floor
    col = (_kernels.COL_RES if quantity is Quantity.REL_RESIDUAL
           else _kernels.COL_RESL)
    return reports[keep, col] / tg[keep], int(np.count_nonzero(~keep))


def run_histogram(cfg: SamplerConfig, spec: HistogramSpec,
                  tols: Tolerances = DEFAULT_TOLERANCES) -> HistogramResult:
    """Sample, compute quantifiers, and bin the requested relative residual.

    Values within ``tols.histogram_edge`` past a range edge are folded into
    the edge bin (pure floating-point slack); anything farther out lands in
    the underflow/overflow counters of the sidecar.
    """
    arr, acceptance = sample_x_arrays(cfg)
    reports = _kernels.batch_reports(arr, tols.case_boundary)
    if np.any(reports[:, _kernels.COL_CASE] == 0.0):
        raise SolverFailureError("closest-product solver failed on a sample")
    values, dropped = relative_quantities(reports, spec.quantity, tols)

    near_lo = (values < spec.lo) & (values >= spec.lo - tols.histogram_edge)
    near_hi = (values > spec.hi) & (values <= spec.hi + tols.histogram_edge)
    values = np.where(near_lo, spec.lo, values)
    values = np.where(near_hi, spec.hi, values)
    underflow = int(np.count_nonzero(values < spec.lo))
    overflow = int(np.count_nonzero(values > spec.hi))
    inside = values[(values >= spec.lo) & (values <= spec.hi)]
    counts, edges = np.histogram(
        inside, bins=spec.bin_count, range=(spec.lo, spec.hi)
    )
    return HistogramResult(
        spec=spec, edges=edges, counts=counts, total=int(counts.sum()),
        dropped=dropped, underflow=underflow, overflow=overflow,
        acceptance_rate=acceptance, config=cfg,
    )


def write_histogram(result: HistogramResult, path) -> None:
    """Write the histogram CSV plus its JSON metadata sidecar."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(result.to_csv())
    with open(str(path) + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(result.sidecar_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
