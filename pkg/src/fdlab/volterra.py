"""Least-squares digital self-interference cancellation.

The canceller regresses the received samples onto a diagonal
memory-polynomial basis of the known transmit samples (odd orders,
finite memory, a few pre-cursor taps) and subtracts the prediction.
A static odd-order PA followed by a short linear channel is exactly
representable in this basis, which is why it reaches the noise floor
on simulated links.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from fdlab.signals import ComplexBasebandSignal

RIDGE_ENERGY_FRACTION = 1e-6
CONDITION_LIMIT = 1e12


class IllConditionedError(ValueError):
    """Unregularized fit rejected; carries the condition estimate."""

    def __init__(self, condition: float):
        self.condition = condition
        super().__init__(
            f"feature matrix condition estimate {condition:.3e} exceeds "
            f"{CONDITION_LIMIT:.0e}; pass a positive ridge"
        )


@dataclass(frozen=True)
class VolterraBasis:
    """Diagonal memory-polynomial basis description.

    Column (k, m) of the feature matrix holds
    ``x[n - m + pre_cursor] * |x[n - m + pre_cursor]|**(k-1)`` for each
    order k and memory tap m; pre-cursor taps let the regression reach
    slightly ahead of the nominal alignment.
    """

    orders: tuple[int, ...] = (1, 3, 5)
    memory_taps: int = 20
    pre_cursor: int = 4

    def __post_init__(self):
        if not self.orders or any(k < 1 or k % 2 == 0 for k in self.orders):
            raise ValueError(f"orders must be odd and >= 1, got {self.orders}")
        if len(set(self.orders)) != len(self.orders):
            raise ValueError(f"duplicate orders in {self.orders}")
        if self.memory_taps < 1:
            raise ValueError(f"memory_taps must be >= 1, got {self.memory_taps}")
        if not 0 <= self.pre_cursor < self.memory_taps:
            raise ValueError(
                f"pre_cursor {self.pre_cursor} outside 0..{self.memory_taps - 1}"
            )

    @property
    def num_columns(self) -> int:
        return len(self.orders) * self.memory_taps

    def edge_head(self) -> int:
        """Leading samples without a full feature row."""
        return self.memory_taps - 1 - self.pre_cursor

    def edge_tail(self) -> int:
        """Trailing samples without a full feature row."""
        return self.pre_cursor


@dataclass(frozen=True)
class VolterraModel:
    basis: VolterraBasis
    coeffs: np.ndarray
    ridge: float

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        object.__setattr__(self, "coeffs", c)
        if c.shape != (self.basis.num_columns,):
            raise ValueError(
                f"coefficient vector shape {c.shape} does not match basis "
                f"({self.basis.num_columns} columns)"
            )

    def to_json(self) -> str:
        doc = {
            "orders": list(self.basis.orders),
            "memory_taps": self.basis.memory_taps,
            "pre_cursor": self.basis.pre_cursor,
            "ridge": self.ridge,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "VolterraModel":
        doc = json.loads(text)
        basis = VolterraBasis(
            orders=tuple(doc["orders"]),
            memory_taps=int(doc["memory_taps"]),
            pre_cursor=int(doc["pre_cursor"]),
        )
        coeffs = np.array([complex(re, im) for re, im in doc["coeffs"]])
        return cls(basis=basis, coeffs=coeffs, ridge=float(doc["ridge"]))


def build_volterra_features(x: np.ndarray, basis: VolterraBasis) -> np.ndarray:
    """Feature matrix over the rows where every tap is in range.

    Row i corresponds to sample index ``i + memory_taps - 1 - pre_cursor``
    of ``x``; the matrix has ``len(x) - memory_taps + 1`` rows and
    ``len(orders) * memory_taps`` columns, ordered order-major.
    """
    x = np.asarray(x, dtype=np.complex128)
    m_taps = basis.memory_taps
    n_rows = x.size - m_taps + 1
    if n_rows < 1:
        raise ValueError(
            f"signal of {x.size} samples shorter than memory of {m_taps} taps"
        )
    cols = np.empty((n_rows, basis.num_columns), dtype=np.complex128)
    mag = np.abs(x)
    for ki, k in enumerate(basis.orders):
        xk = x * mag ** (k - 1) if k > 1 else x
        for m in range(m_taps):
            start = m_taps - 1 - m
            cols[:, ki * m_taps + m] = xk[start : start + n_rows]
    return cols


def fit_volterra(
    features: np.ndarray,
    rx: np.ndarray,
    ridge: float | None = None,
    basis: VolterraBasis | None = None,
) -> VolterraModel:
    """Ridge-regularized least squares over energy-equilibrated columns.

    Basis columns differ in scale by many orders of magnitude (an
    order-5 column is the fifth power of the drive level), so the
    problem is solved with columns rescaled to their mean energy:
    ``min |F~ c~ - rx|^2 + ridge |c~|^2`` where column j of ``F~`` is
    column j of ``features`` divided by ``sqrt(E_j / mean(E))``.  Each
    column therefore feels the ridge relative to its own energy;
    ``ridge=None`` picks ``1e-6 * mean(E)``, i.e. a per-column penalty
    of 1e-6 of that column's energy.  A ridge of exactly zero is allowed
    only for well-conditioned systems; otherwise
    :class:`IllConditionedError` is raised with the condition estimate.
    Solved through an orthogonal factorization of the augmented system
    (never the normal equations).
    """
    features = np.asarray(features, dtype=np.complex128)
    rx = np.asarray(rx, dtype=np.complex128)
    if features.ndim != 2:
        raise ValueError(f"features must be 2-D, got shape {features.shape}")
    n_rows, n_cols = features.shape
    if rx.shape != (n_rows,):
        raise ValueError(f"rx length {rx.shape} does not match {n_rows} feature rows")
    if n_rows < n_cols:
        raise ValueError(f"underdetermined fit: {n_rows} rows for {n_cols} columns")

    col_energy = np.sum(np.abs(features) ** 2, axis=0)
    mean_energy = float(np.mean(col_energy))
    if mean_energy == 0.0:
        raise ValueError("feature matrix is identically zero")
    scale = np.sqrt(col_energy / mean_energy)
    scale[scale == 0.0] = 1.0  # dead columns stay dead, coefficients land on 0
    equil = features / scale

    if ridge is None:
        ridge = RIDGE_ENERGY_FRACTION * mean_energy
    if ridge < 0:
        raise ValueError(f"ridge must be nonnegative, got {ridge}")

    if ridge == 0.0:
        coeffs_eq, _, rank, svals = np.linalg.lstsq(equil, rx, rcond=None)
        condition = float(svals[0] / svals[-1]) if svals[-1] > 0 else np.inf
        if rank < n_cols or condition > CONDITION_LIMIT:
            raise IllConditionedError(condition)
    else:
        aug = np.vstack([equil, np.sqrt(ridge) * np.eye(n_cols, dtype=np.complex128)])
        target = np.concatenate([rx, np.zeros(n_cols, dtype=np.complex128)])
        coeffs_eq, _, _, _ = np.linalg.lstsq(aug, target, rcond=None)
    coeffs = coeffs_eq / scale

    if basis is None:
        basis = _basis_for_columns(n_cols)
    return VolterraModel(basis=basis, coeffs=coeffs, ridge=float(ridge))


def _basis_for_columns(n_cols: int) -> VolterraBasis:
    default = VolterraBasis()
    if n_cols == default.num_columns:
        return default
    raise ValueError(
        f"cannot infer basis for {n_cols} columns; pass basis= explicitly"
    )


@dataclass(frozen=True)
class DigitalSicResult:
    """Residual stream plus the mask of rows the canceller could predict."""

    residual: ComplexBasebandSignal
    valid: np.ndarray


def apply_digital_sic(
    model: VolterraModel,
    tx: ComplexBasebandSignal,
    rx: ComplexBasebandSignal,
) -> DigitalSicResult:
    """Subtract the model prediction from rx over the predictable rows.

    Edge samples without a full feature row pass through unmodified and
    are flagged False in the returned mask.
    """
    if len(tx) != len(rx):
        raise ValueError(f"tx/rx length mismatch: {len(tx)} vs {len(rx)}")
    if tx.sample_rate_hz != rx.sample_rate_hz:
        raise ValueError("tx/rx sample rates differ")
    basis = model.basis
    feats = build_volterra_features(tx.samples, basis)
    pred = feats @ model.coeffs
    head = basis.edge_head()
    residual = rx.samples.copy()
    residual[head : head + pred.size] -= pred
    valid = np.zeros(len(rx), dtype=bool)
    valid[head : head + pred.size] = True
    return DigitalSicResult(
        residual=ComplexBasebandSignal(samples=residual, sample_rate_hz=rx.sample_rate_hz),
        valid=valid,
    )


def digital_sic_db(before: np.ndarray, after: np.ndarray) -> float:
    """Power ratio of the pre/post digital-cancellation streams in dB."""
    before = np.asarray(before)
    after = np.asarray(after)
    if before.size == 0 or before.size != after.size:
        raise ValueError("before/after must be equal-length nonempty arrays")
    p_b = float(np.mean(np.abs(before) ** 2))
    p_a = float(np.mean(np.abs(after) ** 2))
    if p_b == 0.0:
        raise ValueError("reference stream is identically zero")
    if p_a == 0.0:
        return np.inf
    return 10.0 * np.log10(p_b / p_a)


def align_lag(tx: np.ndarray, rx: np.ndarray, max_lag: int = 256) -> int:
    """Integer lag of rx relative to tx at the cross-correlation peak.

    Positive lag means rx is delayed: ``rx[n] ~ f(tx[n - lag])``.
    """
    tx = np.asarray(tx, dtype=np.complex128)
    rx = np.asarray(rx, dtype=np.complex128)
    n = min(tx.size, rx.size)
    if n == 0:
        raise ValueError("cannot align empty signals")
    max_lag = min(max_lag, n - 1)
    size = int(2 ** np.ceil(np.log2(2 * n)))
    fx = np.fft.fft(rx[:n], size)
    ft = np.fft.fft(tx[:n], size)
    cc = np.fft.ifft(fx * np.conj(ft))
    lags = np.concatenate([np.arange(0, max_lag + 1), np.arange(-max_lag, 0)])
    vals = np.concatenate([cc[: max_lag + 1], cc[size - max_lag : size]])
    return int(lags[np.argmax(np.abs(vals))])
