"""Dataset ingestion and synthetic data generation.

Two CSV schemas are supported: imbalanced binary-response tables with
categorical predictors (expanded to a reference-coded design matrix
with intercept), and annual two-species population counts for the
predator-prey calibration. Synthetic generators reproduce the shape of
both at any scale, with fully seeded determinism.
"""

import csv
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import DataShapeError, SchemaError
from .ode import LVParams, SolverGrid, solve_lv


@dataclass(frozen=True)
class ObservationSet:
    """Annual observations of (prey, predator) counts.

    ``times`` are years since the first observation; ``counts`` has
    shape (2, N) with row 0 = prey, row 1 = predator, all strictly
    positive (the observation model is lognormal).
    """

    times: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        counts = np.asarray(self.counts, dtype=np.float64)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "counts", counts)
        if counts.shape != (2, times.shape[0]):
            raise DataShapeError(f"counts shape {counts.shape} does not match {times.shape[0]} times")
        if not np.all(np.diff(times) > 0):
            raise DataShapeError("observation times must be strictly increasing")
        if not np.all(counts > 0):
            raise ValueError("species counts must be strictly positive")

    @property
    def n(self) -> int:
        return self.times.shape[0]


@dataclass
class LogisticData:
    """Binary responses with a reference-coded design matrix.

    ``X`` includes an intercept column; ``column_names`` labels every
    design column; ``factors`` keeps the raw categorical columns so the
    dataset can be written back to CSV byte-identically.
    """

    X: np.ndarray
    y: np.ndarray
    column_names: list
    factor_names: list = field(default_factory=list)
    factors: list = field(default_factory=list)

    @property
    def n_rows(self) -> int:
        return self.y.shape[0]

    @property
    def n_zero(self) -> int:
        return int((self.y == 0).sum())

    def to_csv(self, path) -> None:
        """Write the raw (response + categorical) table as RFC-4180 CSV."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["y", *self.factor_names])
            for i in range(self.n_rows):
                writer.writerow([int(self.y[i]), *(col[i] for col in self.factors)])


def encode_design_matrix(factor_names, factors, y):
    """Reference-cell dummy coding with an intercept.

    Each categorical column contributes (levels - 1) indicator columns;
    the lexicographically first level is the reference.
    """
    n = len(y)
    columns = [np.ones(n)]
    names = ["intercept"]
    for name, col in zip(factor_names, factors):
        col = np.asarray(col)
        levels = sorted(set(col.tolist()))
        if len(levels) < 2:
            raise DataShapeError(f"factor {name!r} has fewer than 2 levels")
        for level in levels[1:]:
            columns.append((col == level).astype(np.float64))
            names.append(f"{name}={level}")
    X = np.column_stack(columns)
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise DataShapeError("encoded design matrix is rank deficient")
    return X, names


def load_csv_dataset(path, schema: str):
    """Load a CSV file as either a logistic dataset or an observation set.

    ``schema`` is "logistic" (header: y,<factor>,...) or
    "lotka-volterra" (header: year,hare,lynx with times shifted to
    start at zero).
    """
    if schema == "logistic":
        return _load_logistic_csv(path)
    if schema == "lotka-volterra":
        return _load_lv_csv(path)
    raise ValueError(f"unknown schema {schema!r}")


def _load_logistic_csv(path) -> LogisticData:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "y":
            raise SchemaError("logistic CSV must start with a 'y' response column")
        if len(header) < 2:
            raise SchemaError("logistic CSV needs at least one predictor column")
        rows = list(reader)
    if not rows:
        raise SchemaError("logistic CSV has no data rows")
    y = np.empty(len(rows), dtype=np.int64)
    factors = [np.empty(len(rows), dtype=object) for _ in header[1:]]
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise SchemaError(f"row {i + 2} has {len(row)} fields, expected {len(header)}")
        if row[0] not in ("0", "1"):
            raise ValueError(f"row {i + 2}: response must be 0 or 1, got {row[0]!r}")
        y[i] = int(row[0])
        for j, value in enumerate(row[1:]):
            factors[j][i] = value
    X, names = encode_design_matrix(header[1:], factors, y)
    return LogisticData(X=X, y=y, column_names=names, factor_names=list(header[1:]), factors=factors)


def _load_lv_csv(path) -> ObservationSet:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["year", "hare", "lynx"]:
            raise SchemaError(f"expected header year,hare,lynx, got {header}")
        rows = list(reader)
    if not rows:
        raise SchemaError("observation CSV has no data rows")
    years = np.empty(len(rows))
    counts = np.empty((2, len(rows)))
    for i, row in enumerate(rows):
        if len(row) != 3:
            raise SchemaError(f"row {i + 2} has {len(row)} fields, expected 3")
        try:
            years[i] = float(row[0])
            counts[0, i] = float(row[1])
            counts[1, i] = float(row[2])
        except ValueError as exc:
            raise ValueError(f"row {i + 2}: non-numeric value ({exc})") from exc
        if counts[0, i] <= 0 or counts[1, i] <= 0:
            raise ValueError(f"row {i + 2}: counts must be positive")
    return ObservationSet(times=years - years[0], counts=counts)


def load_hare_lynx() -> ObservationSet:
    """The packaged annual hare/lynx table (Hudson's Bay Company records, 1900-1920)."""
    with resources.as_file(resources.files("tsam") / "assets" / "hare_lynx.csv") as p:
        return _load_lv_csv(p)


BANK_FACTOR_LEVELS = {
    "employees": 4,
    "job": 3,
    "contact": 2,
    "month": 3,
    "outcome": 3,
}  # reference coding yields 1 + 3 + 2 + 1 + 2 + 2 = 11 coefficients


def generate_synthetic_logistic(n: int, zero_fraction, beta_true, seed: int) -> LogisticData:
    """Reproducible imbalanced binary dataset with known coefficients.

    Categorical predictors follow the marketing-campaign structure (five
    factors with 4/3/2/3/3 levels, 11 design columns). When
    ``zero_fraction`` is given, an intercept offset is solved so the
    expected zero-response rate matches it; responses then vary by
    binomial noise only.
    """
    rng = np.random.default_rng(seed)
    factor_names = list(BANK_FACTOR_LEVELS)
    factors = [
        np.array([f"{name[0]}{lvl}" for lvl in rng.integers(0, levels, size=n)], dtype=object)
        for name, levels in BANK_FACTOR_LEVELS.items()
    ]
    y_placeholder = np.zeros(n, dtype=np.int64)
    X, names = encode_design_matrix(factor_names, factors, y_placeholder)
    beta_true = np.asarray(beta_true, dtype=np.float64)
    if beta_true.shape != (X.shape[1],):
        raise DataShapeError(f"beta_true must have {X.shape[1]} entries, got {beta_true.shape}")
    linear = X @ beta_true
    offset = 0.0
    if zero_fraction is not None:
        if not 0.0 < zero_fraction < 1.0:
            raise ValueError("zero_fraction must lie strictly between 0 and 1")
        offset = _solve_offset(linear, 1.0 - zero_fraction)
    probs = 1.0 / (1.0 + np.exp(-(linear + offset)))
    y = (rng.random(n) < probs).astype(np.int64)
    return LogisticData(X=X, y=y, column_names=names, factor_names=factor_names, factors=factors)


def _solve_offset(linear, target_one_rate):
    """Bisect c so that mean(sigmoid(linear + c)) equals the target rate."""
    lo, hi = -40.0, 40.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.mean(1.0 / (1.0 + np.exp(-(linear + mid)))) < target_one_rate:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def subsample_zero_indices(y, n_sub: int, seed: int) -> np.ndarray:
    """A sorted uniform random subsample of the zero-response row indices."""
    zero_rows = np.flatnonzero(np.asarray(y) == 0)
    if n_sub > zero_rows.shape[0]:
        raise DataShapeError(f"requested {n_sub} of only {zero_rows.shape[0]} zero rows")
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(zero_rows, size=n_sub, replace=False))


def stratified_zero_subsample(X, y, n_sub: int, seed: int) -> np.ndarray:
    """Random zero-row subsample stratified by covariate pattern.

    Proportional allocation (largest-remainder rounding) keeps the
    subsample's pattern frequencies within rounding error of the full
    zero set, so the rescaled zero-response sum tracks the exact one
    far more tightly than a uniform subsample does. Rows within each
    stratum are drawn uniformly at random.
    """
    X = np.asarray(X)
    y = np.asarray(y)
    zero_rows = np.flatnonzero(y == 0)
    if n_sub > zero_rows.shape[0]:
        raise DataShapeError(f"requested {n_sub} of only {zero_rows.shape[0]} zero rows")
    groups = {}
    for idx in zero_rows:
        groups.setdefault(X[idx].tobytes(), []).append(idx)
    frac = n_sub / zero_rows.shape[0]
    shares = {key: len(rows) * frac for key, rows in groups.items()}
    counts = {key: int(share) for key, share in shares.items()}
    remainder = n_sub - sum(counts.values())
    by_fraction = sorted(shares, key=lambda key: shares[key] - counts[key], reverse=True)
    for key in by_fraction[:remainder]:
        counts[key] += 1
    rng = np.random.default_rng(seed)
    chosen = []
    for key, rows in groups.items():
        take = counts[key]
        if take:
            chosen.extend(rng.choice(rows, size=take, replace=False))
    return np.sort(np.asarray(chosen, dtype=np.int64))


def generate_synthetic_lv(
    params: LVParams, y0, sigmas, n_years: int, seed: int, step: float = 1.0 / 365.0
) -> ObservationSet:
    """Observations simulated from the predator-prey model itself.

    Solves the system from known parameters on a fine grid and applies
    lognormal observation noise with the given per-species scales.
    """
    times = tuple(float(k) for k in range(n_years + 1))
    grid = SolverGrid(0.0, float(n_years), step, times)
    traj = solve_lv(params, y0, grid)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(traj.shape)
    counts = np.exp(np.log(traj) + np.asarray(sigmas, dtype=np.float64)[:, None] * noise)
    return ObservationSet(times=np.asarray(times), counts=counts)
