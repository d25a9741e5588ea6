"""Discrete-time Markov chain estimation and prediction.

First-order chains are estimated from consecutive label pairs, second-order
chains from label triples keyed by the (previous, current) state pair.
Rows whose state (or state pair) was never observed leaving are flagged
``unobserved`` and left as zeros rather than silently made uniform; powering
and prediction refuse to touch them.
"""

from __future__ import annotations

import json
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ToolkitError

OBSERVED = "observed"
UNOBSERVED = "unobserved"

DEFAULT_ROW_SUM_TOL = 1e-9
# matrices read back from files may carry published 3-decimal rounding
LOADED_ROW_SUM_TOL = 2e-3

FILE_FORMAT = 1

_ENTRY_SLACK = 1e-12


class MarkovError(ToolkitError):
    """Invalid chain data or an operation the data cannot support."""


class StateSpace:
    """An ordered, duplicate-free set of state labels."""

    def __init__(self, states: Sequence[str]):
        states = tuple(states)
        if not states:
            raise MarkovError("state space must not be empty")
        if len(set(states)) != len(states):
            raise MarkovError("state space contains duplicate labels")
        if any(not isinstance(s, str) or not s for s in states):
            raise MarkovError("state labels must be non-empty strings")
        self.states = states
        self._index = {s: i for i, s in enumerate(states)}

    @classmethod
    def from_observations(cls, labels: Sequence[str]) -> "StateSpace":
        """The distinct labels seen, in sorted order."""
        return cls(tuple(sorted(set(labels))))

    def index(self, state: str) -> int:
        try:
            return self._index[state]
        except KeyError:
            raise MarkovError(f"unknown state: {state!r}") from None

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __eq__(self, other):
        if not isinstance(other, StateSpace):
            return NotImplemented
        return self.states == other.states

    def __repr__(self):
        return f"StateSpace({list(self.states)!r})"


def _as_count_array(matrix, rows: int, cols: int, what: str) -> np.ndarray:
    arr = np.asarray(matrix)
    if arr.shape != (rows, cols):
        raise MarkovError(f"{what} must have shape {(rows, cols)}, got {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(arr == np.floor(arr)):
            raise MarkovError(f"{what} entries must be integers")
        arr = arr.astype(np.int64)
    else:
        arr = arr.astype(np.int64)
    if np.any(arr < 0):
        raise MarkovError(f"{what} entries must be non-negative")
    return arr


class TransitionCounts:
    """How often each state was immediately followed by each other state."""

    def __init__(self, space: StateSpace, matrix):
        self.space = space
        self.matrix = _as_count_array(matrix, len(space), len(space), "count matrix")

    def count(self, from_state: str, to_state: str) -> int:
        return int(self.matrix[self.space.index(from_state), self.space.index(to_state)])

    def row_total(self, from_state: str) -> int:
        return int(self.matrix[self.space.index(from_state)].sum())

    def total(self) -> int:
        return int(self.matrix.sum())

    def __eq__(self, other):
        if not isinstance(other, TransitionCounts):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.matrix, other.matrix)


class PairCounts:
    """Transition counts keyed by the (previous, current) state pair.

    Row (i, j) lives at index i * n + j; columns index the next state.
    """

    def __init__(self, space: StateSpace, matrix):
        self.space = space
        n = len(space)
        self.matrix = _as_count_array(matrix, n * n, n, "pair count matrix")

    def pair_index(self, prev: str, current: str) -> int:
        n = len(self.space)
        return self.space.index(prev) * n + self.space.index(current)

    def row_total(self, prev: str, current: str) -> int:
        return int(self.matrix[self.pair_index(prev, current)].sum())

    def __eq__(self, other):
        if not isinstance(other, PairCounts):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.matrix, other.matrix)


def _check_sequence(labels: Sequence[str], space: StateSpace) -> list[int]:
    return [space.index(label) for label in labels]


def count_transitions(labels: Sequence[str], space: Optional[StateSpace] = None) -> TransitionCounts:
    """Count consecutive pairs in an observed label sequence."""
    if space is None:
        space = StateSpace.from_observations(labels)
    n = len(space)
    matrix = np.zeros((n, n), dtype=np.int64)
    indexes = _check_sequence(labels, space)
    for a, b in zip(indexes, indexes[1:]):
        matrix[a, b] += 1
    return TransitionCounts(space, matrix)


def count_pair_transitions(labels: Sequence[str], space: Optional[StateSpace] = None) -> PairCounts:
    """Count consecutive triples, keyed by their leading state pair."""
    if space is None:
        space = StateSpace.from_observations(labels)
    n = len(space)
    matrix = np.zeros((n * n, n), dtype=np.int64)
    indexes = _check_sequence(labels, space)
    for a, b, c in zip(indexes, indexes[1:], indexes[2:]):
        matrix[a * n + b, c] += 1
    return PairCounts(space, matrix)


def _validate_stochastic(p: np.ndarray, row_status: Sequence[str], tol: float, what: str):
    for i, status in enumerate(row_status):
        if status not in (OBSERVED, UNOBSERVED):
            raise MarkovError(f"bad row status: {status!r}")
        row = p[i]
        if status == UNOBSERVED:
            if np.any(row != 0.0):
                raise MarkovError(f"{what}: unobserved row {i} must be all zero")
            continue
        if np.any(row < -_ENTRY_SLACK) or np.any(row > 1.0 + tol + _ENTRY_SLACK):
            raise MarkovError(f"{what}: row {i} has an entry outside [0, 1]")
        if abs(float(row.sum()) - 1.0) > tol:
            raise MarkovError(f"{what}: row {i} sums to {row.sum()}, not 1")


class TransitionMatrix:
    """A row-stochastic matrix over a state space, with per-row observation status."""

    def __init__(self, space: StateSpace, p, row_status: Optional[Sequence[str]] = None,
                 row_sum_tol: float = DEFAULT_ROW_SUM_TOL):
        self.space = space
        n = len(space)
        arr = np.asarray(p, dtype=np.float64)
        if arr.shape != (n, n):
            raise MarkovError(f"probability matrix must be {n}x{n}, got {arr.shape}")
        self.p = arr
        self.row_status = tuple(row_status) if row_status is not None else (OBSERVED,) * n
        if len(self.row_status) != n:
            raise MarkovError("row_status length must match the state count")
        self.row_sum_tol = float(row_sum_tol)
        _validate_stochastic(self.p, self.row_status, self.row_sum_tol, "transition matrix")

    def probability(self, from_state: str, to_state: str) -> float:
        return float(self.p[self.space.index(from_state), self.space.index(to_state)])

    def row(self, from_state: str) -> np.ndarray:
        return self.p[self.space.index(from_state)].copy()

    def fully_observed(self) -> bool:
        return all(s == OBSERVED for s in self.row_status)


class SecondOrderMatrix:
    """Row-stochastic matrix keyed by (previous, current) state pairs."""

    def __init__(self, space: StateSpace, p, row_status: Optional[Sequence[str]] = None,
                 row_sum_tol: float = DEFAULT_ROW_SUM_TOL):
        self.space = space
        n = len(space)
        arr = np.asarray(p, dtype=np.float64)
        if arr.shape != (n * n, n):
            raise MarkovError(f"pair matrix must be {n * n}x{n}, got {arr.shape}")
        self.p = arr
        self.row_status = tuple(row_status) if row_status is not None else (OBSERVED,) * (n * n)
        if len(self.row_status) != n * n:
            raise MarkovError("row_status length must match the pair count")
        self.row_sum_tol = float(row_sum_tol)
        _validate_stochastic(self.p, self.row_status, self.row_sum_tol, "pair matrix")

    def pair_index(self, prev: str, current: str) -> int:
        n = len(self.space)
        return self.space.index(prev) * n + self.space.index(current)

    def probability(self, prev: str, current: str, to_state: str) -> float:
        return float(self.p[self.pair_index(prev, current), self.space.index(to_state)])


AnyMatrix = Union[TransitionMatrix, SecondOrderMatrix]
AnyCounts = Union[TransitionCounts, PairCounts]


def _estimate_rows(counts: np.ndarray, smoothing: float) -> tuple[np.ndarray, list[str]]:
    if smoothing < 0:
        raise MarkovError("smoothing must be non-negative")
    rows, cols = counts.shape
    p = np.zeros((rows, cols), dtype=np.float64)
    status = []
    for i in range(rows):
        total = counts[i].sum()
        if total == 0 and smoothing == 0.0:
            status.append(UNOBSERVED)
            continue
        p[i] = (counts[i] + smoothing) / (total + smoothing * cols)
        status.append(OBSERVED)
    return p, status


def estimate_first_order(counts: TransitionCounts, smoothing: float = 0.0) -> TransitionMatrix:
    """Divide each count row by its total.  With smoothing a > 0, each cell
    becomes (count + a) / (total + a * n) instead."""
    p, status = _estimate_rows(counts.matrix, smoothing)
    return TransitionMatrix(counts.space, p, status)


def estimate_second_order(counts: PairCounts, smoothing: float = 0.0) -> SecondOrderMatrix:
    p, status = _estimate_rows(counts.matrix, smoothing)
    return SecondOrderMatrix(counts.space, p, status)


def matrix_power(matrix: TransitionMatrix, steps: int) -> TransitionMatrix:
    """The t-step transition matrix, by binary exponentiation.

    Zero steps gives the identity.  Matrices with unobserved rows cannot be
    powered because those rows would poison every product.
    """
    if steps < 0:
        raise MarkovError("steps must be non-negative")
    if not matrix.fully_observed():
        bad = [matrix.space.states[i] for i, s in enumerate(matrix.row_status) if s == UNOBSERVED]
        raise MarkovError(f"cannot power a matrix with unobserved rows: {', '.join(bad)}")
    n = len(matrix.space)
    result = np.eye(n)
    base = matrix.p.copy()
    exponent = steps
    while exponent:
        if exponent & 1:
            result = result @ base
        base = base @ base
        exponent >>= 1
    # row sums can drift by at most (1 + tol)^t - 1 when input rows are off by tol
    tol = (1.0 + matrix.row_sum_tol) ** max(steps, 1) - 1.0 + 1e-12
    return TransitionMatrix(matrix.space, result, row_sum_tol=max(tol, matrix.row_sum_tol))


class Distribution:
    """A probability mass over the state space."""

    def __init__(self, space: StateSpace, mass, tol: float = DEFAULT_ROW_SUM_TOL):
        self.space = space
        arr = np.asarray(mass, dtype=np.float64)
        if arr.shape != (len(space),):
            raise MarkovError(f"mass must have shape ({len(space)},), got {arr.shape}")
        self.mass = arr
        self.tol = float(tol)
        if np.any(arr < -_ENTRY_SLACK) or np.any(arr > 1.0 + self.tol + _ENTRY_SLACK):
            raise MarkovError("distribution entry outside [0, 1]")
        if abs(float(arr.sum()) - 1.0) > self.tol:
            raise MarkovError(f"distribution sums to {arr.sum()}, not 1")

    def probability(self, state: str) -> float:
        return float(self.mass[self.space.index(state)])

    def as_pairs(self) -> list[tuple[str, float]]:
        return [(s, float(self.mass[i])) for i, s in enumerate(self.space.states)]


def predict(matrix: TransitionMatrix, current: str, steps: int = 1) -> Distribution:
    """Where the chain will be after a number of steps from a known state."""
    if steps < 1:
        raise MarkovError("steps must be at least 1")
    i = matrix.space.index(current)
    if matrix.row_status[i] == UNOBSERVED:
        raise MarkovError(
            f"no transitions were ever observed leaving {current!r}; cannot predict"
        )
    powered = matrix if steps == 1 else matrix_power(matrix, steps)
    return Distribution(matrix.space, powered.p[i].copy(), tol=powered.row_sum_tol)


def predict_second_order(matrix: SecondOrderMatrix, prev: str, current: str) -> Distribution:
    """Next-state distribution given the last two states."""
    idx = matrix.pair_index(prev, current)
    if matrix.row_status[idx] == UNOBSERVED:
        raise MarkovError(
            f"the state pair ({prev!r}, {current!r}) was never observed; "
            "second-order rows thin out quickly on short histories"
        )
    return Distribution(matrix.space, matrix.p[idx].copy(), tol=matrix.row_sum_tol)


def format_probability(value: float) -> str:
    """Fixed three-decimal display form used everywhere probabilities print."""
    return f"{float(value):.3f}"


def matrix_to_dict(matrix: AnyMatrix, counts: Optional[AnyCounts] = None) -> dict:
    """The JSON-ready file form of a matrix, optionally with its counts."""
    if isinstance(matrix, TransitionMatrix):
        order = 1
    elif isinstance(matrix, SecondOrderMatrix):
        order = 2
    else:
        raise MarkovError(f"not a transition matrix: {type(matrix).__name__}")
    out = {
        "format": FILE_FORMAT,
        "order": order,
        "states": list(matrix.space.states),
        "p": [[float(x) for x in row] for row in matrix.p],
        "row_status": list(matrix.row_status),
    }
    if counts is not None:
        expected = TransitionCounts if order == 1 else PairCounts
        if not isinstance(counts, expected):
            raise MarkovError("counts do not match the matrix order")
        if counts.space != matrix.space:
            raise MarkovError("counts and matrix use different state spaces")
        out["counts"] = [[int(x) for x in row] for row in counts.matrix]
    return out


def matrix_from_dict(data: dict, row_sum_tol: float = LOADED_ROW_SUM_TOL) -> AnyMatrix:
    """Rebuild a matrix from its file form.

    The default row sum tolerance is loose enough for tables published with
    three-decimal rounding.
    """
    if not isinstance(data, dict):
        raise MarkovError("matrix file must contain a JSON object")
    if data.get("format") != FILE_FORMAT:
        raise MarkovError(f"unsupported matrix file format: {data.get('format')!r}")
    order = data.get("order")
    if order not in (1, 2):
        raise MarkovError(f"unsupported chain order: {order!r}")
    space = StateSpace(tuple(data.get("states", ())))
    p = data.get("p")
    row_status = data.get("row_status")
    if row_status is None:
        raise MarkovError("matrix file is missing row_status")
    if order == 1:
        return TransitionMatrix(space, p, row_status, row_sum_tol=row_sum_tol)
    return SecondOrderMatrix(space, p, row_status, row_sum_tol=row_sum_tol)


def counts_from_dict(data: dict) -> Optional[AnyCounts]:
    """The counts stored alongside a matrix, if the file carries them."""
    if "counts" not in data:
        return None
    space = StateSpace(tuple(data.get("states", ())))
    if data.get("order") == 1:
        return TransitionCounts(space, data["counts"])
    return PairCounts(space, data["counts"])


def dumps_matrix(matrix: AnyMatrix, counts: Optional[AnyCounts] = None) -> str:
    """Serialize to the canonical on-disk JSON text (stable byte-for-byte)."""
    return json.dumps(matrix_to_dict(matrix, counts), indent=2) + "\n"


def loads_matrix(text: str) -> tuple[AnyMatrix, Optional[AnyCounts]]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MarkovError(f"matrix file is not valid JSON: {exc}") from None
    return matrix_from_dict(data), counts_from_dict(data)
