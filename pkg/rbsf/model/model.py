# -*- coding: utf-8 -*-
""" Bivariate ruin-dependent fluid model: parsing, validation, structural data """

import json
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from rbsf.utils import ModelDimensionError, ModelSchemaError, ModelSyntaxError

TOLERANCE = 1e-12

COORD_KEYS = ('coord1', 'coord2')
FIELDS = ('pre_states', 'post_states', 'pre_generator', 'post_generator',
          'pre_rewards', 'post_rewards', 'switch_matrix', 'initial_state')


def _frozen(values, ndim: int) -> np.ndarray:
    array = np.array(values, dtype=float, ndmin=ndim)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class CoordinateModel:  # pylint:disable=too-many-instance-attributes
    """
    One fluid coordinate: pre-ruin triplet, post-ruin triplet, switch matrix and start state
    """
    pre_states: Tuple[str, ...]
    post_states: Tuple[str, ...]
    pre_generator: np.ndarray
    post_generator: np.ndarray
    pre_rewards: np.ndarray
    post_rewards: np.ndarray
    switch_matrix: np.ndarray
    initial_state: str

    def __post_init__(self):
        object.__setattr__(self, 'pre_states', tuple(self.pre_states))
        object.__setattr__(self, 'post_states', tuple(self.post_states))
        for name in ('pre_generator', 'post_generator', 'switch_matrix'):
            object.__setattr__(self, name, _frozen(getattr(self, name), 2))
        for name in ('pre_rewards', 'post_rewards'):
            object.__setattr__(self, name, _frozen(getattr(self, name), 1))

    @property
    def initial_index(self) -> int:
        """
        Position of the initial state within pre_states

        :return:
        """
        try:
            return self.pre_states.index(self.initial_state)
        except ValueError as exc:
            raise ModelSchemaError(f'unknown state {self.initial_state!r}', 'initial_state') from exc

    def reward(self, label: str) -> float:
        """
        Reward of a state label in whichever regime it belongs to

        :param label:
        :return:
        """
        if label in self.pre_states:
            return float(self.pre_rewards[self.pre_states.index(label)])
        return float(self.post_rewards[self.post_states.index(label)])


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """
    Full bivariate model, coord[0] is coordinate 1
    """
    coord: Tuple[CoordinateModel, CoordinateModel]

    def coordinate(self, k: int) -> CoordinateModel:
        """
        1-based coordinate accessor

        :param k:
        :return:
        """
        return self.coord[k - 1]


@dataclass(frozen=True)
class SignPartition:
    """
    Index lists of up/down states per regime, in declared order
    """
    plus_pre: Tuple[int, ...]
    minus_pre: Tuple[int, ...]
    plus_post: Tuple[int, ...]
    minus_post: Tuple[int, ...]


@dataclass(frozen=True)
class ValidationIssue:
    """
    One violated model constraint
    """
    severity: str
    field: str
    message: str

    def __str__(self):
        return f'{self.severity} {self.field}: {self.message}'


@dataclass(frozen=True)
class ValidationReport:
    """
    Outcome of validate(); ok iff there is no issue of severity "error"
    """
    issues: Tuple[ValidationIssue, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        """
        True when no error-severity issue was found

        :return:
        """
        return not any(issue.severity == 'error' for issue in self.issues)

    @property
    def errors(self) -> List[ValidationIssue]:
        """
        Error-severity issues only

        :return:
        """
        return [issue for issue in self.issues if issue.severity == 'error']


def _require_keys(document: dict, expected: Sequence[str], where: str) -> None:
    for key in expected:
        if key not in document:
            raise ModelSchemaError('missing field', f'{where}{key}')
    for key in document:
        if key not in expected:
            raise ModelSchemaError('unexpected field', f'{where}{key}')


def _labels(value, path: str) -> Tuple[str, ...]:
    if not isinstance(value, list) or not value:
        raise ModelSchemaError('expected a non-empty array of strings', path)
    if not all(isinstance(item, str) for item in value):
        raise ModelSchemaError('state labels must be strings', path)
    return tuple(value)


def _number(value, path: str) -> float:
    # bool is an int subclass, reject it explicitly
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ModelSchemaError(f'expected a number, got {value!r}', path)
    return float(value)


def _vector(value, size: int, path: str) -> List[float]:
    if not isinstance(value, list):
        raise ModelSchemaError('expected an array of numbers', path)
    if len(value) != size:
        raise ModelDimensionError(f'{path}: expected {size} entries, got {len(value)}')
    return [_number(item, f'{path}[{idx}]') for idx, item in enumerate(value)]


def _matrix(value, rows: int, cols: int, path: str) -> List[List[float]]:
    if not isinstance(value, list):
        raise ModelSchemaError('expected an array of arrays', path)
    if len(value) != rows:
        raise ModelDimensionError(f'{path}: expected {rows} rows, got {len(value)}')
    return [_vector(row, cols, f'{path}[{idx}]') for idx, row in enumerate(value)]


def _parse_coordinate(document, where: str) -> CoordinateModel:
    if not isinstance(document, dict):
        raise ModelSchemaError('expected an object', where.rstrip('.'))
    _require_keys(document, FIELDS, where)
    pre = _labels(document['pre_states'], f'{where}pre_states')
    post = _labels(document['post_states'], f'{where}post_states')
    initial = document['initial_state']
    if not isinstance(initial, str):
        raise ModelSchemaError('expected a state label', f'{where}initial_state')
    return CoordinateModel(
        pre_states=pre,
        post_states=post,
        pre_generator=_matrix(document['pre_generator'], len(pre), len(pre), f'{where}pre_generator'),
        post_generator=_matrix(document['post_generator'], len(post), len(post), f'{where}post_generator'),
        pre_rewards=_vector(document['pre_rewards'], len(pre), f'{where}pre_rewards'),
        post_rewards=_vector(document['post_rewards'], len(post), f'{where}post_rewards'),
        switch_matrix=_matrix(document['switch_matrix'], len(pre), len(post), f'{where}switch_matrix'),
        initial_state=initial,
    )


def _decode(document: Union[str, bytes]) -> str:
    if isinstance(document, str):
        return document
    try:
        return document.decode('utf-8')
    except UnicodeDecodeError as exc:
        before = document[:exc.start]
        line = before.count(b'\n') + 1
        column = exc.start - (before.rfind(b'\n') + 1) + 1
        raise ModelSyntaxError(f'invalid UTF-8 at byte {exc.start}', line, column) from exc


def parse_model(document: Union[str, bytes]) -> ModelSpec:
    """
    parse_model - turn a JSON model document into a ModelSpec.
    Only structure is checked here, model constraints are left to validate()

    :param document: JSON text, or UTF-8 encoded bytes
    :return:
    """
    try:
        raw = json.loads(_decode(document))
    except json.JSONDecodeError as exc:
        raise ModelSyntaxError(exc.msg, exc.lineno, exc.colno) from exc
    if not isinstance(raw, dict):
        raise ModelSchemaError('expected a JSON object', '$')
    _require_keys(raw, COORD_KEYS, '')
    return ModelSpec(coord=(_parse_coordinate(raw['coord1'], 'coord1.'),
                            _parse_coordinate(raw['coord2'], 'coord2.')))


def coordinate_to_dict(coord: CoordinateModel) -> Dict:
    """
    coordinate_to_dict - JSON-ready representation of one coordinate

    :param coord:
    :return:
    """
    return {
        'pre_states': list(coord.pre_states),
        'post_states': list(coord.post_states),
        'pre_generator': coord.pre_generator.tolist(),
        'post_generator': coord.post_generator.tolist(),
        'pre_rewards': coord.pre_rewards.tolist(),
        'post_rewards': coord.post_rewards.tolist(),
        'switch_matrix': coord.switch_matrix.tolist(),
        'initial_state': coord.initial_state,
    }


def serialize_model(spec: ModelSpec) -> str:
    """
    serialize_model - inverse of parse_model (floats are written with repr precision)

    :param spec:
    :return:
    """
    return json.dumps({key: coordinate_to_dict(coord) for key, coord in zip(COORD_KEYS, spec.coord)},
                      indent=2)


def _check_generator(matrix: np.ndarray, path: str, tolerance: float) -> List[ValidationIssue]:
    issues = []
    for row, values in enumerate(matrix):
        if not np.all(np.isfinite(values)):
            issues.append(ValidationIssue('error', path, f'row {row} has non-finite entries'))
            continue
        total = float(values.sum())
        if abs(total) > tolerance:
            issues.append(ValidationIssue('error', path, f'row {row} sums to {total:g}'))
        if values[row] > 0:
            issues.append(ValidationIssue('error', path, f'row {row} has positive diagonal {values[row]:g}'))
        off = np.delete(values, row)
        if np.any(off < 0):
            issues.append(ValidationIssue('error', path, f'row {row} has negative off-diagonal entries'))
    return issues


def _check_switch(matrix: np.ndarray, path: str, tolerance: float) -> List[ValidationIssue]:
    issues = []
    for row, values in enumerate(matrix):
        if not np.all(np.isfinite(values)):
            issues.append(ValidationIssue('error', path, f'row {row} has non-finite entries'))
            continue
        if np.any(values < 0) or np.any(values > 1):
            issues.append(ValidationIssue('error', path, f'row {row} has entries outside [0, 1]'))
        total = float(values.sum())
        if abs(total - 1.0) > tolerance:
            issues.append(ValidationIssue('error', path, f'row {row} sums to {total:g}'))
    return issues


def _check_rewards(rewards: np.ndarray, labels: Sequence[str], path: str) -> List[ValidationIssue]:
    issues = []
    for label, value in zip(labels, rewards):
        if not np.isfinite(value):
            issues.append(ValidationIssue('error', path, f'non-finite reward for state {label!r}'))
        elif value == 0:
            issues.append(ValidationIssue('error', path, f'zero reward for state {label!r}'))
    return issues


def _check_coordinate(coord: CoordinateModel, where: str, tolerance: float) -> List[ValidationIssue]:
    issues = []
    for name, labels in (('pre_states', coord.pre_states), ('post_states', coord.post_states)):
        if len(set(labels)) != len(labels):
            issues.append(ValidationIssue('error', f'{where}{name}', 'duplicate state labels'))
    issues += _check_generator(coord.pre_generator, f'{where}pre_generator', tolerance)
    issues += _check_generator(coord.post_generator, f'{where}post_generator', tolerance)
    issues += _check_switch(coord.switch_matrix, f'{where}switch_matrix', tolerance)
    issues += _check_rewards(coord.pre_rewards, coord.pre_states, f'{where}pre_rewards')
    issues += _check_rewards(coord.post_rewards, coord.post_states, f'{where}post_rewards')
    if coord.initial_state not in coord.pre_states:
        issues.append(ValidationIssue('error', f'{where}initial_state',
                                      f'{coord.initial_state!r} is not a pre-ruin state'))
    elif coord.pre_rewards[coord.pre_states.index(coord.initial_state)] <= 0:
        issues.append(ValidationIssue('error', f'{where}initial_state', 'initial reward must be positive'))
    if np.all(coord.pre_rewards > 0):
        issues.append(ValidationIssue('warning', f'{where}pre_rewards',
                                      'no negative pre-ruin reward, this coordinate can never ruin first'))
    if np.all(coord.post_rewards > 0):
        issues.append(ValidationIssue('warning', f'{where}post_rewards',
                                      'no negative post-ruin reward, a surviving coordinate never ruins'))
    return issues


def validate(spec: ModelSpec, tolerance: float = TOLERANCE) -> ValidationReport:
    """
    validate - list every violated model constraint

    :param spec:
    :param tolerance:
    :return:
    """
    issues: List[ValidationIssue] = []
    for key, coord in zip(COORD_KEYS, spec.coord):
        issues += _check_coordinate(coord, f'{key}.', tolerance)
        # labels are always reported as coordN.<label>, so only the regimes of one coordinate must not overlap
        for label in sorted(set(coord.pre_states) & set(coord.post_states)):
            issues.append(ValidationIssue('error', f'{key}.post_states',
                                          f'state {label!r} also declared in {key}.pre_states'))
    return ValidationReport(issues=tuple(issues))


def partition_signs(coord: CoordinateModel) -> SignPartition:
    """
    partition_signs - split state indices by reward sign, order preserved

    :param coord:
    :return:
    """
    return SignPartition(
        plus_pre=tuple(int(idx) for idx in np.flatnonzero(coord.pre_rewards > 0)),
        minus_pre=tuple(int(idx) for idx in np.flatnonzero(coord.pre_rewards < 0)),
        plus_post=tuple(int(idx) for idx in np.flatnonzero(coord.post_rewards > 0)),
        minus_post=tuple(int(idx) for idx in np.flatnonzero(coord.post_rewards < 0)),
    )


def coordinate_gamma_zero(coord: CoordinateModel) -> float:
    """
    coordinate_gamma_zero - largest |diagonal| over both regimes of one coordinate

    :param coord:
    :return:
    """
    return float(max(np.abs(np.diag(coord.pre_generator)).max(),
                     np.abs(np.diag(coord.post_generator)).max()))


def gamma_zero(spec: ModelSpec) -> float:
    """
    gamma_zero - largest |diagonal| over every generator of the model, a uniformization
    rate must be strictly above it

    :param spec:
    :return:
    """
    return max(coordinate_gamma_zero(coord) for coord in spec.coord)


def stationary_vector(generator: np.ndarray) -> np.ndarray:
    """
    stationary_vector - least squares solution of pi A = 0, sum(pi) = 1

    :param generator:
    :return:
    """
    size = generator.shape[0]
    system = np.vstack([generator.T, np.ones((1, size))])
    rhs = np.zeros(size + 1)
    rhs[-1] = 1.0
    solution, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    return solution


def mean_drift(coord: CoordinateModel) -> float:
    """
    mean_drift - long run slope of the pre-ruin level process

    :param coord:
    :return:
    """
    return float(stationary_vector(coord.pre_generator) @ coord.pre_rewards)


def _renormalize_generator(matrix: np.ndarray, path: str, changes: List[str]) -> np.ndarray:
    fixed = np.array(matrix, dtype=float)
    for row in range(fixed.shape[0]):
        off = fixed[row].sum() - fixed[row, row]
        if fixed[row, row] != -off:
            changes.append(f'{path}: row {row} diagonal {fixed[row, row]:g} -> {-off:g}')
            fixed[row, row] = -off
    return fixed


def _renormalize_switch(matrix: np.ndarray, path: str, changes: List[str]) -> np.ndarray:
    fixed = np.array(matrix, dtype=float)
    for row in range(fixed.shape[0]):
        total = fixed[row].sum()
        if total > 0 and total != 1.0:
            changes.append(f'{path}: row {row} divided by {total:g}')
            fixed[row] = fixed[row] / total
    return fixed


def renormalize(spec: ModelSpec) -> Tuple[ModelSpec, List[str]]:
    """
    renormalize - repair row sums on explicit request: generator diagonals are reset to minus
    the off-diagonal sums, switch rows are divided by their sums

    :param spec:
    :return:
    """
    changes: List[str] = []
    coords = []
    for key, coord in zip(COORD_KEYS, spec.coord):
        coords.append(CoordinateModel(
            pre_states=coord.pre_states,
            post_states=coord.post_states,
            pre_generator=_renormalize_generator(coord.pre_generator, f'{key}.pre_generator', changes),
            post_generator=_renormalize_generator(coord.post_generator, f'{key}.post_generator', changes),
            pre_rewards=coord.pre_rewards,
            post_rewards=coord.post_rewards,
            switch_matrix=_renormalize_switch(coord.switch_matrix, f'{key}.switch_matrix', changes),
            initial_state=coord.initial_state,
        ))
    return ModelSpec(coord=(coords[0], coords[1])), changes
