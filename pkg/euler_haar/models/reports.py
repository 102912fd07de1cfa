"""
Result records returned by the controllers and printed by the CLI.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from euler_haar.models.angles import GroupKind
from euler_haar.models.exact import ExactScalar, format_rational, parse_rational
from euler_haar.models.serialization import JsonRecord, parsing

Point = Tuple[Fraction, ...]


def _point(p: Point) -> List[str]:
    return [format_rational(c) for c in p]


def _parse_point(data: List[Any]) -> Point:
    return tuple(parse_rational(c) for c in data)


@dataclass
class LevelConstant(JsonRecord):
    level: int
    computed: ExactScalar
    published: ExactScalar
    ratio: ExactScalar

    def to_dict(self, digits: int = 15) -> Dict[str, Any]:
        return {
            'level': self.level,
            'computed': self.computed.to_dict(digits),
            'published': self.published.to_dict(digits),
            'ratio': self.ratio.to_dict(digits),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'LevelConstant':
        with parsing("level constant"):
            return cls(int(data['level']), *(ExactScalar.from_dict(data[key])
                                             for key in ('computed', 'published', 'ratio')))


@dataclass
class NormalizationReport(JsonRecord):
    """Haar normalization of one group, level by level.

    Attributes:
        computed: Product of the recomputed level constants.
        published: Product of the published level constants.
        ratio: computed / published.
        domain_integral: Exact integral of the unnormalized density over the domain.
    """

    group: GroupKind
    n: int
    levels: List[LevelConstant]
    computed: ExactScalar
    published: ExactScalar
    ratio: ExactScalar
    domain_integral: ExactScalar

    @property
    def total_mass(self) -> ExactScalar:
        return self.computed * self.domain_integral

    def is_normalized(self) -> bool:
        return self.total_mass == ExactScalar.one()

    def to_dict(self, digits: int = 15) -> Dict[str, Any]:
        return {
            'group': self.group.value,
            'n': self.n,
            'computed': self.computed.to_dict(digits),
            'published': self.published.to_dict(digits),
            'ratio': self.ratio.to_dict(digits),
            'domain_integral': self.domain_integral.to_dict(digits),
            'normalized': self.is_normalized(),
            'levels': [level.to_dict(digits) for level in self.levels],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'NormalizationReport':
        with parsing("normalization report"):
            return cls(
                GroupKind.parse(data['group']),
                int(data['n']),
                [LevelConstant.from_dict(level) for level in data['levels']],
                *(ExactScalar.from_dict(data[key]) for key in ('computed', 'published', 'ratio', 'domain_integral')),
            )


@dataclass
class PrefactorReport(JsonRecord):
    """Abelian-side prefactor used by the moment engine next to the published one."""

    group: GroupKind
    n: int
    effective: ExactScalar
    published: ExactScalar
    jacobian_constant: ExactScalar
    published_constant: ExactScalar
    residual: ExactScalar

    def to_dict(self, digits: int = 15) -> Dict[str, Any]:
        return {
            'group': self.group.value,
            'n': self.n,
            'effective_prefactor': self.effective.to_dict(digits),
            'published_prefactor': self.published.to_dict(digits),
            'jacobian_constant': self.jacobian_constant.to_dict(digits),
            'published_constant': self.published_constant.to_dict(digits),
            'residual': self.residual.to_dict(digits),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PrefactorReport':
        keys = ('effective_prefactor', 'published_prefactor', 'jacobian_constant', 'published_constant', 'residual')
        with parsing("prefactor report"):
            return cls(GroupKind.parse(data['group']), int(data['n']),
                       *(ExactScalar.from_dict(data[key]) for key in keys))


@dataclass
class HullVerdict(JsonRecord):
    """Whether 0 lies in the convex hull of a point set, with an exact certificate.

    Inside: ``weights`` are convex coefficients with sum_i w_i p_i = 0.
    Outside: ``separator`` is an integer normal h with h . p > 0 for every point.
    """

    points: List[Point]
    contains_zero: bool
    weights: Optional[List[Fraction]] = None
    separator: Optional[List[Fraction]] = None
    verified: bool = False

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            'contains_zero': self.contains_zero,
            'verified': self.verified,
            'points': [_point(p) for p in self.points],
        }
        if self.weights is not None:
            data['weights'] = [format_rational(w) for w in self.weights]
        if self.separator is not None:
            data['separator'] = [format_rational(h) for h in self.separator]
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'HullVerdict':
        with parsing("hull verdict"):
            weights, separator = data.get('weights'), data.get('separator')
            return cls(
                [_parse_point(p) for p in data['points']],
                bool(data['contains_zero']),
                weights=[parse_rational(w) for w in weights] if weights is not None else None,
                separator=[parse_rational(h) for h in separator] if separator is not None else None,
                verified=bool(data.get('verified', False)),
            )


STATUS_NOT_APPLICABLE = "not applicable"
STATUS_CONSISTENT = "conjecture-consistent"
STATUS_CANDIDATE = "counterexample-candidate"


@dataclass
class ProbeReport(JsonRecord):
    group: GroupKind
    n: int
    p_max: int
    moments: List[ExactScalar]
    spectrum: List[Point]
    verdict: Optional[HullVerdict]
    status: str

    def to_dict(self, digits: int = 15) -> Dict[str, Any]:
        return {
            'group': self.group.value,
            'n': self.n,
            'p_max': self.p_max,
            'moments': [{'P': p + 1, **m.to_dict(digits)} for p, m in enumerate(self.moments)],
            'spectrum': [_point(p) for p in self.spectrum],
            'hull': self.verdict.to_dict() if self.verdict is not None else None,
            'status': self.status,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ProbeReport':
        with parsing("probe report"):
            hull = data.get('hull')
            return cls(
                GroupKind.parse(data['group']),
                int(data['n']),
                int(data['p_max']),
                [ExactScalar.from_dict(m) for m in data['moments']],
                [_parse_point(p) for p in data['spectrum']],
                HullVerdict.from_dict(hull) if hull is not None else None,
                str(data['status']),
            )


@dataclass
class CheckResult(JsonRecord):
    """Outcome of one check; ``identity`` states the relation the check tests."""

    suite: str
    tag: str
    passed: bool
    detail: str = ""
    identity: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {'suite': self.suite, 'tag': self.tag, 'identity': self.identity,
                'passed': self.passed, 'detail': self.detail}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CheckResult':
        with parsing("check result"):
            return cls(str(data['suite']), str(data['tag']), bool(data['passed']),
                       str(data.get('detail', '')), str(data.get('identity', '')))


@dataclass
class VerificationReport(JsonRecord):
    n: int
    seed: int
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def to_dict(self) -> Dict[str, Any]:
        suites: Dict[str, Dict[str, Any]] = {}
        for check in self.checks:
            entry = suites.setdefault(check.suite, {'passed': True, 'checks': []})
            entry['passed'] = entry['passed'] and check.passed
            entry['checks'].append(check.to_dict())
        return {'n': self.n, 'seed': self.seed, 'passed': self.passed, 'suites': suites}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'VerificationReport':
        with parsing("verification report"):
            checks = [CheckResult.from_dict(check) for entry in data['suites'].values() for check in entry['checks']]
            return cls(int(data['n']), int(data['seed']), checks)
