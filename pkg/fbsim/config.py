import configparser
import logging
from dataclasses import dataclass, fields, replace
from typing import Any, Mapping, Optional

from .baselines import SalsaConfig, SimRankConfig
from .fbs import CombinerSpec, FbsConfig
from .ppr import PprConfig
from .simexceptions import *

"""
Run configuration: the values every command works with, read from key=value files and
overridden by command line flags.
"""

__all__ = ['RunConfig', 'CONFIG_KEYS', 'read_config', 'load_config_file']

logger = logging.getLogger(__name__)

_SECTION = 'fbsim'

# config file key -> (RunConfig field, parser)
CONFIG_KEYS = {
    'epsilon': ('epsilon', float),
    'tolerance': ('tolerance', float),
    'max_iterations': ('max_iterations', int),
    'dangling': ('dangling', str),
    'n': ('n', int),
    'lambda': ('lam', float),
    'combiner': ('combiner', str),
    'k1': ('k1', float),
    'k2': ('k2', float),
    'rounds': ('rounds', int),
    'seed': ('seed', int),
    'k': ('k', int),
    'folds': ('folds', int),
    'simrank_c': ('simrank_c', float),
    'simrank_t': ('simrank_t', int),
    'simrank_r': ('simrank_r', int),
}


@dataclass(frozen=True)
class RunConfig:

    """
    Every tunable value of a run. The simrank_ fields are the decay, walk length and walk
    count of the SimRank estimator (keys are matched case-insensitively in config files,
    so simrank_T works as well). lam defaults to 0.5 for the linear combiner and to
    0.571 for the saturation one.
    """

    epsilon: float = 0.15
    tolerance: float = 1e-6
    max_iterations: int = 1000
    dangling: str = 'query'
    n: int = 20
    lam: Optional[float] = None
    combiner: str = 'linear'
    k1: float = 0.72
    k2: float = 0.3
    rounds: int = 1
    seed: int = 42
    k: int = 10
    folds: int = 5
    simrank_c: float = 0.8
    simrank_t: int = 100
    simrank_r: int = 10000
    include_zero: bool = False

    def __post_init__(self):
        for name in ('k', 'folds'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise InvalidConfigException("{} should be a positive integer, got {}".format(name, value))
        if self.folds < 2:
            raise InvalidConfigException("folds should be at least 2, got {}".format(self.folds))
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise InvalidConfigException("seed should be a non-negative integer, got {}".format(self.seed))
        # building them runs their own checks
        self.fbs_config()
        self.salsa_config()
        self.simrank_config()

    @property
    def resolved_lambda(self) -> float:
        if self.lam is not None:
            return self.lam
        return CombinerSpec.saturation_preset().lam if self.combiner == 'saturation' else CombinerSpec().lam

    def ppr_config(self) -> PprConfig:
        return PprConfig(self.epsilon, self.tolerance, self.max_iterations, self.dangling)

    def combiner_spec(self) -> CombinerSpec:
        return CombinerSpec(self.combiner, self.resolved_lambda, self.k1, self.k2)

    def fbs_config(self) -> FbsConfig:
        return FbsConfig(self.n, self.rounds, self.ppr_config(), self.combiner_spec())

    def salsa_config(self) -> SalsaConfig:
        return SalsaConfig(self.epsilon, self.tolerance, self.max_iterations)

    def simrank_config(self) -> SimRankConfig:
        return SimRankConfig(self.simrank_c, self.simrank_t, self.simrank_r, self.seed)

    def merged(self, values: Mapping[str, Any]) -> 'RunConfig':
        """
        :param values: field name -> value; None values are ignored.
        :returns: a copy of this configuration with the given values.
        """
        known = {f.name for f in fields(self)}
        changes = {}
        for name, value in values.items():
            if name not in known:
                raise InvalidConfigException("unknown setting {!r}".format(name))
            if value is not None:
                changes[name] = value
        return replace(self, **changes)

    def as_dict(self) -> dict:
        echoed = {f.name: getattr(self, f.name) for f in fields(self)}
        echoed['lam'] = self.resolved_lambda
        return echoed


def read_config(text: str) -> dict:
    """
    Parses key=value lines, `#` comments and blank lines being ignored.

    :returns: RunConfig field name -> typed value.
    :raises InvalidConfigException: on an unknown key or a value of the wrong type.
    """
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=('#',), delimiters=('=',))
    try:
        parser.read_string("[{}]\n{}".format(_SECTION, text))
    except configparser.Error as e:
        raise InvalidConfigException("malformed config file: {}".format(e)) from None
    values = {}
    for key, raw in parser.items(_SECTION):
        if key not in CONFIG_KEYS:
            raise InvalidConfigException("unknown config key {!r}, expected one of {}".format(
                key, ", ".join(CONFIG_KEYS)))
        name, parse = CONFIG_KEYS[key]
        try:
            values[name] = parse(raw.strip())
        except ValueError:
            raise InvalidConfigException("invalid value {!r} for {}".format(raw, key)) from None
    logger.debug("read config values %s", values)
    return values


def load_config_file(path: str) -> dict:
    with open(path, encoding='utf-8') as f:
        return read_config(f.read())
