"""
实验配置加载
[section] 下的 key = value 文本，未知的节或键一律拒绝，命令行参数覆盖文件取值
"""

import configparser
import hashlib
import json
import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional

from quadratic_problem import ConstructionKind, OrderPattern, check_even
from rate_experiments import EstimatorKind, SweepAxis, SweepSpec
from sgd_engine import SamplingScheme

logger = logging.getLogger(__name__)

ENV_OUTPUT_DIR = 'SGD_LAB_OUTPUT_DIR'
ENV_LOG_LEVEL = 'SGD_LAB_LOG_LEVEL'
DEFAULT_OUTPUT_DIR = 'analysis_output'

ALL_SCHEMES = ','.join(s.value for s in SamplingScheme)

# 各节的缺省值，空字符串表示"未设置"
DEFAULTS: Dict[str, Dict[str, str]] = {
    'problem': {
        'construction': 'auto',
        'instance_seed': '',
        'n': '8',
        'k': '16',
        'G': '6.0',
        'lambda': '1.0',
        'L': '',
        'x0': '',
        'order': OrderPattern.BLOCK_HALVES.value,
    },
    'scheme': {
        'name': SamplingScheme.RANDOM_RESHUFFLE.value,
    },
    'grid': {
        'axis': SweepAxis.K.value,
        'values': '4,8,16,32',
        'eta_points': '200',
        'eta_min': '',
        'eta_max': '',
        'refine': 'false',
    },
    'estimator': {
        'kind': EstimatorKind.EXACT.value,
        'trials': '10000',
        'seed': '0',
        'workers': '1',
    },
    'output': {
        'directory': '',
    },
    'table': {
        'schemes': ALL_SCHEMES,
        'wr_trials': '10000',
        'seed': '0',
        'workers': '1',
        'eta_points': '200',
    },
}


class ConfigError(ValueError):
    """配置或参数错误，key 为出错的 section.key"""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def default_output_dir() -> str:
    return os.environ.get(ENV_OUTPUT_DIR) or DEFAULT_OUTPUT_DIR


def config_digest(params: Mapping[str, Any]) -> str:
    """
    参数的 SHA-256 摘要

    键排序后的紧凑 JSON，文件中键的先后顺序不影响结果。

    Args:
        params (Mapping[str, Any]): 解析后的参数

    Returns:
        str: 十六进制摘要
    """
    canonical = json.dumps(params, sort_keys=True, separators=(',', ':'), ensure_ascii=False)
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def _read_file(path: str) -> Dict[str, Dict[str, str]]:
    if not os.path.isfile(path):
        raise ConfigError('config', f"配置文件不存在: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    # 保留 G、L 等键的大小写
    parser.optionxform = str
    try:
        with open(path, 'r', encoding='utf-8') as f:
            parser.read_file(f)
    except (configparser.Error, UnicodeDecodeError) as e:
        raise ConfigError('config', f"配置文件解析失败: {e}") from e

    values = {}
    for section in parser.sections():
        if section not in DEFAULTS:
            raise ConfigError(section, f"未知的配置节，可选: {', '.join(DEFAULTS)}")
        for key, value in parser.items(section):
            if key not in DEFAULTS[section]:
                raise ConfigError(f"{section}.{key}", f"未知的配置键，可选: {', '.join(DEFAULTS[section])}")
            values.setdefault(section, {})[key] = value.strip()
    return values


def _int(raw: Dict[str, Dict[str, str]], section: str, key: str, minimum: Optional[int] = None) -> int:
    text = raw[section][key]
    try:
        value = int(text)
    except ValueError:
        raise ConfigError(f"{section}.{key}", f"需要整数，当前为 '{text}'") from None
    if minimum is not None and value < minimum:
        raise ConfigError(f"{section}.{key}", f"必须至少为 {minimum}，当前为 {value}")
    return value


def _float(raw: Dict[str, Dict[str, str]], section: str, key: str) -> Optional[float]:
    text = raw[section][key]
    if text == '':
        return None
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{section}.{key}", f"需要数值，当前为 '{text}'") from None


def _bool(raw: Dict[str, Dict[str, str]], section: str, key: str) -> bool:
    text = raw[section][key].lower()
    if text in ('true', 'yes', '1'):
        return True
    if text in ('false', 'no', '0'):
        return False
    raise ConfigError(f"{section}.{key}", f"需要 true / false，当前为 '{raw[section][key]}'")


def _int_list(raw: Dict[str, Dict[str, str]], section: str, key: str) -> List[int]:
    text = raw[section][key]
    try:
        values = [int(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise ConfigError(f"{section}.{key}", f"需要逗号分隔的整数，当前为 '{text}'") from None
    if any(v < 1 for v in values):
        raise ConfigError(f"{section}.{key}", f"取值必须为正整数，当前为 {values}")
    return values


def _schemes(raw: Dict[str, Dict[str, str]], section: str, key: str) -> List[str]:
    try:
        return [SamplingScheme.parse(s).value for s in raw[section][key].split(',') if s.strip()]
    except ValueError as e:
        raise ConfigError(f"{section}.{key}", str(e)) from None


def _even(value: int, key: str) -> None:
    try:
        check_even(value, key.split('.')[-1])
    except ValueError as e:
        raise ConfigError(key, str(e)) from None


def _resolve(raw: Dict[str, Dict[str, str]]) -> Dict[str, Dict[str, Any]]:
    problem = {
        'n': _int(raw, 'problem', 'n'),
        'k': _int(raw, 'problem', 'k', minimum=1),
        'G': _float(raw, 'problem', 'G'),
        'lambda': _float(raw, 'problem', 'lambda'),
        'L': _float(raw, 'problem', 'L'),
        'x0': _float(raw, 'problem', 'x0'),
        'instance_seed': None if raw['problem']['instance_seed'] == ''
        else _int(raw, 'problem', 'instance_seed', minimum=0),
    }
    if problem['lambda'] is None or not problem['lambda'] > 0:
        raise ConfigError('problem.lambda', f"强凸参数 λ 必须为正，当前为 {problem['lambda']}")
    if problem['G'] is None or problem['G'] < 0:
        raise ConfigError('problem.G', f"梯度界 G 不能为负，当前为 {problem['G']}")
    if problem['L'] is not None and problem['L'] < problem['lambda']:
        raise ConfigError('problem.L', f"需要 L ≥ λ，当前 L={problem['L']}, λ={problem['lambda']}")

    construction = raw['problem']['construction']
    try:
        kinds = ['auto'] if construction == 'auto' else \
            [ConstructionKind(c.strip()).value for c in construction.split('+') if c.strip()]
    except ValueError as e:
        raise ConfigError('problem.construction', str(e)) from None
    try:
        problem['order'] = OrderPattern(raw['problem']['order']).value
    except ValueError as e:
        raise ConfigError('problem.order', str(e)) from None
    problem['construction'] = '+'.join(kinds)

    grid = {
        'axis': raw['grid']['axis'],
        'values': _int_list(raw, 'grid', 'values'),
        'eta_points': _int(raw, 'grid', 'eta_points', minimum=1),
        'eta_min': _float(raw, 'grid', 'eta_min'),
        'eta_max': _float(raw, 'grid', 'eta_max'),
        'refine': _bool(raw, 'grid', 'refine'),
    }
    try:
        SweepAxis(grid['axis'])
    except ValueError:
        raise ConfigError('grid.axis', f"扫描轴只能是 n / k / nk，当前为 '{grid['axis']}'") from None

    # 构造要求偶数 n，随机实例不受限制
    if problem['instance_seed'] is None:
        _even(problem['n'], 'problem.n')
        if grid['axis'] == SweepAxis.N.value:
            for v in grid['values']:
                _even(v, 'grid.values')

    estimator = {
        'kind': raw['estimator']['kind'],
        'trials': _int(raw, 'estimator', 'trials', minimum=1),
        'seed': _int(raw, 'estimator', 'seed', minimum=0),
        'workers': _int(raw, 'estimator', 'workers', minimum=1),
    }
    try:
        EstimatorKind(estimator['kind'])
    except ValueError:
        raise ConfigError('estimator.kind', f"估计器只能是 exact / monte_carlo，当前为 '{estimator['kind']}'") from None

    table = {
        'schemes': _schemes(raw, 'table', 'schemes'),
        'wr_trials': _int(raw, 'table', 'wr_trials', minimum=1),
        'seed': _int(raw, 'table', 'seed', minimum=0),
        'workers': _int(raw, 'table', 'workers', minimum=1),
        'eta_points': _int(raw, 'table', 'eta_points', minimum=1),
    }

    return {
        'problem': problem,
        'scheme': {'name': _schemes(raw, 'scheme', 'name')},
        'grid': grid,
        'estimator': estimator,
        'table': table,
    }


@dataclass
class RunConfig:
    """解析后的配置，params 不含输出目录"""

    params: Dict[str, Dict[str, Any]]
    output_dir: str
    source: Optional[str] = None

    @property
    def digest(self) -> str:
        return config_digest(self.params)

    @property
    def seed(self) -> int:
        return int(self.params['estimator']['seed'])

    def echo(self) -> str:
        """--dry-run 输出的参数文本"""
        lines = []
        for section, values in self.params.items():
            lines.append(f"[{section}]")
            for key, value in values.items():
                lines.append(f"{key} = {value}")
        lines.append(f"[output]\ndirectory = {self.output_dir}")
        lines.append(f"digest = {self.digest}")
        return '\n'.join(lines)

    def sweep_specs(self) -> List[SweepSpec]:
        """
        每个方案一份扫描参数

        construction = auto 时，增量方法用 CyclicSplit，其余方案用 SignedLinear。

        Returns:
            List[SweepSpec]: 按 scheme.name 的顺序
        """
        problem = self.params['problem']
        grid = self.params['grid']
        est = self.params['estimator']
        specs = []
        for name in self.params['scheme']['name']:
            scheme = SamplingScheme(name)
            if problem['construction'] == 'auto':
                kinds = (ConstructionKind.CYCLIC_SPLIT,) if scheme is SamplingScheme.INCREMENTAL \
                    else (ConstructionKind.SIGNED_LINEAR,)
            else:
                kinds = tuple(ConstructionKind(c) for c in problem['construction'].split('+'))
            try:
                specs.append(SweepSpec(
                    scheme=scheme, axis=grid['axis'], axis_values=tuple(grid['values']),
                    n=problem['n'], k=problem['k'], constructions=kinds,
                    instance_seed=problem['instance_seed'], G=problem['G'], lam=problem['lambda'],
                    L=problem['L'], x0=problem['x0'], order=problem['order'],
                    estimator=est['kind'], trials=est['trials'], seed=est['seed'], workers=est['workers'],
                    eta_points=grid['eta_points'], eta_min=grid['eta_min'], eta_max=grid['eta_max'],
                    refine=grid['refine'],
                ))
            except ValueError as e:
                raise ConfigError('estimator.kind', str(e)) from None
        return specs


def load_config(path: Optional[str] = None,
                overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """
    读取并解析配置

    Args:
        path (Optional[str]): 配置文件路径，None 表示只用缺省值
        overrides (Optional[Mapping[str, Any]]): 'section.key' → 值，None 表示不覆盖

    Returns:
        RunConfig: 解析后的配置

    Raises:
        ConfigError: 文件缺失、解析失败、未知键或取值非法
    """
    raw = {section: dict(values) for section, values in DEFAULTS.items()}
    if path is not None:
        for section, values in _read_file(path).items():
            raw[section].update(values)
    for dotted, value in (overrides or {}).items():
        if value is None:
            continue
        section, _, key = dotted.partition('.')
        if section not in raw or key not in raw[section]:
            raise ConfigError(dotted, "未知的参数")
        raw[section][key] = str(value)

    params = _resolve(raw)
    output_dir = raw['output']['directory'] or default_output_dir()
    config = RunConfig(params=params, output_dir=output_dir, source=path)
    logger.debug("resolved config from %s, digest %s", path or '<defaults>', config.digest)
    return config
