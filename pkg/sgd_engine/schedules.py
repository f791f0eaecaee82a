"""
采样方案与调度序列
四种方案: 随机重排、单次打乱、增量（循环）、有放回采样
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import permutations
from typing import Optional, Union

import numpy as np

# 完全枚举的排列长度上限（8! = 40320）
MAX_ENUMERATION_N = 8


class SamplingScheme(str, Enum):
    """SGD 的采样方案"""

    RANDOM_RESHUFFLE = "random_reshuffle"
    SINGLE_SHUFFLE = "single_shuffle"
    INCREMENTAL = "incremental"
    WITH_REPLACEMENT = "with_replacement"

    @classmethod
    def parse(cls, name: Union[str, 'SamplingScheme']) -> 'SamplingScheme':
        """接受枚举成员本身，以及 'random_reshuffle'、'random-reshuffle'、'reshuffle' 等写法"""
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace('-', '_')
        aliases = {
            'reshuffle': cls.RANDOM_RESHUFFLE,
            'rr': cls.RANDOM_RESHUFFLE,
            'single': cls.SINGLE_SHUFFLE,
            'shuffle_once': cls.SINGLE_SHUFFLE,
            'cyclic': cls.INCREMENTAL,
            'replacement': cls.WITH_REPLACEMENT,
        }
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            valid = ', '.join(s.value for s in cls)
            raise ValueError(f"未知的采样方案 '{name}'，可选: {valid}") from None


@dataclass(frozen=True)
class Schedule:
    """
    n·k 步的分量下标序列（下标从 1 开始）
    """

    scheme: SamplingScheme
    n: int
    k: int
    indices: np.ndarray
    seed: Optional[int]

    def __post_init__(self):
        if self.indices.shape != (self.n * self.k,):
            raise ValueError(f"调度长度应为 n·k={self.n * self.k}，实际为 {self.indices.shape}")

    def blocks(self) -> np.ndarray:
        """按轮次切分，形状 (k, n)"""
        return self.indices.reshape(self.k, self.n)

    def zero_based(self) -> np.ndarray:
        return self.indices - 1


def trial_generator(seed: int, trial: int = 0) -> np.random.Generator:
    """
    第 trial 次试验的随机数发生器

    Philox 是基于计数器的发生器，键由 (seed, trial) 经 SeedSequence 派生，
    与试验的执行顺序无关。

    Args:
        seed (int): 基础种子
        trial (int): 试验编号

    Returns:
        np.random.Generator: 发生器
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(int(trial),))))


def schedule_indices(scheme: SamplingScheme, n: int, k: int,
                     rng: np.random.Generator) -> np.ndarray:
    """
    生成从 0 开始的下标序列

    Args:
        scheme (SamplingScheme): 采样方案
        n (int): 分量个数
        k (int): 轮数
        rng (np.random.Generator): 发生器

    Returns:
        np.ndarray: 长度 n·k 的 int 数组
    """
    scheme = SamplingScheme(scheme)
    if scheme is SamplingScheme.INCREMENTAL:
        return np.tile(np.arange(n), k)
    if scheme is SamplingScheme.SINGLE_SHUFFLE:
        return np.tile(rng.permutation(n), k)
    if scheme is SamplingScheme.RANDOM_RESHUFFLE:
        # 每行独立做一次 Fisher-Yates
        return rng.permuted(np.tile(np.arange(n), (k, 1)), axis=1).reshape(-1)
    return rng.integers(0, n, size=n * k)


def sample_schedule(scheme: SamplingScheme, n: int, k: int, seed: int) -> Schedule:
    """
    按方案采样调度

    Args:
        scheme (SamplingScheme): 采样方案
        n (int): 分量个数，n > 1
        k (int): 轮数，k ≥ 1
        seed (int): 种子，相同参数得到相同输出

    Returns:
        Schedule: 调度
    """
    scheme = SamplingScheme(scheme)
    if n < 2:
        raise ValueError(f"分量个数 n 必须大于 1，当前 n={n}")
    if k < 1:
        raise ValueError(f"轮数 k 必须至少为 1，当前 k={k}")
    idx = schedule_indices(scheme, n, k, trial_generator(seed, 0))
    return Schedule(scheme=scheme, n=int(n), k=int(k), indices=idx + 1, seed=int(seed))


@lru_cache(maxsize=None)
def all_permutations(n: int) -> np.ndarray:
    """
    全部 n! 个排列（字典序），形状 (n!, n)，下标从 0 开始

    Args:
        n (int): 长度，不超过 MAX_ENUMERATION_N

    Returns:
        np.ndarray: 排列数组
    """
    if n > MAX_ENUMERATION_N:
        raise ValueError(f"完全枚举要求 n ≤ {MAX_ENUMERATION_N}，当前 n={n}")
    orders = np.array(list(permutations(range(n))), dtype=np.int64)
    orders.setflags(write=False)
    return orders
