"""
引理检查结果
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import pandas as pd

LEMMA_COLUMNS = ['lemma_id', 'params', 'exact', 'oracle', 'bound', 'satisfied', 'empirical_constant']


@dataclass
class LemmaCheckResult:
    """
    单次引理检查

    satisfied 当且仅当该输入下引理的等式或不等式成立；
    empirical_constant 记录实测比值（例如 β 与下包络之比），不预设常数。
    checked 为 False 表示引理前提不满足，未做检查。
    """

    lemma_id: str
    params: Dict[str, Any]
    exact_value: float
    oracle_value: Optional[float] = None
    bound_value: Optional[float] = None
    satisfied: bool = True
    empirical_constant: Optional[float] = None
    checked: bool = True

    def row(self) -> Dict[str, Any]:
        params = ';'.join(f"{k}={v}" for k, v in self.params.items())
        return {
            'lemma_id': self.lemma_id,
            'params': params,
            'exact': self.exact_value,
            'oracle': self.oracle_value,
            'bound': self.bound_value,
            'satisfied': bool(self.satisfied),
            'empirical_constant': self.empirical_constant,
        }


def lemma_frame(results: List[LemmaCheckResult]) -> pd.DataFrame:
    """检查结果转为表格"""
    return pd.DataFrame([r.row() for r in results], columns=LEMMA_COLUMNS)


def agreement(lemma_id: str, params: Dict[str, Any], exact: float, oracle: float,
              rtol: float, atol: float = 0.0) -> LemmaCheckResult:
    """公式值与枚举值一致性检查"""
    ok = abs(exact - oracle) <= max(atol, rtol * max(abs(exact), abs(oracle)))
    return LemmaCheckResult(lemma_id=lemma_id, params=dict(params), exact_value=float(exact),
                            oracle_value=float(oracle), satisfied=bool(ok))
