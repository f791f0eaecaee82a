"""
问题的文本序列化
JSON 文档 {n, components: [[a, b], ...], G, recommended_x0, provenance}
"""

import json
from typing import Any, Dict

from .components import FiniteSumProblem


def problem_to_dict(p: FiniteSumProblem) -> Dict[str, Any]:
    return {
        'n': p.n,
        'components': [[c.a, c.b] for c in p.components],
        'G': p.G,
        'recommended_x0': p.recommended_x0,
        'provenance': dict(p.provenance),
    }


def problem_to_text(p: FiniteSumProblem) -> str:
    """
    序列化为 JSON 文本

    json 使用 float 的最短往返表示（不超过 17 位有效数字），读回时逐位一致。

    Args:
        p (FiniteSumProblem): 问题

    Returns:
        str: JSON 文本
    """
    return json.dumps(problem_to_dict(p), ensure_ascii=False, indent=2, sort_keys=True)


def problem_from_text(text: str) -> FiniteSumProblem:
    """
    从 JSON 文本恢复问题

    Args:
        text (str): problem_to_text 的输出

    Returns:
        FiniteSumProblem: 问题实例
    """
    try:
        doc = json.loads(text)
        pairs = doc['components']
        n = int(doc['n'])
    except (ValueError, KeyError, TypeError) as e:
        raise ValueError(f"问题文档解析失败: {e}") from e
    if len(pairs) != n:
        raise ValueError(f"问题文档中 n={n} 与分量个数 {len(pairs)} 不一致")
    return FiniteSumProblem.from_coefficients(
        [float(a) for a, _ in pairs],
        [float(b) for _, b in pairs],
        G=float(doc['G']),
        recommended_x0=float(doc.get('recommended_x0', 1.0)),
        provenance=doc.get('provenance', {}),
    )
