"""
结果文件与运行清单
CSV 用 17 位有效数字保存，清单最后写入
"""

import hashlib
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Mapping, Optional, Tuple

import pandas as pd

logger = logging.getLogger(__name__)

TOOL_VERSION = '1.0.0'
MANIFEST_NAME = 'manifest.json'
FLOAT_FORMAT = '%.17g'


@dataclass
class RunManifest:
    """一次运行写出的文件及其摘要"""

    tool_version: str
    config_digest: str
    seed: int
    timestamp: str
    files: List[Dict[str, Any]] = field(default_factory=list)

    def file_names(self) -> List[str]:
        return [f['name'] for f in self.files]


def _file_digest(path: str) -> str:
    with open(path, 'rb') as f:
        return hashlib.sha256(f.read()).hexdigest()


def write_results(outputs: Mapping[str, pd.DataFrame], directory: str, config_digest: str,
                  seed: int, timestamp: Optional[str] = None) -> RunManifest:
    """
    写出 CSV 与运行清单

    Args:
        outputs (Mapping[str, pd.DataFrame]): 文件名（不含扩展名）→ 表格，按给定顺序写出
        directory (str): 输出目录，不存在时创建
        config_digest (str): 配置摘要
        seed (int): 基础种子
        timestamp (Optional[str]): 时间戳，缺省为当前时间；只写入清单

    Returns:
        RunManifest: 清单

    Raises:
        OSError: 写入失败，已写出的文件记录在日志中
    """
    manifest = RunManifest(tool_version=TOOL_VERSION, config_digest=config_digest, seed=int(seed),
                           timestamp=timestamp or datetime.now().strftime('%Y-%m-%d %H:%M:%S'))
    written = []
    try:
        os.makedirs(directory, exist_ok=True)
        for name, frame in outputs.items():
            filename = f"{name}.csv"
            path = os.path.join(directory, filename)
            frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, encoding='utf-8', lineterminator='\n')
            written.append(path)
            manifest.files.append({'name': filename, 'sha256': _file_digest(path), 'rows': int(len(frame))})

        manifest_path = os.path.join(directory, MANIFEST_NAME)
        with open(manifest_path, 'w', encoding='utf-8') as f:
            json.dump(asdict(manifest), f, ensure_ascii=False, indent=2)
    except OSError:
        logger.error("writing results to %s failed; partial files: %s", directory, written or 'none')
        raise
    logger.info("wrote %d file(s) and manifest to %s", len(manifest.files), directory)
    return manifest


def read_results(directory: str) -> Tuple[RunManifest, Dict[str, pd.DataFrame]]:
    """
    读回清单与其中列出的 CSV

    Args:
        directory (str): 输出目录

    Returns:
        Tuple[RunManifest, Dict[str, pd.DataFrame]]: 清单与 文件名（不含扩展名）→ 表格
    """
    with open(os.path.join(directory, MANIFEST_NAME), 'r', encoding='utf-8') as f:
        manifest = RunManifest(**json.load(f))
    frames = {}
    for entry in manifest.files:
        path = os.path.join(directory, entry['name'])
        if _file_digest(path) != entry['sha256']:
            logger.warning("%s does not match its manifest digest", entry['name'])
        frames[os.path.splitext(entry['name'])[0]] = pd.read_csv(path)
    return manifest, frames
