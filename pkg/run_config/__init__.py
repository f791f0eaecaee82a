"""
运行配置包
配置加载、参数摘要与结果文件写出
"""

from .config_loader import (
    DEFAULT_OUTPUT_DIR,
    ENV_LOG_LEVEL,
    ENV_OUTPUT_DIR,
    ConfigError,
    RunConfig,
    config_digest,
    default_output_dir,
    load_config,
)
from .results_writer import MANIFEST_NAME, TOOL_VERSION, RunManifest, read_results, write_results

__all__ = [
    'DEFAULT_OUTPUT_DIR',
    'ENV_LOG_LEVEL',
    'ENV_OUTPUT_DIR',
    'MANIFEST_NAME',
    'TOOL_VERSION',
    'ConfigError',
    'RunConfig',
    'RunManifest',
    'config_digest',
    'default_output_dir',
    'load_config',
    'read_results',
    'write_results',
]
