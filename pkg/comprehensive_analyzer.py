#!/usr/bin/env python3
"""
收敛速率表综合分析器
对每个采样方案做规模扫描、拟合速率指数并与目标指数比较，输出 JSON 与 Excel 报告
"""

import json
import logging
import os
from datetime import datetime
from typing import Any, Dict, List, Optional

import pandas as pd

from rate_experiments import Criterion, assemble_rate_table, default_measurements, measure
from run_config import RunConfig, default_output_dir, load_config

logger = logging.getLogger(__name__)


class ComprehensiveRateAnalyzer:
    """收敛速率表综合分析器"""

    def __init__(self, output_dir: Optional[str] = None):
        """
        初始化综合分析器

        Args:
            output_dir (Optional[str]): 报告输出目录，缺省取 SGD_LAB_OUTPUT_DIR
        """
        self.output_dir = output_dir or default_output_dir()
        os.makedirs(self.output_dir, exist_ok=True)

    def reproduce_rate_table(self, config: RunConfig, save: bool = True) -> Dict[str, Any]:
        """
        复现速率表

        Args:
            config (RunConfig): 使用其中的 [table] 节
            save (bool): 是否写出 JSON 与 Excel 报告

        Returns:
            Dict[str, Any]: 速率表、各测量项与汇总
        """
        table_params = config.params['table']
        schemes = list(table_params['schemes'])
        print(f"=== 开始复现速率表 ({len(schemes)} 个方案) ===")

        analysis_result = {
            'analysis_time': datetime.now().strftime('%Y-%m-%d %H:%M:%S'),
            'config_digest': config.digest,
            'schemes': schemes,
            'measurements': [],
            'rate_table': pd.DataFrame(),
            'summary': {},
        }

        measurements = default_measurements(schemes, wr_trials=table_params['wr_trials'],
                                            seed=table_params['seed'], workers=table_params['workers'],
                                            eta_points=table_params['eta_points'])
        for i, m in enumerate(measurements, 1):
            print(f"\n{i}. {m.scheme.value} 沿 {m.column} 轴 ({m.regime})...")
            try:
                result = measure(m)
                verdict = '通过' if result['within_tolerance'] else '超出容差'
                if result['criterion'] == Criterion.SPREAD.value:
                    print(f"   相对极差 {result['spread']:.3f}（上限 {result['tolerance']:.2f}），"
                          f"拟合指数 {result['fitted']:+.3f}，{verdict}")
                else:
                    print(f"   拟合指数 {result['fitted']:+.3f}，目标 {result['target']:+.1f}，"
                          f"修正指数 {result['corrected']:+.3f}（参考），{verdict}")
            except Exception as e:
                print(f"   测量失败: {e}")
                logger.exception("rate measurement failed: %s %s", m.scheme.value, m.column)
                result = {'scheme': m.scheme.value, 'column': m.column, 'regime': m.regime, 'error': str(e)}
            analysis_result['measurements'].append(result)

        table = assemble_rate_table(analysis_result['measurements'], schemes)
        analysis_result['rate_table'] = table
        analysis_result['summary'] = self._generate_summary(analysis_result['measurements'], table)

        if save:
            self._save_analysis_result(analysis_result)
        return analysis_result

    def _generate_summary(self, measurements: List[Dict[str, Any]], table: pd.DataFrame) -> Dict[str, Any]:
        failed = [m for m in measurements if 'error' in m]
        outside = [m for m in measurements if 'error' not in m and not m['within_tolerance']]
        return {
            'total_schemes': int(len(table)),
            'total_measurements': len(measurements),
            'failed_measurements': len(failed),
            'outside_tolerance': len(outside),
            'passed_schemes': int(table['passed'].sum()) if len(table) else 0,
            'all_passed': bool(table['passed'].all()) if len(table) else True,
        }

    def _save_analysis_result(self, analysis_result: Dict[str, Any]):
        """
        保存分析结果

        Args:
            analysis_result (Dict[str, Any]): 分析结果
        """
        try:
            json_result = {
                'analysis_time': analysis_result['analysis_time'],
                'config_digest': analysis_result['config_digest'],
                'schemes': analysis_result['schemes'],
                'summary': analysis_result['summary'],
                'rate_table': json.loads(analysis_result['rate_table'].to_json(orient='records')),
                'measurements': [{k: v for k, v in m.items() if k != 'sweep'}
                                 for m in analysis_result['measurements']],
            }
            json_file = os.path.join(self.output_dir, "rate_table_report.json")
            with open(json_file, 'w', encoding='utf-8') as f:
                json.dump(json_result, f, ensure_ascii=False, indent=2)

            self._generate_excel_report(analysis_result)

            print(f"分析结果已保存到: {json_file}")

        except Exception as e:
            print(f"保存分析结果失败: {e}")

    def _generate_excel_report(self, analysis_result: Dict[str, Any]):
        """
        生成Excel分析报告

        Args:
            analysis_result (Dict[str, Any]): 分析结果
        """
        try:
            excel_file = os.path.join(self.output_dir, "rate_table_report.xlsx")

            with pd.ExcelWriter(excel_file, engine='openpyxl') as writer:
                # 速率表页
                analysis_result['rate_table'].to_excel(writer, sheet_name='速率表', index=False)

                # 扫描明细页
                sweeps = [m['sweep'] for m in analysis_result['measurements'] if 'sweep' in m]
                df_sweeps = pd.concat(sweeps, ignore_index=True) if sweeps else pd.DataFrame()
                df_sweeps.to_excel(writer, sheet_name='扫描明细', index=False)

                # 汇总统计页
                summary = analysis_result['summary']
                summary_data = [
                    ['方案数', summary.get('total_schemes', 0)],
                    ['测量项数', summary.get('total_measurements', 0)],
                    ['失败测量项', summary.get('failed_measurements', 0)],
                    ['超出容差', summary.get('outside_tolerance', 0)],
                    ['通过方案数', summary.get('passed_schemes', 0)],
                ]
                df_summary = pd.DataFrame(summary_data, columns=['指标', '数值'])
                df_summary.to_excel(writer, sheet_name='汇总统计', index=False)

            print(f"Excel报告已生成: {excel_file}")

        except Exception as e:
            print(f"生成Excel报告失败: {e}")

    def print_analysis_summary(self, analysis_result: Dict[str, Any]):
        """
        打印分析摘要

        Args:
            analysis_result (Dict[str, Any]): 分析结果
        """
        print(f"\n{'='*80}")
        print("  收敛速率表")
        print(f"{'='*80}")

        summary = analysis_result['summary']
        print("基本统计:")
        print(f"   方案数: {summary.get('total_schemes', 0)}")
        print(f"   测量项: {summary.get('total_measurements', 0)} "
              f"(失败 {summary.get('failed_measurements', 0)}，超出容差 {summary.get('outside_tolerance', 0)})")

        table = analysis_result['rate_table']
        for _, row in table.iterrows():
            status = "通过" if row['passed'] else "偏差"
            print(f"\n   {row['scheme']} [{status}]")
            for axis in ('n', 'k', 'nk'):
                if pd.notna(row[f'target_{axis}']):
                    print(f"      {axis:>2}: 拟合 {row[f'fitted_{axis}']:+.3f} | "
                          f"修正 {row[f'corrected_{axis}']:+.3f} | 目标 {row[f'target_{axis}']:+.1f}")
            if row['deviations']:
                print(f"      偏差: {row['deviations']}")

        print(f"{'='*80}")


def reproduce_rate_table(config: Optional[RunConfig] = None, output_dir: Optional[str] = None,
                         save: bool = False) -> pd.DataFrame:
    """
    复现速率表并返回表格

    Args:
        config (Optional[RunConfig]): 配置，缺省为默认配置
        output_dir (Optional[str]): 报告目录
        save (bool): 是否写出报告

    Returns:
        pd.DataFrame: 每个方案一行
    """
    config = config or load_config()
    analyzer = ComprehensiveRateAnalyzer(output_dir or config.output_dir)
    return analyzer.reproduce_rate_table(config, save=save)['rate_table']


def main():
    """主函数 - 示例用法"""
    analyzer = ComprehensiveRateAnalyzer()
    result = analyzer.reproduce_rate_table(load_config())
    analyzer.print_analysis_summary(result)


if __name__ == "__main__":
    main()
