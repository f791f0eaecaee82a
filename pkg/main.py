#!/usr/bin/env python3
"""
有放回与无放回 SGD 收敛速率实验程序
子命令: verify-lemmas / simulate / sweep / fit / bounds / table
退出码: 0 成功，1 有检查未通过，2 用法或参数错误
"""

import itertools
import logging
import os
import sys
from typing import Dict, List, Optional, Sequence

import click
import pandas as pd

from analytic_oracles import LemmaCheckResult, lemma_frame, run_lemma_suite
from comprehensive_analyzer import ComprehensiveRateAnalyzer
from quadratic_problem import ConstructionKind, OrderPattern, make_construction, variant_summary
from rate_experiments import (
    N_VARIATION_LIMIT,
    FitModel,
    HypothesisError,
    fit_frame,
    fit_rate,
    merge_reports,
    scaling_sweep,
    verify_lower_bound,
    verify_upper_bound,
)
from run_config import ENV_LOG_LEVEL, ConfigError, config_digest, default_output_dir, load_config, write_results
from sgd_engine import (
    MAX_ENUMERATION_N,
    SamplingScheme,
    estimate_frame,
    estimate_suboptimality,
    exact_moments,
    run_schedule,
    sample_schedule,
    trajectory_frame,
)

logger = logging.getLogger(__name__)

CONTEXT_SETTINGS = {'help_option_names': ['-h', '--help']}
SCHEME_NAMES = [s.value for s in SamplingScheme]


def print_separator(title: str):
    """打印分隔线和标题"""
    print("\n" + "="*80)
    print(f"  {title}")
    print("="*80)


def print_dataframe(df: pd.DataFrame, title: str, max_rows: int = 30):
    """打印DataFrame，限制最大行数"""
    if df.empty:
        print(f"{title}: 无数据")
        return

    # 限制显示行数
    display_df = df.head(max_rows) if len(df) > max_rows else df

    print(f"{title} (共{len(df)}条，显示前{len(display_df)}条):")
    print("-" * 80)
    print(display_df.to_string(index=False))
    print()


def save_results(outputs: Dict[str, pd.DataFrame], directory: str, digest: str, seed: int):
    """写出CSV与清单并打印文件列表"""
    manifest = write_results(outputs, directory, digest, seed)
    for name in manifest.file_names():
        print(f"数据已保存到: {os.path.join(directory, name)}")
    return manifest


def print_signed_prefix_discrepancy(results: Sequence[LemmaCheckResult]):
    """
    并列带符号前缀期望的两种写法

    枚举与 −ηλn/4 一致；另一种写法 −ηλn(n+1)/(4(n−1)) 的内层求和多数了 n 对，
    两者只在 ηλ = 0 时相等。

    Args:
        results (Sequence[LemmaCheckResult]): run_lemma_suite 的输出
    """
    rows = [{
        'n': r.params['n'],
        'eta_lambda': r.params['eta_lambda'],
        'enumerated': r.oracle_value,
        'formula': r.exact_value,
        'stated': r.params['stated'],
    } for r in results if r.lemma_id == 'signed_prefix' and r.params['eta_lambda'] > 0]
    if not rows:
        return
    table = pd.DataFrame(rows)
    print_dataframe(table, "带符号前缀期望: 枚举 −ηλn/4 vs 另一写法 −ηλn(n+1)/(4(n−1))", max_rows=50)
    pinned = table[(table['n'] == 2) & (table['eta_lambda'] == 0.01)]
    for _, row in pinned.iterrows():
        print(f"差异: n=2, ηλ=0.01 时枚举 {row['enumerated']:+.6g}，"
              f"另一写法 {row['stated']:+.6g}（相差 {row['stated'] - row['enumerated']:+.6g}）")


def setup_logging(level: Optional[str]):
    name = (level or os.environ.get(ENV_LOG_LEVEL) or 'WARNING').upper()
    if not isinstance(logging.getLevelName(name), int):
        raise ConfigError('log-level', f"未知的日志级别 '{name}'")
    logging.basicConfig(level=name, format='%(asctime)s %(levelname)s %(name)s: %(message)s', force=True)


def _int_list(text: str, key: str) -> List[int]:
    try:
        values = [int(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise ConfigError(key, f"需要逗号分隔的整数，当前为 '{text}'") from None
    if not values:
        raise ConfigError(key, "取值不能为空")
    return values


@click.group(context_settings=CONTEXT_SETTINGS)
@click.option('--log-level', default=None,
              help=f'日志级别 (DEBUG/INFO/WARNING/ERROR)，缺省取环境变量 {ENV_LOG_LEVEL}，否则 WARNING')
def cli(log_level: Optional[str]):
    """常数步长 SGD 在四种采样方案下的收敛速率实验"""
    setup_logging(log_level)


@cli.command('verify-lemmas')
@click.option('--max-n', default=16, show_default=True, type=int, help='枚举的最大 n')
@click.option('--seed', default=0, show_default=True, type=int, help='随机实例与抽样种子')
@click.option('--output', default=None, help='输出目录，缺省取 SGD_LAB_OUTPUT_DIR 或 analysis_output')
def verify_lemmas(max_n: int, seed: int, output: Optional[str]) -> int:
    """运行全部解析引理检查"""
    print_separator("解析引理检查")
    print(f"max_n={max_n}, seed={seed}")

    results = run_lemma_suite(max_n=max_n, seed=seed)
    frame = lemma_frame(results)
    grouped = frame.groupby('lemma_id', sort=False).agg(
        checks=('satisfied', 'size'),
        failed=('satisfied', lambda s: int((~s.astype(bool)).sum())),
        min_constant=('empirical_constant', 'min'),
        max_constant=('empirical_constant', 'max'),
    ).reset_index()
    print_dataframe(grouped, "引理检查汇总", max_rows=50)
    print_signed_prefix_discrepancy(results)

    failed = frame[~frame['satisfied']]
    if not failed.empty:
        print_dataframe(failed, "未通过的检查")

    directory = output or default_output_dir()
    save_results({'lemma_checks': frame}, directory,
                 config_digest({'command': 'verify-lemmas', 'max_n': max_n, 'seed': seed}), seed)
    print(f"共 {len(frame)} 项检查，未通过 {len(failed)} 项")
    return 0 if failed.empty else 1


@cli.command()
@click.option('--scheme', required=True, type=click.Choice(SCHEME_NAMES), help='采样方案')
@click.option('--n', 'n', required=True, type=int, help='分量个数（偶数）')
@click.option('--k', 'k', required=True, type=int, help='轮数')
@click.option('--eta', required=True, type=float, help='步长')
@click.option('--lambda', 'lam', default=1.0, show_default=True, type=float, help='强凸参数 λ')
@click.option('--G', 'G', default=6.0, show_default=True, type=float, help='梯度界 G')
@click.option('--x0', default=None, type=float, help='初始点，缺省为构造的推荐初始点')
@click.option('--construction', default='auto', show_default=True,
              type=click.Choice(['auto'] + [c.value for c in ConstructionKind]),
              help='构造，auto 时增量方法用 cyclic_split，其余用 signed_linear')
@click.option('--order', default=OrderPattern.BLOCK_HALVES.value, show_default=True,
              type=click.Choice([o.value for o in OrderPattern]), help='两种变体的排布')
@click.option('--seed', default=0, show_default=True, type=int, help='调度种子')
@click.option('--trials', default=0, show_default=True, type=int, help='大于 0 时另做蒙特卡洛矩估计')
@click.option('--output', default=None, help='给出时写出轨迹 CSV')
def simulate(scheme: str, n: int, k: int, eta: float, lam: float, G: float, x0: Optional[float],
             construction: str, order: str, seed: int, trials: int, output: Optional[str]) -> int:
    """在给定参数上运行一次 SGD"""
    scheme = SamplingScheme(scheme)
    if construction == 'auto':
        construction = ConstructionKind.CYCLIC_SPLIT if scheme is SamplingScheme.INCREMENTAL \
            else ConstructionKind.SIGNED_LINEAR
    p = make_construction(construction, n, G, lam, order)
    schedule = sample_schedule(scheme, n, k, seed)
    traj = run_schedule(p, schedule, eta, x0)

    print_separator(f"SGD 模拟: {scheme.value} / {ConstructionKind(construction).value}")
    print("分量: " + ", ".join(f"{cnt}×(a={a:g}, b={b:g})" for a, b, cnt in variant_summary(p)))
    if traj.diverged:
        print(f"第 {traj.diverged_epoch} 轮发散")
    print(", ".join(f"x{t}={x:.12g}" for t, x in enumerate(traj.epoch_iterates, 1) if pd.notna(x)))

    estimates = []
    if scheme is SamplingScheme.INCREMENTAL or n <= MAX_ENUMERATION_N:
        estimates.append(exact_moments(p, scheme, eta, k, x0))
    if trials > 0:
        estimates.append(estimate_suboptimality(p, scheme, eta, k, trials, seed, x0=x0))
    moments = estimate_frame(estimates)
    print_dataframe(moments, "第 k 轮的矩")

    if output:
        save_results({'trajectory': trajectory_frame(p, traj, str(seed)), 'moments': moments}, output,
                     config_digest({'command': 'simulate', 'scheme': scheme.value, 'n': n, 'k': k, 'eta': eta,
                                    'lambda': lam, 'G': G, 'x0': x0, 'construction': str(construction),
                                    'order': order, 'seed': seed, 'trials': trials}), seed)
    return 0


def sweep_options(func):
    """sweep 与 fit 共用的配置覆盖参数"""
    options = [
        click.option('--config', 'config_path', default=None, help='配置文件 (INI 格式)'),
        click.option('--scheme', default=None, help='采样方案，逗号分隔可写多个 [random_reshuffle]'),
        click.option('--construction', default=None,
                     help='构造，多个用 + 连接求可分离和 [auto]'),
        click.option('--instance-seed', default=None, type=int, help='改用随机实例的种子'),
        click.option('--n', 'n', default=None, type=int, help='分量个数 [8]'),
        click.option('--k', 'k', default=None, type=int, help='轮数 [16]'),
        click.option('--G', 'G', default=None, type=float, help='梯度界 [6.0]'),
        click.option('--lambda', 'lam', default=None, type=float, help='强凸参数 [1.0]'),
        click.option('--L', 'L', default=None, type=float, help='随机实例的曲率上界 [λ]'),
        click.option('--x0', default=None, type=float, help='初始点 [构造推荐值]'),
        click.option('--axis', default=None, type=click.Choice(['n', 'k', 'nk']), help='扫描轴 [k]'),
        click.option('--values', default=None, help='扫描轴取值，逗号分隔 [4,8,16,32]'),
        click.option('--eta-points', default=None, type=int, help='步长网格点数 [200]'),
        click.option('--refine', is_flag=True, help='网格最小点再做一维有界搜索（仅精确估计器）'),
        click.option('--estimator', default=None, type=click.Choice(['exact', 'monte_carlo']),
                     help='估计器 [exact]'),
        click.option('--trials', default=None, type=int, help='蒙特卡洛试验数 [10000]'),
        click.option('--seed', default=None, type=int, help='基础种子 [0]'),
        click.option('--workers', default=None, type=int, help='进程数 [1]'),
        click.option('--output', default=None, help='输出目录 [SGD_LAB_OUTPUT_DIR 或 analysis_output]'),
        click.option('--dry-run', is_flag=True, help='只打印解析后的参数与摘要，不运行'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _load_sweep_config(kw: dict):
    overrides = {
        'scheme.name': kw['scheme'],
        'problem.construction': kw['construction'],
        'problem.instance_seed': kw['instance_seed'],
        'problem.n': kw['n'],
        'problem.k': kw['k'],
        'problem.G': kw['G'],
        'problem.lambda': kw['lam'],
        'problem.L': kw['L'],
        'problem.x0': kw['x0'],
        'grid.axis': kw['axis'],
        'grid.values': kw['values'],
        'grid.eta_points': kw['eta_points'],
        'grid.refine': 'true' if kw['refine'] else None,
        'estimator.kind': kw['estimator'],
        'estimator.trials': kw['trials'],
        'estimator.seed': kw['seed'],
        'estimator.workers': kw['workers'],
        'output.directory': kw['output'],
    }
    return load_config(kw['config_path'], overrides)


def _run_sweeps(config) -> Dict[str, pd.DataFrame]:
    frames = {}
    for spec in config.sweep_specs():
        result = scaling_sweep(spec)
        frame = result.frame()
        print_dataframe(frame, f"扫描 {spec.scheme.value} / {spec.label()} 沿 {spec.axis.value} 轴")
        frames[f"sweep_{spec.scheme.value}"] = frame
    return frames


@cli.command()
@sweep_options
def sweep(**kw) -> int:
    """规模扫描: 每个轴取值上求步长最坏情况误差"""
    config = _load_sweep_config(kw)
    if kw['dry_run']:
        print(config.echo())
        return 0
    print_separator("规模扫描")
    frames = _run_sweeps(config)
    save_results(frames, config.output_dir, config.digest, config.seed)
    return 0


@cli.command()
@sweep_options
@click.option('--input', 'input_path', default=None, help='读取已有的扫描 CSV，不再运行扫描')
@click.option('--model', default=FitModel.PURE_POWER.value, show_default=True,
              type=click.Choice([m.value for m in FitModel]), help='拟合模型')
@click.option('--log-power', default=0.0, show_default=True, type=float, help='polylog 模型的对数幂')
@click.option('--target', default=None, type=float, help='目标指数，给出时按容差判定')
@click.option('--tolerance', default=None, type=float, help='指数容差，缺省精确 0.15 / 蒙特卡洛 0.3')
def fit(input_path: Optional[str], model: str, log_power: float, target: Optional[float],
        tolerance: Optional[float], **kw) -> int:
    """拟合扫描结果的速率指数"""
    config = _load_sweep_config(kw)
    if kw['dry_run']:
        print(config.echo())
        return 0

    print_separator("速率拟合")
    if input_path:
        if not os.path.isfile(input_path):
            raise ConfigError('input', f"扫描文件不存在: {input_path}")
        frames = {os.path.splitext(os.path.basename(input_path))[0]: pd.read_csv(input_path)}
    else:
        frames = _run_sweeps(config)

    fits = []
    passed = True
    for name, frame in frames.items():
        result = fit_rate(frame, model, log_power)
        fits.append(result)
        print(f"{name}: 指数 {result.exponent:+.4f}，r²={result.r_squared:.6f}，{result.points} 个点")
        if target is not None:
            estimator = str(frame['estimator'].iloc[0]) if 'estimator' in frame else 'exact'
            tol = tolerance if tolerance is not None else (0.15 if estimator == 'exact' else 0.3)
            ok = abs(result.exponent - target) <= tol
            passed &= ok
            print(f"   目标 {target:+.2f} ± {tol}: {'通过' if ok else '未通过'}")

    outputs = dict(frames) if not input_path else {}
    outputs['fit'] = fit_frame(fits)
    save_results(outputs, config.output_dir, config.digest, config.seed)
    return 0 if passed else 1


@cli.command()
@click.option('--kind', required=True, type=click.Choice(['lower', 'upper']), help='下界或上界')
@click.option('--scheme', default=None,
              help='下界: random_reshuffle / single_shuffle / incremental；上界: single_shuffle / random_reshuffle')
@click.option('--grid-n', default='8,16,32', show_default=True, help='下界网格的 n')
@click.option('--grid-k', default='8,16,32', show_default=True, help='下界网格的 k')
@click.option('--n', 'n', default=6, show_default=True, type=int, help='上界实例的 n')
@click.option('--k', 'k', default=64, show_default=True, type=int, help='上界实例的 k')
@click.option('--G', 'G', default=None, type=float, help='梯度界 [下界 6.0，上界 1.0]')
@click.option('--lambda', 'lam', default=1.0, show_default=True, type=float, help='强凸参数 λ')
@click.option('--L', 'L', default=1.0, show_default=True, type=float, help='上界实例的曲率上界')
@click.option('--seeds', default=20, show_default=True, type=int, help='上界检查的随机实例个数')
@click.option('--seed', default=0, show_default=True, type=int, help='第一个实例的种子')
@click.option('--trials', default=10_000, show_default=True, type=int, help='n > 8 时的蒙特卡洛试验数')
@click.option('--eta-points', default=200, show_default=True, type=int, help='步长网格点数')
@click.option('--output', default=None, help='输出目录')
def bounds(kind: str, scheme: Optional[str], grid_n: str, grid_k: str, n: int, k: int, G: Optional[float],
           lam: float, L: float, seeds: int, seed: int, trials: int, eta_points: int,
           output: Optional[str]) -> int:
    """验证下界公式或上界定理"""
    try:
        scheme = SamplingScheme.parse(scheme or 'single_shuffle')
    except ValueError as e:
        raise ConfigError('scheme', str(e)) from None

    if kind == 'lower':
        G = 6.0 if G is None else G
        grid = list(itertools.product(_int_list(grid_n, 'grid-n'), _int_list(grid_k, 'grid-k')))
        print_separator(f"下界验证: {scheme.value}")
        report = verify_lower_bound(scheme, grid, G, lam, eta_points=eta_points)
        params = {'kind': kind, 'scheme': scheme.value, 'grid': grid, 'G': G, 'lambda': lam,
                  'eta_points': eta_points}
    else:
        G = 1.0 if G is None else G
        if scheme not in (SamplingScheme.SINGLE_SHUFFLE, SamplingScheme.RANDOM_RESHUFFLE):
            raise ConfigError('scheme', "上界定理只针对 single_shuffle 与 random_reshuffle")
        which = 'single' if scheme is SamplingScheme.SINGLE_SHUFFLE else 'reshuffle'
        print_separator(f"上界验证: {scheme.value}，{seeds} 个随机实例")
        report = merge_reports([verify_upper_bound(which, n, k, lam, L, G, trials=trials, seed=s)
                                for s in range(seed, seed + seeds)])
        params = {'kind': kind, 'scheme': scheme.value, 'n': n, 'k': k, 'G': G, 'lambda': lam, 'L': L,
                  'seeds': seeds, 'seed': seed, 'trials': trials}

    frame = report.frame()
    print_dataframe(frame, "界的比值")
    print(f"比值范围: [{report.min_ratio:.6g}, {report.max_ratio:.6g}]")
    for k_value, variation in report.extra.get('n_variation', {}).items():
        print(f"   k={k_value}: 误差随 n 的相对极差 {variation:.2%}（上限 {N_VARIATION_LIMIT:.0%}）")
    print(f"结论: {'通过' if report.verdict else '未通过'}")

    save_results({f"bounds_{kind}_{scheme.value}": frame}, output or default_output_dir(),
                 config_digest(params), seed)
    return 0 if report.verdict else 1


@cli.command()
@click.option('--config', 'config_path', default=None, help='配置文件，使用其中的 [table] 节')
@click.option('--schemes', default=None, help='参与的方案，逗号分隔 [全部四种]')
@click.option('--wr-trials', default=None, type=int, help='有放回采样的蒙特卡洛试验数 [10000]')
@click.option('--seed', default=None, type=int, help='蒙特卡洛种子 [0]')
@click.option('--workers', default=None, type=int, help='进程数 [1]')
@click.option('--eta-points', default=None, type=int, help='步长网格点数 [200]')
@click.option('--output', default=None, help='输出目录')
@click.option('--dry-run', is_flag=True, help='只打印解析后的参数与摘要，不运行')
def table(config_path: Optional[str], schemes: Optional[str], wr_trials: Optional[int], seed: Optional[int],
          workers: Optional[int], eta_points: Optional[int], output: Optional[str], dry_run: bool) -> int:
    """复现收敛速率表"""
    config = load_config(config_path, {
        'table.schemes': schemes,
        'table.wr_trials': wr_trials,
        'table.seed': seed,
        'table.workers': workers,
        'table.eta_points': eta_points,
        'output.directory': output,
    })
    if dry_run:
        print(config.echo())
        return 0

    print_separator("收敛速率表")
    analyzer = ComprehensiveRateAnalyzer(config.output_dir)
    result = analyzer.reproduce_rate_table(config)
    analyzer.print_analysis_summary(result)

    outputs = {'rate_table': result['rate_table']}
    sweeps = [m['sweep'] for m in result['measurements'] if 'sweep' in m]
    if sweeps:
        outputs['rate_table_sweeps'] = pd.concat(sweeps, ignore_index=True)
    save_results(outputs, config.output_dir, config.digest, config.params['table']['seed'])
    return 0 if result['summary']['all_passed'] else 1


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    """
    命令行入口，返回退出码

    Args:
        argv (Optional[Sequence[str]]): 参数列表，缺省为 sys.argv[1:]

    Returns:
        int: 0 成功，1 检查未通过或写入失败，2 用法错误
    """
    args = list(sys.argv[1:] if argv is None else argv)
    if not args:
        ctx = click.Context(cli, info_name='main.py')
        click.echo(ctx.get_usage(), err=True)
        click.echo("缺少子命令，使用 -h 查看帮助", err=True)
        return 2
    try:
        rv = cli.main(args=args, prog_name='main.py', standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        return 1
    except ConfigError as e:
        click.echo(f"配置错误 [{e.key}]: {e}", err=True)
        return 2
    except HypothesisError as e:
        click.echo(f"定理前提不满足: {e}", err=True)
        return 2
    except ValueError as e:
        click.echo(f"参数错误: {e}", err=True)
        return 2
    except OSError as e:
        click.echo(f"写入结果失败: {e}", err=True)
        return 1
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":
    sys.exit(run_cli())
