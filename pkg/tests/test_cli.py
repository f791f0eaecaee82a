import json
import os

import pandas as pd

from main import run_cli
from run_config import MANIFEST_NAME


def test_no_arguments_is_usage_error(capsys):
    assert run_cli([]) == 2
    assert 'Usage' in capsys.readouterr().err


def test_unknown_flag_is_usage_error():
    assert run_cli(['simulate', '--bogus']) == 2


def test_help_exits_cleanly():
    assert run_cli(['--help']) == 0


def test_simulate_incremental_cyclic_split(capsys):
    code = run_cli(['simulate', '--scheme', 'incremental', '--n', '2', '--k', '2', '--eta', '0.1', '--G', '2'])
    assert code == 0
    assert 'x1=0.82, x2=0.676' in capsys.readouterr().out


def test_simulate_odd_n_is_parameter_error():
    assert run_cli(['simulate', '--scheme', 'random_reshuffle', '--n', '3', '--k', '2', '--eta', '0.1']) == 2


def test_simulate_writes_trajectory(tmp_path):
    out = tmp_path / "sim"
    code = run_cli(['simulate', '--scheme', 'single_shuffle', '--n', '4', '--k', '3', '--eta', '0.1',
                    '--trials', '200', '--output', str(out)])
    assert code == 0
    trajectory = pd.read_csv(out / "trajectory.csv")
    assert trajectory['epoch'].tolist() == [1, 2, 3]
    moments = pd.read_csv(out / "moments.csv")
    assert moments['trial_or_exact'].tolist() == ['exact', 'mean']


def test_verify_lemmas_small(tmp_path, capsys):
    assert run_cli(['verify-lemmas', '--max-n', '4', '--output', str(tmp_path)]) == 0
    out = capsys.readouterr().out
    # 带符号前缀期望的两种写法并列输出
    assert '差异: n=2, ηλ=0.01 时枚举 -0.005，另一写法 -0.015' in out
    frame = pd.read_csv(tmp_path / "lemma_checks.csv")
    assert frame['satisfied'].all()
    manifest = json.loads((tmp_path / MANIFEST_NAME).read_text(encoding='utf-8'))
    assert [f['name'] for f in manifest['files']] == ['lemma_checks.csv']


def test_sweep_dry_run(capsys, tmp_path):
    assert run_cli(['sweep', '--scheme', 'single_shuffle', '--n', '16', '--dry-run',
                    '--output', str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert 'digest = ' in out
    assert 'n = 16' in out
    assert not os.listdir(tmp_path)


def test_sweep_rejects_unknown_config_key(tmp_path):
    config = tmp_path / "run.ini"
    config.write_text("[problem]\nbogus = 1\n", encoding='utf-8')
    assert run_cli(['sweep', '--config', str(config), '--dry-run']) == 2


def test_sweep_then_fit_from_file(tmp_path):
    out = tmp_path / "sweep"
    assert run_cli(['sweep', '--scheme', 'single_shuffle', '--n', '4', '--values', '4,8,16',
                    '--eta-points', '40', '--output', str(out)]) == 0
    csv = out / "sweep_single_shuffle.csv"
    assert csv.exists()

    fit_dir = tmp_path / "fit"
    assert run_cli(['fit', '--input', str(csv), '--target', '-2', '--tolerance', '10',
                    '--output', str(fit_dir)]) == 0
    fit = pd.read_csv(fit_dir / "fit.csv")
    assert fit['exponent'].iloc[0] < 0
    assert run_cli(['fit', '--input', str(csv), '--target', '5', '--tolerance', '0.1',
                    '--output', str(fit_dir)]) == 1


def test_bounds_upper(tmp_path):
    assert run_cli(['bounds', '--kind', 'upper', '--scheme', 'single_shuffle', '--seeds', '2',
                    '--output', str(tmp_path)]) == 0
    frame = pd.read_csv(tmp_path / "bounds_upper_single_shuffle.csv")
    assert len(frame) == 2
    assert (frame['ratio'] <= 1).all()


def test_bounds_hypothesis_violation_is_parameter_error(tmp_path):
    assert run_cli(['bounds', '--kind', 'upper', '--scheme', 'random_reshuffle', '--L', '100',
                    '--seeds', '1', '--output', str(tmp_path)]) == 2


def test_table_with_no_schemes(tmp_path):
    assert run_cli(['table', '--schemes', '', '--output', str(tmp_path)]) == 0
    assert (tmp_path / "rate_table.csv").exists()
    assert (tmp_path / MANIFEST_NAME).exists()
