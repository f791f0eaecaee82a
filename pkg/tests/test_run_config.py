import os

import pandas as pd
import pytest

from rate_experiments import BoundPoint, BoundReport, bound_verdict, frame_verdict
from run_config import (
    DEFAULT_OUTPUT_DIR,
    ENV_OUTPUT_DIR,
    MANIFEST_NAME,
    ConfigError,
    config_digest,
    load_config,
    read_results,
    write_results,
)
from sgd_engine import SamplingScheme


def _write(path, text):
    path.write_text(text, encoding='utf-8')
    return str(path)


def test_defaults():
    config = load_config()
    assert config.params['problem']['n'] == 8
    assert config.params['problem']['G'] == 6.0
    assert config.params['scheme']['name'] == ['random_reshuffle']
    assert config.params['grid']['values'] == [4, 8, 16, 32]
    assert config.output_dir == DEFAULT_OUTPUT_DIR
    assert len(config.params['table']['schemes']) == 4


def test_output_dir_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv(ENV_OUTPUT_DIR, str(tmp_path))
    assert load_config().output_dir == str(tmp_path)
    assert load_config(overrides={'output.directory': 'elsewhere'}).output_dir == 'elsewhere'


def test_file_values_and_overrides(tmp_path):
    path = _write(tmp_path / "run.ini", "[problem]\nn = 16\nG = 3\n\n[scheme]\nname = single_shuffle\n")
    config = load_config(path, {'problem.k': 32, 'problem.n': None})
    assert config.params['problem']['n'] == 16
    assert config.params['problem']['G'] == 3.0
    assert config.params['problem']['k'] == 32
    assert config.params['scheme']['name'] == ['single_shuffle']


def test_unknown_key_rejected(tmp_path):
    path = _write(tmp_path / "run.ini", "[problem]\nfoo = 1\n")
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert info.value.key == 'problem.foo'


def test_unknown_section_rejected(tmp_path):
    path = _write(tmp_path / "run.ini", "[plotting]\ndpi = 300\n")
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert info.value.key == 'plotting'


def test_odd_n_rejected_with_key():
    with pytest.raises(ConfigError) as info:
        load_config(overrides={'problem.n': 3})
    assert info.value.key == 'problem.n'


def test_odd_n_allowed_for_random_instance():
    config = load_config(overrides={'problem.n': 7, 'problem.instance_seed': 1, 'problem.L': 2.0,
                                    'estimator.kind': 'monte_carlo', 'grid.values': '4,8'})
    assert config.params['problem']['n'] == 7


@pytest.mark.parametrize("key, value", [
    ('problem.lambda', '0'),
    ('problem.L', '0.5'),
    ('grid.axis', 'epochs'),
    ('estimator.kind', 'bootstrap'),
    ('problem.construction', 'zigzag'),
    ('table.schemes', 'reshuffle,shuffled'),
    ('grid.refine', 'maybe'),
])
def test_invalid_values_name_their_key(key, value):
    with pytest.raises(ConfigError) as info:
        load_config(overrides={key: value})
    assert info.value.key == key


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config('/nonexistent/run.ini')


def test_digest_ignores_key_order(tmp_path):
    first = _write(tmp_path / "a.ini", "[problem]\nn = 16\nk = 8\n[grid]\naxis = n\nvalues = 4,8\n")
    second = _write(tmp_path / "b.ini", "[grid]\nvalues = 4,8\naxis = n\n[problem]\nk = 8\nn = 16\n")
    assert load_config(first).digest == load_config(second).digest
    assert load_config(first).digest != load_config().digest
    assert config_digest({'a': 1, 'b': 2}) == config_digest({'b': 2, 'a': 1})


def test_output_directory_not_in_digest():
    assert load_config(overrides={'output.directory': 'x'}).digest == load_config().digest


def test_sweep_specs_auto_construction():
    config = load_config(overrides={'scheme.name': 'incremental,single_shuffle'})
    specs = config.sweep_specs()
    assert [s.scheme for s in specs] == [SamplingScheme.INCREMENTAL, SamplingScheme.SINGLE_SHUFFLE]
    assert specs[0].label() == 'cyclic_split'
    assert specs[1].label() == 'signed_linear'


def test_refine_flag_reaches_sweep_specs():
    assert not any(s.refine for s in load_config().sweep_specs())
    assert all(s.refine for s in load_config(overrides={'grid.refine': 'yes'}).sweep_specs())


def test_echo_lists_digest():
    config = load_config()
    text = config.echo()
    assert '[problem]' in text
    assert f"digest = {config.digest}" in text


def _frame():
    return pd.DataFrame({'n': [8, 8, 8, 8], 'k': [4, 8, 16, 32],
                         'error_star': [0.1, 1.0 / 3.0, 2e-17, 1.2345678901234567]})


def test_write_results_layout(tmp_path):
    manifest = write_results({'sweep': _frame()}, str(tmp_path), 'abc', 7, timestamp='2024-01-01 00:00:00')
    lines = (tmp_path / "sweep.csv").read_text(encoding='utf-8').split('\n')
    assert lines[0] == 'n,k,error_star'
    assert len([line for line in lines if line]) == 5
    assert manifest.file_names() == ['sweep.csv']
    assert manifest.files[0]['rows'] == 4
    assert os.path.exists(tmp_path / MANIFEST_NAME)


def test_rerun_is_byte_identical(tmp_path):
    write_results({'sweep': _frame()}, str(tmp_path / "a"), 'abc', 7)
    write_results({'sweep': _frame()}, str(tmp_path / "b"), 'abc', 7)
    assert (tmp_path / "a" / "sweep.csv").read_bytes() == (tmp_path / "b" / "sweep.csv").read_bytes()


def test_read_results_round_trip(tmp_path):
    write_results({'sweep': _frame()}, str(tmp_path), 'abc', 7)
    manifest, frames = read_results(str(tmp_path))
    assert manifest.config_digest == 'abc'
    assert manifest.seed == 7
    assert frames['sweep']['error_star'].tolist() == _frame()['error_star'].tolist()


def test_bound_verdict_recomputed_from_file(tmp_path):
    points = [BoundPoint(n=8, k=k, eta=0.1, observed=r, bound=1.0, ratio=r) for k, r in ((8, 0.2), (16, 0.4))]
    report = BoundReport(kind='lower', scheme=SamplingScheme.SINGLE_SHUFFLE, points=points)
    write_results({'bounds': report.frame()}, str(tmp_path), 'abc', 0)
    _, frames = read_results(str(tmp_path))
    assert bound_verdict('lower', frames['bounds']['ratio']) == report.verdict
    assert frame_verdict(frames['bounds']) == report.verdict
    assert bool(frames['bounds']['verdict'].iloc[0]) == report.verdict


def test_incremental_verdict_recomputed_from_file(tmp_path):
    # 比值都在范围内，但 k=32 上误差随 n 变化 20%
    observed = {(4, 32): 1.2, (8, 32): 1.0, (4, 64): 0.5, (8, 64): 0.5}
    points = [BoundPoint(n=n, k=k, eta=0.1, observed=v, bound=1.0, ratio=v) for (n, k), v in observed.items()]
    report = BoundReport(kind='lower', scheme=SamplingScheme.INCREMENTAL, points=points)
    assert bound_verdict('lower', report.ratios)
    assert report.variations == pytest.approx({32: 0.2, 64: 0.0})
    assert not report.verdict
    write_results({'bounds': report.frame()}, str(tmp_path), 'abc', 0)
    _, frames = read_results(str(tmp_path))
    assert frame_verdict(frames['bounds']) is False
    assert not frames['bounds']['verdict'].any()
