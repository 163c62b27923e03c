"""Command-line front end."""

import io
import json

import pytest

from src.cli import EXIT_DSL, EXIT_EVALUATION, EXIT_OK, EXIT_ORACLE_MISMATCH, main
from src.config import MODELS_DIR
from src.prob import condense


def model(stem: str) -> str:
    return str(MODELS_DIR / f'{stem}.prob')


class TestRun:
    def test_single_query_prints_bare_result(self, capsys):
        assert main(['run', model('ex1')]) == EXIT_OK
        assert capsys.readouterr().out == '{0: 1/4, 1: 7/12, 2: 1/6}\n'

    def test_query_option(self, capsys):
        assert main(['run', model('rsg_measure'), '--query', 'rain given grass_wet']) == EXIT_OK
        assert capsys.readouterr().out.strip() == '891/2491'

    def test_float_format(self, capsys):
        argv = ['run', model('rsg_measure'), '--query', 'rain given grass_wet',
                '--format', 'float', '--digits', '4']
        assert main(argv) == EXIT_OK
        assert capsys.readouterr().out.strip() == '0.3577'

    def test_full_boolean_pmf(self, capsys):
        argv = ['run', model('rsg_measure'), '--query', 'rain given grass_wet', '--full']
        assert main(argv) == EXIT_OK
        out = capsys.readouterr().out.strip()
        assert out.startswith('{')
        assert 'true: 891/2491' in out

    def test_many_queries_are_labelled(self, capsys):
        assert main(['run', model('dice')]) == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 6
        assert all(' => ' in line for line in lines)

    def test_json(self, capsys):
        assert main(['run', model('ex1'), '--format', 'json']) == EXIT_OK
        document = json.loads(capsys.readouterr().out)
        (query,) = document['queries']
        assert query['source'] == 's'
        assert query['pmf'][0] == {'value': '0', 'prob_fraction': '1/4', 'prob_float': 0.25}

    def test_json_with_failed_query(self, capsys):
        assert main(['run', model('bad'), '--format', 'json']) == EXIT_EVALUATION
        (query,) = json.loads(capsys.readouterr().out)['queries']
        assert query['pmf'] is None
        assert query['error']

    def test_evaluation_error(self, capsys):
        assert main(['run', model('bad')]) == EXIT_EVALUATION
        captured = capsys.readouterr()
        assert captured.out == ''
        assert '❌' in captured.err

    def test_syntax_error(self, tmp_path, capsys):
        path = tmp_path / 'broken.prob'
        path.write_text('query y\n', encoding='utf-8')
        assert main(['run', str(path)]) == EXIT_DSL
        assert f'{path}:1:7: error:' in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert main(['run', str(tmp_path / 'nowhere.prob')]) == EXIT_DSL
        assert 'Cannot read model' in capsys.readouterr().err

    def test_digits_must_be_positive(self):
        with pytest.raises(SystemExit):
            main(['run', model('ex1'), '--digits', '0'])

    def test_stdin(self, monkeypatch, capsys):
        monkeypatch.setattr('sys.stdin', io.StringIO('let b1 = {0: 1/3, 1: 2/3}\nquery b1 + b1\n'))
        assert main(['run', '-']) == EXIT_OK
        assert capsys.readouterr().out.strip() == '{0: 1/3, 2: 2/3}'

    def test_empty_model(self, monkeypatch, capsys):
        monkeypatch.setattr('sys.stdin', io.StringIO(''))
        assert main(['run', '-']) == EXIT_OK
        assert capsys.readouterr().out == ''

    def test_skip_binding_flag(self, capsys):
        assert main(['run', model('ex3'), '--skip-binding']) == EXIT_OK
        assert capsys.readouterr().out.strip() == '{0: 2/5, 1: 3/5}'


class TestOracle:
    def test_agreement(self, capsys):
        assert main(['run', model('ex1'), '--oracle', '--verbose']) == EXIT_OK
        assert 'oracle agrees' in capsys.readouterr().err

    def test_mismatch(self, monkeypatch, capsys):
        monkeypatch.setattr('src.compiler.oracle_marg', lambda root, cap=None: condense({7: 1}))
        assert main(['run', model('ex1'), '--oracle']) == EXIT_ORACLE_MISMATCH
        assert 'oracle mismatch' in capsys.readouterr().err


class TestExport:
    def test_reports_are_written(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setattr('src.report.RESULTS_DIR', tmp_path)
        assert main(['run', model('ex3'), '--export']) == EXIT_OK
        written = sorted(p.name for p in tmp_path.iterdir())
        assert len(written) == 2
        assert written[0].startswith('ex3_results_') and written[0].endswith('.csv')
        assert written[1].startswith('ex3_results_detailed_') and written[1].endswith('.json')
        assert 'Exported' in capsys.readouterr().err


class TestCheck:
    @pytest.mark.parametrize('stem, summary', [
        ('rsg_measure', '5 definitions, 15 queries'),
        ('rsg', '3 definitions, 0 queries'),
    ])
    def test_summary(self, stem, summary, capsys):
        assert main(['check', model(stem)]) == EXIT_OK
        assert capsys.readouterr().out.strip() == summary

    def test_check_does_not_evaluate(self, capsys):
        assert main(['check', model('bad')]) == EXIT_OK


class TestTrace:
    def test_conditioning_steps(self, capsys):
        assert main(['trace', model('ex3')]) == EXIT_OK
        out = capsys.readouterr().out
        for step in ('#1', '#2', '#3', '#4'):
            assert step in out
        assert out.strip().endswith('result: {0: 2/5, 1: 3/5}')

    def test_needs_exactly_one_query(self, capsys):
        assert main(['trace', model('dice')]) == EXIT_DSL
        assert 'exactly one query' in capsys.readouterr().err

    def test_query_option_selects_one(self, capsys):
        assert main(['trace', model('dice'), '--query', 'd1 + d1']) == EXIT_OK
        assert 'result:' in capsys.readouterr().out

    def test_failing_query(self, capsys):
        assert main(['trace', model('bad')]) == EXIT_EVALUATION
        assert '❌' in capsys.readouterr().err


class TestCorpusScript:
    def test_model_summary(self, models_dir):
        from scripts.check_corpus import check_model

        summary = check_model(models_dir / 'dice.prob')
        assert summary == {'queries': 6, 'errors': 0, 'mismatches': 0, 'skipped': 0,
                           'dsl_error': None}

    def test_expected_failures_pass(self, tmp_path, models_dir, capsys):
        from scripts.check_corpus import check_corpus

        for stem in ('ex1', 'bad'):
            (tmp_path / f'{stem}.prob').write_text(
                (models_dir / f'{stem}.prob').read_text(encoding='utf-8'), encoding='utf-8')
        assert check_corpus(tmp_path)
        assert 'CORPUS OK' in capsys.readouterr().out

    def test_broken_model_fails(self, tmp_path, capsys):
        from scripts.check_corpus import check_corpus

        (tmp_path / 'broken.prob').write_text('query y\n', encoding='utf-8')
        assert not check_corpus(tmp_path)
        assert 'broken.prob:1:7' in capsys.readouterr().out
