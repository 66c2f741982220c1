"""Tests for the command-line interface."""

import json

import pytest
import yaml

from sepfrag.cli import EXIT_FALSE, EXIT_OK, EXIT_UNKNOWN, EXIT_USAGE, cli, run
from sepfrag.fragments import FragmentId, membership
from sepfrag.parser import parse_formula

EVAL_SENTENCES = "vocab P/1 R/2; exists x. P(x)\n\nvocab P/1 R/2; forall x. P(x)\n"


def blocks(output):
    """Split block output into (header, body lines) pairs."""
    result = []
    for block in output.strip().split('\n\n'):
        lines = block.splitlines()
        result.append((lines[0], lines[1:]))
    return result


class TestClassify:
    """Test the classify command."""

    def test_text_output(self, runner, data_file):
        """One block per section, headed by file and line."""
        path = data_file('sbsr.fol')
        result = runner.invoke(cli, ['classify', str(path)])
        assert result.exit_code == EXIT_OK
        (first, first_lines), (second, second_lines) = blocks(result.output)
        assert first == f"# {path}:1"
        assert second == f"# {path}:4"
        assert any(line.startswith('SBSR true') for line in first_lines)
        assert any(line.startswith('SF false') for line in first_lines)
        assert any(line.startswith('SF true') for line in second_lines)

    def test_json_output(self, runner, data_file):
        """--json prints one object per section."""
        result = runner.invoke(cli, ['--json', 'classify', str(data_file('sbsr.fol'))])
        assert result.exit_code == EXIT_OK
        data = json.loads(result.output)
        assert [entry['line'] for entry in data] == [1, 4]
        assert data[0]['results']

    def test_parse_error_reports_position(self, runner, write_file):
        """Diagnostics carry file, line and column."""
        path = write_file('bad.fol', "forall x. P(x)\n\nforall x. P(x) &\n")
        result = runner.invoke(cli, ['classify', str(path)])
        assert result.exit_code == EXIT_USAGE
        assert f"{path}:3:" in result.output


class TestTranslate:
    """Test the translate command."""

    def test_translates_into_bsr(self, runner, data_file):
        """Every printed sentence is BSR."""
        result = runner.invoke(cli, ['translate', '--target', 'bsr', str(data_file('sbsr.fol'))])
        assert result.exit_code == EXIT_OK
        printed = blocks(result.output)
        assert len(printed) == 2
        for _, lines in printed:
            assert lines[0].startswith('vocab ')
            assert membership(parse_formula(lines[0]), FragmentId.BSR).verdict

    def test_outside_source_fragment(self, runner, data_file):
        """A sentence outside SF and SBSR is reported and exits 1."""
        path = data_file('not_separated.fol')
        result = runner.invoke(cli, ['translate', '--target', 'bsr', str(path)])
        assert result.exit_code == EXIT_FALSE
        assert f"{path}:1: not in SF or SBSR" in result.output

    def test_budget_exceeded(self, runner, data_file):
        """A translation over budget exits 2."""
        result = runner.invoke(cli, ['--max-formula-len', '5', 'translate', '--target', 'bsr',
                                     str(data_file('sbsr.fol'))])
        assert result.exit_code == EXIT_UNKNOWN
        assert 'steps' in result.output

    def test_trace(self, runner, data_file):
        """--trace prints the translation steps."""
        result = runner.invoke(cli, ['--trace', 'translate', '--target', 'bsr',
                                     str(data_file('sbsr.fol'))])
        assert result.exit_code == EXIT_OK
        assert 'prenex' in result.output


class TestSat:
    """Test the sat command."""

    def test_decided_through_bsr(self, runner, data_file):
        """SBSR and SF sentences name their route."""
        result = runner.invoke(cli, ['sat', str(data_file('sbsr.fol'))])
        assert result.exit_code == EXIT_OK
        assert 'SAT bound=' in result.output
        assert 'method=SBSR->BSR' in result.output
        assert 'method=SF->BSR' in result.output

    def test_unsat(self, runner, write_file):
        """UNSAT exits 1."""
        path = write_file('unsat.fol', "(forall x. P(x)) & exists y. ~P(y)\n")
        result = runner.invoke(cli, ['sat', str(path)])
        assert result.exit_code == EXIT_FALSE
        assert 'UNSAT' in result.output

    def test_model_is_printed(self, runner, write_file):
        """A SAT verdict is followed by its model."""
        path = write_file('loop.fol', "exists x. forall y. R(x, y)\n")
        result = runner.invoke(cli, ['sat', str(path)])
        assert result.exit_code == EXIT_OK
        _, lines = blocks(result.output)[0]
        assert lines == ["SAT bound=1 method=BSR", "domain 1; R = {(0,0)}"]


class TestEquiv:
    """Test the equiv command."""

    def test_equivalent_pairs(self, runner, data_file):
        """Sections are compared pairwise."""
        result = runner.invoke(cli, ['equiv', str(data_file('demorgan_left.fol')),
                                     str(data_file('demorgan_right.fol')), '--max-size', '2'])
        assert result.exit_code == EXIT_OK
        first, second = blocks(result.output)
        assert first[1] == ["equivalent checked=6 exhaustive=1,2 seed=0"]
        assert second[1] == ["equivalent checked=20 exhaustive=1,2 seed=0"]

    def test_counterexample(self, runner, write_file):
        """A distinguishing structure exits 1."""
        left = write_file('left.fol', "forall x. P(x)\n")
        right = write_file('right.fol', "exists x. P(x)\n")
        result = runner.invoke(cli, ['equiv', str(left), str(right)])
        assert result.exit_code == EXIT_FALSE
        assert 'not-equivalent' in result.output
        assert 'domain 2' in result.output

    def test_section_count_mismatch(self, runner, data_file):
        """Both files need the same number of sentences."""
        result = runner.invoke(cli, ['equiv', str(data_file('demorgan_left.fol')),
                                     str(data_file('not_separated.fol'))])
        assert result.exit_code == EXIT_USAGE


class TestEval:
    """Test the eval command."""

    def test_true_and_false(self, runner, write_file, data_file):
        """Any false sentence makes the exit code 1."""
        path = write_file('eval.fol', EVAL_SENTENCES)
        result = runner.invoke(cli, ['eval', '--model', str(data_file('two_elements.model')),
                                     str(path)])
        assert result.exit_code == EXIT_FALSE
        assert [lines for _, lines in blocks(result.output)] == [['true'], ['false']]

    def test_all_true(self, runner, write_file, data_file):
        """Only true sentences exit 0."""
        path = write_file('eval.fol', "vocab P/1 R/2; forall x. exists y. R(x, y)\n")
        result = runner.invoke(cli, ['eval', '--model', str(data_file('two_elements.model')),
                                     str(path)])
        assert result.exit_code == EXIT_OK

    def test_undeclared_predicate(self, runner, write_file, data_file):
        """The structure may only use symbols of the sentence's vocabulary."""
        path = write_file('eval.fol', "exists x. P(x)\n")
        result = runner.invoke(cli, ['eval', '--model', str(data_file('two_elements.model')),
                                     str(path)])
        assert result.exit_code == EXIT_USAGE


class TestWitness:
    """Test the witness command."""

    def test_sentence_and_model(self, runner):
        """--model appends the structure."""
        result = runner.invoke(cli, ['witness', '--family', 'sf_bsr', '--n', '1', '--model'])
        assert result.exit_code == EXIT_OK
        sentence, structure = result.output.strip().split('\n\n')
        assert sentence.startswith('vocab P1/1')
        assert structure.startswith('domain 12;')

    def test_cap_exceeded(self, runner):
        """A model over the cap is reported with its size and exits 2."""
        result = runner.invoke(cli, ['witness', '--family', 'sgks_gks', '--n', '1', '--model'])
        assert result.exit_code == EXIT_UNKNOWN
        assert 'needs at least 80233256 elements' in result.output

    def test_below_minimum(self, runner):
        """n below the family minimum is a usage error."""
        result = runner.invoke(cli, ['witness', '--family', 'sgf_lgf', '--n', '1'])
        assert result.exit_code == EXIT_USAGE

    def test_json(self, runner):
        """--json carries family, n and the sentence."""
        result = runner.invoke(cli, ['--json', 'witness', '--family', 'mfo_bsr', '--n', '2'])
        data = json.loads(result.output)
        assert data['family'] == 'mfo_bsr'
        assert data['n'] == 2
        assert 'model' not in data


class TestBench:
    """Test the bench command."""

    def test_csv(self, runner):
        """CSV with the versioned header and one row per n."""
        result = runner.invoke(cli, ['bench', '--family', 'mfo_bsr', '--n-range', '1..2'])
        assert result.exit_code == EXIT_OK
        lines = result.output.splitlines()
        assert lines[0] == "# sepfrag gap table v1"
        assert len(lines) == 4
        assert lines[2].startswith('mfo_bsr,1,')
        assert lines[3].startswith('mfo_bsr,2,')

    def test_json(self, runner):
        """Global --json wins over the format default."""
        result = runner.invoke(cli, ['--json', 'bench', '--family', 'mfo_bsr', '--n-range', '1'])
        data = json.loads(result.output)
        assert len(data) == 1
        assert data[0]['status'] == 'ok'

    def test_format_from_config_file(self, runner, write_file):
        """The config file's format applies to bench."""
        config = write_file('run.yaml', yaml.dump({'output': {'format': 'text'}}))
        result = runner.invoke(cli, ['--config', str(config), 'bench', '--family', 'mfo_bsr',
                                     '--n-range', '1'])
        assert result.exit_code == EXIT_OK
        assert result.output.split()[:2] == ['family', 'n']
        assert 'status' in result.output.splitlines()[0]

    def test_worker_pool(self, runner):
        """--jobs keeps rows in order."""
        result = runner.invoke(cli, ['--jobs', '2', 'bench', '--family', 'mfo_bsr',
                                     '--n-range', '1..2'])
        assert result.exit_code == EXIT_OK
        assert [line.split(',')[1] for line in result.output.splitlines()[2:]] == ['1', '2']

    def test_rows_below_minimum(self, runner):
        """Rows below the family minimum are kept with empty lengths."""
        result = runner.invoke(cli, ['bench', '--family', 'sgf_lgf', '--n-range', '1..2',
                                     '--format', 'text'])
        assert result.exit_code == EXIT_OK
        assert result.output.count('n-below-minimum') == 2

    @pytest.mark.parametrize("bad", ['3..1', '0..2', 'a..b'])
    def test_bad_range(self, runner, bad):
        """Malformed ranges are usage errors."""
        result = runner.invoke(cli, ['bench', '--family', 'mfo_bsr', '--n-range', bad])
        assert result.exit_code != EXIT_OK
        assert '--n-range' in result.output


class TestCorpus:
    """Test the corpus command."""

    def test_reproducible(self, runner):
        """Equal seeds give equal corpora of members."""
        args = ['corpus', '--fragment', 'SF', '--count', '3', '--seed', '1']
        first = runner.invoke(cli, args)
        second = runner.invoke(cli, args)
        assert first.exit_code == EXIT_OK
        assert first.output == second.output
        printed = blocks(first.output)
        assert len(printed) == 3
        for header, lines in printed:
            assert header.startswith('# SF')
            assert membership(parse_formula(lines[0]), FragmentId.SF).verdict

    def test_seed_from_environment(self, runner):
        """SEPFRAG_SEED stands in for --seed."""
        args = ['corpus', '--fragment', 'BSR', '--count', '2']
        from_env = runner.invoke(cli, args, env={'SEPFRAG_SEED': '4'})
        from_flag = runner.invoke(cli, args + ['--seed', '4'])
        assert from_env.output == from_flag.output

    def test_witness_variants(self, runner):
        """--family emits tagged derived sentences."""
        result = runner.invoke(cli, ['corpus', '--family', 'sgf_lgf', '--count', '2'])
        assert result.exit_code == EXIT_OK
        assert [header for header, _ in blocks(result.output)] == ['# SLGF [derived]'] * 2

    @pytest.mark.parametrize("args", [
        ['corpus'],
        ['corpus', '--fragment', 'SF', '--family', 'sf_bsr'],
    ])
    def test_exactly_one_source(self, runner, args):
        """One of --fragment and --family is required."""
        assert runner.invoke(cli, args).exit_code == EXIT_USAGE


class TestConfigCommand:
    """Test config resolution through the command line."""

    def test_defaults(self, runner):
        """Without a file the defaults show."""
        result = runner.invoke(cli, ['config', '--show'])
        data = json.loads(result.output)
        assert data['oracle']['seed'] == 0
        assert data['output']['format'] == 'csv'

    def test_precedence(self, runner, write_file):
        """Config file < SEPFRAG_SEED < command line."""
        config = write_file('run.yaml', yaml.dump({'oracle': {'seed': 3, 'max_size': 2}}))
        from_file = json.loads(runner.invoke(cli, ['--config', str(config), 'config']).output)
        assert from_file['oracle']['seed'] == 3
        assert from_file['oracle']['max_size'] == 2

        from_env = runner.invoke(cli, ['--config', str(config), 'config'],
                                 env={'SEPFRAG_SEED': '9'})
        assert json.loads(from_env.output)['oracle']['seed'] == 9

        flag = runner.invoke(cli, ['--config', str(config), '--max-terms', '64', 'config'])
        assert json.loads(flag.output)['budget']['max_terms'] == 64

    def test_invalid_file_value(self, runner, write_file):
        """Invalid values in the file are usage errors."""
        config = write_file('run.yaml', yaml.dump({'oracle': {'max_size': 0}}))
        assert runner.invoke(cli, ['--config', str(config), 'config']).exit_code == EXIT_USAGE

    def test_unsupported_file(self, runner, write_file):
        """Only JSON and YAML files load."""
        config = write_file('run.txt', "seed: 1\n")
        assert runner.invoke(cli, ['--config', str(config), 'config']).exit_code == EXIT_USAGE

    def test_save(self, runner, tmp_path):
        """Saved files keep only non-default settings unless asked."""
        from sepfrag.config_loader import load_config

        path = tmp_path / 'saved.yaml'
        result = runner.invoke(cli, ['--max-terms', '512', 'config', '--save', str(path)])
        assert result.exit_code == EXIT_OK
        assert load_config(path) == {'max_terms': 512}


class TestRun:
    """Test the exit-code wrapper."""

    def test_version(self):
        """--version succeeds."""
        assert run(['--version']) == EXIT_OK

    def test_usage_error_is_three(self):
        """click usage errors come back as 3, not 2."""
        assert run(['bench', '--family', 'mfo_bsr', '--n-range', '3..1']) == EXIT_USAGE
        assert run(['no-such-command']) == EXIT_USAGE

    def test_verdict_codes(self, write_file, data_file):
        """Command exit codes pass through."""
        path = write_file('eval.fol', EVAL_SENTENCES)
        model = data_file('two_elements.model')
        assert run(['eval', '--model', str(model), str(path)]) == EXIT_FALSE
        assert run(['witness', '--family', 'sgks_gks', '--n', '1', '--model']) == EXIT_UNKNOWN
