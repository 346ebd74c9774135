"""Tests for the yamabe command line: output documents and exit codes.

Target: yamabe/cli.py
"""

import csv
import json
import math
from unittest.mock import patch

import pytest

from yamabe.cli import EXIT_CODES, build_parser
from yamabe.discrete import dumps_spec
from yamabe.functional import InequalityReport
from yamabe.invariants import sphere_product_einstein_hilbert, sphere_yamabe
from yamabe.minimize import MinimizeConfig, estimate_mu
from yamabe.suites import negative_curvature_fixture

pytestmark = pytest.mark.unit

LAMBDA_PRINTED = {6: 54.779, 7: 74.504, 8: 92.242, 9: 109.426}


def rows(run):
    return run.json()['rows']


# ---------------------------------------------------------------------------
# Parser and entry point
# ---------------------------------------------------------------------------

class TestEntryPoint:
    def test_exit_codes_documented(self):
        assert sorted(EXIT_CODES) == [0, 1, 2, 3, 4]

    def test_version(self, run_cli):
        assert run_cli('--version').code == 0

    def test_missing_command(self, run_cli):
        assert run_cli().code == 2

    def test_bad_format(self, run_cli):
        result = run_cli('constants', '3', '--format', 'xml')
        assert result.code == 2
        assert result.stdout == ''

    def test_non_integer_argument(self, run_cli):
        assert run_cli('constants', 'three').code == 2

    def test_unexpected_error_exits_one(self, run_cli):
        with patch('yamabe.cli.constants_table', side_effect=RuntimeError('boom')):
            result = run_cli('constants', '3')
        assert result.code == 1
        assert "Unexpected error: boom" in result.stderr

    def test_parser_subcommands(self):
        parser = build_parser()
        args = parser.parse_args(['verify', 'young', '10', '7'])
        assert (args.suite, args.n_cases, args.rng_seed) == ('young', 10, 7)
        args = parser.parse_args(['estimate', 'sphere', '3', '64', '--sweep', '0.5,1,2'])
        assert args.sweep == [0.5, 1.0, 2.0]


class TestOutput:
    def test_csv_metadata_comments(self, run_cli):
        result = run_cli('constants', '3')
        assert result.code == 0
        comments = [line for line in result.stdout.splitlines() if line.startswith('#')]
        assert "# tool: yamabe" in comments
        assert "# argv: constants 3" in comments
        assert "# rng_seed: 0" in comments
        assert any(line.startswith("# timestamp: ") for line in comments)

    def test_json_metadata(self, run_cli):
        document = run_cli('constants', '3', '--format', 'json', '--seed', '9').json()
        assert document['metadata']['tool'] == 'yamabe'
        assert document['metadata']['argv'] == ['constants', '3', '--format', 'json', '--seed', '9']
        assert document['metadata']['rng_seed'] == 9
        assert document['metadata']['command'] == 'constants'

    def test_out_file(self, run_cli, tmp_path):
        target = tmp_path / 'constants.csv'
        result = run_cli('constants', '3', '4', '--out', str(target))
        assert result.code == 0
        assert result.stdout == ''
        text = target.read_text(encoding='utf-8')
        assert text.startswith('# tool: yamabe')
        assert len([line for line in text.splitlines() if not line.startswith('#')]) == 3

    def test_out_unwritable(self, run_cli, tmp_path):
        result = run_cli('constants', '3', '--out', str(tmp_path / 'missing' / 'x.csv'))
        assert result.code == 2
        assert "Cannot write output" in result.stderr


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------

class TestConstants:
    def test_m3_row(self, run_cli):
        (row,) = rows(run_cli('constants', '3', '--format', 'json'))
        assert row['m'] == 3
        assert row['a_m'] == 8.0
        assert row['p_m'] == 6.0
        assert row['omega_m'] == pytest.approx(2 * math.pi ** 2, rel=1e-14)
        assert row['mu_sphere'] == pytest.approx(43.823, abs=1e-3)

    def test_m6_row(self, run_cli):
        (row,) = rows(run_cli('constants', '6', '--format', 'json'))
        assert (row['a_m'], row['p_m']) == (5.0, 3.0)

    def test_empty_list_is_header_only(self, run_cli):
        result = run_cli('constants')
        assert result.code == 0
        assert result.csv_lines() == ['m,a_m,p_m,omega_m,mu_sphere,log_Sigma_sphere,Sigma_sphere']

    def test_rejects_small_dimension(self, run_cli):
        result = run_cli('constants', '2')
        assert result.code == 2
        assert "dimension-too-small" in result.stderr

    def test_csv_and_json_agree(self, run_cli):
        (json_row,) = rows(run_cli('constants', '5', '--format', 'json'))
        (csv_row,) = list(csv.DictReader(run_cli('constants', '5').csv_lines()))
        for key in ('omega_m', 'mu_sphere', 'log_Sigma_sphere', 'Sigma_sphere'):
            assert float(csv_row[key]) == json_row[key]


class TestEpsilon:
    def test_seven_by_seven(self, run_cli):
        table = rows(run_cli('epsilon', '7', '7', '--format', 'json'))
        assert len(table) == 25
        values = {(r['v'], r['w']): r['epsilon'] for r in table}
        for (v, w), eps in values.items():
            assert values[(w, v)] == eps

    def test_three_three(self, run_cli):
        (row,) = rows(run_cli('epsilon', '3', '3', '--format', 'json'))
        assert row['epsilon'] == pytest.approx(0.625, abs=1e-12)
        assert row['epsilon_4dp'] == 0.625

    @pytest.mark.parametrize("bounds", [('2', '5'), ('5', '2')])
    def test_small_bound(self, run_cli, bounds):
        assert run_cli('epsilon', *bounds).code == 2


class TestLambda:
    def test_printed_values(self, run_cli):
        table = rows(run_cli('lambda', '6', '7', '8', '9', '--format', 'json'))
        assert [r['m'] for r in table] == [6, 7, 8, 9]
        for row in table:
            assert row['Lambda_m'] == pytest.approx(LAMBDA_PRINTED[row['m']], abs=1e-3)

    def test_missing_k_is_null(self, run_cli):
        table = rows(run_cli('lambda', '6', '9', '--format', 'json'))
        assert table[0]['Lambda_m_k2'] == table[0]['Lambda_m']
        assert table[0]['Lambda_m_k5'] is None
        assert table[1]['Lambda_m_k5'] is not None

    def test_rejects_m5(self, run_cli):
        assert run_cli('lambda', '5').code == 2


class TestStable:
    def test_converges(self, run_cli):
        table = rows(run_cli('stable', '3', '1', '500', '--format', 'json'))
        assert table[0]['i'] == 3
        assert table[-1]['dimension'] == 503
        assert table[-1]['rel_error'] < 0.01
        assert table[-1]['rel_error'] < table[0]['rel_error']

    def test_v1_target(self, run_cli):
        table = rows(run_cli('stable', '1', '1', '10', '--format', 'json'))
        assert table[0]['target'] == pytest.approx(4.26987, abs=1e-5)

    def test_large_v_is_not_an_error(self, run_cli):
        result = run_cli('stable', '500', '1', '3', '--format', 'json')
        assert result.code == 0
        (row,) = rows(result)
        assert row['target'] is None
        assert row['log_target'] == pytest.approx(500 * math.log(math.pi * math.e / 2), rel=1e-14)
        assert math.isfinite(row['rel_error'])

    def test_v0_rejected(self, run_cli):
        assert run_cli('stable', '0', '1', '10').code == 2


# ---------------------------------------------------------------------------
# estimate
# ---------------------------------------------------------------------------

def write_spec(path, manifold):
    path.write_text(dumps_spec(manifold), encoding='utf-8')
    return str(path)


class TestEstimate:
    def test_sphere(self, run_cli):
        result = run_cli('estimate', 'sphere', '3', '2000', '--restarts', '1', '--format', 'json')
        assert result.code == 0
        document = result.json()
        assert document['vertices'] == 2000
        assert document['result']['value'] == pytest.approx(43.823, rel=0.01)
        assert document['result']['converged'] is True
        assert 'sandwich' not in document

    def test_product_sandwich(self, run_cli):
        result = run_cli('estimate', 'product', '(sphere 3 32)', '(sphere 3 32)', '--restarts', '1',
                         '--format', 'json')
        assert result.code == 0
        bracket = result.json()['sandwich']
        assert bracket['verdict_lower'] is True
        assert bracket['verdict_upper'] is True
        assert bracket['lower'] == pytest.approx(1.25 * sphere_yamabe(3))
        assert bracket['upper_reference'] == pytest.approx(sphere_product_einstein_hilbert(3, 3, 1.0))
        assert bracket['lower'] <= bracket['estimate'] <= bracket['upper_sphere']

    def test_history_flag(self, run_cli, path_manifold):
        document = run_cli('estimate', 'file', '-', '--restarts', '1', '--history', '--format', 'json',
                           stdin=dumps_spec(path_manifold)).json()
        history = document['result']['history']
        assert len(history) == document['result']['iterations'] + 1
        assert history[-1] == document['result']['value']

    def test_stdin_spec(self, run_cli, path_manifold):
        result = run_cli('estimate', 'file', '-', '--restarts', '1', '--format', 'json',
                         stdin=dumps_spec(path_manifold))
        assert result.code == 0
        document = result.json()
        assert document['geometry'] == 'file -'
        expected = estimate_mu(path_manifold, MinimizeConfig(restarts=1)).value
        assert document['result']['value'] == expected

    def test_negative_mass_names_index(self, run_cli, tmp_path):
        spec = tmp_path / 'bad.json'
        spec.write_text(json.dumps({
            'dim': 3,
            'masses': [1.0, -1.0],
            'edges': [[0, 1, 1.0]],
            'scalar_curvature': [6.0, 6.0],
        }), encoding='utf-8')
        result = run_cli('estimate', 'file', str(spec))
        assert result.code == 2
        assert "masses[1]" in result.stderr

    def test_missing_file(self, run_cli, tmp_path):
        assert run_cli('estimate', 'file', str(tmp_path / 'nope.json')).code == 2

    def test_bad_descriptor(self, run_cli):
        result = run_cli('estimate', 'cube', '3')
        assert result.code == 2
        assert "unknown descriptor" in result.stderr

    def test_assumption_violated(self, run_cli, tmp_path):
        mv, mw = negative_curvature_fixture()
        result = run_cli('estimate', 'product', 'file', write_spec(tmp_path / 'v.json', mv),
                         'file', write_spec(tmp_path / 'w.json', mw), '--mu-ref', f"10,{sphere_yamabe(3)}")
        assert result.code == 3
        assert "curvature assumption fails" in result.stderr

    def test_mu_ref_needs_product(self, run_cli):
        assert run_cli('estimate', 'sphere', '3', '16', '--mu-ref', '1,2').code == 2

    def test_strict_non_convergence(self, run_cli, path_manifold):
        argv = ('estimate', 'file', '-', '--restarts', '1', '--max-iters', '1', '--tol', '1e-15')
        spec = dumps_spec(path_manifold)
        assert run_cli(*argv, stdin=spec).code == 0
        strict = run_cli(*argv, '--strict', stdin=spec)
        assert strict.code == 4
        assert "did not converge" in strict.stderr

    def test_sweep(self, run_cli):
        result = run_cli('estimate', 'product', '(sphere 3 16)', '(sphere 3 16)', '--sweep', '0.5,1,2',
                         '--restarts', '1', '--format', 'json')
        assert result.code == 0
        sweep = result.json()['sweep']
        assert [p['lam'] for p in sweep['points']] == [0.5, 1.0, 2.0]
        assert sweep['argmin_lambda'] == 1.0
        assert sweep['naive_within_slack'] is True
        assert sweep['verdict_lower'] is True
        for point in sweep['points']:
            assert point['upper_reference'] == pytest.approx(sphere_product_einstein_hilbert(3, 3, point['lam']))

    def test_sweep_needs_product(self, run_cli):
        assert run_cli('estimate', 'sphere', '3', '16', '--sweep', '1').code == 2

    def test_csv_is_key_value(self, run_cli):
        result = run_cli('estimate', 'product', '(sphere 3 16)', '(sphere 3 16)', '--restarts', '1')
        assert result.code == 0
        lines = result.csv_lines()
        assert lines[0] == 'key,value'
        assert any(line.startswith('sandwich.verdict_lower,') for line in lines)


# ---------------------------------------------------------------------------
# verify and health
# ---------------------------------------------------------------------------

class TestVerify:
    def test_holder(self, run_cli):
        result = run_cli('verify', 'holder', '1000', '0', '--format', 'json')
        assert result.code == 0
        (row,) = rows(result)
        assert (row['cases'], row['passed'], row['failed']) == (1000, 1000, 0)
        assert row['worst_slack'] > -1e-9
        assert result.json()['metadata']['rng_seed'] == 0

    def test_young(self, run_cli):
        result = run_cli('verify', 'young', '10000', '7', '--format', 'json')
        assert result.code == 0
        (row,) = rows(result)
        assert row['passed'] == 10000
        assert result.json()['metadata']['rng_seed'] == 7

    def test_assumption_fixture_expected_false(self, run_cli):
        result = run_cli('verify', 'assumption', '100', '--format', 'json')
        assert result.code == 0
        (row,) = rows(result)
        assert row['fixtures'] == "negative-curvature: holds=false EXPECTED-false"
        assert row['ok'] is True

    def test_all(self, run_cli):
        result = run_cli('verify', 'all', '20', '--format', 'json')
        assert result.code == 0
        assert [r['suite'] for r in rows(result)] == ['holder', 'gradient', 'young', 'assumption', 'chain',
                                                     'gradcheck']

    def test_failure_exits_one(self, run_cli):
        with patch('yamabe.suites.check_young') as check:
            check.return_value = InequalityReport.compare(2.0, 1.0)
            result = run_cli('verify', 'young', '5')
        assert result.code == 1
        assert "5 of 5 checks failed" in result.stderr

    def test_csv_and_json_agree(self, run_cli):
        (json_row,) = rows(run_cli('verify', 'gradient', '50', '3', '--format', 'json'))
        (csv_row,) = list(csv.DictReader(run_cli('verify', 'gradient', '50', '3').csv_lines()))
        assert int(csv_row['passed']) == json_row['passed']
        assert float(csv_row['worst_slack']) == json_row['worst_slack']

    def test_zero_cases(self, run_cli):
        assert run_cli('verify', 'holder', '0').code == 2

    def test_unknown_suite(self, run_cli):
        assert run_cli('verify', 'nonsense').code == 2


class TestHealth:
    def test_healthy(self, run_cli):
        result = run_cli('health', '--format', 'json')
        assert result.code == 0
        assert result.json()['healthy'] is True

    def test_unhealthy(self, run_cli):
        with patch('yamabe.cli.check_health', return_value=(False, "[yamabe] pandas not installed.")):
            result = run_cli('health')
        assert result.code == 1
        assert "pandas not installed" in result.stderr
