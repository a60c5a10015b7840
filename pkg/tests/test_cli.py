"""CLI driver: run, validate, compare, verify."""

from __future__ import annotations

import pytest
from click.testing import CliRunner

from chainshare.canonical import canonical_dumps
from chainshare.cli import main
from chainshare.engine import result_to_tree, run_sharing
from chainshare.ledger import Ledger
from generators import chain_transactions


@pytest.fixture()
def runner():
    return CliRunner()


class TestRun:
    def test_mini_table(self, runner, mini_path):
        result = runner.invoke(main, ["run", str(mini_path)])
        assert result.exit_code == 0, result.output
        assert "1342.50" in result.output
        assert "457.50" in result.output
        assert "1800.00" in result.output

    def test_bad_quota_exit_1(self, runner, badquota_path):
        result = runner.invoke(main, ["run", str(badquota_path)])
        assert result.exit_code == 1
        assert "QUOTA_SUM" in result.output

    def test_missing_file_exit_2(self, runner):
        result = runner.invoke(main, ["run", "does-not-exist.json"])
        assert result.exit_code == 2

    def test_malformed_file_exit_2(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{nope")
        result = runner.invoke(main, ["run", str(bad)])
        assert result.exit_code == 2

    def test_json_output_is_canonical_result(self, runner, mini_path, mini_chain, tmp_path):
        out = tmp_path / "result.json"
        result = runner.invoke(main, ["run", str(mini_path), "--json", str(out)])
        assert result.exit_code == 0
        expected = canonical_dumps(result_to_tree(run_sharing(mini_chain))) + "\n"
        assert out.read_text() == expected

    def test_scheme_override(self, runner, mini_path):
        result = runner.invoke(main, ["run", str(mini_path), "--scheme", "RS"])
        assert result.exit_code == 0
        assert "1350.00" in result.output
        assert "450.00" in result.output

    def test_exact_mode_prints_rationals(self, runner, mini_path):
        result = runner.invoke(main, ["run", str(mini_path), "--exact"])
        assert result.exit_code == 0
        assert "2685/2" in result.output

    def test_loss_marked(self, runner, tmp_path, mini_path):
        import json as jsonlib

        doc = jsonlib.loads(mini_path.read_text())
        doc["serviceLevel"]["itServices"] = [{"serviceName": "big", "cost": 99999}]
        path = tmp_path / "loss.json"
        path.write_text(jsonlib.dumps(doc))
        result = runner.invoke(main, ["run", str(path)])
        assert result.exit_code == 0
        assert "LOSS" in result.output


class TestValidate:
    def test_valid(self, runner, listing_path):
        result = runner.invoke(main, ["validate", str(listing_path)])
        assert result.exit_code == 0
        assert "valid" in result.output

    def test_invalid(self, runner, badquota_path):
        result = runner.invoke(main, ["validate", str(badquota_path)])
        assert result.exit_code == 1
        assert "QUOTA_SUM" in result.output


class TestCompare:
    def test_mini_columns(self, runner, mini_path):
        result = runner.invoke(main, ["compare", str(mini_path)])
        assert result.exit_code == 0, result.output
        assert "RS/SHARED" in result.output
        assert "PS/SHARED" in result.output
        assert "PLATFORM_MEMBER" not in result.output  # no platform quota configured
        assert "1350.00" in result.output and "1342.50" in result.output
        assert "yes" in result.output.splitlines()[-1]

    def test_platform_column_present_when_quota_set(self, runner, tmp_path, mini_path):
        import json as jsonlib

        doc = jsonlib.loads(mini_path.read_text())
        doc["levels"][0]["resources"][0]["g"] = 0.8
        doc["sharingOptions"] = {
            "scheme": "PS",
            "costPolicy": "PLATFORM_MEMBER",
            "platformQuota": 0.2,
        }
        path = tmp_path / "platform.json"
        path.write_text(jsonlib.dumps(doc))
        result = runner.invoke(main, ["compare", str(path)])
        assert result.exit_code == 0, result.output
        assert "PS/PLATFORM_MEMBER" in result.output
        assert "SHARED" not in result.output  # quota sum only valid with the platform member

    def test_delta_section(self, runner, mini_path):
        result = runner.invoke(main, ["compare", str(mini_path)])
        assert "deltas against" in result.output


class TestVerify:
    def _write_log(self, tmp_path, chain):
        path = tmp_path / "ledger.log"
        ledger = Ledger(path)
        for tx in chain_transactions(chain):
            ledger.append(tx)
        return path

    def test_pristine_log(self, runner, tmp_path, mini_chain):
        path = self._write_log(tmp_path, mini_chain)
        result = runner.invoke(main, ["verify", str(path)])
        assert result.exit_code == 0
        assert "ok" in result.output

    def test_tampered_log(self, runner, tmp_path, mini_chain):
        path = self._write_log(tmp_path, mini_chain)
        data = bytearray(path.read_bytes())
        data[len(data) // 2] ^= 0x01
        path.write_bytes(bytes(data))
        result = runner.invoke(main, ["verify", str(path)])
        assert result.exit_code == 1
        assert "corrupt" in result.output

    def test_empty_file_is_valid(self, runner, tmp_path):
        path = tmp_path / "empty.log"
        path.write_bytes(b"")
        result = runner.invoke(main, ["verify", str(path)])
        assert result.exit_code == 0

    def test_missing_file_exit_2(self, runner):
        result = runner.invoke(main, ["verify", "missing.log"])
        assert result.exit_code == 2
