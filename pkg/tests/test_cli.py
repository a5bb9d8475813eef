import json

import pytest
import yaml

from hartree_wkb.cli import main


@pytest.fixture
def small_config(tmp_path):
    with open("configs/scenario_a_alpha1.yaml") as fh:
        data = yaml.safe_load(fh)
    data.update(epsilons=[0.25, 0.125, 0.0625], snapshots=3, output_dir=str(tmp_path / "out"))
    path = tmp_path / "small.yaml"
    path.write_text(yaml.safe_dump(data))
    return path


class TestCli:
    def test_run(self, small_config, capsys):
        assert main(["run", "--config", str(small_config), "--epsilon", "0.125"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["epsilon"] == 0.125 and out["sup_error"] > 0

    def test_sweep(self, small_config, tmp_path, capsys):
        code = main(["sweep", "--config", str(small_config)])
        text = capsys.readouterr().out
        assert code == 0, text
        assert "beta_hat" in text
        assert (tmp_path / "out" / "records.csv").exists()

    @pytest.mark.parametrize("suite", ["kernel", "wkb", "wiener"])
    def test_check(self, small_config, suite, capsys):
        assert main(["check", "--config", str(small_config), "--suite", suite, "-n", "20"]) == 0
        assert "FAIL" not in capsys.readouterr().out

    def test_check_fails_for_constant_kernel(self, small_config, capsys):
        data = yaml.safe_load(small_config.read_text())
        data["kernel"] = {"family": "constant", "value": 1.0}
        small_config.write_text(yaml.safe_dump(data))
        assert main(["check", "--config", str(small_config), "--suite", "kernel", "-n", "5"]) == 1

    def test_off_lattice_epsilon(self, small_config, capsys):
        assert main(["run", "--config", str(small_config), "--epsilon", "0.3"]) == 2
        assert "error" in capsys.readouterr().err

    def test_missing_file(self, capsys):
        assert main(["run", "--config", "missing.yaml", "--epsilon", "0.1"]) == 2

    def test_usage(self):
        with pytest.raises(SystemExit):
            main([])
