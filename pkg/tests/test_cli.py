import numpy as np
import pytest

from radargest.pipeline.cli import main


def synth_args(out, seed=0):
    return ["synth", "--per-class", "6", "--dims", "24x24", "--snr-db", "20", "--seed", str(seed), "--out", str(out)]


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    assert main(synth_args(root / "ds")) == 0
    assert main(["train", "--data", str(root / "ds"), "--epochs", "3", "--out", str(root / "run")]) == 0
    return root


def test_synth_writes_dataset(trained, capsys):
    assert (trained / "ds" / "manifest.json").exists()
    assert (trained / "ds" / "samples.bin").stat().st_size == 24 * 2 * 24 * 24 * 4


def test_train_outputs(trained):
    run = trained / "run"
    for name in ("metrics.csv", "confusion.csv", "checkpoint.gmc", "learning_curves.png"):
        assert (run / name).exists(), name
    assert (run / "learning_curves.png").read_bytes()[:4] == b"\x89PNG"


def test_eval_reports_confusion(trained, capsys):
    capsys.readouterr()
    rc = main(["eval", "--data", str(trained / "ds"), "--checkpoint", str(trained / "run" / "checkpoint.gmc"), "--out", str(trained / "ev")])
    out = capsys.readouterr().out
    assert rc == 0
    lines = out.strip().split("\n")
    assert lines[0] == "true\\pred,circle,square,tick,cross"
    counts = np.array([[int(v) for v in line.split(",")[1:]] for line in lines[1:5]])
    assert counts.sum() == 4  # round(6 * 0.8) = 5 train, 1 test per class
    assert (trained / "ev" / "confusion.png").exists()


def test_inspect_exports(trained, capsys):
    rc = main(["inspect", "--data", str(trained / "ds"), "--index", "0", "7", "--format", "csv", "--out", str(trained / "heat")])
    assert rc == 0
    assert (trained / "heat" / "sample00007_rx2.csv").exists()
    assert (trained / "heat" / "sample00000.png").exists()
    assert main(["inspect", "--data", str(trained / "ds"), "--index", "999", "--out", str(trained / "heat")]) == 2


def test_sweep_table(tmp_path, capsys):
    rc = main(["sweep", "--axis", "scale", "--values", "0.2", "--seeds", "1", "--per-class", "3",
               "--dims", "16x16", "--epochs", "2", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert rc == 0
    assert out.startswith("value,epochs_mean,epochs_std,accuracy_mean,accuracy_std,n_seeds\n")
    assert (tmp_path / "sweep_scale.png").exists()


def test_exit_codes(tmp_path, capsys):
    assert main(["synth", "--per-class", "0", "--out", str(tmp_path / "x")]) == 2
    assert main(["synth", "--per-class", "2", "--distances", "0.01", "--out", str(tmp_path / "x")]) == 2
    assert main(["train", "--data", str(tmp_path / "none"), "--out", str(tmp_path / "r")]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["synth", "--dims", "64by64", "--out", str(tmp_path / "x")])
    assert exc.value.code == 2


def test_synth_train_is_deterministic(tmp_path):
    for k in ("a", "b"):
        assert main(synth_args(tmp_path / k / "ds", seed=9)) == 0
        assert main(["train", "--data", str(tmp_path / k / "ds"), "--epochs", "2", "--seed", "9", "--out", str(tmp_path / k / "run")]) == 0
    for rel in ("ds/samples.bin", "ds/manifest.json", "run/metrics.csv"):
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()
