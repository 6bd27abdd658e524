import numpy as np
import pytest

from nearscat import formats
from nearscat.cli import main


@pytest.fixture()
def small_config(tmp_path):
    path = tmp_path / "scenario.txt"
    path.write_text(
        "side = exterior\n"
        "bc = soft\n"
        "shape = circle\n"
        "wavenumbers = 3.0\n"
        "delta = 0.05\n"
        "seed = 7\n"
        "grid_nx = 30\n"
        "grid_ny = 30\n"
        "forward_nodes = 256\n"
        "receiver_count = 64\n"
    )
    return path


def test_simulate_noise_reconstruct_chain(tmp_path, small_config):
    data = tmp_path / "data"
    assert main(["simulate", "-c", str(small_config), "-o", str(data)]) == 0
    clean = data / "ring_k3.csv"
    assert clean.exists()
    ring, _ = formats.read_ring_csv(clean)
    assert ring.noise_level == 0.0

    noisy = data / "ring_k3_noisy.csv"
    assert main(["noise", "-i", str(clean), "-o", str(noisy),
                 "--delta", "0.05", "--seed", "7"]) == 0
    nring, meta = formats.read_ring_csv(noisy)
    assert nring.noise_level == 0.05
    assert np.all(np.abs(nring.samples - ring.samples)
                  <= 0.05 * np.abs(ring.samples) * (1 + 1e-15))

    recon = tmp_path / "recon"
    assert main(["reconstruct", "-r", str(noisy), "-o", str(recon),
                 "--nx", "30", "--ny", "30"]) == 0
    img = formats.read_grid_csv(recon / "indicator_k3.csv")
    assert img.state == "normalized"
    assert (recon / "indicator_k3.pgm").exists()


def test_pipeline_command_matches_library(tmp_path, small_config, capsys):
    out = tmp_path / "run"
    assert main(["pipeline", "-c", str(small_config), "-o", str(out)]) == 0
    captured = capsys.readouterr().out
    assert "N=3" in captured
    assert (out / "manifest.txt").exists()


def test_flag_overrides_config(tmp_path, small_config):
    out = tmp_path / "run"
    assert main(["pipeline", "-c", str(small_config), "-o", str(out),
                 "--seed", "9", "--delta", "0.02"]) == 0
    text = (out / "config.txt").read_text()
    assert "seed = 9" in text
    assert "delta = 0.02" in text


def test_render_command(tmp_path, small_config):
    out = tmp_path / "run"
    main(["pipeline", "-c", str(small_config), "-o", str(out)])
    pgm = tmp_path / "img.pgm"
    assert main(["render", "-i", str(out / "indicator_k3.csv"), "-o", str(pgm),
                 "--scale", "linear"]) == 0
    assert formats.read_pgm(pgm).shape == (30, 30)


def test_rates_command(tmp_path, capsys):
    out = tmp_path / "rates.txt"
    assert main(["rates", "--side", "interior", "--seeds", "0", "-o", str(out)]) == 0
    assert "fitted exponent" in out.read_text()


def test_oracle_check_command(capsys):
    assert main(["oracle-check", "--k", "3", "--nodes", "256"]) == 0
    assert "worst" in capsys.readouterr().out
