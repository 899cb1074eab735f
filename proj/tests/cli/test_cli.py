import hashlib
import json
import os
import shutil
import subprocess
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

CLI = os.environ.get("EVMAG_CLI", str(Path(__file__).resolve().parents[2] / "build" / "evmag"))


def run(*args, check=True):
    p = subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)
    if check and p.returncode != 0:
        raise AssertionError(f"exit {p.returncode}\n{p.stdout}\n{p.stderr}")
    return p


def save16(path, img):
    arr = np.round(np.clip(img, 0, 1) * 65535).astype(np.uint16)
    Image.fromarray(arr).save(path)


def bar_frames(directory, n=33, fps=960.0, amp=0.25, freq=32.0, size=64):
    # bright bar with exact area coverage at the sub-pixel edges
    directory.mkdir(parents=True, exist_ok=True)
    xs = np.arange(size)
    for k in range(n):
        d = amp * np.sin(2 * np.pi * freq * k / fps)
        lo, hi = 16 + d, 48 + d
        cover = np.clip(np.minimum(xs + 1, hi) - np.maximum(xs, lo), 0, 1)
        row = 0.1 + 0.75 * cover
        img = np.tile(row, (size, 1))
        img[:8, :] = 0.1
        img[-8:, :] = 0.1
        save16(directory / f"{k:04d}.png", img)


@pytest.fixture(scope="module")
def bar(tmp_path_factory):
    root = tmp_path_factory.mktemp("bar")
    bar_frames(root / "frames")
    return root


def test_simulate_identical_frames_gives_no_events(tmp_path):
    frames = tmp_path / "f"
    frames.mkdir()
    img = np.full((16, 20), 0.4)
    save16(frames / "0000.png", img)
    save16(frames / "0001.png", img)
    out = json.loads(run("simulate", frames, "-o", tmp_path / "e.evmg").stdout)
    assert out["events"] == 0
    assert (tmp_path / "e.evmg").stat().st_size == 16


def test_simulate_missing_dir_is_usage_error(tmp_path):
    p = run("simulate", tmp_path / "nope", "-o", tmp_path / "e.evmg", check=False)
    assert p.returncode == 2
    assert "nope" in p.stderr


def test_bad_config_names_field(tmp_path, bar):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"sim": {"c": -1}}))
    p = run("simulate", bar / "frames", "-o", tmp_path / "e.evmg", "--config", cfg, check=False)
    assert p.returncode == 2
    assert "sim.c" in p.stderr
    p = run("simulate", bar / "frames", "-o", tmp_path / "e.evmg", "--bogus", check=False)
    assert p.returncode == 2


def test_flags_override_config(tmp_path, bar):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"sim": {"c": 0.3}, "simulate": {"fps": 500}}))
    out = json.loads(run("simulate", bar / "frames", "-o", tmp_path / "e.csv", "--config", cfg, "--c", 0.2).stdout)
    assert out["config"]["sim"]["c"] == 0.2
    assert out["config"]["simulate"]["fps"] == 500
    assert out["events"] > 0
    assert (tmp_path / "e.csv").read_text().startswith("t_us,x,y,p\n")


def test_dataset_is_deterministic(tmp_path):
    args = ["--n-scenes", 2, "--seed", 3, "--width", 48, "--height", 40, "--supersample", 4]
    run("dataset", "-o", tmp_path / "a", *args)
    run("dataset", "-o", tmp_path / "b", *args)
    ha = hashlib.sha256((tmp_path / "a" / "manifest.json").read_bytes()).hexdigest()
    hb = hashlib.sha256((tmp_path / "b" / "manifest.json").read_bytes()).hexdigest()
    assert ha == hb
    for scene in sorted((tmp_path / "a").glob("scene_*")):
        meta = json.loads((scene / "scene.json").read_text())
        assert 30 <= meta["alpha_mag"] <= 80
        assert len(list((scene / "small").glob("*.png"))) == 30
        assert len(list((scene / "magnified").glob("*.png"))) == 30


def test_magnify_identity_reencodes_i0(tmp_path):
    frames = tmp_path / "f"
    frames.mkdir()
    rng = np.random.default_rng(0)
    img = (rng.random((20, 24)) * 255).astype(np.uint8)
    Image.fromarray(img).save(frames / "0000.png")
    Image.fromarray(img).save(frames / "0001.png")
    run("simulate", frames, "-o", tmp_path / "e.evmg")
    out = tmp_path / "out"
    run("magnify", "--i0", frames / "0000.png", "--i1", frames / "0001.png", "--events", tmp_path / "e.evmg",
        "-o", out, "--alpha", 0, "--n-frames", 5, "--t1-us", 1042)
    res = json.loads((out / "result.json").read_text())
    assert res["warnings"]
    assert res["config"]["filter"] is None
    assert res["config"]["solver"]["window"] == 5
    for k in range(5):
        got = np.asarray(Image.open(out / "frames" / f"{k:04d}.png"))
        assert np.array_equal(got, img)


def test_magnify_extent_mismatch(tmp_path):
    a = tmp_path / "a.png"
    b = tmp_path / "b.png"
    Image.fromarray(np.zeros((10, 12), np.uint8)).save(a)
    Image.fromarray(np.zeros((10, 14), np.uint8)).save(b)
    Path(tmp_path / "e.evmg").write_bytes(b"")
    p = run("magnify", "--i0", a, "--i1", b, "--events", tmp_path / "e.evmg", "-o", tmp_path / "o", check=False)
    assert p.returncode == 2
    assert "12x10" in p.stderr and "14x10" in p.stderr


def test_fork_pipeline_and_spectrum(tmp_path, bar):
    frames = bar / "frames"
    run("simulate", frames, "-o", tmp_path / "e.evmg", "--fps", 960)
    out = tmp_path / "mag"
    run("magnify", "--i0", frames / "0000.png", "--i1", frames / "0032.png", "--events", tmp_path / "e.evmg",
        "-o", out, "--t1-us", 33333, "--f-lo", 25, "--f-hi", 40, "--alpha", 50, "--n-frames", 96, "--window", 31)
    res = json.loads((out / "result.json").read_text())
    assert len(res["frames"]) == 96
    assert res["config"]["filter"]["fps"] == pytest.approx(96e6 / 33333)

    csv = tmp_path / "spec.csv"
    rep = json.loads(run("eval", out / "frames", "--probe", "rect:2,16,28,32", "--csv", csv,
                         "--dump-probe", tmp_path / "probe.csv").stdout)
    f = rep["frequency"]
    assert abs(f["dominant_hz"] - 32.0) <= f["resolution_hz"]
    rows = np.loadtxt(csv, delimiter=",", skiprows=1)
    assert rows[1:, 0][np.argmax(rows[1:, 1])] == pytest.approx(f["dominant_hz"])
    assert (tmp_path / "probe.csv").read_text().startswith("frame,mean\n")

    spec = json.loads(run("spectrum", out / "frames", "--probe", "rect:2,16,28,32").stdout)
    assert spec["dominant_hz"] == f["dominant_hz"]


def test_eval_identical_dirs(tmp_path, bar):
    rep = json.loads(run("eval", bar / "frames", "--gt", bar / "frames").stdout)
    assert rep["mean_ssim"] == 1.0
    assert rep["mean_psnr_db"] == rep["psnr_cap_db"]
    assert "frequency" not in rep


def test_eval_against_dataset_ground_truth(tmp_path):
    run("dataset", "-o", tmp_path / "d", "--n-scenes", 1, "--seed", 5, "--width", 64, "--height", 64)
    scene = tmp_path / "d" / "scene_0000"
    meta = json.loads((scene / "scene.json").read_text())
    small = sorted((scene / "small").glob("*.png"))
    out = tmp_path / "mag"
    run("magnify", "--i0", small[0], "--i1", small[-1], "--events", scene / "events.evmg", "-o", out,
        "--t0-us", meta["t_start_us"], "--t1-us", meta["t_end_us"], "--alpha", meta["alpha_mag"], "--n-frames", 29)
    # outputs are at frames 1..29 of the scene
    gt = tmp_path / "gt"
    gt.mkdir()
    for k, f in enumerate(sorted((scene / "magnified").glob("*.png"))[1:]):
        shutil.copy(f, gt / f"{k:04d}.png")
    rep = json.loads(run("eval", out / "frames", "--gt", gt).stdout)
    assert len(rep["per_frame"]) == 29
    assert all(np.isfinite(r["psnr_db"]) and r["psnr_db"] < 100 for r in rep["per_frame"])
    assert 0 < rep["mean_ssim"] <= 1


def test_magnify_per_channel_keeps_colour(tmp_path):
    rng = np.random.default_rng(1)
    rgb = (rng.random((18, 22, 3)) * 255).astype(np.uint8)
    a = tmp_path / "a.png"
    Image.fromarray(rgb).save(a)
    Path(tmp_path / "e.csv").write_text("t_us,x,y,p\n")
    out = tmp_path / "o"
    run("magnify", "--i0", a, "--i1", a, "--events", tmp_path / "e.csv", "-o", out, "--alpha", 3,
        "--n-frames", 2, "--t1-us", 100, "--per-channel")
    got = np.asarray(Image.open(out / "frames" / "0001.png"))
    assert got.shape == (18, 22, 3)
    assert np.array_equal(got, rgb)
    assert json.loads((out / "result.json").read_text())["channels"] == 3
