import json
import math

import numpy as np
import pytest

from dmmsim.channel import ChannelParams, ebn0_from_esn0
from dmmsim.ldpc import LdpcCode, RepetitionCode, rep_combine
from dmmsim.modem import (
    Constellation,
    demap_inner_llr,
    demap_outer_llr,
    derotate,
    map_dmm,
    rotate_by_bits,
)
from dmmsim.simkit import (
    ConfigError,
    SystemConfig,
    build_manifest,
    config_to_dict,
    frame_stream,
    load_config,
    run_baseline_frame,
    run_bpsk_baseline,
    run_frame,
    run_genie_compare,
    run_sweep,
    write_genie_csv,
    write_manifest,
    write_sweep_csv,
)


def small_config(**overrides):
    inner = LdpcCode.random_regular(96, 6, 3, seed=5)
    outer = RepetitionCode(LdpcCode.random_regular(24, 6, 4, seed=8), rep_factor=4)
    kwargs = dict(
        inner=inner,
        outer=outer,
        esn0_grid_db=(-1.0,),
        max_iter=30,
        min_frame_errors=5,
        max_frames=64,
        seed=11,
        batch_frames=8,
    )
    kwargs.update(overrides)
    return SystemConfig(**kwargs)


def test_config_invariants():
    cfg = small_config()
    assert cfg.r1 == pytest.approx(0.5)
    assert cfg.r2 == pytest.approx(1 / 12)
    assert cfg.eta == pytest.approx(7 / 12)
    with pytest.raises(ConfigError):
        small_config(outer=RepetitionCode(LdpcCode.random_regular(24, 6, 4, seed=8), 3))
    with pytest.raises(ConfigError):
        small_config(outer_rebuild="guess")
    with pytest.raises(ConfigError):
        small_config(esn0_grid_db=())
    with pytest.raises(ConfigError):
        small_config(max_iter=0)


def test_noiseless_roundtrip():
    cfg = small_config(esn0_grid_db=(math.inf,))
    for fi in range(5):
        t = run_frame(cfg, fi)
        assert np.array_equal(t.c1_hat, t.c1)
        assert np.array_equal(t.c2_hat, t.c2)
        assert np.array_equal(t.beta_hat_bits, t.v2)
        assert np.array_equal(t.v2_hat, t.v2)
        assert t.converged_inner and t.converged_outer


def test_frame_trace_lengths_consistent():
    cfg = small_config()
    t = run_frame(cfg, 0, esn0_db=-1.0)
    assert t.c1.size == cfg.inner.k_info
    assert t.v1.size == cfg.inner.n_code
    assert t.c2.size == cfg.outer.k_info
    assert t.v2.size == cfg.outer.n_code
    assert t.symbols.shape == (cfg.inner.n_code, 2)
    assert t.received.shape == (cfg.inner.n_code, 2)
    assert t.llr_outer.size == cfg.outer.base.n_code
    assert t.llr_inner.size == cfg.inner.n_code


def test_genie_equivalence_llr_bit_identical():
    cfg = small_config(genie_beta=True)
    for fi in range(30):
        t = run_frame(cfg, fi, esn0_db=-2.0)
        b = run_baseline_frame(cfg, fi, esn0_db=-2.0)
        assert np.array_equal(t.llr_inner, b.llr_inner)
        assert np.array_equal(t.c1, b.c1)


def test_received_sequence_used_twice():
    # Both receiver stages must consume the stored received sequence:
    # recomputing each stage's input from trace.received reproduces the
    # recorded decoder inputs exactly.
    cfg = small_config()
    t = run_frame(cfg, 3, esn0_db=-1.0)
    s2d = ChannelParams.from_esn0_db(cfg.es, -1.0).sigma2_dim
    cst = Constellation(cfg.es)
    again_outer = rep_combine(cfg.outer, demap_outer_llr(t.received, cst, s2d))
    assert np.array_equal(again_outer, t.llr_outer)
    y1 = rotate_by_bits(t.received, t.beta_hat_bits, inverse=True)
    again_inner = demap_inner_llr(y1, cfg.es, s2d)
    assert np.array_equal(again_inner, t.llr_inner)


def test_symbols_follow_mapping():
    cfg = small_config(esn0_grid_db=(math.inf,))
    t = run_frame(cfg, 1)
    want = np.array([map_dmm(int(a), int(b), cfg.es) for a, b in zip(t.v1, t.v2)])
    assert np.array_equal(t.symbols, want)
    assert np.array_equal(t.received, t.symbols)  # noiseless


def test_seed_isolation_noise_independent_of_outer_stream():
    # Same master seed, different outer code: the noise and inner bits
    # must not change.
    cfg_a = small_config()
    cfg_b = small_config(outer=RepetitionCode(LdpcCode.random_regular(24, 6, 4, seed=99), 4))
    for fi in (0, 7):
        ta = run_frame(cfg_a, fi, esn0_db=-1.0)
        tb = run_frame(cfg_b, fi, esn0_db=-1.0)
        assert np.array_equal(ta.c1, tb.c1)
        # noise in the derotated frame = derotate(received) - bpsk(v1)
        na = rotate_by_bits(ta.received, ta.v2, inverse=True)
        nb = rotate_by_bits(tb.received, tb.v2, inverse=True)
        na[:, 0] -= 1.0 - 2.0 * ta.v1
        nb[:, 0] -= 1.0 - 2.0 * tb.v1
        assert np.array_equal(na, nb)


def test_wrong_beta_lands_on_imaginary_axis():
    # One outer bit error makes the derotated symbol land on the
    # imaginary axis, so the inner LLR for that symbol is exactly 0.
    es = 1.0
    y_true_beta0 = map_dmm(0, 0, es)  # (+1, 0)
    wrongly_derotated = derotate(y_true_beta0, math.pi / 2)
    assert np.array_equal(wrongly_derotated, [0.0, -1.0])
    assert demap_inner_llr(wrongly_derotated, es, 0.5) == 0.0
    y_true_beta1 = map_dmm(0, 1, es)  # (0, +1)
    not_derotated = derotate(y_true_beta1, 0.0)
    assert np.array_equal(not_derotated, [0.0, 1.0])
    assert demap_inner_llr(not_derotated, es, 0.5) == 0.0


def test_sweep_accounting_and_ebn0():
    cfg = small_config(esn0_grid_db=(-2.0, 2.0))
    res = run_sweep(cfg)
    assert res.eta == pytest.approx(7 / 12)
    for p in res.points:
        assert p.errs_inner <= p.bits_inner
        assert p.errs_outer <= p.bits_outer
        assert p.bits == p.bits_inner + p.bits_outer
        combined = (p.errs_inner + p.errs_outer) / p.bits
        assert p.ber_combined == combined
        assert p.fer == p.frame_errors / p.frames
        assert p.ebn0_db == ebn0_from_esn0(p.esn0_db, res.eta)
        assert p.frames >= 1


def test_sweep_duplicate_run_identical():
    cfg = small_config()
    assert run_sweep(cfg) == run_sweep(cfg)


def test_sweep_worker_count_invariant():
    cfg = small_config(max_frames=32)
    assert run_sweep(cfg, workers=1) == run_sweep(cfg, workers=2)


def test_sweep_stops_at_batch_boundary():
    # At very low SNR every frame errors, so counting stops at the first
    # batch boundary at or past min_frame_errors.
    cfg = small_config(esn0_grid_db=(-10.0,), min_frame_errors=5, batch_frames=4, max_frames=64)
    p = run_sweep(cfg).points[0]
    assert p.frames == 8
    assert p.frame_errors == 8


def test_sweep_zero_errors_reports_bit_budget():
    cfg = small_config(esn0_grid_db=(12.0,), max_frames=12, batch_frames=4)
    p = run_sweep(cfg).points[0]
    assert p.frames == 12
    assert p.frame_errors == 0
    assert p.ber_combined == 0.0
    assert p.bits == 12 * (cfg.inner.k_info + cfg.outer.k_info)


def test_baseline_matches_genie_inner_branch():
    cfg = small_config(genie_beta=True, esn0_grid_db=(-2.0,), max_frames=16, min_frame_errors=1000)
    base = run_bpsk_baseline(cfg)
    assert base.eta == pytest.approx(0.5)
    assert base.mode == "baseline"
    pb = base.points[0]
    # frame-by-frame: baseline decode equals the genie-derotated decode
    for fi in range(5):
        t = run_frame(cfg, fi, esn0_db=-2.0)
        b = run_baseline_frame(cfg, fi, esn0_db=-2.0)
        assert np.array_equal(t.c1_hat, b.c1_hat)
    assert pb.bits_outer == 0
    assert pb.ber_outer == 0.0
    assert pb.ebn0_db == ebn0_from_esn0(-2.0, 0.5)


def test_genie_compare_shares_frames_and_flags():
    cfg = small_config(esn0_grid_db=(-1.0, 6.0), max_frames=24, batch_frames=8)
    res = run_genie_compare(cfg)
    for gp in res.points:
        assert gp.affected.frames == gp.genie.frames
        assert gp.affected.bits_inner == gp.genie.bits_inner
        # outer stage is common to both branches
        assert gp.affected.errs_outer == gp.genie.errs_outer
        assert gp.gap_inner_ber == abs(gp.affected.ber_inner - gp.genie.ber_inner)
        assert gp.insignificant == (gp.gap_inner_ber <= gp.ci95_affected + gp.ci95_genie)
    # at 6 dB the outer stream is error-free, so the branches coincide
    high = res.points[1]
    assert high.affected == high.genie or high.gap_inner_ber == 0.0


def test_genie_compare_noiseless_coincide():
    cfg = small_config(esn0_grid_db=(math.inf,), max_frames=8, batch_frames=4)
    res = run_genie_compare(cfg)
    gp = res.points[0]
    assert gp.affected.errs_inner == 0
    assert gp.genie.errs_inner == 0
    assert gp.gap_inner_ber == 0.0
    assert gp.insignificant


def test_outer_rebuild_modes_run():
    for mode in ("reencode", "direct"):
        cfg = small_config(outer_rebuild=mode, esn0_grid_db=(math.inf,))
        t = run_frame(cfg, 0)
        assert np.array_equal(t.c1_hat, t.c1)
        assert np.array_equal(t.v2_hat, t.v2)


def test_frame_stream_domains_distinct():
    a = frame_stream(1, 0, 0)
    b = frame_stream(1, 0, 1)
    c = frame_stream(1, 1, 0)
    assert len({a.stream_id, b.stream_id, c.stream_id}) == 3


# ------------------------------------------------------------- persistence


def test_write_sweep_csv(tmp_path):
    cfg = small_config(esn0_grid_db=(-1.0, 3.0), max_frames=8, batch_frames=4)
    res = run_sweep(cfg)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_sweep_csv(res, p1)
    write_sweep_csv(res, p2)
    assert p1.read_bytes() == p2.read_bytes()
    lines = p1.read_text().splitlines()
    assert lines[0].startswith("esn0_db,ebn0_db,ber_inner,ber_outer,ber_combined,fer,frames,bits")
    assert len(lines) == 3
    first = lines[1].split(",")
    assert first[0] == "-1.0000"
    assert len(first) == len(lines[0].split(","))


def test_write_genie_csv(tmp_path):
    cfg = small_config(esn0_grid_db=(2.0,), max_frames=8, batch_frames=4)
    res = run_genie_compare(cfg)
    out = tmp_path / "genie.csv"
    write_genie_csv(res, out)
    lines = out.read_text().splitlines()
    assert lines[0].split(",")[0:3] == ["esn0_db", "ebn0_db", "ber_inner_affected"]
    assert len(lines) == 2


def test_manifest_contents(tmp_path):
    cfg = small_config()
    man = build_manifest(cfg, "unit-test", [tmp_path / "x.csv"])
    assert man["code_fingerprints"]["inner"] == cfg.inner.fingerprint()
    assert man["code_fingerprints"]["outer_base"] == cfg.outer.base.fingerprint()
    assert man["eta"] == pytest.approx(7 / 12)
    assert man["config"]["inner_code"]["kind"] == "random_regular"
    assert man["config"]["stop"] == {"min_frame_errors": 5, "max_frames": 64}
    out = tmp_path / "manifest.json"
    write_manifest(man, out)
    again = json.loads(out.read_text())
    assert again["seed"] == cfg.seed
    assert isinstance(again["version"], str) and again["version"]


# ------------------------------------------------------------- config file


GOOD_CONFIG = {
    "inner_code": {"n": 96, "row_degree": 6, "col_degree": 3, "seed": 5},
    "outer_code": {"base": {"n": 24, "row_degree": 6, "col_degree": 4, "seed": 8}, "rep_factor": 4},
    "es": 1.0,
    "esn0_grid_db": [-2.0, 0.0],
    "max_iter": 30,
    "stop": {"min_frame_errors": 5, "max_frames": 64},
    "seed": 11,
    "genie_beta": False,
    "outer_rebuild": "reencode",
    "batch_frames": 8,
}


def write_cfg(tmp_path, data):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(data))
    return p


def test_load_config_roundtrip(tmp_path):
    cfg = load_config(write_cfg(tmp_path, GOOD_CONFIG))
    assert cfg.inner.n_code == 96
    assert cfg.outer.rep_factor == 4
    assert cfg.esn0_grid_db == (-2.0, 0.0)
    assert cfg.max_iter == 30
    assert cfg.min_frame_errors == 5
    assert cfg.max_frames == 64
    assert cfg.seed == 11
    assert cfg.batch_frames == 8
    d = config_to_dict(cfg)
    assert d["inner_code"] == GOOD_CONFIG["inner_code"] | {"kind": "random_regular"}
    assert d["stop"] == GOOD_CONFIG["stop"]


def test_load_config_defaults(tmp_path):
    minimal = {
        "inner_code": GOOD_CONFIG["inner_code"],
        "outer_code": GOOD_CONFIG["outer_code"],
        "esn0_grid_db": [0.0],
    }
    cfg = load_config(write_cfg(tmp_path, minimal))
    assert cfg.max_iter == 50
    assert cfg.min_frame_errors == 50
    assert cfg.max_frames == 1_000_000
    assert cfg.outer_rebuild == "reencode"
    assert not cfg.genie_beta


def test_load_config_field_errors(tmp_path):
    cases = [
        ({**GOOD_CONFIG, "bogus": 1}, "bogus"),
        ({k: v for k, v in GOOD_CONFIG.items() if k != "inner_code"}, "inner_code"),
        ({**GOOD_CONFIG, "esn0_grid_db": []}, "esn0_grid_db"),
        ({**GOOD_CONFIG, "esn0_grid_db": ["x"]}, "esn0_grid_db"),
        ({**GOOD_CONFIG, "stop": {"min_frame_errors": 0}}, "stop.min_frame_errors"),
        ({**GOOD_CONFIG, "stop": {"foo": 1}}, "stop"),
        ({**GOOD_CONFIG, "outer_rebuild": "maybe"}, "outer_rebuild"),
        ({**GOOD_CONFIG, "inner_code": {"n": 96}}, "inner_code"),
        ({**GOOD_CONFIG, "inner_code": {"alist": "missing.alist"}}, "alist"),
        ({**GOOD_CONFIG, "outer_code": {"base": GOOD_CONFIG["outer_code"]["base"], "rep_factor": 0}}, "rep_factor"),
    ]
    for data, needle in cases:
        with pytest.raises(ConfigError, match=needle.replace(".", r"\.")):
            load_config(write_cfg(tmp_path, data))


def test_load_config_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError, match="JSON"):
        load_config(p)
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "absent.json")


def test_load_config_alist_relative_path(tmp_path):
    # inner code from an alist file next to the config
    alist = """\
7 3
3 4
2 3 2 2 1 1 1
4 4 4
1 3
1 2 3
1 2
2 3
1
2
3
1 2 3 5
2 3 4 6
1 2 4 7
"""
    (tmp_path / "code.alist").write_text(alist)
    data = {
        "inner_code": {"alist": "code.alist"},
        "outer_code": {"base": {"alist": "code.alist"}, "rep_factor": 1},
        "esn0_grid_db": [0.0],
    }
    cfg = load_config(write_cfg(tmp_path, data))
    assert cfg.inner.n_code == 7
    assert cfg.outer.n_code == 7
    assert cfg.inner.origin["kind"] == "alist"
