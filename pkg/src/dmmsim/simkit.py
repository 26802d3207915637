"""End-to-end pipeline and Monte-Carlo harness.

A frame carries two independently coded streams on one symbol sequence:
the inner stream as BPSK, the outer stream as a per-symbol rotation of
0 or a quarter turn. The receiver stores the received sequence once and
uses it twice: demap and decode the outer stream, rebuild its code
bits, derotate, then demap and decode the inner stream.

Per-frame reproducibility: every frame derives three Philox streams
(inner bits, outer bits, noise) from (seed, frame_index), so results
are independent of scheduling. Frame noise is drawn in the derotated
(BPSK) frame and rotated together with the symbol; the channel
distribution is unchanged (isotropic Gaussian is rotation-invariant)
and exact genie derotation recovers the BPSK-baseline received sequence
bit-for-bit.

Sweeps process frames in fixed-size batches; the stopping rule is
evaluated only at batch boundaries, in batch order, so output is
identical for any worker count.
"""

import json
import math
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .capacity import eta_total
from .channel import ChannelParams, SeededRng, add_noise, ebn0_from_esn0
from .ldpc import (
    LLR_CAP,
    LdpcCode,
    RepetitionCode,
    decode_bp_full,
    encode,
    rep_combine,
    rep_encode,
)
from .modem import (
    Constellation,
    demap_inner_llr,
    demap_outer_hard,
    demap_outer_llr,
    map_bpsk,
    rotate_by_bits,
)

# Per-frame stream domains; frame i uses stream ids (i << 2) | domain.
DOMAIN_INNER_BITS = 0
DOMAIN_OUTER_BITS = 1
DOMAIN_NOISE = 2


def frame_stream(seed, frame_index, domain):
    """Independent reproducible stream for one frame and purpose."""
    return SeededRng(seed, (frame_index << 2) | domain)


class ConfigError(ValueError):
    """A configuration document or SystemConfig field is invalid."""


@dataclass(frozen=True)
class SystemConfig:
    """Full experiment description; immutable and shareable across workers."""

    inner: LdpcCode
    outer: RepetitionCode
    esn0_grid_db: tuple
    es: float = 1.0
    max_iter: int = 50
    min_frame_errors: int = 50
    max_frames: int = 1_000_000
    seed: int = 0
    genie_beta: bool = False
    outer_rebuild: str = "reencode"
    batch_frames: int = 256

    def __post_init__(self):
        if self.inner.n_code != self.outer.n_code:
            raise ConfigError(
                f"inner code length {self.inner.n_code} != outer encoded length "
                f"{self.outer.n_code}; one bit of each stream rides on every symbol"
            )
        if self.es <= 0:
            raise ConfigError("es must be positive")
        if not self.esn0_grid_db:
            raise ConfigError("esn0_grid_db must be non-empty")
        for v in self.esn0_grid_db:
            if math.isnan(v) or v == -math.inf:
                raise ConfigError(f"invalid grid point {v}")
        for name in ("max_iter", "min_frame_errors", "max_frames", "batch_frames"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.outer_rebuild not in ("reencode", "direct"):
            raise ConfigError("outer_rebuild must be 'reencode' or 'direct'")
        SeededRng(self.seed)  # range check
        object.__setattr__(self, "esn0_grid_db", tuple(float(v) for v in self.esn0_grid_db))

    @property
    def r1(self):
        return self.inner.rate

    @property
    def r2(self):
        return self.outer.rate

    @property
    def eta(self):
        return eta_total(self.r1, self.r2)


@dataclass
class FrameTrace:
    """Every stage of one frame, as produced at the transmitter and receiver."""

    frame_index: int
    esn0_db: float
    c1: np.ndarray
    v1: np.ndarray
    c2: np.ndarray
    v2: np.ndarray
    symbols: np.ndarray
    received: np.ndarray
    llr_outer: np.ndarray
    c2_hat: np.ndarray
    v2_hat: np.ndarray
    beta_hat_bits: np.ndarray
    llr_inner: np.ndarray
    c1_hat: np.ndarray
    iters_outer: int
    converged_outer: bool
    iters_inner: int
    converged_inner: bool


@dataclass
class BaselineTrace:
    frame_index: int
    esn0_db: float
    c1: np.ndarray
    v1: np.ndarray
    received: np.ndarray
    llr_inner: np.ndarray
    c1_hat: np.ndarray
    iters_inner: int
    converged_inner: bool


def _resolve_esn0(cfg, esn0_db):
    if esn0_db is not None:
        return float(esn0_db)
    if len(cfg.esn0_grid_db) != 1:
        raise ConfigError("esn0_db is required when the grid has several points")
    return cfg.esn0_grid_db[0]


def _front_end(cfg, frame_index, esn0_db):
    params = ChannelParams.from_esn0_db(cfg.es, esn0_db)
    c1 = frame_stream(cfg.seed, frame_index, DOMAIN_INNER_BITS).generator().integers(
        0, 2, cfg.inner.k_info, dtype=np.uint8
    )
    c2 = frame_stream(cfg.seed, frame_index, DOMAIN_OUTER_BITS).generator().integers(
        0, 2, cfg.outer.k_info, dtype=np.uint8
    )
    v1 = encode(cfg.inner, c1)
    v2 = rep_encode(cfg.outer, c2)
    x1 = map_bpsk(v1, cfg.es)
    y_pre = add_noise(x1, params, frame_stream(cfg.seed, frame_index, DOMAIN_NOISE))
    y = rotate_by_bits(y_pre, v2)
    symbols = rotate_by_bits(x1, v2)
    return params, c1, c2, v1, v2, x1, symbols, y


def _outer_stage(cfg, y, params):
    cst = Constellation(cfg.es)
    if params.sigma2_dim > 0:
        llr_sym = demap_outer_llr(y, cst, params.sigma2_dim)
    else:
        llr_sym = (1.0 - 2.0 * demap_outer_hard(y, cst)) * LLR_CAP
    llr_outer = rep_combine(cfg.outer, llr_sym)
    hard_base, _post, iters, conv = decode_bp_full(cfg.outer.base, llr_outer, cfg.max_iter)
    c2_hat = hard_base[cfg.outer.base.info_positions]
    if cfg.outer_rebuild == "reencode":
        v2_base = encode(cfg.outer.base, c2_hat)
    else:
        v2_base = hard_base
    v2_hat = np.repeat(v2_base, cfg.outer.rep_factor)
    return llr_outer, c2_hat, v2_hat, iters, conv


def _inner_stage(cfg, y, beta_bits, params):
    y1 = rotate_by_bits(y, beta_bits, inverse=True)
    if params.sigma2_dim > 0:
        llr_inner = demap_inner_llr(y1, cfg.es, params.sigma2_dim)
    else:
        llr_inner = np.sign(y1[..., 0]) * LLR_CAP
    hard, _post, iters, conv = decode_bp_full(cfg.inner, llr_inner, cfg.max_iter)
    return llr_inner, hard[cfg.inner.info_positions], iters, conv


def run_frame(cfg, frame_index, esn0_db=None):
    """One full transmit/receive cycle; decoding failure is data, not error.

    The received sequence is stored once (``received``) and consumed by
    both receiver stages. With cfg.genie_beta the derotation uses the
    true per-symbol rotation bits instead of the rebuilt ones.
    """
    esn0_db = _resolve_esn0(cfg, esn0_db)
    params, c1, c2, v1, v2, _x1, symbols, y = _front_end(cfg, frame_index, esn0_db)
    llr_outer, c2_hat, v2_hat, it2, conv2 = _outer_stage(cfg, y, params)
    beta_bits = v2 if cfg.genie_beta else v2_hat
    llr_inner, c1_hat, it1, conv1 = _inner_stage(cfg, y, beta_bits, params)
    return FrameTrace(
        frame_index=frame_index,
        esn0_db=esn0_db,
        c1=c1,
        v1=v1,
        c2=c2,
        v2=v2,
        symbols=symbols,
        received=y,
        llr_outer=llr_outer,
        c2_hat=c2_hat,
        v2_hat=v2_hat,
        beta_hat_bits=beta_bits,
        llr_inner=llr_inner,
        c1_hat=c1_hat,
        iters_outer=it2,
        converged_outer=conv2,
        iters_inner=it1,
        converged_inner=conv1,
    )


def run_baseline_frame(cfg, frame_index, esn0_db=None):
    """Conventional BPSK with the inner code only, on the same bit and
    noise streams as run_frame; the received sequence equals the genie
    branch's derotated sequence bit-for-bit."""
    esn0_db = _resolve_esn0(cfg, esn0_db)
    params = ChannelParams.from_esn0_db(cfg.es, esn0_db)
    c1 = frame_stream(cfg.seed, frame_index, DOMAIN_INNER_BITS).generator().integers(
        0, 2, cfg.inner.k_info, dtype=np.uint8
    )
    v1 = encode(cfg.inner, c1)
    x1 = map_bpsk(v1, cfg.es)
    y = add_noise(x1, params, frame_stream(cfg.seed, frame_index, DOMAIN_NOISE))
    if params.sigma2_dim > 0:
        llr_inner = demap_inner_llr(y, cfg.es, params.sigma2_dim)
    else:
        llr_inner = np.sign(y[..., 0]) * LLR_CAP
    hard, _post, iters, conv = decode_bp_full(cfg.inner, llr_inner, cfg.max_iter)
    return BaselineTrace(
        frame_index=frame_index,
        esn0_db=esn0_db,
        c1=c1,
        v1=v1,
        received=y,
        llr_inner=llr_inner,
        c1_hat=hard[cfg.inner.info_positions],
        iters_inner=iters,
        converged_inner=conv,
    )


# ------------------------------------------------------------------ sweeps


@dataclass
class _Counters:
    frames: int = 0
    errs_inner: int = 0
    errs_outer: int = 0
    bits_inner: int = 0
    bits_outer: int = 0
    frame_errors: int = 0
    iters_inner_sum: int = 0
    iters_outer_sum: int = 0

    def __iadd__(self, other):
        for f in self.__dataclass_fields__:
            setattr(self, f, getattr(self, f) + getattr(other, f))
        return self


@dataclass(frozen=True)
class SweepPoint:
    esn0_db: float
    ebn0_db: float
    ber_inner: float
    ber_outer: float
    ber_combined: float
    fer: float
    frames: int
    bits_inner: int
    bits_outer: int
    errs_inner: int
    errs_outer: int
    frame_errors: int
    iters_inner_mean: float
    iters_outer_mean: float

    @property
    def bits(self):
        return self.bits_inner + self.bits_outer


@dataclass
class SweepResult:
    mode: str
    eta: float
    points: list


@dataclass(frozen=True)
class GeniePoint:
    esn0_db: float
    ebn0_db: float
    affected: SweepPoint
    genie: SweepPoint
    gap_inner_ber: float
    ci95_affected: float
    ci95_genie: float
    insignificant: bool


@dataclass
class GenieCompareResult:
    eta: float
    points: list


def _count_dmm(counters, trace):
    ei = int(np.count_nonzero(trace.c1 != trace.c1_hat))
    eo = int(np.count_nonzero(trace.c2 != trace.c2_hat))
    counters.frames += 1
    counters.errs_inner += ei
    counters.errs_outer += eo
    counters.bits_inner += trace.c1.size
    counters.bits_outer += trace.c2.size
    counters.frame_errors += 1 if (ei + eo) else 0
    counters.iters_inner_sum += trace.iters_inner
    counters.iters_outer_sum += trace.iters_outer


def _run_batch(cfg, esn0_db, kind, lo, hi):
    if kind == "dmm":
        c = _Counters()
        for fi in range(lo, hi):
            _count_dmm(c, run_frame(cfg, fi, esn0_db))
        return c
    if kind == "baseline":
        c = _Counters()
        for fi in range(lo, hi):
            t = run_baseline_frame(cfg, fi, esn0_db)
            ei = int(np.count_nonzero(t.c1 != t.c1_hat))
            c.frames += 1
            c.errs_inner += ei
            c.bits_inner += t.c1.size
            c.frame_errors += 1 if ei else 0
            c.iters_inner_sum += t.iters_inner
        return c
    if kind == "pair":
        affected = _Counters()
        genie = _Counters()
        for fi in range(lo, hi):
            _pair_frame(cfg, fi, esn0_db, affected, genie)
        return affected, genie
    raise ValueError(f"unknown batch kind {kind!r}")


def _pair_frame(cfg, frame_index, esn0_db, affected, genie):
    # One front end and one outer decode feed both derotation branches;
    # when the rebuilt rotation bits are exact the branches coincide and
    # the inner decode runs once.
    params, c1, c2, _v1, v2, _x1, _symbols, y = _front_end(cfg, frame_index, esn0_db)
    _llr_outer, c2_hat, v2_hat, it2, _conv2 = _outer_stage(cfg, y, params)
    eo = int(np.count_nonzero(c2 != c2_hat))
    _llr_a, c1_hat_a, it1_a, _conv_a = _inner_stage(cfg, y, v2_hat, params)
    if np.array_equal(v2_hat, v2):
        c1_hat_g, it1_g = c1_hat_a, it1_a
    else:
        _llr_g, c1_hat_g, it1_g, _conv_g = _inner_stage(cfg, y, v2, params)
    for counters, c1_hat, it1 in ((affected, c1_hat_a, it1_a), (genie, c1_hat_g, it1_g)):
        ei = int(np.count_nonzero(c1 != c1_hat))
        counters.frames += 1
        counters.errs_inner += ei
        counters.errs_outer += eo
        counters.bits_inner += c1.size
        counters.bits_outer += c2.size
        counters.frame_errors += 1 if (ei + eo) else 0
        counters.iters_inner_sum += it1
        counters.iters_outer_sum += it2


_WORKER_CFG = None


def _pool_init(cfg):
    global _WORKER_CFG
    _WORKER_CFG = cfg


def _pool_batch(args):
    esn0_db, kind, lo, hi = args
    return _run_batch(_WORKER_CFG, esn0_db, kind, lo, hi)


def _stopped(cfg, counters):
    return (
        counters.frame_errors >= cfg.min_frame_errors
        or counters.frames >= cfg.max_frames
    )


def _run_point(cfg, esn0_db, kind, workers, pool):
    """Accumulate batches in index order until the stopping rule fires.

    Batches are merged strictly in batch order and the rule is checked
    before each merge, so the counted frame set is identical for every
    worker count; surplus batches computed by idle workers are discarded.
    """
    primary = _Counters()
    secondary = _Counters() if kind == "pair" else None
    j = 0
    bf = cfg.batch_frames
    while not _stopped(cfg, primary):
        window = []
        for w in range(max(1, workers)):
            lo = (j + w) * bf
            if lo >= cfg.max_frames:
                break
            window.append((esn0_db, kind, lo, min(lo + bf, cfg.max_frames)))
        if not window:
            break
        if pool is None:
            results = [_run_batch(cfg, *args) for args in window]
        else:
            results = list(pool.map(_pool_batch, window))
        for res in results:
            if _stopped(cfg, primary):
                break
            if kind == "pair":
                aff, gen = res
                primary += aff
                secondary += gen
            else:
                primary += res
        j += len(window)
    return primary, secondary


def _make_point(cfg, esn0_db, eta, c):
    def ratio(a, b):
        return a / b if b else 0.0

    return SweepPoint(
        esn0_db=esn0_db,
        ebn0_db=ebn0_from_esn0(esn0_db, eta),
        ber_inner=ratio(c.errs_inner, c.bits_inner),
        ber_outer=ratio(c.errs_outer, c.bits_outer),
        ber_combined=ratio(c.errs_inner + c.errs_outer, c.bits_inner + c.bits_outer),
        fer=ratio(c.frame_errors, c.frames),
        frames=c.frames,
        bits_inner=c.bits_inner,
        bits_outer=c.bits_outer,
        errs_inner=c.errs_inner,
        errs_outer=c.errs_outer,
        frame_errors=c.frame_errors,
        iters_inner_mean=ratio(c.iters_inner_sum, c.frames),
        iters_outer_mean=ratio(c.iters_outer_sum, c.frames),
    )


def _with_pool(cfg, workers, fn):
    if workers <= 1:
        return fn(None)
    with ProcessPoolExecutor(
        max_workers=workers, initializer=_pool_init, initargs=(cfg,)
    ) as pool:
        return fn(pool)


def run_sweep(cfg, workers=1):
    """BER/FER over the configured grid for the two-stream system.

    Each grid point runs frames (in fixed batches) until
    cfg.min_frame_errors frame errors on the combined stream or
    cfg.max_frames; zero-error points report their observed bit budget.
    """

    def go(pool):
        points = []
        for esn0 in cfg.esn0_grid_db:
            counters, _ = _run_point(cfg, esn0, "dmm", workers, pool)
            points.append(_make_point(cfg, esn0, cfg.eta, counters))
        return points

    return SweepResult(mode="dmm", eta=cfg.eta, points=_with_pool(cfg, workers, go))


def run_bpsk_baseline(cfg, workers=1):
    """Plain BPSK with the inner code on the same seeds; eta = R1."""

    def go(pool):
        points = []
        for esn0 in cfg.esn0_grid_db:
            counters, _ = _run_point(cfg, esn0, "baseline", workers, pool)
            points.append(_make_point(cfg, esn0, cfg.r1, counters))
        return points

    return SweepResult(mode="baseline", eta=cfg.r1, points=_with_pool(cfg, workers, go))


def _ci95_halfwidth(errs, bits):
    if bits == 0:
        return 0.0
    p = errs / bits
    return 1.96 * math.sqrt(p * (1.0 - p) / bits)


def run_genie_compare(cfg, workers=1):
    """Paired sweeps on shared noise: receiver-estimated rotation bits
    vs the true ones. Both branches see the identical frame set; the
    stopping rule follows the error-affected branch. Outer-stream
    numbers are common to both branches by construction."""

    def go(pool):
        points = []
        for esn0 in cfg.esn0_grid_db:
            aff_c, gen_c = _run_point(cfg, esn0, "pair", workers, pool)
            aff = _make_point(cfg, esn0, cfg.eta, aff_c)
            gen = _make_point(cfg, esn0, cfg.eta, gen_c)
            gap = abs(aff.ber_inner - gen.ber_inner)
            ci_a = _ci95_halfwidth(aff.errs_inner, aff.bits_inner)
            ci_g = _ci95_halfwidth(gen.errs_inner, gen.bits_inner)
            points.append(
                GeniePoint(
                    esn0_db=esn0,
                    ebn0_db=aff.ebn0_db,
                    affected=aff,
                    genie=gen,
                    gap_inner_ber=gap,
                    ci95_affected=ci_a,
                    ci95_genie=ci_g,
                    insignificant=gap <= ci_a + ci_g,
                )
            )
        return points

    return GenieCompareResult(eta=cfg.eta, points=_with_pool(cfg, workers, go))


# ------------------------------------------------------------ persistence


SWEEP_COLUMNS = (
    "esn0_db,ebn0_db,ber_inner,ber_outer,ber_combined,fer,frames,bits,"
    "bits_inner,bits_outer,errs_inner,errs_outer,frame_errors,"
    "iters_inner_mean,iters_outer_mean"
)

GENIE_COLUMNS = (
    "esn0_db,ebn0_db,ber_inner_affected,ber_inner_genie,gap_inner_ber,"
    "ci95_affected,ci95_genie,insignificant,frames,bits_inner,"
    "errs_inner_affected,errs_inner_genie,ber_outer"
)


def _fmt_sweep_row(p):
    return (
        f"{p.esn0_db:.4f},{p.ebn0_db:.4f},{p.ber_inner:.6e},{p.ber_outer:.6e},"
        f"{p.ber_combined:.6e},{p.fer:.6e},{p.frames},{p.bits},"
        f"{p.bits_inner},{p.bits_outer},{p.errs_inner},{p.errs_outer},"
        f"{p.frame_errors},{p.iters_inner_mean:.3f},{p.iters_outer_mean:.3f}"
    )


def write_sweep_csv(result, path):
    lines = [SWEEP_COLUMNS]
    lines += [_fmt_sweep_row(p) for p in result.points]
    Path(path).write_text("\n".join(lines) + "\n")


def write_genie_csv(result, path):
    lines = [GENIE_COLUMNS]
    for gp in result.points:
        a, g = gp.affected, gp.genie
        lines.append(
            f"{gp.esn0_db:.4f},{gp.ebn0_db:.4f},{a.ber_inner:.6e},{g.ber_inner:.6e},"
            f"{gp.gap_inner_ber:.6e},{gp.ci95_affected:.6e},{gp.ci95_genie:.6e},"
            f"{int(gp.insignificant)},{a.frames},{a.bits_inner},"
            f"{a.errs_inner},{g.errs_inner},{a.ber_outer:.6e}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def version_string():
    """git-describe if the package sits in a git checkout, else the
    package version."""
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=10,
        )
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return f"v{__version__}"


def config_to_dict(cfg):
    return {
        "inner_code": dict(cfg.inner.origin),
        "outer_code": {"base": dict(cfg.outer.base.origin), "rep_factor": cfg.outer.rep_factor},
        "es": cfg.es,
        "esn0_grid_db": list(cfg.esn0_grid_db),
        "max_iter": cfg.max_iter,
        "stop": {"min_frame_errors": cfg.min_frame_errors, "max_frames": cfg.max_frames},
        "seed": cfg.seed,
        "genie_beta": cfg.genie_beta,
        "outer_rebuild": cfg.outer_rebuild,
        "batch_frames": cfg.batch_frames,
        "rates": {"r1": cfg.r1, "r2": cfg.r2, "eta": cfg.eta},
    }


def build_manifest(cfg, command, outputs, eta=None):
    return {
        "command": command,
        "config": config_to_dict(cfg),
        "seed": cfg.seed,
        "eta": cfg.eta if eta is None else eta,
        "timestamp_utc": datetime.now(timezone.utc).isoformat(),
        "outputs": [str(p) for p in outputs],
        "code_fingerprints": {
            "inner": cfg.inner.fingerprint(),
            "outer_base": cfg.outer.base.fingerprint(),
        },
        "version": version_string(),
    }


def write_manifest(manifest, path):
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------- config IO


def _expect(cond, msg):
    if not cond:
        raise ConfigError(msg)


def _code_from_entry(entry, base_dir, where):
    _expect(isinstance(entry, dict), f"{where} must be an object")
    if "alist" in entry:
        extra = set(entry) - {"alist"}
        _expect(not extra, f"{where}: unexpected fields {sorted(extra)}")
        p = Path(entry["alist"])
        if not p.is_absolute():
            p = base_dir / p
        _expect(p.exists(), f"{where}.alist: no such file {p}")
        code = LdpcCode.from_alist(p)
        code.origin = {"kind": "alist", "path": str(p)}
        return code
    needed = {"n", "row_degree", "col_degree", "seed"}
    missing = needed - set(entry)
    _expect(not missing, f"{where}: missing fields {sorted(missing)}")
    extra = set(entry) - needed
    _expect(not extra, f"{where}: unexpected fields {sorted(extra)}")
    for k in needed:
        _expect(isinstance(entry[k], int) and entry[k] >= 0, f"{where}.{k} must be a non-negative integer")
    return LdpcCode.random_regular(entry["n"], entry["row_degree"], entry["col_degree"], entry["seed"])


def load_config(path):
    """SystemConfig from a JSON document; every field of the dataclass
    is overridable and validation errors name the offending field."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    _expect(isinstance(data, dict), "config root must be an object")
    known = {
        "inner_code", "outer_code", "es", "esn0_grid_db", "max_iter",
        "stop", "seed", "genie_beta", "outer_rebuild", "batch_frames",
    }
    unknown = set(data) - known
    _expect(not unknown, f"unknown config fields: {sorted(unknown)}")
    _expect("inner_code" in data, "missing required field inner_code")
    _expect("outer_code" in data, "missing required field outer_code")
    _expect("esn0_grid_db" in data, "missing required field esn0_grid_db")
    base_dir = path.resolve().parent

    inner = _code_from_entry(data["inner_code"], base_dir, "inner_code")
    oc = data["outer_code"]
    _expect(isinstance(oc, dict), "outer_code must be an object")
    _expect("base" in oc, "outer_code.base is required")
    extra = set(oc) - {"base", "rep_factor"}
    _expect(not extra, f"outer_code: unexpected fields {sorted(extra)}")
    rep = oc.get("rep_factor", 1)
    _expect(isinstance(rep, int) and rep >= 1, "outer_code.rep_factor must be an integer >= 1")
    outer = RepetitionCode(_code_from_entry(oc["base"], base_dir, "outer_code.base"), rep)

    grid = data["esn0_grid_db"]
    _expect(isinstance(grid, list) and grid, "esn0_grid_db must be a non-empty list")
    for v in grid:
        _expect(isinstance(v, (int, float)), f"esn0_grid_db entry {v!r} is not a number")

    kwargs = {}
    if "es" in data:
        _expect(isinstance(data["es"], (int, float)) and data["es"] > 0, "es must be a positive number")
        kwargs["es"] = float(data["es"])
    if "max_iter" in data:
        _expect(isinstance(data["max_iter"], int) and data["max_iter"] >= 1, "max_iter must be an integer >= 1")
        kwargs["max_iter"] = data["max_iter"]
    if "stop" in data:
        stop = data["stop"]
        _expect(isinstance(stop, dict), "stop must be an object")
        bad = set(stop) - {"min_frame_errors", "max_frames"}
        _expect(not bad, f"stop: unexpected fields {sorted(bad)}")
        for k in ("min_frame_errors", "max_frames"):
            if k in stop:
                _expect(isinstance(stop[k], int) and stop[k] >= 1, f"stop.{k} must be an integer >= 1")
                kwargs[k] = stop[k]
    if "seed" in data:
        _expect(isinstance(data["seed"], int) and 0 <= data["seed"] < 2**64, "seed must be an integer in [0, 2**64)")
        kwargs["seed"] = data["seed"]
    if "genie_beta" in data:
        _expect(isinstance(data["genie_beta"], bool), "genie_beta must be a boolean")
        kwargs["genie_beta"] = data["genie_beta"]
    if "outer_rebuild" in data:
        _expect(data["outer_rebuild"] in ("reencode", "direct"), "outer_rebuild must be 'reencode' or 'direct'")
        kwargs["outer_rebuild"] = data["outer_rebuild"]
    if "batch_frames" in data:
        _expect(isinstance(data["batch_frames"], int) and data["batch_frames"] >= 1, "batch_frames must be an integer >= 1")
        kwargs["batch_frames"] = data["batch_frames"]

    return SystemConfig(inner=inner, outer=outer, esn0_grid_db=tuple(float(v) for v in grid), **kwargs)
