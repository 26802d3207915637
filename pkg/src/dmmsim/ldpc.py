"""Binary LDPC codes: parity-check representation, systematic generator
derivation, encoding, sum-product decoding, and a repetition wrapper
that lowers the base code rate by an integer factor.

Parity-check matrices arrive as sparse (row, col) pairs, from an alist
file, or from the seeded pseudo-random regular constructor. Encoding
uses the derived dense generator with bit-packed XOR. Decoding is exact
sum-product with a tanh/atanh kernel and an LLR magnitude cap.
"""

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import gf2

# Magnitude cap applied to every LLR entering or produced by the decoder.
LLR_CAP = 30.0

# Stream id for code construction, outside the per-frame id range.
_CODEGEN_STREAM = 2**63


class CodeConstructionError(ValueError):
    """A parity-check matrix cannot support a valid code."""


def derive_generator(h_sparse, n_code, k_info):
    """Systematic generator for a parity-check matrix given as (row, col) pairs.

    Gaussian elimination over GF(2) with column pivoting; info bits
    appear verbatim at the non-pivot columns.

    Returns:
        (g_dense, info_positions): a (k_info, n_code) uint8 generator and
        the sorted column indices where info bits appear unchanged.

    Raises:
        CodeConstructionError: if the matrix rank differs from
        n_code - k_info.
    """
    rows, cols = _edge_arrays(h_sparse, n_code)
    m = int(rows.max()) + 1 if rows.size else 0
    H = np.zeros((m, n_code), dtype=np.uint8)
    H[rows, cols] = 1
    R, piv = gf2.row_reduce(H)
    need = n_code - k_info
    if len(piv) != need:
        raise CodeConstructionError(
            f"parity-check matrix has GF(2) rank {len(piv)}, "
            f"need {need} for k_info={k_info}"
        )
    piv = np.asarray(piv, dtype=np.int64)
    free = np.setdiff1d(np.arange(n_code), piv)
    g = np.zeros((k_info, n_code), dtype=np.uint8)
    g[np.arange(k_info), free] = 1
    g[:, piv] = R[: len(piv)][:, free].T
    return g, free


def _edge_arrays(h_sparse, n_code):
    pairs = np.asarray(list(h_sparse), dtype=np.int64)
    if pairs.ndim != 2 or pairs.shape[1] != 2 or pairs.shape[0] == 0:
        raise CodeConstructionError("h_sparse must be a non-empty list of (row, col) pairs")
    rows, cols = pairs[:, 0], pairs[:, 1]
    if rows.min() < 0 or cols.min() < 0 or cols.max() >= n_code:
        raise CodeConstructionError("h_sparse indices out of range")
    return rows, cols


class LdpcCode:
    """Immutable binary code defined by a full-row-rank parity-check matrix.

    Attributes:
        n_code: code length.
        k_info: number of information bits (n_code - n_checks).
        n_checks: number of parity-check rows.
        g_dense: (k_info, n_code) uint8 systematic generator.
        info_positions: columns where info bits appear verbatim.
    """

    def __init__(self, h_sparse, n_code, n_checks=None):
        rows, cols = _edge_arrays(h_sparse, n_code)
        if n_checks is None:
            n_checks = int(rows.max()) + 1
        if rows.max() >= n_checks:
            raise CodeConstructionError("row index exceeds n_checks")
        key = rows * n_code + cols
        order = np.argsort(key, kind="stable")
        key = key[order]
        if np.any(key[1:] == key[:-1]):
            raise CodeConstructionError("duplicate (row, col) entries in h_sparse")
        self.n_code = int(n_code)
        self.n_checks = int(n_checks)
        self.k_info = self.n_code - self.n_checks
        if self.k_info < 1:
            raise CodeConstructionError(
                f"n_checks={n_checks} leaves no information bits for n_code={n_code}"
            )
        self._er = rows[order].astype(np.int32)
        self._ec = cols[order].astype(np.int32)
        self.g_dense, self.info_positions = derive_generator(
            zip(self._er.tolist(), self._ec.tolist()), self.n_code, self.k_info
        )
        self._g_packed = np.packbits(self.g_dense, axis=1)
        deg = np.bincount(self._er, minlength=self.n_checks)
        self._deg_max = int(deg.max())
        self._pad_mask = np.arange(self._deg_max)[None, :] < deg[:, None]
        # construction record for run manifests; classmethod constructors refine it
        self.origin = {"kind": "explicit"}

    @property
    def h_sparse(self):
        return list(zip(self._er.tolist(), self._ec.tolist()))

    @property
    def rate(self):
        return self.k_info / self.n_code

    def h_dense(self):
        H = np.zeros((self.n_checks, self.n_code), dtype=np.uint8)
        H[self._er, self._ec] = 1
        return H

    def syndrome(self, bits):
        """Parity of each check for a hard bit vector."""
        bits = np.asarray(bits)
        if bits.shape != (self.n_code,):
            raise ValueError(f"bit vector length {bits.shape} != ({self.n_code},)")
        acc = np.bincount(self._er, weights=bits[self._ec].astype(np.float64),
                          minlength=self.n_checks)
        return (acc.astype(np.int64) & 1).astype(np.uint8)

    def fingerprint(self):
        """Stable hex digest of the parity-check matrix."""
        h = hashlib.sha256()
        h.update(f"{self.n_code} {self.n_checks}\n".encode())
        h.update(self._er.astype("<i4").tobytes())
        h.update(self._ec.astype("<i4").tobytes())
        return h.hexdigest()

    def __repr__(self):
        return (f"LdpcCode(n_code={self.n_code}, k_info={self.k_info}, "
                f"n_checks={self.n_checks})")

    @classmethod
    def from_dense(cls, H):
        H = np.asarray(H, dtype=np.uint8) & 1
        rows, cols = np.nonzero(H)
        return cls(list(zip(rows.tolist(), cols.tolist())), H.shape[1], H.shape[0])

    @classmethod
    def from_alist(cls, path):
        """Load a parity-check matrix from an alist file.

        Expected layout: "n m", "max_col_deg max_row_deg", the n column
        degrees, the m row degrees, then n column lists of 1-based row
        indices (zero padding tolerated). Row lists, if present, are
        cross-checked against the column lists.
        """
        lines = [ln.split() for ln in Path(path).read_text().splitlines()]
        toks = [list(map(int, ln)) for ln in lines if ln]
        try:
            n, m = toks[0]
            dv_max, dc_max = toks[1]
            col_deg = toks[2]
            row_deg = toks[3]
        except (IndexError, ValueError) as exc:
            raise CodeConstructionError(f"malformed alist header in {path}") from exc
        if len(col_deg) != n or len(row_deg) != m:
            raise CodeConstructionError("alist degree list lengths disagree with n, m")
        if sum(col_deg) != sum(row_deg):
            raise CodeConstructionError("alist degree sums disagree")
        if max(col_deg) > dv_max or max(row_deg) > dc_max:
            raise CodeConstructionError("alist degree exceeds declared maximum")
        if len(toks) < 4 + n:
            raise CodeConstructionError("alist column lists truncated")
        edges = []
        for j in range(n):
            entries = [e for e in toks[4 + j] if e != 0]
            if len(entries) != col_deg[j]:
                raise CodeConstructionError(
                    f"alist column {j} lists {len(entries)} rows, expected {col_deg[j]}"
                )
            for e in entries:
                if not 1 <= e <= m:
                    raise CodeConstructionError(f"alist column {j} row index {e} out of range")
                edges.append((e - 1, j))
        row_lists = toks[4 + n: 4 + n + m]
        if len(row_lists) == m:
            alt = []
            for i in range(m):
                entries = [e for e in row_lists[i] if e != 0]
                for e in entries:
                    if not 1 <= e <= n:
                        raise CodeConstructionError(f"alist row {i} column index {e} out of range")
                    alt.append((i, e - 1))
            if sorted(alt) != sorted(edges):
                raise CodeConstructionError("alist row lists disagree with column lists")
        code = cls(edges, n, m)
        code.origin = {"kind": "alist", "path": str(path)}
        return code

    @classmethod
    def random_regular(cls, n_code, row_degree, col_degree, seed):
        """Seeded pseudo-random regular code via socket permutation.

        (n_code, row_degree, col_degree, seed) fully determines the
        matrix. Duplicate sockets are swapped apart. If the regular
        graph is rank-deficient (always the case for even column
        degree), single rows are redrawn with fresh columns until the
        matrix reaches full row rank, so a few columns may deviate from
        col_degree by one or two.
        """
        if n_code < 2 or row_degree < 1 or col_degree < 1:
            raise CodeConstructionError("degrees and length must be positive")
        if (n_code * col_degree) % row_degree != 0:
            raise CodeConstructionError(
                f"n_code*col_degree={n_code * col_degree} not divisible by row_degree={row_degree}"
            )
        m = n_code * col_degree // row_degree
        if not 0 < m < n_code:
            raise CodeConstructionError(f"n_checks={m} must lie in (0, n_code)")
        if row_degree > n_code:
            raise CodeConstructionError("row_degree exceeds n_code")
        rng = np.random.Generator(np.random.Philox(key=[seed, _CODEGEN_STREAM]))
        cols = np.repeat(np.arange(n_code, dtype=np.int64), col_degree)
        rows = rng.permutation(np.repeat(np.arange(m, dtype=np.int64), row_degree))
        n_edges = rows.size
        for _ in range(1000):
            key = rows * n_code + cols
            order = np.argsort(key, kind="stable")
            key_sorted = key[order]
            dup = order[1:][key_sorted[1:] == key_sorted[:-1]]
            if dup.size == 0:
                break
            partners = rng.integers(0, n_edges, size=dup.size)
            for e, f in zip(dup, partners):
                rows[e], rows[f] = rows[f], rows[e]
        else:
            raise CodeConstructionError("could not separate duplicate edges")
        for _ in range(60):
            try:
                code = cls(list(zip(rows.tolist(), cols.tolist())), n_code, m)
                code.origin = {
                    "kind": "random_regular",
                    "n": n_code,
                    "row_degree": row_degree,
                    "col_degree": col_degree,
                    "seed": seed,
                }
                return code
            except CodeConstructionError:
                r = int(rng.integers(m))
                slots = np.nonzero(rows == r)[0]
                cols[slots] = rng.choice(n_code, size=slots.size, replace=False)
        raise CodeConstructionError(
            f"failed to reach full rank for (n={n_code}, {row_degree}, {col_degree}, seed={seed})"
        )


def encode(code, info):
    """Codeword for an info-bit vector: each code bit is the GF(2) inner
    product of the info bits with a generator column."""
    info = np.asarray(info)
    if info.shape != (code.k_info,):
        raise ValueError(f"info length {info.shape} != ({code.k_info},)")
    sel = (info.astype(np.uint8) & 1).astype(bool)
    if not sel.any():
        return np.zeros(code.n_code, dtype=np.uint8)
    packed = np.bitwise_xor.reduce(code._g_packed[sel], axis=0)
    return np.unpackbits(packed)[: code.n_code]


def decode_bp(code, llr, max_iter):
    """Sum-product decoding; returns (info_bits, iterations_used, converged).

    Early exit as soon as the hard decision satisfies every check with
    no posterior exactly at zero. Non-convergence is reported via the
    flag, never raised.
    """
    hard, _post, iters, converged = decode_bp_full(code, llr, max_iter)
    return hard[code.info_positions], iters, converged


def decode_bp_full(code, llr, max_iter, early_exit=True):
    """Sum-product decoding returning the full hard codeword and posterior.

    Returns (hard_bits, posterior_llr, iterations_used, converged).
    converged means the final hard decision has zero syndrome and no
    posterior is exactly zero; with early_exit the loop stops at the
    first iteration where that holds. Hard ties (LLR exactly 0) decide
    bit 0.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    llr = np.asarray(llr, dtype=np.float64)
    if llr.shape != (code.n_code,):
        raise ValueError(f"llr length {llr.shape} != ({code.n_code},)")
    if not np.all(np.isfinite(llr)):
        raise ValueError("llr contains non-finite values")
    llr = np.clip(llr, -LLR_CAP, LLR_CAP)
    er, ec, mask = code._er, code._ec, code._pad_mask
    m, dmax, n = code.n_checks, code._deg_max, code.n_code
    atanh_lim = np.nextafter(1.0, 0.0)
    v2c = llr[ec]
    pad = np.empty((m, dmax))
    prefix = np.empty((m, dmax))
    sufrev = np.empty((m, dmax))
    hard = (llr < 0).astype(np.uint8)
    post = llr
    converged = False
    iters = max_iter
    for it in range(1, max_iter + 1):
        t = np.tanh(0.5 * v2c)
        pad.fill(1.0)
        pad[mask] = t
        prefix[:, 0] = 1.0
        np.cumprod(pad[:, :-1], axis=1, out=prefix[:, 1:])
        rev = np.ascontiguousarray(pad[:, ::-1])
        sufrev[:, 0] = 1.0
        np.cumprod(rev[:, :-1], axis=1, out=sufrev[:, 1:])
        loo = prefix * sufrev[:, ::-1]
        np.clip(loo, -atanh_lim, atanh_lim, out=loo)
        c2v = 2.0 * np.arctanh(loo[mask])
        np.clip(c2v, -LLR_CAP, LLR_CAP, out=c2v)
        post = llr + np.bincount(ec, weights=c2v, minlength=n)
        hard = (post < 0.0).astype(np.uint8)
        par = np.bincount(er, weights=hard[ec].astype(np.float64), minlength=m)
        converged = not np.any(par.astype(np.int64) & 1) and bool(np.all(post != 0.0))
        if converged and early_exit:
            iters = it
            break
        if it < max_iter:
            v2c = np.clip(post[ec] - c2v, -LLR_CAP, LLR_CAP)
    return hard, post, iters, converged


@dataclass(frozen=True)
class RepetitionCode:
    """A base code with each code bit repeated rep_factor consecutive times."""

    base: LdpcCode
    rep_factor: int = 1

    def __post_init__(self):
        if not isinstance(self.rep_factor, int) or self.rep_factor < 1:
            raise ValueError("rep_factor must be an integer >= 1")

    @property
    def n_code(self):
        return self.base.n_code * self.rep_factor

    @property
    def k_info(self):
        return self.base.k_info

    @property
    def rate(self):
        return self.base.rate / self.rep_factor


def rep_encode(rc, info):
    """Base encode, then each code bit emitted rep_factor consecutive times."""
    return np.repeat(encode(rc.base, info), rc.rep_factor)


def rep_combine(rc, llr):
    """Sum the rep_factor LLR copies of each base code bit.

    Exact over a memoryless channel: the per-copy log-likelihood ratios
    of one repeated bit add.
    """
    llr = np.asarray(llr, dtype=np.float64)
    if llr.shape != (rc.n_code,):
        raise ValueError(f"llr length {llr.shape} != ({rc.n_code},)")
    return llr.reshape(rc.base.n_code, rc.rep_factor).sum(axis=1)
