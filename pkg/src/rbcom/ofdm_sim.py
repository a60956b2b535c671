"""
Monte-Carlo simulation of a DC-biased, clipped OFDM link with square
Gray-coded M-QAM over the flat AWGN channel of the photodetector.

Two signal layouts are supported:

``"complex"`` (default)
    Complex baseband: ``n_subcarriers`` of the ``fft_len`` bins carry data
    (DC bin unused). The in-phase and quadrature rails each drive one
    intensity channel, so each rail is clipped and biased separately and
    the stream is returned as a complex array whose real and imaginary parts
    are both non-negative.
``"dco"``
    Classic DCO-OFDM: Hermitian-symmetric spectrum, real time signal.
    Requires ``n_subcarriers <= fft_len/2 - 1``.

Each rail of the data-bearing signal is normalised to unit RMS, so the
electrical SNR from the link budget is applied per rail as ``1/snr`` noise
variance, with the DC bias excluded from the signal power.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy.special import erfc

from .errors import InvalidArgumentError
from .link_budget import LinkBudget

__all__ = [
    "OfdmConfig",
    "BerReport",
    "gray_encode",
    "gray_decode",
    "qam_map",
    "qam_demap",
    "qam_ber_theory",
    "modulate",
    "awgn_channel",
    "demodulate",
    "frame_rng",
    "run_link",
    "ber_waterfall",
]


@dataclass(frozen=True)
class OfdmConfig:
    qam_order: int = 16384
    n_subcarriers: int = 800
    fft_len: int = 1024
    cp_len: int = 176
    bandwidth: float = 800e6
    clip_ratio: float | None = 4.0
    dc_bias: float | None = None
    mode: str = "complex"

    def __post_init__(self):
        m = self.qam_order
        if m < 4 or m & (m - 1) or int(math.log2(m)) % 2:
            raise InvalidArgumentError(f"qam_order must be a power of 4, got {m}")
        if self.mode not in ("complex", "dco"):
            raise InvalidArgumentError(f"mode must be 'complex' or 'dco', got {self.mode!r}")
        limit = self.fft_len - 1 if self.mode == "complex" else self.fft_len // 2 - 1
        if not 1 <= self.n_subcarriers <= limit:
            raise InvalidArgumentError(
                f"n_subcarriers must be in [1, {limit}] for mode {self.mode!r}")
        if not 0 <= self.cp_len < self.fft_len:
            raise InvalidArgumentError("cp_len must be in [0, fft_len)")
        if not self.bandwidth > 0:
            raise InvalidArgumentError("bandwidth must be > 0")
        if self.clip_ratio is not None and not self.clip_ratio > 0:
            raise InvalidArgumentError("clip_ratio must be > 0 (or None to disable)")
        if self.dc_bias is not None:
            if self.dc_bias < 0:
                raise InvalidArgumentError("dc_bias must be >= 0")
            if self.clip_ratio is not None and self.dc_bias < self.clip_ratio:
                raise InvalidArgumentError("dc_bias below clip_ratio would leave negative samples")

    @property
    def bits_per_symbol(self) -> int:
        return int(math.log2(self.qam_order))

    @property
    def bits_per_frame(self) -> int:
        return self.n_subcarriers * self.bits_per_symbol

    @property
    def frame_len(self) -> int:
        return self.fft_len + self.cp_len

    @property
    def bias(self) -> float:
        """DC bias per rail in units of the rail RMS."""
        if self.dc_bias is not None:
            return self.dc_bias
        return self.clip_ratio if self.clip_ratio is not None else 4.0

    @property
    def data_bins(self) -> np.ndarray:
        n = self.n_subcarriers
        if self.mode == "dco":
            return np.arange(1, n + 1)
        pos = (n + 1) // 2
        return np.r_[1:pos + 1, self.fft_len - (n - pos):self.fft_len]

    @property
    def scale(self) -> float:
        """Time-domain gain making each rail unit RMS under the unitary FFT."""
        if self.mode == "dco":
            return math.sqrt(self.fft_len / (2.0 * self.n_subcarriers))
        return math.sqrt(2.0 * self.fft_len / self.n_subcarriers)

    def subcarrier_snr(self, snr: float) -> float:
        """Per-subcarrier Es/N0 for a per-rail electrical SNR."""
        if self.mode == "dco":
            return snr * self.fft_len / (2.0 * self.n_subcarriers)
        return snr * self.fft_len / self.n_subcarriers

    @property
    def nominal_rate(self) -> float:
        """B log2(M): every sample period carries one full QAM symbol."""
        return self.bandwidth * self.bits_per_symbol

    @property
    def net_rate(self) -> float:
        """Payload rate after unused bins and cyclic prefix."""
        return self.bits_per_frame * self.bandwidth / self.frame_len


@dataclass(frozen=True)
class BerReport:
    bits_sent: int
    bit_errors: int
    snr_used: float
    data_rate: float
    net_data_rate: float
    n_frames: int
    seed: int

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_sent if self.bits_sent else 0.0

    def as_text(self) -> str:
        return "\n".join([
            f"frames          {self.n_frames}",
            f"seed            {self.seed}",
            f"snr_used_dB     {self.snr_used:.6f}",
            f"bits_sent       {self.bits_sent}",
            f"bit_errors      {self.bit_errors}",
            f"ber             {self.ber:.6e}",
            f"data_rate_bps   {self.data_rate:.6e}  (B*log2(M))",
            f"net_rate_bps    {self.net_data_rate:.6e}  (after unused bins and CP)",
        ])


# --- Gray-coded square QAM -------------------------------------------------

def gray_encode(i):
    i = np.asarray(i)
    return i ^ (i >> 1)


def gray_decode(g):
    g = np.array(g, copy=True)
    shift = 1
    while shift < 64:
        g ^= g >> shift
        shift <<= 1
    return g


def _axis_norm(qam_order: int) -> float:
    # average energy of the +-1, +-3, ... grid
    return math.sqrt(2.0 * (qam_order - 1) / 3.0)


def _bits_to_int(bits: np.ndarray) -> np.ndarray:
    weights = 1 << np.arange(bits.shape[-1] - 1, -1, -1, dtype=np.int64)
    return bits.astype(np.int64) @ weights


def _int_to_bits(values: np.ndarray, n: int) -> np.ndarray:
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((values[..., None] >> shifts) & 1).astype(np.uint8)


def qam_map(bits, qam_order: int) -> np.ndarray:
    """Map bits (MSB first, I half then Q half) to unit-energy Gray QAM symbols."""
    k = int(math.log2(qam_order))
    half = k // 2
    side = 1 << half
    bits = np.asarray(bits, dtype=np.uint8).reshape(-1, k)
    i_idx = gray_decode(_bits_to_int(bits[:, :half]))
    q_idx = gray_decode(_bits_to_int(bits[:, half:]))
    levels = 2.0 * np.arange(side) - (side - 1)
    return (levels[i_idx] + 1j * levels[q_idx]) / _axis_norm(qam_order)


def _decide(v: np.ndarray, side: int, norm: float) -> np.ndarray:
    return np.clip(np.rint((v * norm + (side - 1)) / 2.0), 0, side - 1).astype(np.int64)


def qam_demap(symbols, qam_order: int) -> tuple[np.ndarray, np.ndarray]:
    """Minimum-distance decisions. Returns (bits, decided unit-energy symbols)."""
    symbols = np.asarray(symbols)
    k = int(math.log2(qam_order))
    side = 1 << (k // 2)
    norm = _axis_norm(qam_order)
    i_idx = _decide(symbols.real, side, norm)
    q_idx = _decide(symbols.imag, side, norm)
    bits = np.concatenate([_int_to_bits(gray_encode(i_idx), k // 2),
                           _int_to_bits(gray_encode(q_idx), k // 2)], axis=-1)
    decided = ((2.0 * i_idx - (side - 1)) + 1j * (2.0 * q_idx - (side - 1))) / norm
    return bits.reshape(*symbols.shape[:-1], -1) if symbols.ndim > 1 else bits.reshape(-1), decided


def qam_ber_theory(qam_order: int, es_n0):
    """Exact bit error probability of Gray-coded square M-QAM in AWGN.

    ``es_n0`` is the symbol SNR (linear). Closed form obtained by summing, per
    bit position of each PAM rail, the erfc terms of every decision boundary
    crossing (Cho & Yoon form).
    """
    es_n0 = np.asarray(es_n0, dtype=float)
    side = math.isqrt(qam_order)
    kk = int(math.log2(side))
    a = np.sqrt(3.0 * es_n0 / (2.0 * (qam_order - 1)))
    total = np.zeros_like(es_n0)
    for k in range(1, kk + 1):
        step = 2 ** (k - 1)
        acc = np.zeros_like(es_n0)
        for i in range(int((1 - 2.0**-k) * side)):
            fl = (i * step) // side
            weight = (-1) ** fl * (step - math.floor(i * step / side + 0.5))
            if weight:
                acc = acc + weight * erfc((2 * i + 1) * a)
        total = total + acc / side
    out = total / kk
    return float(out) if out.ndim == 0 else out


# --- Modem ------------------------------------------------------------------

def _frames_of(cfg: OfdmConfig, stream: np.ndarray) -> np.ndarray:
    if stream.ndim != 1 or stream.size % cfg.frame_len:
        raise InvalidArgumentError(
            f"stream length {stream.size} is not a multiple of fft_len+cp_len={cfg.frame_len}")
    return stream.reshape(-1, cfg.frame_len)


def modulate(cfg: OfdmConfig, bits) -> np.ndarray:
    """Bits to a non-negative intensity sample stream.

    Gray QAM on the data bins, unitary IFFT, cyclic prefix, symmetric clipping
    at ``clip_ratio`` times the rail RMS, then the DC bias. Deterministic.
    """
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    if bits.size == 0 or bits.size % cfg.bits_per_frame:
        raise InvalidArgumentError(
            f"bit count {bits.size} is not a positive multiple of {cfg.bits_per_frame}")
    n_frames = bits.size // cfg.bits_per_frame
    symbols = qam_map(bits, cfg.qam_order).reshape(n_frames, cfg.n_subcarriers)
    spec = np.zeros((n_frames, cfg.fft_len), dtype=complex)
    bins = cfg.data_bins
    spec[:, bins] = symbols
    if cfg.mode == "dco":
        spec[:, cfg.fft_len - bins] = np.conj(symbols)
        x = np.fft.ifft(spec, norm="ortho", axis=1).real * cfg.scale
    else:
        x = np.fft.ifft(spec, norm="ortho", axis=1) * cfg.scale
    if cfg.cp_len:
        x = np.concatenate([x[:, -cfg.cp_len:], x], axis=1)
    if cfg.clip_ratio is not None:
        c = cfg.clip_ratio
        if np.iscomplexobj(x):
            x = np.clip(x.real, -c, c) + 1j * np.clip(x.imag, -c, c)
        else:
            x = np.clip(x, -c, c)
    b = cfg.bias
    x = x + (b + 1j * b if np.iscomplexobj(x) else b)
    return x.ravel()


def awgn_channel(samples, snr: float, seed: int | None = None, *,
                 rng: np.random.Generator | None = None, signal_power: float = 1.0) -> np.ndarray:
    """Add white Gaussian noise of variance ``signal_power/snr`` to each rail."""
    if not snr > 0:
        raise InvalidArgumentError("snr must be > 0")
    samples = np.asarray(samples)
    if math.isinf(snr):
        return samples.copy()
    if rng is None:
        rng = np.random.default_rng(seed)
    sigma = math.sqrt(signal_power / snr)
    if np.iscomplexobj(samples):
        noise = rng.standard_normal((2,) + samples.shape)
        return samples + sigma * (noise[0] + 1j * noise[1])
    return samples + sigma * rng.standard_normal(samples.shape)


def _equalized_symbols(cfg: OfdmConfig, stream: np.ndarray, channel_gain: float) -> np.ndarray:
    frames = _frames_of(cfg, np.asarray(stream))
    b = cfg.bias
    frames = frames - (b + 1j * b if np.iscomplexobj(frames) else b)
    spec = np.fft.fft(frames[:, cfg.cp_len:], norm="ortho", axis=1)
    return spec[:, cfg.data_bins] / (cfg.scale * channel_gain)


def demodulate(cfg: OfdmConfig, samples, channel_gain: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Recover bits from a received stream.

    Returns
    -------
    bits : ndarray of uint8
    evm : ndarray
        RMS error-vector magnitude per data subcarrier, relative to the
        unit symbol energy, measured against the decided symbols.
    """
    z = _equalized_symbols(cfg, samples, channel_gain)
    bits, decided = qam_demap(z.reshape(-1), cfg.qam_order)
    err = np.abs(z - decided.reshape(z.shape)) ** 2
    return bits.reshape(-1), np.sqrt(err.mean(axis=0))


# --- Monte-Carlo driver -------------------------------------------------------

def frame_rng(seed: int, frame: int) -> np.random.Generator:
    """Independent generator for frame ``frame`` of run ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(frame,))))


def _run_chunk(cfg: OfdmConfig, snr: float, seed: int, start: int, stop: int) -> tuple[int, int]:
    n = stop - start
    bits = np.empty((n, cfg.bits_per_frame), dtype=np.uint8)
    rngs = [frame_rng(seed, i) for i in range(start, stop)]
    for j, rng in enumerate(rngs):
        bits[j] = rng.integers(0, 2, cfg.bits_per_frame, dtype=np.uint8)
    tx = modulate(cfg, bits).reshape(n, cfg.frame_len)
    rx = np.empty_like(tx)
    for j, rng in enumerate(rngs):
        rx[j] = awgn_channel(tx[j], snr, rng=rng)
    out, _ = demodulate(cfg, rx.ravel())
    return bits.size, int(np.count_nonzero(out != bits.ravel()))


def _chunks(start: int, stop: int | None, size: int) -> Iterator[tuple[int, int]]:
    i = start
    while stop is None or i < stop:
        j = i + size if stop is None else min(i + size, stop)
        yield i, j
        i = j


def run_link(cfg: OfdmConfig, budget: LinkBudget | float, n_frames: int | None = None,
             seed: int = 0, *, workers: int = 1, chunk_frames: int = 64,
             min_bits: float = 1e7, min_errors: int = 200,
             max_frames: int | None = None) -> BerReport:
    """End-to-end BER at the electrical SNR of ``budget``.

    With ``n_frames`` given, exactly that many frames are simulated. Otherwise
    frames are added until at least ``min_bits`` bits and ``min_errors``
    errors are collected, capped at ``max_frames`` (default: ten times the
    frames needed for ``min_bits``).

    Every frame draws payload and noise from its own generator derived from
    ``(seed, frame index)``, so the report never depends on ``workers``. In
    the adaptive mode the stop rule is checked at ``chunk_frames``
    boundaries, so that parameter must be held fixed for reproducibility.
    """
    snr = budget.snr if isinstance(budget, LinkBudget) else float(budget)
    if not snr > 0:
        raise InvalidArgumentError("snr must be > 0")
    if n_frames is not None and n_frames < 1:
        raise InvalidArgumentError("n_frames must be >= 1")
    frames_for_min = math.ceil(min_bits / cfg.bits_per_frame)
    if n_frames is None and max_frames is None:
        max_frames = 10 * frames_for_min
    stop = n_frames if n_frames is not None else max_frames

    sent = errors = done = 0
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        it = _chunks(0, stop, chunk_frames)
        while True:
            batch = [c for _, c in zip(range(max(1, workers)), it)]
            if not batch:
                break
            results = pool.map(lambda c: _run_chunk(cfg, snr, seed, *c), batch)
            finished = False
            for (a, b), (s, e) in zip(batch, results):
                sent += s
                errors += e
                done = b
                if n_frames is None and sent >= min_bits and errors >= min_errors:
                    finished = True
                    break
            if finished:
                break

    snr_db = 10.0 * math.log10(snr) if not math.isinf(snr) else math.inf
    return BerReport(bits_sent=sent, bit_errors=errors, snr_used=snr_db,
                     data_rate=cfg.nominal_rate, net_data_rate=cfg.net_rate,
                     n_frames=done, seed=seed)


def ber_waterfall(cfg: OfdmConfig, snr_db, n_frames: int, seed: int = 0,
                  workers: int = 1) -> list[tuple[float, float, float]]:
    """(snr_dB, simulated BER, theoretical BER without clipping) per SNR point."""
    rows = []
    for s in np.atleast_1d(snr_db):
        snr = 10.0 ** (float(s) / 10.0)
        rep = run_link(cfg, snr, n_frames=n_frames, seed=seed, workers=workers)
        rows.append((float(s), rep.ber, qam_ber_theory(cfg.qam_order, cfg.subcarrier_snr(snr))))
    return rows
