"""Waveform-level coexistence tools: DSSS spreading, symbol-set orthogonalization, OFDM nulling."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import max_len_seq, welch

from .errors import DegenerateInputError, DomainError

CHIP_REGISTER_BITS = 20
RANK_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SpreadConfig:
    spreading_factor: int
    chip_rate_Hz: float = 1e9
    seed: int = 0

    def __post_init__(self):
        if int(self.spreading_factor) != self.spreading_factor or self.spreading_factor < 1:
            raise DomainError("spreading factor must be an integer >= 1")
        if not self.chip_rate_Hz > 0:
            raise DomainError("chip rate must be positive")


def chip_sequence(n_chips, seed=0, nbits=CHIP_REGISTER_BITS):
    """±1 maximal-length sequence; ``seed`` picks the nonzero register start."""
    rng = np.random.default_rng(seed)
    state = rng.integers(0, 2, nbits)
    if not state.any():
        state[0] = 1
    seq, _ = max_len_seq(nbits, state=state, length=n_chips)
    return 1.0 - 2.0 * seq


@dataclass(frozen=True)
class DsssSpectrum:
    frequency_Hz: np.ndarray
    psd_dB: np.ndarray
    unspread_psd_dB: np.ndarray
    peak_reduction_dB: float


def default_fft_size(spreading_factor):
    return 1 << max(8, math.ceil(math.log2(16 * spreading_factor)))


def dsss_psd(config, data_symbols, fft_size=None):
    """Welch PSD of the chipped baseband signal and of the same data unspread.

    Both signals hold each data symbol for ``spreading_factor`` samples at one
    sample per chip; spreading multiplies by the ±1 chip sequence. The
    segment length ``fft_size`` must resolve the unspread mainlobe.
    """
    sf = config.spreading_factor
    if fft_size is None:
        fft_size = default_fft_size(sf)
    if fft_size < 4 * sf or fft_size & (fft_size - 1):
        raise DomainError("fft_size must be a power of two of at least 4 * spreading_factor")
    data = np.asarray(data_symbols, dtype=complex)
    narrow = np.repeat(data, sf)
    if narrow.size < fft_size:
        raise DomainError("not enough data for a single PSD segment")
    # a spreading factor of one leaves the signal untouched
    spread = narrow * chip_sequence(narrow.size, config.seed) if sf > 1 else narrow

    def psd(x):
        f, p = welch(x, fs=config.chip_rate_Hz, nperseg=fft_size, return_onesided=False,
                     detrend=False, scaling="density")
        order = np.argsort(f)
        return f[order], p[order]

    f, p_spread = psd(spread)
    _, p_narrow = psd(narrow)
    psd_dB = 10 * np.log10(p_spread)
    unspread_dB = 10 * np.log10(p_narrow)
    return DsssSpectrum(f, psd_dB, unspread_dB, float(unspread_dB.max() - psd_dB.max()))


def random_qam4(n, seed=0):
    rng = np.random.default_rng(seed)
    return ((2 * rng.integers(0, 2, n) - 1) + 1j * (2 * rng.integers(0, 2, n) - 1)) / math.sqrt(2)


# -- symbol sets -------------------------------------------------------------

class SymbolSet:
    """M waveforms of common length, stored as rows of a complex array."""

    def __init__(self, symbols):
        arr = np.atleast_2d(np.asarray(symbols, dtype=complex))
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise DegenerateInputError("symbol set must be a nonempty M x L array")
        energy = np.sum(np.abs(arr) ** 2, axis=1)
        if not np.all(np.isfinite(energy)):
            raise DegenerateInputError("symbols must have finite energy")
        if np.any(energy == 0):
            raise DegenerateInputError(f"symbol {int(np.argmax(energy == 0))} has zero energy")
        self.symbols = arr

    def __len__(self):
        return self.symbols.shape[0]

    @property
    def length(self):
        return self.symbols.shape[1]


@dataclass(frozen=True)
class Orthonormalization:
    basis: np.ndarray  # N x L, orthonormal rows
    coordinates: np.ndarray  # M x N, symbols = coordinates @ basis

    @property
    def dimension(self):
        return self.basis.shape[0]


def inner(a, b):
    return np.vdot(b, a)


def gram_schmidt(symbol_set):
    """Orthonormal basis spanning the set, by classical projection applied twice."""
    if not isinstance(symbol_set, SymbolSet):
        symbol_set = SymbolSet(symbol_set)
    S = symbol_set.symbols
    scale = np.max(np.linalg.norm(S, axis=1))
    basis = np.zeros((0, S.shape[1]), dtype=complex)
    for s in S:
        w = s.copy()
        for _ in range(2):
            w = w - (basis.conj() @ w) @ basis
        norm = np.linalg.norm(w)
        if norm > RANK_TOLERANCE * scale:
            basis = np.vstack([basis, w / norm])
    return Orthonormalization(basis, S @ basis.conj().T)


@dataclass(frozen=True)
class Exclusion:
    survivors: SymbolSet
    kept_indices: np.ndarray
    reserved_function: np.ndarray
    bits_before: int
    bits_after: int

    @property
    def note(self):
        return (f"{self.bits_before} -> {self.bits_after} bits per symbol; "
                f"{len(self.survivors)} representable symbols")


def exclude_basis(symbol_set, reserved_index):
    """Keep only symbols with no component on one basis function."""
    if not isinstance(symbol_set, SymbolSet):
        symbol_set = SymbolSet(symbol_set)
    ortho = gram_schmidt(symbol_set)
    n = ortho.dimension
    if n < 2:
        raise DomainError("cannot exclude the only basis function")
    if not 0 <= reserved_index < n:
        raise DomainError(f"reserved index must lie in [0, {n})")
    norms = np.linalg.norm(symbol_set.symbols, axis=1)
    keep = np.flatnonzero(np.abs(ortho.coordinates[:, reserved_index]) <= RANK_TOLERANCE * norms)
    if keep.size == 0:
        raise DegenerateInputError("no symbol avoids the reserved basis function")
    return Exclusion(SymbolSet(symbol_set.symbols[keep]), keep, ortho.basis[reserved_index], n, n - 1)


# -- OFDM --------------------------------------------------------------------

@dataclass(frozen=True)
class SubcarrierMask:
    frequency_Hz: np.ndarray
    on: np.ndarray
    capacity_loss_fraction: float


def _band_edges_GHz(band):
    if hasattr(band, "band_low_GHz"):
        return band.band_low_GHz, band.band_high_GHz
    lo, hi = band
    return float(lo), float(hi)


def ofdm_null_mask(num_subcarriers, subcarrier_spacing_Hz, center_frequency_GHz, protected_bands,
                   guard_Hz=0.0):
    """Switch off subcarriers whose centre lies in a protected band (closed, optionally widened)."""
    if num_subcarriers < 1:
        raise DomainError("need at least one subcarrier")
    if not subcarrier_spacing_Hz > 0:
        raise DomainError("subcarrier spacing must be positive")
    k = np.arange(num_subcarriers)
    freqs = center_frequency_GHz * 1e9 + (k - num_subcarriers // 2) * subcarrier_spacing_Hz
    on = np.ones(num_subcarriers, dtype=bool)
    for band in protected_bands:
        lo, hi = _band_edges_GHz(band)
        on &= ~((freqs >= lo * 1e9 - guard_Hz) & (freqs <= hi * 1e9 + guard_Hz))
    return SubcarrierMask(freqs, on, float(1 - on.mean()))
