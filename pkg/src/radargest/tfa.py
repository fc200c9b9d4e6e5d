"""Short-time Fourier and continuous wavelet transforms for complex baseband.

Both transforms treat their input as complex, so the frequency axis is
two-sided and keeps the sign of the Doppler shift.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError

LOG_FLOOR = 1e-12


@dataclass(frozen=True)
class WindowSpec:
    kind: str = "hann"  # rectangular | hann | gaussian
    length: int = 128
    sigma: float | None = None  # gaussian only, in samples

    def values(self) -> np.ndarray:
        n = self.length
        if n < 2:
            raise ParameterError(f"window length must be >= 2, got {n}")
        if self.kind == "rectangular":
            w = np.ones(n)
        elif self.kind == "hann":
            # periodic form: the peak at n/2 is exactly 1 for even lengths
            w = 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(n) / n)
        elif self.kind == "gaussian":
            if self.sigma is None or not self.sigma > 0:
                raise ParameterError("gaussian window needs sigma > 0")
            m = np.arange(n) - (n - 1) / 2.0
            w = np.exp(-0.5 * (m / self.sigma) ** 2)
        else:
            raise ParameterError(f"unknown window kind {self.kind!r}")
        return w / w.max()


@dataclass(frozen=True)
class WaveletSpec:
    scales: np.ndarray = field(default_factory=lambda: np.array([]))
    omega0: float = 6.0

    def validate(self) -> None:
        if self.omega0 < 5:
            raise ParameterError(f"omega0 must be >= 5, got {self.omega0}")
        s = np.asarray(self.scales, float)
        if s.ndim != 1 or len(s) == 0:
            raise ParameterError("scales must be a non-empty 1-D sequence")
        if np.any(s <= 0):
            raise ParameterError("scales must be positive")
        if np.any(np.diff(s) <= 0):
            raise ParameterError("scales must be strictly increasing")


@dataclass
class TimeFrequencyMap:
    values: np.ndarray  # (n_freq, n_time), >= 0
    freq_axis: np.ndarray  # Hz per row
    time_axis: np.ndarray  # s per column
    kind: str = "stft_mag"
    log: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, float)
        self.freq_axis = np.asarray(self.freq_axis, float)
        self.time_axis = np.asarray(self.time_axis, float)

    @property
    def shape(self) -> tuple:
        return self.values.shape

    def check(self) -> None:
        v = self.values
        if v.ndim != 2 or v.shape[1] < 1:
            raise ParameterError("map must be 2-D with at least one column")
        if not np.all(np.isfinite(v)):
            raise ParameterError("map values must be finite")
        if not self.log and np.any(v < 0):
            raise ParameterError("magnitude map must be non-negative")
        d = np.diff(self.freq_axis)
        if len(d) and not (np.all(d > 0) or np.all(d < 0)):
            raise ParameterError("frequency axis must be strictly monotonic")


@dataclass
class ComplexTF:
    """Raw complex transform with its axes; ``spectrogram`` turns it into a map."""

    values: np.ndarray
    freq_axis: np.ndarray
    time_axis: np.ndarray
    kind: str


# ---------------------------------------------------------------------------
# STFT


def frame_offset(window_length: int, hop: int) -> int:
    """Start index of frame 0 relative to sample 0.

    Frames start at ``m*hop - (window_length - hop)//2``. With hop equal to
    the window length the frames tile the signal from sample 0 with no
    padding on the left; with hop 1 each frame is centred on its column.
    """
    return -((window_length - hop) // 2)


def stft(signal, fs: float, window: WindowSpec | None = None, hop: int = 1, nfft: int | None = None) -> ComplexTF:
    """Windowed DFT of successive frames.

    Output has ``floor((len - 1) / hop) + 1`` columns. Samples outside the
    signal are zero. Rows are fftshifted onto a monotonic axis covering
    ``[-fs/2, fs/2)``. ``nfft`` defaults to the window length; a larger value
    zero-pads each frame.
    """
    window = window or WindowSpec()
    x = np.asarray(signal, complex)
    if x.ndim != 1:
        raise ParameterError("stft expects a 1-D signal")
    if not np.all(np.isfinite(x)):
        raise ParameterError("signal must be finite")
    if hop < 1:
        raise ParameterError(f"hop must be >= 1, got {hop}")
    L = window.length
    if L > len(x):
        raise ParameterError(f"window length {L} exceeds signal length {len(x)}")
    nfft = L if nfft is None else int(nfft)
    if nfft < L:
        raise ParameterError("nfft must be >= window length")
    w = window.values()

    n_cols = (len(x) - 1) // hop + 1
    start0 = frame_offset(L, hop)
    pad_left = max(0, -start0)
    last_end = start0 + (n_cols - 1) * hop + L
    pad_right = max(0, last_end - len(x))
    xp = np.concatenate([np.zeros(pad_left, complex), x, np.zeros(pad_right, complex)])
    frames = np.lib.stride_tricks.sliding_window_view(xp, L)[start0 + pad_left :: hop][:n_cols]
    spec = np.fft.fft(frames * w, n=nfft, axis=1)
    spec = np.fft.fftshift(spec, axes=1).T

    freqs = np.fft.fftshift(np.fft.fftfreq(nfft, d=1.0 / fs))
    centres = start0 + np.arange(n_cols) * hop + L / 2.0
    return ComplexTF(spec, freqs, centres / fs, "stft")


def spectrogram(tf: ComplexTF, log: bool = False) -> TimeFrequencyMap:
    mag = np.abs(tf.values)
    if log:
        mag = np.log10(np.maximum(mag, LOG_FLOOR))
    kind = "stft_mag" if tf.kind == "stft" else "cwt_mag"
    return TimeFrequencyMap(mag, tf.freq_axis.copy(), tf.time_axis.copy(), kind, log)


def dft_oracle(signal) -> np.ndarray:
    """Direct O(N^2) DFT, X_k = sum_n s_n exp(-2j pi k n / N)."""
    x = np.asarray(signal, complex)
    n = len(x)
    if n < 1:
        raise ParameterError("dft_oracle needs at least one sample")
    out = np.empty(n, complex)
    idx = np.arange(n)
    for k in range(n):
        out[k] = np.sum(x * np.exp(-2j * np.pi * k * idx / n))
    return out


# ---------------------------------------------------------------------------
# CWT

_TRUNCATE = 5.0


def morlet(scale: float, omega0: float = 6.0) -> tuple[np.ndarray, np.ndarray]:
    """Sampled, L2-normalised analytic Morlet daughter at ``scale`` samples.

    Returns (t, psi) with t the integer sample offsets, |t/scale| < 5.
    """
    half = int(np.ceil(_TRUNCATE * scale)) - 1
    t = np.arange(-half, half + 1, dtype=float)
    u = t / scale
    psi = scale**-0.5 * np.pi**-0.25 * np.exp(1j * omega0 * u - 0.5 * u * u)
    return t, psi


def _check_cwt(x, wavelet: WaveletSpec):
    wavelet.validate()
    x = np.asarray(x, complex)
    if x.ndim != 1 or len(x) == 0:
        raise ParameterError("cwt expects a non-empty 1-D signal")
    if not np.all(np.isfinite(x)):
        raise ParameterError("signal must be finite")
    longest = len(morlet(float(np.max(wavelet.scales)), wavelet.omega0)[0])
    if longest > 10 * len(x):
        raise ParameterError(
            f"largest scale gives a {longest}-sample wavelet, over 10x the signal length {len(x)}"
        )
    return x


def cwt(signal, fs: float, wavelet: WaveletSpec, method: str = "fft") -> ComplexTF:
    """W[a, n] = sum_m s[m] conj(psi_a[m - n]), one row per scale.

    The signal is zero outside its support. ``method`` selects a frequency
    domain product ("fft") or direct convolution ("direct"); both compute
    the same linear correlation.
    """
    x = _check_cwt(signal, wavelet)
    n = len(x)
    scales = np.asarray(wavelet.scales, float)
    out = np.empty((len(scales), n), complex)
    if method == "direct":
        for i, a in enumerate(scales):
            _, psi = morlet(a, wavelet.omega0)
            half = len(psi) // 2
            # correlation with psi == convolution with conj(psi) reversed
            full = np.convolve(x, np.conj(psi[::-1]))
            out[i] = full[half : half + n]
    elif method == "fft":
        max_len = len(morlet(float(scales[-1]), wavelet.omega0)[0])
        nfft = 1 << int(np.ceil(np.log2(n + max_len - 1)))
        X = np.fft.fft(x, nfft)
        for i, a in enumerate(scales):
            _, psi = morlet(a, wavelet.omega0)
            half = len(psi) // 2
            kernel = np.zeros(nfft, complex)
            kernel[: len(psi)] = np.conj(psi[::-1])
            full = np.fft.ifft(X * np.fft.fft(kernel))
            out[i] = full[half : half + n]
    else:
        raise ParameterError(f"unknown cwt method {method!r}")
    freqs = scale_to_frequency(scales, wavelet.omega0, fs)
    return ComplexTF(out, freqs, np.arange(n) / fs, "cwt")


def scale_to_frequency(scale, omega0: float, fs: float):
    """Centre frequency in Hz of a Morlet daughter at ``scale`` samples."""
    a = np.asarray(scale, float)
    if np.any(a <= 0):
        raise ParameterError("scale must be positive")
    f = omega0 * fs / (2 * np.pi * a)
    return float(f) if np.ndim(f) == 0 else f


def frequency_to_scale(freq, omega0: float, fs: float):
    f = np.asarray(freq, float)
    if np.any(f <= 0):
        raise ParameterError("frequency must be positive")
    a = omega0 * fs / (2 * np.pi * f)
    return float(a) if np.ndim(a) == 0 else a


def geometric_scales(f_lo: float, f_hi: float, n: int, omega0: float, fs: float) -> np.ndarray:
    """n scales, increasing, whose centre frequencies span f_hi down to f_lo."""
    return np.geomspace(frequency_to_scale(f_hi, omega0, fs), frequency_to_scale(f_lo, omega0, fs), n)


def signed_scalogram(signal, fs: float, wavelet: WaveletSpec) -> ComplexTF:
    """CWT of both Doppler signs stacked on one increasing frequency axis.

    The analytic Morlet only responds to positive frequencies, so negative
    Doppler is read from the transform of the conjugated signal. Rows run
    from -f_max up to -f_min, then +f_min up to +f_max.
    """
    x = np.asarray(signal, complex)
    pos = cwt(x, fs, wavelet)
    neg = cwt(np.conj(x), fs, wavelet)
    # scales increase => frequencies decrease along rows
    values = np.concatenate([neg.values, pos.values[::-1]])
    freqs = np.concatenate([-neg.freq_axis, pos.freq_axis[::-1]])
    return ComplexTF(values, freqs, pos.time_axis, "cwt")


# ---------------------------------------------------------------------------
# resizing


def _bilinear_weights(n_in: int, n_out: int):
    if n_out == 1 or n_in == 1:
        pos = np.zeros(n_out)
    else:
        pos = np.arange(n_out) * (n_in - 1) / (n_out - 1)
    lo = np.clip(np.floor(pos).astype(int), 0, max(n_in - 2, 0))
    hi = np.minimum(lo + 1, n_in - 1)
    frac = pos - lo
    return lo, hi, frac


def resize_bilinear(tfmap: TimeFrequencyMap, out_rows: int, out_cols: int) -> TimeFrequencyMap:
    """Corner-aligned bilinear resampling of the values and both axes."""
    if out_rows < 1 or out_cols < 1:
        raise ParameterError("output dimensions must be >= 1")
    v = tfmap.values
    r0, r1, fr = _bilinear_weights(v.shape[0], out_rows)
    c0, c1, fc = _bilinear_weights(v.shape[1], out_cols)
    top = v[r0][:, c0] * (1 - fc) + v[r0][:, c1] * fc
    bottom = v[r1][:, c0] * (1 - fc) + v[r1][:, c1] * fc
    values = top * (1 - fr)[:, None] + bottom * fr[:, None]
    freqs = tfmap.freq_axis[r0] * (1 - fr) + tfmap.freq_axis[r1] * fr
    times = tfmap.time_axis[c0] * (1 - fc) + tfmap.time_axis[c1] * fc
    return replace(tfmap, values=values, freq_axis=freqs, time_axis=times)


# ---------------------------------------------------------------------------
# file export
#
# CSV: UTF-8, '\n' line ends. Line 1 is "kind,<kind>". Line 2 starts with the
# literal "freq_hz\time_s" followed by the time axis. Each further line is a
# frequency followed by that row's values. Numbers use repr() (round-trip).
#
# PGM: binary P5, header "P5\n<cols> <rows>\n255\n", then rows*cols bytes in
# row-major order; row 0 of the image is row 0 of the map (lowest frequency
# first). Pixel = round(255 * (v - min) / (max - min)); a constant map is all 0.


def to_csv(tfmap: TimeFrequencyMap) -> str:
    lines = [f"kind,{tfmap.kind}", ",".join(["freq_hz\\time_s"] + [repr(float(t)) for t in tfmap.time_axis])]
    for f, row in zip(tfmap.freq_axis, tfmap.values):
        lines.append(",".join([repr(float(f))] + [repr(float(v)) for v in row]))
    return "\n".join(lines) + "\n"


def from_csv(text: str) -> TimeFrequencyMap:
    lines = text.strip("\n").split("\n")
    kind = lines[0].split(",", 1)[1]
    times = np.array([float(t) for t in lines[1].split(",")[1:]])
    rows = [np.array([float(v) for v in line.split(",")]) for line in lines[2:]]
    freqs = np.array([r[0] for r in rows])
    values = np.array([r[1:] for r in rows])
    return TimeFrequencyMap(values, freqs, times, kind)


def to_pgm(tfmap: TimeFrequencyMap) -> bytes:
    v = tfmap.values
    lo, hi = float(v.min()), float(v.max())
    if hi > lo:
        pix = np.round(255.0 * (v - lo) / (hi - lo))
    else:
        pix = np.zeros_like(v)
    rows, cols = v.shape
    return f"P5\n{cols} {rows}\n255\n".encode("ascii") + pix.astype(np.uint8).tobytes()


def read_pgm(data: bytes) -> np.ndarray:
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    cols, rows = (int(x) for x in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(rows, cols)
