"""Point-scatterer hand-gesture simulator for a 1-TX / 2-RX quadrature Doppler radar.

Coordinates are metres. The antennas sit on the x axis (RX1 left, TX in the
middle, RX2 right), the boresight is +y and gestures are drawn in the
horizontal x-y plane centred ``distance_d`` in front of the transmitter.
z is the vertical axis and is only used by the lift between the two strokes
of a cross.

Sign convention: the baseband phasor of receiver k is
``A(t) * exp(-j * 2*pi * L_k(t) / lambda)`` where ``L_k`` is the bistatic path
length TX -> hand -> RX_k. A receding hand (growing ``L_k``) therefore shows up
at negative Doppler frequency in ``complex_channels`` output.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError

SPEED_OF_LIGHT = 299792458.0
V_MAX = 4.0  # hand-speed cap, m/s
DEFAULT_SAMPLE_RATE = 600.0

_OVERSAMPLE = 16  # fine grid used to integrate the speed profile


class GestureClass(enum.IntEnum):
    CIRCLE = 0
    SQUARE = 1
    TICK = 2
    CROSS = 3

    @classmethod
    def parse(cls, value) -> "GestureClass":
        if isinstance(value, GestureClass):
            return value
        if isinstance(value, str):
            try:
                return cls[value.strip().upper()]
            except KeyError:
                raise ParameterError(f"unknown gesture class {value!r}") from None
        try:
            return cls(int(value))
        except ValueError:
            raise ParameterError(f"unknown gesture class {value!r}") from None


@dataclass(frozen=True)
class GestureParams:
    gesture: GestureClass
    scale_r: float
    distance_d: float
    duration: float = 1.0
    speed_jitter: float = 0.0
    seed: int = 0
    corner_radius_frac: float = 0.05

    def validate(self) -> None:
        if not self.duration > 0:
            raise ParameterError(f"duration must be > 0, got {self.duration}")
        if not self.scale_r > 0:
            raise ParameterError(f"scale_r must be > 0, got {self.scale_r}")
        if not self.distance_d >= 0.05:
            raise ParameterError(f"distance_d must be >= 0.05 m, got {self.distance_d}")
        if not 0.0 <= self.speed_jitter < 0.5:
            raise ParameterError(f"speed_jitter must lie in [0, 0.5), got {self.speed_jitter}")
        if not 0.0 <= self.corner_radius_frac < 0.5:
            raise ParameterError("corner_radius_frac must lie in [0, 0.5)")

    def to_dict(self) -> dict:
        return {
            "gesture": self.gesture.name.lower(),
            "scale_r": self.scale_r,
            "distance_d": self.distance_d,
            "duration": self.duration,
            "speed_jitter": self.speed_jitter,
            "seed": self.seed,
            "corner_radius_frac": self.corner_radius_frac,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GestureParams":
        d = dict(d)
        d["gesture"] = GestureClass.parse(d["gesture"])
        return cls(**d)


@dataclass(frozen=True)
class RadarGeometry:
    carrier_hz: float = 5.8e9
    tx_pos: tuple = (0.0, 0.0, 0.0)
    rx1_pos: tuple = (-0.10, 0.0, 0.0)
    rx2_pos: tuple = (0.10, 0.0, 0.0)
    # gesture plane sits this far above the antenna row so that close-range
    # gestures never pass through an antenna
    plane_height: float = 0.05

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def receivers(self) -> tuple:
        return (self.rx1_pos, self.rx2_pos)


@dataclass
class Trajectory:
    sample_rate: float
    points: np.ndarray  # (n, 3)

    def __len__(self) -> int:
        return len(self.points)


@dataclass
class BasebandSignal:
    """Four real channels ordered [RX1-I, RX1-Q, RX2-I, RX2-Q]."""

    sample_rate: float
    channels: np.ndarray  # (4, n)
    meta: GestureParams | None = None
    snr_db: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def n_samples(self) -> int:
        return self.channels.shape[1]


# ---------------------------------------------------------------------------
# piecewise paths parameterised by arc length


class _Path:
    """Concatenation of straight lines and circular arcs in 3-D."""

    def __init__(self):
        self._pieces = []  # (kind, length, payload)

    def line(self, p0, p1):
        p0 = np.asarray(p0, float)
        p1 = np.asarray(p1, float)
        length = float(np.linalg.norm(p1 - p0))
        if length > 0:
            self._pieces.append(("line", length, (p0, p1)))
        return self

    def arc(self, center, radius, theta0, dtheta):
        """Arc in the horizontal plane at height center[2]."""
        length = abs(dtheta) * radius
        if length > 0:
            self._pieces.append(("arc", length, (np.asarray(center, float), radius, theta0, dtheta)))
        return self

    @property
    def length(self) -> float:
        return sum(p[1] for p in self._pieces)

    def __call__(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, float)
        out = np.empty(s.shape + (3,))
        start = 0.0
        last = len(self._pieces) - 1
        for i, (kind, length, payload) in enumerate(self._pieces):
            if i == last:
                mask = s >= start
            else:
                mask = (s >= start) & (s < start + length)
            if i == 0:
                mask |= s < 0
            u = s[mask] - start
            if kind == "line":
                p0, p1 = payload
                out[mask] = p0 + np.outer(u / length, p1 - p0)
            else:
                center, radius, theta0, dtheta = payload
                theta = theta0 + np.sign(dtheta) * u / radius
                out[mask, 0] = center[0] + radius * np.cos(theta)
                out[mask, 1] = center[1] + radius * np.sin(theta)
                out[mask, 2] = center[2]
            start += length
        return out


def _circle_path(r: float) -> _Path:
    # starts at the point nearest the radar, moving laterally; half-way round
    # (peak speed) the hand is again moving laterally at the far side
    radius = r / 2.0
    return _Path().arc((0.0, 0.0, 0.0), radius, -np.pi / 2, 2 * np.pi)


def _square_path(r: float, corner_frac: float) -> _Path:
    # starts mid-way along the left (radial) side moving away from the radar
    h = r / 2.0
    c = corner_frac * r
    path = _Path()
    path.line((-h, 0.0, 0.0), (-h, h - c, 0.0))
    path.arc((-h + c, h - c, 0.0), c, np.pi, -np.pi / 2)
    path.line((-h + c, h, 0.0), (h - c, h, 0.0))
    path.arc((h - c, h - c, 0.0), c, np.pi / 2, -np.pi / 2)
    path.line((h, h - c, 0.0), (h, -h + c, 0.0))
    path.arc((h - c, -h + c, 0.0), c, 0.0, -np.pi / 2)
    path.line((h - c, -h, 0.0), (-h + c, -h, 0.0))
    path.arc((-h + c, -h + c, 0.0), c, -np.pi / 2, -np.pi / 2)
    path.line((-h, -h + c, 0.0), (-h, 0.0, 0.0))
    return path


def _tick_path(r: float) -> _Path:
    # short arm r/2 and long arm r, 100 degrees apart at the vertex
    short_dir = np.array([np.cos(np.radians(140.0)), np.sin(np.radians(140.0)), 0.0])
    long_dir = np.array([np.cos(np.radians(40.0)), np.sin(np.radians(40.0)), 0.0])
    a = 0.5 * r * short_dir
    b = r * long_dir
    lo = np.minimum(np.minimum(a, b), 0.0)
    hi = np.maximum(np.maximum(a, b), 0.0)
    offset = -(lo + hi) / 2.0
    offset[2] = 0.0
    return _Path().line(a + offset, offset).line(offset, b + offset)


def _cross_path(r: float) -> _Path:
    a = r / (2.0 * np.sqrt(2.0))
    lift = 0.25 * r
    return (
        _Path()
        .line((-a, -a, 0.0), (a, a, 0.0))
        .line((a, a, 0.0), (0.0, a, lift))
        .line((0.0, a, lift), (-a, a, 0.0))
        .line((-a, a, 0.0), (a, -a, 0.0))
    )


def gesture_path(params: GestureParams) -> _Path:
    g = GestureClass.parse(params.gesture)
    r = params.scale_r
    if g is GestureClass.CIRCLE:
        return _circle_path(r)
    if g is GestureClass.SQUARE:
        return _square_path(r, params.corner_radius_frac)
    if g is GestureClass.TICK:
        return _tick_path(r)
    return _cross_path(r)


def _jitter_modulation(t: np.ndarray, duration: float, rng: np.random.Generator) -> np.ndarray:
    """Smooth random curve in [-1, 1] made of a few low harmonics."""
    m = np.zeros_like(t)
    for k in range(1, 4):
        m += rng.normal() / k * np.sin(2 * np.pi * k * t / duration + rng.uniform(0, 2 * np.pi))
    peak = np.max(np.abs(m))
    return m / peak if peak > 0 else m


def _progress(params: GestureParams, length: float, n: int, sample_rate: float) -> np.ndarray:
    """Arc length travelled at each sample instant.

    Raised-cosine speed profile over the whole gesture, multiplied by
    (1 + jitter * smooth noise) and capped at V_MAX.
    """
    duration = params.duration
    fine = np.linspace(0.0, duration, n * _OVERSAMPLE + 1)
    weight = 1.0 - np.cos(2 * np.pi * fine / duration)
    if params.speed_jitter > 0:
        rng = np.random.default_rng(params.seed)
        weight = weight * (1.0 + params.speed_jitter * _jitter_modulation(fine, duration, rng))

    dt = fine[1] - fine[0]

    def integral(v):
        return np.sum(0.5 * (v[1:] + v[:-1])) * dt

    if length / duration > 0.9 * V_MAX:
        raise ParameterError(
            f"path length {length:.3f} m cannot be drawn in {duration} s under the {V_MAX} m/s cap"
        )
    cap = V_MAX * (1.0 - 1e-3)  # margin for the final renormalisation
    speed = weight * (length / integral(weight))
    for _ in range(100):
        over = speed > cap
        if not over.any():
            break
        free = np.where(over, 0.0, speed)
        alpha = (length - integral(np.where(over, cap, 0.0))) / integral(free)
        speed = np.where(over, cap, free * alpha)
    speed = np.minimum(speed, cap)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]) * dt)])
    cum *= length / cum[-1]
    return cum[: n * _OVERSAMPLE : _OVERSAMPLE]


def generate_trajectory(
    params: GestureParams,
    geometry: RadarGeometry | None = None,
    sample_rate: float = DEFAULT_SAMPLE_RATE,
) -> Trajectory:
    geometry = geometry or RadarGeometry()
    params.validate()
    if not sample_rate > 0:
        raise ParameterError(f"sample_rate must be > 0, got {sample_rate}")
    n = int(round(params.duration * sample_rate))
    if n < 1:
        raise ParameterError("duration * sample_rate rounds to zero samples")
    path = gesture_path(params)
    s = _progress(params, path.length, n, sample_rate)
    local = path(s)
    center = np.asarray(geometry.tx_pos, float) + np.array([0.0, params.distance_d, geometry.plane_height])
    points = local + center
    for antenna in (geometry.tx_pos, *geometry.receivers):
        if np.min(np.linalg.norm(points - np.asarray(antenna, float), axis=1)) <= 1e-6:
            raise ParameterError("trajectory passes through an antenna")
    return Trajectory(sample_rate=float(sample_rate), points=points)


def mirror_trajectory(traj: Trajectory, geometry: RadarGeometry | None = None) -> Trajectory:
    """Reflect across the vertical plane through TX containing the boresight."""
    geometry = geometry or RadarGeometry()
    pts = traj.points.copy()
    pts[:, 0] = 2 * geometry.tx_pos[0] - pts[:, 0]
    return Trajectory(traj.sample_rate, pts)


# ---------------------------------------------------------------------------
# baseband synthesis

AMPLITUDE_MODELS = ("unit", "inverse_r2", "inverse_r4")


def _noise_seeds(seed) -> tuple:
    if seed is None:
        seed = 0
    if isinstance(seed, (tuple, list)):
        if len(seed) != 2:
            raise ParameterError("per-receiver noise seeds must be a pair")
        return tuple(np.random.SeedSequence(int(s)) for s in seed)
    return tuple(np.random.SeedSequence(int(seed)).spawn(2))


def simulate_baseband(
    traj: Trajectory,
    geometry: RadarGeometry | None = None,
    amplitude_model: str = "inverse_r2",
    snr_db: float | None = None,
    seed=0,
    params: GestureParams | None = None,
    remove_dc: bool = True,
) -> BasebandSignal:
    """Quadrature baseband of a point scatterer seen by both receivers.

    ``seed`` is an int (split into one noise stream per receiver) or an
    explicit (rx1_seed, rx2_seed) pair.
    """
    geometry = geometry or RadarGeometry()
    if amplitude_model not in AMPLITUDE_MODELS:
        raise ParameterError(f"amplitude_model must be one of {AMPLITUDE_MODELS}")
    pts = np.asarray(traj.points, float)
    if len(pts) == 0:
        raise ParameterError("empty trajectory")

    tx = np.asarray(geometry.tx_pos, float)
    d_tx = np.linalg.norm(pts - tx, axis=1)
    lam = geometry.wavelength
    clean = []
    amps = []
    for rx in geometry.receivers:
        d_rx = np.linalg.norm(pts - np.asarray(rx, float), axis=1)
        if np.min(d_tx) <= 0 or np.min(d_rx) <= 0:
            raise ParameterError("scatterer coincides with an antenna")
        path_len = d_tx + d_rx
        if amplitude_model == "unit":
            amp = np.ones_like(path_len)
        elif amplitude_model == "inverse_r2":
            amp = 1.0 / (d_tx * d_rx)
        else:
            amp = 1.0 / (d_tx**2 * d_rx**2)
        amps.append(amp)
        clean.append(np.exp(-2j * np.pi * path_len / lam))
    peak = max(a.max() for a in amps)
    clean = [a / peak * c for a, c in zip(amps, clean)]

    noisy = clean
    if snr_db is not None:
        # Doppler (AC) power of the clean return; a static hand has none
        power = np.mean([np.mean(np.abs(c - c.mean()) ** 2) for c in clean])
        total = np.mean([np.mean(np.abs(c) ** 2) for c in clean])
        if power <= 1e-20 * total:
            raise ParameterError("cannot scale noise to an SNR for a zero-power signal")
        noise_power = power / 10.0 ** (snr_db / 10.0)
        sigma = np.sqrt(noise_power / 2.0)
        noisy = []
        for c, ss in zip(clean, _noise_seeds(seed)):
            rng = np.random.default_rng(ss)
            w = rng.normal(0.0, sigma, size=(2, len(c)))
            noisy.append(c + (w[0] + 1j * w[1]))

    channels = np.empty((4, len(pts)))
    for k, c in enumerate(noisy):
        channels[2 * k] = c.real
        channels[2 * k + 1] = c.imag
    if remove_dc:
        channels -= channels.mean(axis=1, keepdims=True)
    return BasebandSignal(
        sample_rate=traj.sample_rate, channels=channels, meta=params, snr_db=snr_db
    )


def complex_channels(sig: BasebandSignal) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(I1 + jQ1, I2 + jQ2)``."""
    ch = sig.channels
    return ch[0] + 1j * ch[1], ch[2] + 1j * ch[3]


def synthesize(
    params: GestureParams,
    geometry: RadarGeometry | None = None,
    sample_rate: float = DEFAULT_SAMPLE_RATE,
    amplitude_model: str = "inverse_r2",
    snr_db: float | None = None,
    noise_seed=None,
) -> BasebandSignal:
    """Trajectory and baseband in one call; noise seed defaults to the gesture seed."""
    traj = generate_trajectory(params, geometry, sample_rate)
    seed = params.seed if noise_seed is None else noise_seed
    return simulate_baseband(traj, geometry, amplitude_model, snr_db, seed, params=params)


def with_seed(params: GestureParams, seed: int) -> GestureParams:
    return replace(params, seed=seed)
