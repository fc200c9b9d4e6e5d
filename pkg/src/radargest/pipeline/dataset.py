"""Synthetic gesture datasets: generation, stratified split, normalization, GDS1 files.

A GDS1 dataset is a directory with two files. ``manifest.json`` holds the
format tag, the generation config, per-sample metadata with byte offsets,
the train/test split and the normalization statistics. ``samples.bin`` is
the stacked (N, 2, rows, cols) feature tensor as little-endian float32.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ..errors import FormatError, ParameterError
from ..synth import GestureClass, GestureParams, complex_channels, synthesize
from ..tfa import (
    TimeFrequencyMap,
    WaveletSpec,
    WindowSpec,
    geometric_scales,
    resize_bilinear,
    signed_scalogram,
    spectrogram,
    stft,
)

FORMAT = "GDS1"
MANIFEST = "manifest.json"
BLOB = "samples.bin"
D_REF = 0.1  # m, distance at which the configured SNR holds
FEATURE_FLOOR = 1e-6  # relative magnitude floor before the log
TF_METHODS = ("stft", "cwt")

# (speed_jitter, corner_radius_frac) per simulated volunteer
VOLUNTEER_GROUPS = ((0.05, 0.05), (0.10, 0.04), (0.15, 0.06), (0.20, 0.07))


@dataclass(frozen=True)
class FeatureConfig:
    """Transform settings shared by every sample of a dataset."""

    window_length: int = 128
    hop: int = 1
    nfft: int = 256
    cwt_scales_per_side: int = 128
    cwt_f_lo: float = 1.0
    cwt_f_hi: float = 100.0
    omega0: float = 6.0


@dataclass
class BuildConfig:
    per_class: int = 25
    distances: tuple = (0.2,)
    scales: tuple = (0.2,)
    snr_db: float | None = 10.0
    range_scaled_snr: bool = True
    tf_method: str = "stft"
    input_dims: tuple = (64, 64)
    seed: int = 0
    classes: tuple = tuple(g.name.lower() for g in GestureClass)
    train_fraction: float = 0.8
    sample_rate: float = 600.0

    def validate(self) -> None:
        if self.per_class < 1:
            raise ParameterError("per_class must be >= 1")
        if len(self.distances) == 0 or len(self.scales) == 0:
            raise ParameterError("distance and scale lists must be non-empty")
        if self.tf_method not in TF_METHODS:
            raise ParameterError(f"tf_method must be one of {TF_METHODS}")
        if len(self.input_dims) != 2 or min(self.input_dims) < 1:
            raise ParameterError("input_dims must be two positive integers")
        if not self.classes:
            raise ParameterError("at least one class is required")
        if not 0 < self.train_fraction < 1:
            raise ParameterError("train_fraction must lie in (0, 1)")

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("distances", "scales", "input_dims", "classes"):
            d[k] = list(d[k])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "BuildConfig":
        d = dict(d)
        for k in ("distances", "scales", "input_dims", "classes"):
            d[k] = tuple(d[k])
        return cls(**d)


def effective_snr(snr_db: float | None, distance: float, range_scaled: bool = True) -> float | None:
    """SNR at ``distance`` when return power falls as d^-4 from its value at D_REF."""
    if snr_db is None or not range_scaled:
        return snr_db
    return float(snr_db + 40.0 * np.log10(D_REF / distance))


def tf_maps(sig, tf_method: str = "stft", features: FeatureConfig | None = None) -> list[TimeFrequencyMap]:
    """One magnitude map per receiver."""
    fc = features or FeatureConfig()
    fs = sig.sample_rate
    out = []
    for s in complex_channels(sig):
        if tf_method == "stft":
            tf = stft(s, fs, WindowSpec("hann", fc.window_length), fc.hop, fc.nfft)
        elif tf_method == "cwt":
            scales = geometric_scales(fc.cwt_f_lo, fc.cwt_f_hi, fc.cwt_scales_per_side, fc.omega0, fs)
            tf = signed_scalogram(s, fs, WaveletSpec(scales, fc.omega0))
        else:
            raise ParameterError(f"tf_method must be one of {TF_METHODS}")
        out.append(spectrogram(tf))
    return out


def normalize_sample(x: np.ndarray) -> np.ndarray:
    """Scale by the peak over both channels, then log10 with a floor.

    Invariant to any positive rescaling of the input magnitudes.
    """
    x = np.asarray(x, float)
    peak = x.max()
    if not peak > 0:
        return np.full_like(x, np.log10(FEATURE_FLOOR))
    return np.log10(np.maximum(x / peak, FEATURE_FLOOR))


def featurize(sig, tf_method: str, input_dims, features: FeatureConfig | None = None) -> np.ndarray:
    rows, cols = input_dims
    maps = [resize_bilinear(m, rows, cols).values for m in tf_maps(sig, tf_method, features)]
    return normalize_sample(np.stack(maps))


def sample_params(config: BuildConfig) -> list[tuple[GestureParams, float | None, int, int]]:
    """(gesture params, snr, noise seed, volunteer group) for every sample, in storage order.

    Order is class, then distance, then scale, then repetition. Seeds come
    from SeedSequence([seed, index]) so each sample is independent of the
    others and of build order.
    """
    config.validate()
    out = []
    k = 0
    for name in config.classes:
        g = GestureClass.parse(name)
        for d in config.distances:
            for r in config.scales:
                for i in range(config.per_class):
                    group = i % len(VOLUNTEER_GROUPS)
                    jitter, corner = VOLUNTEER_GROUPS[group]
                    gseed, nseed = np.random.SeedSequence([config.seed, k]).generate_state(2)
                    p = GestureParams(g, float(r), float(d), 1.0, jitter, int(gseed), corner)
                    out.append((p, effective_snr(config.snr_db, d, config.range_scaled_snr), int(nseed), group))
                    k += 1
    return out


@dataclass
class Dataset:
    x: np.ndarray  # (N, 2, rows, cols) float32, per-sample normalized
    labels: np.ndarray  # (N,) int
    meta: list  # per-sample dicts
    config: BuildConfig
    train_index: np.ndarray | None = None
    test_index: np.ndarray | None = None
    normalization: dict | None = None  # {"mean", "std"} from the training split
    features: FeatureConfig = field(default_factory=FeatureConfig)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def input_shape(self) -> tuple:
        return tuple(self.x.shape[1:])

    def assign_split(self, train_fraction: float = 0.8, seed: int = 0) -> None:
        self.train_index, self.test_index = split(self.labels, train_fraction, seed)
        self.normalization = fit_normalization(self.x[self.train_index])

    def standardized(self, index=None) -> np.ndarray:
        if self.normalization is None:
            raise ParameterError("dataset has no split; call assign_split first")
        x = self.x if index is None else self.x[index]
        return (x.astype(float) - self.normalization["mean"]) / self.normalization["std"]

    def train_arrays(self):
        return self.standardized(self.train_index), self.labels[self.train_index]

    def test_arrays(self):
        return self.standardized(self.test_index), self.labels[self.test_index]


def split(labels, train_fraction: float = 0.8, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Stratified seeded split; returns sorted (train, test) index arrays.

    Each class contributes round(n_c * fraction) training samples, clipped
    so that both sides keep at least one.
    """
    if not 0 < train_fraction < 1:
        raise ParameterError("train_fraction must lie in (0, 1)")
    labels = np.asarray(labels, dtype=int)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        if len(idx) < 2:
            raise ParameterError(f"class {c} has fewer than 2 samples; cannot split")
        idx = rng.permutation(idx)
        n_train = min(max(int(round(len(idx) * train_fraction)), 1), len(idx) - 1)
        train.append(idx[:n_train])
        test.append(idx[n_train:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def fit_normalization(x_train: np.ndarray) -> dict:
    x = np.asarray(x_train, float)
    std = float(x.std())
    return {"mean": float(x.mean()), "std": std if std > 0 else 1.0}


def build_dataset(
    per_class: int = 25,
    distances=(0.2,),
    scales=(0.2,),
    snr_db: float | None = 10.0,
    tf_method: str = "stft",
    input_dims=(64, 64),
    seed: int = 0,
    classes=None,
    train_fraction: float = 0.8,
    range_scaled_snr: bool = True,
    features: FeatureConfig | None = None,
) -> Dataset:
    """Full factorial over classes x distances x scales x per_class, split and normalized."""
    config = BuildConfig(
        per_class=int(per_class),
        distances=tuple(float(d) for d in distances),
        scales=tuple(float(r) for r in scales),
        snr_db=None if snr_db is None else float(snr_db),
        range_scaled_snr=range_scaled_snr,
        tf_method=tf_method,
        input_dims=tuple(int(v) for v in input_dims),
        seed=int(seed),
        classes=tuple(classes) if classes else BuildConfig.classes,
        train_fraction=float(train_fraction),
    )
    features = features or FeatureConfig()
    plan = sample_params(config)
    xs, labels, meta = [], [], []
    for p, snr, nseed, group in plan:
        sig = synthesize(p, sample_rate=config.sample_rate, snr_db=snr, noise_seed=nseed)
        xs.append(featurize(sig, config.tf_method, config.input_dims, features).astype(np.float32))
        labels.append(int(p.gesture))
        meta.append({"params": p.to_dict(), "snr_db": snr, "noise_seed": nseed, "group": group})
    ds = Dataset(np.stack(xs), np.array(labels, dtype=int), meta, config, features=features)
    ds.assign_split(config.train_fraction, config.seed)
    return ds


# ---------------------------------------------------------------------------
# persistence


def blob_bytes(ds: Dataset) -> bytes:
    return np.ascontiguousarray(ds.x, dtype="<f4").tobytes()


def save_dataset(ds: Dataset, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    per_sample = int(np.prod(ds.input_shape)) * 4
    samples = []
    for i, (label, m) in enumerate(zip(ds.labels, ds.meta)):
        samples.append({"index": i, "label": int(label), "offset": i * per_sample, "nbytes": per_sample, **m})
    manifest = {
        "format": FORMAT,
        "version": 1,
        "config": ds.config.to_dict(),
        "features": asdict(ds.features),
        "sample_shape": list(ds.input_shape),
        "dtype": "<f4",
        "blob": BLOB,
        "split": None
        if ds.train_index is None
        else {"train": ds.train_index.tolist(), "test": ds.test_index.tolist()},
        "normalization": ds.normalization,
        "samples": samples,
    }
    (out / BLOB).write_bytes(blob_bytes(ds))
    (out / MANIFEST).write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return out


def load_dataset(path) -> Dataset:
    path = Path(path)
    manifest_path = path / MANIFEST if path.is_dir() else path
    try:
        manifest = json.loads(manifest_path.read_text())
    except FileNotFoundError:
        raise FormatError(f"no dataset manifest at {manifest_path}") from None
    if manifest.get("format") != FORMAT:
        raise FormatError(f"{manifest_path} is not a {FORMAT} manifest")
    shape = tuple(manifest["sample_shape"])
    data = (manifest_path.parent / manifest["blob"]).read_bytes()
    n = len(manifest["samples"])
    per_sample = int(np.prod(shape)) * 4
    if len(data) != n * per_sample:
        raise FormatError(f"blob holds {len(data)} bytes, manifest expects {n * per_sample}")
    x = np.frombuffer(data, dtype="<f4").reshape((n,) + shape).astype(np.float32)
    labels = np.array([s["label"] for s in manifest["samples"]], dtype=int)
    meta = [{k: s[k] for k in ("params", "snr_db", "noise_seed", "group")} for s in manifest["samples"]]
    ds = Dataset(
        x, labels, meta, BuildConfig.from_dict(manifest["config"]), features=FeatureConfig(**manifest["features"])
    )
    if manifest["split"] is not None:
        ds.train_index = np.array(manifest["split"]["train"], dtype=int)
        ds.test_index = np.array(manifest["split"]["test"], dtype=int)
        ds.normalization = manifest["normalization"]
    return ds
