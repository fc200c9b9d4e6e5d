import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radargest.errors import ParameterError
from radargest.synth import (
    V_MAX,
    GestureClass,
    GestureParams,
    RadarGeometry,
    Trajectory,
    complex_channels,
    generate_trajectory,
    gesture_path,
    mirror_trajectory,
    simulate_baseband,
    synthesize,
)
from radargest.tfa import WindowSpec, stft

FS = 600.0


def params(g=GestureClass.CIRCLE, r=0.2, d=0.2, **kw):
    return GestureParams(g, r, d, **kw)


def test_four_classes_with_stable_labels():
    assert [int(g) for g in GestureClass] == [0, 1, 2, 3]
    assert GestureClass.parse("tick") is GestureClass.TICK
    assert GestureClass.parse(3) is GestureClass.CROSS


def test_wavelength_from_carrier():
    geo = RadarGeometry()
    assert geo.wavelength == 299792458 / 5.8e9
    tx = np.array(geo.tx_pos)
    assert np.linalg.norm(np.array(geo.rx1_pos) - tx) == pytest.approx(0.10)
    assert np.linalg.norm(np.array(geo.rx2_pos) - tx) == pytest.approx(0.10)


def test_circle_diameter_equals_scale():
    for seed in (0, 7, 123):
        traj = generate_trajectory(params(r=0.2, seed=seed), sample_rate=FS)
        xy = traj.points[:, :2]
        dist = np.linalg.norm(xy[:, None, :] - xy[None, :, :], axis=-1)
        assert dist.max() == pytest.approx(0.2, abs=1e-9)


def test_trajectory_length_and_plane():
    for g in GestureClass:
        traj = generate_trajectory(params(g, speed_jitter=0.2, seed=3), sample_rate=FS)
        assert len(traj) == 600
        if g is not GestureClass.CROSS:
            assert np.ptp(traj.points[:, 2]) == 0.0


@pytest.mark.parametrize("g", list(GestureClass))
def test_same_seed_same_trajectory(g):
    a = generate_trajectory(params(g, seed=11))
    b = generate_trajectory(params(g, seed=11))
    assert np.array_equal(a.points, b.points)
    c = generate_trajectory(params(g, speed_jitter=0.3, seed=11))
    d = generate_trajectory(params(g, speed_jitter=0.3, seed=11))
    assert np.array_equal(c.points, d.points)


def test_square_path_length_against_polyline():
    r = 0.2
    p = params(GestureClass.SQUARE, r=r)
    path = gesture_path(p)
    c = 0.05 * r
    analytic = 4 * r - (8 - 2 * np.pi) * c
    assert path.length == pytest.approx(analytic, rel=1e-12)
    # dense polyline of the parametric path
    pts = path(np.linspace(0, path.length, 200001))
    dense = np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1))
    assert dense == pytest.approx(analytic, rel=1e-8)
    # the sampled trajectory, closed back to its start
    traj = generate_trajectory(p, sample_rate=FS).points
    closed = np.vstack([traj, traj[:1]])
    summed = np.sum(np.linalg.norm(np.diff(closed, axis=0), axis=1))
    assert summed == pytest.approx(analytic, rel=2e-3)
    assert summed < analytic


def test_tick_and_cross_geometry():
    r = 0.3
    tick = gesture_path(params(GestureClass.TICK, r=r))
    assert tick.length == pytest.approx(1.5 * r)
    pts = tick(np.array([0.0, 0.5 * r, 1.5 * r]))
    u, v = pts[0] - pts[1], pts[2] - pts[1]
    angle = np.degrees(np.arccos(u @ v / np.linalg.norm(u) / np.linalg.norm(v)))
    assert angle == pytest.approx(100.0)
    cross = gesture_path(params(GestureClass.CROSS, r=r))
    z = cross(np.linspace(0, cross.length, 5001))[:, 2]
    assert z.max() == pytest.approx(0.25 * r)


@pytest.mark.parametrize("g", list(GestureClass))
@pytest.mark.parametrize("r", [0.2, 0.5])
def test_speed_cap_and_clearance(g, r):
    geo = RadarGeometry()
    for seed in range(3):
        traj = generate_trajectory(params(g, r=r, d=0.1, speed_jitter=0.45, seed=seed), geo, FS)
        step = np.linalg.norm(np.diff(traj.points, axis=0), axis=1)
        assert step.max() <= V_MAX / FS
        for ant in (geo.tx_pos, geo.rx1_pos, geo.rx2_pos):
            assert np.linalg.norm(traj.points - np.array(ant), axis=1).min() > 0


@pytest.mark.parametrize(
    "kw",
    [dict(duration=0.0), dict(scale_r=0.0), dict(scale_r=-1.0), dict(distance_d=0.01), dict(speed_jitter=0.5)],
)
def test_parameter_domain_errors(kw):
    base = dict(gesture=GestureClass.SQUARE, scale_r=0.2, distance_d=0.2)
    base.update(kw)
    with pytest.raises(ParameterError):
        generate_trajectory(GestureParams(**base))


def test_zero_sample_rate_rejected():
    with pytest.raises(ParameterError):
        generate_trajectory(params(), sample_rate=0)


def test_stationary_scatterer_gives_zero_after_dc_removal():
    pts = np.tile([0.0, 0.3, 0.05], (600, 1))
    traj = Trajectory(FS, pts)
    raw = simulate_baseband(traj, amplitude_model="unit", remove_dc=False)
    assert np.ptp(raw.channels, axis=1) == pytest.approx(np.zeros(4), abs=1e-15)
    sig = simulate_baseband(traj, amplitude_model="unit")
    assert np.abs(sig.channels).max() < 1e-12


def receding(v=0.5, n=600):
    t = np.arange(n) / FS
    pts = np.zeros((n, 3))
    pts[:, 1] = 0.3 + v * t
    return Trajectory(FS, pts)


MONOSTATIC = RadarGeometry(rx1_pos=(0.0, 0.0, 0.0))


def test_receding_target_doppler_frequency():
    # f_d = 2 v f_c / c; TX and RX1 co-located
    expected = 2 * 0.5 * 5.8e9 / 299792458
    assert expected == pytest.approx(19.34, abs=0.01)
    sig = simulate_baseband(receding(), MONOSTATIC, amplitude_model="unit")
    s1, _ = complex_channels(sig)
    tf = stft(s1, FS, WindowSpec("rectangular", 600), hop=600, nfft=6000)
    peak = tf.freq_axis[np.argmax(np.abs(tf.values[:, 0]))]
    # receding => negative Doppler
    assert peak < 0
    assert abs(abs(peak) - expected) <= 0.5


def test_snr_scaling():
    geo = MONOSTATIC
    clean = simulate_baseband(receding(), geo, amplitude_model="unit")
    noisy = simulate_baseband(receding(), geo, amplitude_model="unit", snr_db=10, seed=5)
    noise = noisy.channels - clean.channels
    ratio = np.sum(clean.channels**2) / np.sum(noise**2)
    assert 10 * np.log10(ratio) == pytest.approx(10.0, abs=0.5)


def test_snr_on_static_scatterer_rejected():
    traj = Trajectory(FS, np.tile([0.0, 0.3, 0.05], (600, 1)))
    with pytest.raises(ParameterError):
        simulate_baseband(traj, snr_db=10)
    with pytest.raises(ParameterError):
        simulate_baseband(Trajectory(FS, np.zeros((0, 3))))


def test_baseband_invariants():
    sig = synthesize(params(GestureClass.CROSS, speed_jitter=0.2, seed=4), snr_db=5)
    assert sig.channels.shape == (4, 600)
    assert np.all(np.isfinite(sig.channels))
    rms = np.sqrt(np.mean(sig.channels**2, axis=1))
    assert np.all(np.abs(sig.channels.mean(axis=1)) < 1e-9 * rms)


def test_determinism_of_baseband():
    p = params(GestureClass.SQUARE, speed_jitter=0.2, seed=9)
    a = synthesize(p, snr_db=3)
    b = synthesize(p, snr_db=3)
    assert a.channels.tobytes() == b.channels.tobytes()


def test_complex_channels_definition():
    from radargest.synth import BasebandSignal

    ch = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0]])
    s1, s2 = complex_channels(BasebandSignal(FS, ch))
    assert np.array_equal(s1, np.array([1 + 0j, 1j]))
    assert len(s2) == 2


def test_real_channel_has_conjugate_symmetric_spectrum():
    from radargest.synth import BasebandSignal

    sig = synthesize(params(GestureClass.TICK, seed=2))
    ch = sig.channels.copy()
    ch[1] = 0.0
    s1, _ = complex_channels(BasebandSignal(FS, ch))
    X = np.fft.fft(s1)
    assert np.allclose(X[1:], np.conj(X[1:][::-1]), atol=1e-9)


@pytest.mark.parametrize("g", list(GestureClass))
def test_mirror_swaps_receivers(g):
    p = params(g, speed_jitter=0.2, seed=6)
    traj = generate_trajectory(p)
    mirrored = mirror_trajectory(traj)
    a = simulate_baseband(traj, snr_db=10, seed=(1, 2))
    b = simulate_baseband(mirrored, snr_db=10, seed=(2, 1))
    assert np.allclose(a.channels[:2], b.channels[2:], atol=1e-9)
    assert np.allclose(a.channels[2:], b.channels[:2], atol=1e-9)


def _energy_above(sig, f_cut):
    out = []
    for s in complex_channels(sig):
        S = np.abs(np.fft.fft(s * np.hanning(len(s)))) ** 2
        f = np.abs(np.fft.fftfreq(len(s), 1 / FS))
        out.append(10 * np.log10(S[f > f_cut].sum() / S.sum()))
    return max(out)


DOPPLER_CUT = 2 * V_MAX / RadarGeometry().wavelength + 5


@pytest.mark.parametrize("g", list(GestureClass))
@pytest.mark.parametrize("d", [0.1, 0.2, 0.5])
def test_doppler_band_limit(g, d):
    assert DOPPLER_CUT == pytest.approx(160, abs=1)
    scales = [0.2] if g is GestureClass.SQUARE else [0.2, 0.5]
    for r in scales:
        for seed in range(3):
            sig = synthesize(params(g, r=r, d=d, speed_jitter=0.2, seed=seed))
            assert _energy_above(sig, DOPPLER_CUT) <= -30


@pytest.mark.xfail(strict=True, reason="rounded corners at the speed cap spread the square's Doppler past 160 Hz")
def test_doppler_band_limit_large_square():
    sig = synthesize(params(GestureClass.SQUARE, r=0.5, d=0.5, speed_jitter=0.2, seed=0))
    assert _energy_above(sig, DOPPLER_CUT) <= -30


@settings(max_examples=25, deadline=None)
@given(
    g=st.sampled_from(list(GestureClass)),
    r=st.floats(0.05, 0.4),
    d=st.floats(0.1, 0.6),
    jitter=st.floats(0.0, 0.45),
    seed=st.integers(0, 2**32 - 1),
)
def test_trajectory_properties(g, r, d, jitter, seed):
    p = GestureParams(g, r, d, speed_jitter=jitter, seed=seed)
    traj = generate_trajectory(p)
    step = np.linalg.norm(np.diff(traj.points, axis=0), axis=1)
    assert step.max() <= V_MAX / FS
    sig = simulate_baseband(traj, snr_db=0.0, seed=seed)
    assert np.all(np.isfinite(sig.channels))
