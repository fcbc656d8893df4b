import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harmo.beats import BeatSequence
from harmo.meter import (MeterType, MeterUnit, classify_meter,
                         classify_meter_windows, initial_pose_features,
                         label_beats, meter_agreement, meter_report,
                         segment_meter_units)
from harmo.motion import PoseSequence


def beats_with(saliency, spacing=0.5):
    saliency = np.asarray(saliency, dtype=float)
    return BeatSequence(np.arange(len(saliency)) * spacing, saliency)


class TestLabelBeats:
    def test_hand_applied_rule(self):
        labels = label_beats(beats_with([0.5, 0.8, 0.3, 0.6]))
        assert np.array_equal(labels, [1, 1, 0, 1])

    def test_monotone_decreasing(self):
        assert np.array_equal(label_beats(beats_with([5, 4, 3, 2])), [1, 0, 0, 0])

    def test_single_beat_is_strong(self):
        assert np.array_equal(label_beats(beats_with([7.0])), [1])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            label_beats(beats_with([]))

    @settings(max_examples=100, deadline=None)
    @given(seed=st.integers(0, 100_000),
           scale=st.floats(min_value=1e-3, max_value=1e3))
    def test_labels_invariant_under_saliency_scaling(self, seed, scale):
        rng = np.random.default_rng(seed)
        saliency = rng.uniform(0.1, 10.0, 12)
        assert np.array_equal(label_beats(beats_with(saliency)),
                              label_beats(beats_with(saliency * scale)))


class TestClassifyMeter:
    def test_strict_alternation_is_duple(self):
        assert classify_meter(np.array([1, 0, 1, 0, 1, 0])) is MeterType.DUPLE

    def test_three_periodic_break_goes_to_triple(self):
        # compound ties at agreement 1.0; the shorter period wins
        assert classify_meter(np.array([1, 0, 0, 1, 0, 0])) is MeterType.TRIPLE

    def test_all_strong_ties_to_duple(self):
        # every pattern matches only on its strong positions (agreement 0.5)
        assert classify_meter(np.array([1, 1, 1, 1])) is MeterType.DUPLE

    def test_requires_two_labels(self):
        with pytest.raises(ValueError):
            classify_meter(np.array([1]))

    def test_agreement_values(self):
        labels = np.array([1, 0, 0, 1, 0, 0])
        assert meter_agreement(labels, MeterType.TRIPLE) == 1.0
        assert meter_agreement(labels, MeterType.COMPOUND) == 1.0
        assert meter_agreement(labels, MeterType.DUPLE) == 0.5

    def test_windows_cover_labels_contiguously(self):
        labels = np.array([1, 0] * 6)
        windows = classify_meter_windows(labels)
        assert windows[0]["start_beat"] == 0
        assert windows[-1]["end_beat"] == len(labels)
        for prev, cur in zip(windows, windows[1:]):
            assert prev["end_beat"] == cur["start_beat"]
        assert all(w["meter"] == "duple" for w in windows)


class TestSegmentMeterUnits:
    def test_eight_beat_quadruple_layout(self):
        beats = beats_with(np.ones(8), spacing=0.5)
        labels = label_beats(beats)
        units = segment_meter_units(beats, labels, MeterType.QUADRUPLE,
                                    fps=10.0, transition_beats=1)
        assert len(units) == 2
        first, second = units
        assert first.beat_indices == (0, 1, 2, 3)
        assert second.beat_indices == (4, 5, 6, 7)
        assert first.transition_beat_count == 0
        assert second.transition_beat_count == 1
        assert second.t_start == 1.5  # covers beat 3 as the transition
        # both units share the unified duration (max natural span = 2.0 s)
        assert first.t_end - first.t_start == pytest.approx(2.0)
        assert second.t_end - second.t_start == pytest.approx(2.0)
        # transition frames: 1.5 s .. < 2.0 s at 10 fps
        assert second.frame_start == 15
        assert np.array_equal(np.flatnonzero(second.temporal_indices), np.arange(5))
        assert np.all(first.temporal_indices == 0)

    def test_zero_transition_duple_partitions_beat_span(self):
        beats = beats_with(np.ones(4), spacing=1.0)
        units = segment_meter_units(beats, np.ones(4, dtype=int), MeterType.DUPLE,
                                    fps=10.0, transition_beats=0)
        assert len(units) == 2
        assert units[0].t_start == 0.0
        assert units[1].t_start == 2.0  # starts where the first meter ends
        assert units[0].beat_indices == (0, 1)
        assert units[1].beat_indices == (2, 3)

    def test_single_exact_meter(self):
        beats = beats_with(np.ones(3), spacing=0.5)
        units = segment_meter_units(beats, np.ones(3, dtype=int), MeterType.TRIPLE,
                                    fps=10.0, transition_beats=1)
        assert len(units) == 1
        assert np.all(units[0].temporal_indices == 0)

    def test_too_few_beats(self):
        beats = beats_with(np.ones(2))
        with pytest.raises(ValueError):
            segment_meter_units(beats, np.ones(2, dtype=int), MeterType.TRIPLE, 10.0)

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 100_000), n_meters=st.integers(1, 6),
           transition=st.integers(0, 3))
    def test_tiling_covers_beats_without_gaps(self, seed, n_meters, transition):
        rng = np.random.default_rng(seed)
        meter = rng.choice(list(MeterType))
        k = meter.beats_per_meter
        times = np.cumsum(rng.uniform(0.3, 0.8, n_meters * k))
        beats = BeatSequence(times, rng.uniform(0.1, 1.0, len(times)))
        units = segment_meter_units(beats, np.ones(len(times), dtype=int), meter,
                                    fps=15.0, transition_beats=transition)
        assert len(units) == n_meters
        covered = [i for unit in units for i in unit.beat_indices]
        assert covered == list(range(len(times)))
        unified = units[0].t_end - units[0].t_start
        for u, unit in enumerate(units):
            assert unit.t_end - unit.t_start == pytest.approx(unified)
            assert unit.transition_beat_count == min(transition, u * k)
            assert unit.t_start == times[u * k - unit.transition_beat_count]


def unit_with(indices, frame_start=0):
    indices = np.asarray(indices, dtype=np.int8)
    return MeterUnit(t_start=0.0, t_end=len(indices) - 1.0, meter=MeterType.DUPLE,
                     beat_indices=(0, 1), transition_beat_count=int(indices.sum()),
                     frame_start=frame_start, temporal_indices=indices)


class TestInitialPoseFeatures:
    def poses(self, count=4, fps=10.0):
        frames = np.arange(count * 6, dtype=float).reshape(count, 2, 3)
        return PoseSequence(frames, fps)

    def test_transition_mean_fills_rest(self):
        poses = self.poses(4)
        out = initial_pose_features(poses, unit_with([1, 1, 0, 0]))
        p0, p1 = poses.frames[0], poses.frames[1]
        assert np.array_equal(out.frames[0], p0)
        assert np.array_equal(out.frames[1], p1)
        assert np.allclose(out.frames[2], (p0 + p1) / 2)
        assert np.allclose(out.frames[3], (p0 + p1) / 2)

    def test_all_transition_is_identity(self):
        poses = self.poses(3)
        out = initial_pose_features(poses, unit_with([1, 1, 1]))
        assert np.array_equal(out.frames, poses.frames)

    def test_single_transition_frame(self):
        poses = self.poses(3)
        out = initial_pose_features(poses, unit_with([1, 0, 0]))
        assert np.allclose(out.frames, np.broadcast_to(poses.frames[0], out.frames.shape))

    def test_no_transition_uses_first_frame(self):
        poses = self.poses(3)
        out = initial_pose_features(poses, unit_with([0, 0, 0]))
        assert np.allclose(out.frames, np.broadcast_to(poses.frames[0], out.frames.shape))

    def test_idempotent(self):
        poses = self.poses(5)
        unit = unit_with([1, 0, 1, 0, 0])
        once = initial_pose_features(poses, unit)
        twice = initial_pose_features(once, unit)
        assert np.allclose(twice.frames, once.frames)

    def test_out_of_range_unit(self):
        poses = self.poses(3)
        with pytest.raises(ValueError, match="cover"):
            initial_pose_features(poses, unit_with([1, 0, 0], frame_start=10))


class TestMeterReport:
    def test_alternating_saliency_reports_duple(self):
        beats = beats_with([2, 1, 2, 1, 2, 1])
        doc = meter_report(beats, fps=10.0, transition_beats=1)
        assert doc["meter"] == "duple"
        assert doc["beats_per_meter"] == 2
        assert doc["agreement"] == 1.0
        assert len(doc["units"]) == 3
        assert "windows" not in doc

    def test_three_periodic_reports_triple(self):
        beats = beats_with([3, 2, 1, 3, 2, 1])
        doc = meter_report(beats, fps=10.0)
        assert doc["meter"] == "triple"
        assert doc["beats_per_meter"] == 3

    def test_weak_agreement_adds_windows(self):
        rng = np.random.default_rng(8)
        # labels close to random rarely agree 0.6 with any short pattern
        saliency = rng.uniform(0.1, 1.0, 24)
        doc = meter_report(beats_with(saliency), fps=10.0)
        if doc["agreement"] < 0.6:
            assert "windows" in doc
        else:
            assert "windows" not in doc
