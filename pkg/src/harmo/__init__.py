"""harmo: rhythmic harmony scoring between music and human-motion sequences."""

__version__ = "0.1.0"

from .audio import (AudioClip, OnsetEnvelope, StftConfig, detect_audio_beats,
                    load_audio, onset_envelope)
from .beats import BeatSequence
from .config import AnalysisConfig
from .harmony import (AlignmentResult, HarmonyReport, align_beats, evaluate_pair,
                      harmony, harmony_loss, hit_rate, weighted_hit_sum)
from .meter import (MeterType, MeterUnit, classify_meter, initial_pose_features,
                    label_beats, meter_report, segment_meter_units)
from .motion import (PoseSequence, VelocityProfile, detect_visual_beats,
                     detect_visual_beats_sd, joint_velocity_sum, load_poses_csv,
                     load_poses_json, smooth_profile)
from .saliency import (apply_mask, audio_saliency_mask, visual_saliency_mask,
                       visual_saliency_transform)
from .synth import SynthSpec, gen_click_track, gen_motion_track

__all__ = [
    "AudioClip", "OnsetEnvelope", "StftConfig", "detect_audio_beats",
    "load_audio", "onset_envelope",
    "BeatSequence",
    "AnalysisConfig",
    "AlignmentResult", "HarmonyReport", "align_beats", "evaluate_pair",
    "harmony", "harmony_loss", "hit_rate", "weighted_hit_sum",
    "MeterType", "MeterUnit", "classify_meter", "initial_pose_features",
    "label_beats", "meter_report", "segment_meter_units",
    "PoseSequence", "VelocityProfile", "detect_visual_beats",
    "detect_visual_beats_sd", "joint_velocity_sum", "load_poses_csv",
    "load_poses_json", "smooth_profile",
    "apply_mask", "audio_saliency_mask", "visual_saliency_mask",
    "visual_saliency_transform",
    "SynthSpec", "gen_click_track", "gen_motion_track",
]
