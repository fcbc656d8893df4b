"""Timeline rendering of beat alignments to figure and CSV files.

Audio beats sit on the +1 row and visual beats on the -1 row; audio markers
are colored by synchronization status and each carries a translucent span
showing the delay tolerance around it.  Every marker gets a stable SVG group
id (``audio-beat-i`` / ``visual-beat-i``) so rendered output is inspectable.
"""
from __future__ import annotations

import csv

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

HIT_COLOR = "#2ca02c"
MISS_COLOR = "#d62728"
VISUAL_COLOR = "#1f77b4"
TOLERANCE_COLOR = "#2ca02c"


def _timeline_rows(doc: dict) -> list[dict]:
    """Flatten a report or beats document into rows of time/stream/saliency/hp."""
    rows = []
    if "audio_beats" in doc or "visual_beats" in doc:  # HarmonyReport document
        audio = doc.get("audio_beats", {})
        hp = audio.get("hp", [])
        for i, (time, sal) in enumerate(zip(audio.get("times", []),
                                            audio.get("saliency", []))):
            rows.append({"time": time, "stream": "audio", "saliency": sal,
                         "hp": hp[i] if i < len(hp) else ""})
        visual = doc.get("visual_beats", {})
        for time, sal in zip(visual.get("times", []), visual.get("saliency", [])):
            rows.append({"time": time, "stream": "visual", "saliency": sal, "hp": ""})
    elif "raw" in doc and "salient" in doc:  # beats-command document
        stream = doc.get("stream", "audio")
        for time, sal in zip(doc["salient"]["times"], doc["salient"]["saliency"]):
            rows.append({"time": time, "stream": stream, "saliency": sal, "hp": ""})
    elif "times" in doc:  # bare beat sequence
        for time, sal in zip(doc["times"], doc.get("saliency", [])):
            rows.append({"time": time, "stream": "audio", "saliency": sal, "hp": ""})
    else:
        raise ValueError("document holds no beat timeline (expected a report, "
                         "a beats document, or a bare beat sequence)")
    return rows


def render_timeline(doc: dict, out_path: str) -> None:
    """Draw the beat timeline of a report (or beats document) to a figure file."""
    rows = _timeline_rows(doc)
    t_delay = doc.get("config", {}).get("t_delay")

    fig, ax = plt.subplots(figsize=(10, 3))
    audio_rows = [r for r in rows if r["stream"] == "audio"]
    visual_rows = [r for r in rows if r["stream"] == "visual"]

    for i, row in enumerate(audio_rows):
        if t_delay is not None:
            ax.axvspan(row["time"] - t_delay, row["time"] + t_delay,
                       color=TOLERANCE_COLOR, alpha=0.08,
                       gid=f"tolerance-field-{i}")
        if row["hp"] == "":
            marker, color = "o", "0.4"
        elif row["hp"] == 1:
            marker, color = "o", HIT_COLOR
        else:
            marker, color = "x", MISS_COLOR
        ax.plot([row["time"]], [1.0], marker=marker, linestyle="none",
                color=color, markersize=8, gid=f"audio-beat-{i}")
    for i, row in enumerate(visual_rows):
        ax.plot([row["time"]], [-1.0], marker="o", linestyle="none",
                color=VISUAL_COLOR, markersize=8, gid=f"visual-beat-{i}")

    ax.axhline(0.0, color="0.8", linewidth=0.8)
    ax.set_yticks([-1.0, 1.0])
    ax.set_yticklabels(["visual", "audio"])
    ax.set_ylim(-2.0, 2.0)
    ax.set_xlabel("time (s)")
    title = "beat timeline"
    if "h" in doc:
        title += f"  (h={doc['h']:.3f}, hit rate={doc.get('hit_rate', 0):.2f})"
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def timeline_csv(doc: dict, out_path: str) -> None:
    """Write the beat timeline as CSV rows: time,stream,saliency,hp."""
    rows = _timeline_rows(doc)
    rows.sort(key=lambda r: (r["time"], r["stream"]))
    with open(out_path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=["time", "stream", "saliency", "hp"])
        writer.writeheader()
        writer.writerows(rows)
