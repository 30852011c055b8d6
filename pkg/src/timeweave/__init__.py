"""timeweave: deterministic multimodal session analytics.

Converts per-frame vision detections (faces, valence/arousal, gaze, depth)
and mixed-reality simulation logs into per-student multi-lane timelines and
aggregate learning metrics, served over a read-only HTTP API.
"""

__version__ = "0.1.0"
