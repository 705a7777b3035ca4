"""Multi-modal public speaking assessment pipeline.

Turns a recorded presentation (audio, word-timestamped transcript, per-frame
pose/face landmarks) into fused 10-second rich records, scores them against a
12-criterion rubric via pluggable LLM providers, and measures agreement with
human raters using weighted Cohen's kappa.
"""

__version__ = "0.1.0"
