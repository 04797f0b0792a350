"""Simulatable live-stream overlay and broadcast-automation engine.

Subsystems: timestamp-ordered event bus with sliding-window dedup, constant
velocity danmaku lane scheduler, synthetic load generator, PCM/loudness audio
pipeline with callback-safe buffer lifecycle, per-song segment broadcast
planner with hot-swappable personas, danmaku quick reactions, a metrics
harness, and an HTTP/WebSocket gateway for operator consoles.
"""

__version__ = "0.1.0"
