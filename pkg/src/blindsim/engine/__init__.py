from .clock import GateClock, SimTime, SlotTiming
from .rng import STREAM_IDS, RngStream, SlotRandomness, make_streams

__all__ = [
    "GateClock",
    "RngStream",
    "STREAM_IDS",
    "SimTime",
    "SlotRandomness",
    "SlotTiming",
    "make_streams",
]
