"""Lossless compression of key-point sequences (boxes, skeletons, landmarks)."""

from .codec import (
    DecodeResult,
    EncodedStream,
    Policy,
    StreamHeader,
    decode_sequence,
    decode_stream,
    encode_sequence,
)
from .errors import KpscError
from .model import Frame, IncidenceProfile, KeypointSequence, ObjectInstance
from .modesel import ModeWeights
from .predict import Mode
from .profiles import BUILTINS, get_profile
from .synth import synth_generate

__version__ = "0.1.0"

__all__ = [
    "BUILTINS",
    "DecodeResult",
    "EncodedStream",
    "Frame",
    "IncidenceProfile",
    "KeypointSequence",
    "KpscError",
    "Mode",
    "ModeWeights",
    "ObjectInstance",
    "Policy",
    "StreamHeader",
    "decode_sequence",
    "decode_stream",
    "encode_sequence",
    "get_profile",
    "synth_generate",
]
