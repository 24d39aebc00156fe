# Core package: train-track calculus engine
from core.errors import CertificationError, TrainTrackError
from core.run_state import RunPhase, RunState, RunStep
from core.trace import RunTracer, tracer
from core.tracks import EmbeddedCurve, TrackIsomorphism, TrainTrack, validate
from core.moves import Move, SplitSequence, carrying_matrix, is_tight
from core.pa_engine import PACertificate, PeriodicSequence, certify_pa

__all__ = [
    "TrainTrackError",
    "CertificationError",
    "RunState",
    "RunStep",
    "RunPhase",
    "tracer",
    "RunTracer",
    "TrainTrack",
    "EmbeddedCurve",
    "TrackIsomorphism",
    "validate",
    "Move",
    "SplitSequence",
    "carrying_matrix",
    "is_tight",
    "PeriodicSequence",
    "PACertificate",
    "certify_pa",
]
