from .reference import GradientStream, ReferenceLoop, ReplayResult, replay
from .suite import IdentityCheck, ReductionCertificate, IDENTITIES, recorded_stream, certify

__all__ = [
    "GradientStream",
    "ReferenceLoop",
    "ReplayResult",
    "replay",
    "IdentityCheck",
    "ReductionCertificate",
    "IDENTITIES",
    "recorded_stream",
    "certify",
]
