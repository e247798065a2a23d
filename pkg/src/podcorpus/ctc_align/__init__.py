"""CTC trellis alignment, segment confidence scoring and matrix I/O."""
from .align import (
    AlignmentError,
    AlignmentResult,
    CharTiming,
    DimensionMismatch,
    InfeasibleAlignment,
    align,
)
from .matrix import (
    CtcmFormatError,
    IncompatibleParts,
    InvalidMatrix,
    LogProbMatrix,
    MatrixError,
    read_ctcm,
    stitch,
    write_ctcm,
)
from .scoring import EmptySegment, SegmentScoreConfig, score_segment

__all__ = [
    "AlignmentError",
    "AlignmentResult",
    "CharTiming",
    "CtcmFormatError",
    "DimensionMismatch",
    "EmptySegment",
    "IncompatibleParts",
    "InfeasibleAlignment",
    "InvalidMatrix",
    "LogProbMatrix",
    "MatrixError",
    "SegmentScoreConfig",
    "align",
    "read_ctcm",
    "score_segment",
    "stitch",
    "write_ctcm",
]
