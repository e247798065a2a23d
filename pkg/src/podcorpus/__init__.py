"""Build segmented ASR training corpora from long recordings, machine
transcripts and exported CTC log-probabilities."""
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
