"""16 kHz mono PCM16 WAV validation and sample-accurate clip cutting."""
from __future__ import annotations

import math
import struct
import wave
from dataclasses import dataclass
from pathlib import Path

from .errors import PodcorpusError

SAMPLE_RATE = 16000
CHANNELS = 1
SAMPLE_WIDTH = 2

_WAVE_FORMAT_PCM = 0x0001
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE
_PCM_SUBFORMAT_TAIL = b"\x00\x00\x00\x00\x10\x00\x80\x00\x00\xaa\x00\x38\x9b\x71"


class AudioError(PodcorpusError):
    pass


class NotWav(AudioError):
    pass


class WrongSampleRate(AudioError):
    def __init__(self, found: int):
        super().__init__(f"sample rate is {found} Hz, expected {SAMPLE_RATE}; resample first")
        self.found = found


class WrongChannels(AudioError):
    def __init__(self, found: int):
        super().__init__(f"{found} channels, expected mono; downmix first")
        self.found = found


class WrongEncoding(AudioError):
    def __init__(self, found: str):
        super().__init__(f"encoding is {found}, expected 16-bit signed PCM")
        self.found = found


class OutOfRange(AudioError):
    pass


class IoFailure(AudioError):
    pass


@dataclass(frozen=True)
class Episode:
    id: str
    wav_path: Path
    num_samples: int
    data_offset: int = 44

    @property
    def duration_s(self) -> float:
        return self.num_samples / SAMPLE_RATE


@dataclass(frozen=True)
class ClipInfo:
    path: Path
    duration_s: float


def seconds_to_sample(seconds: float) -> int:
    """Nearest sample index, halves rounded up."""
    return math.floor(seconds * SAMPLE_RATE + 0.5)


def _describe_format(tag: int, bits: int) -> str:
    names = {_WAVE_FORMAT_PCM: "PCM", 0x0003: "IEEE float", 0x0006: "A-law", 0x0007: "mu-law"}
    return f"{names.get(tag, f'format 0x{tag:04x}')} {bits}-bit"


def open_episode(path: str | Path, episode_id: str | None = None) -> Episode:
    """Parse the RIFF header of ``path`` and check it against the audio contract."""
    path = Path(path)
    with open(path, "rb") as fh:
        riff = fh.read(12)
        if len(riff) < 12 or riff[:4] != b"RIFF" or riff[8:12] != b"WAVE":
            raise NotWav(f"{path}: not a RIFF/WAVE file")
        fmt = None
        while True:
            head = fh.read(8)
            if len(head) < 8:
                raise NotWav(f"{path}: no data chunk")
            chunk_id, size = struct.unpack("<4sI", head)
            if chunk_id == b"fmt ":
                body = fh.read(size)
                if len(body) < 16:
                    raise NotWav(f"{path}: truncated fmt chunk")
                fmt = body
            elif chunk_id == b"data":
                if fmt is None:
                    raise NotWav(f"{path}: data chunk before fmt chunk")
                data_offset = fh.tell()
                break
            else:
                fh.seek(size, 1)
            if size % 2:
                fh.seek(1, 1)
        fh.seek(0, 2)
        available = fh.tell() - data_offset

    tag, channels, rate, _, _, bits = struct.unpack("<HHIIHH", fmt[:16])
    if tag == _WAVE_FORMAT_EXTENSIBLE and len(fmt) >= 40:
        subformat = fmt[24:40]
        tag = struct.unpack("<H", subformat[:2])[0]
        if subformat[2:] != _PCM_SUBFORMAT_TAIL:
            tag = _WAVE_FORMAT_EXTENSIBLE
    if rate != SAMPLE_RATE:
        raise WrongSampleRate(rate)
    if channels != CHANNELS:
        raise WrongChannels(channels)
    if tag != _WAVE_FORMAT_PCM or bits != 8 * SAMPLE_WIDTH:
        raise WrongEncoding(_describe_format(tag, bits))
    # tolerate writers that leave the data size at 0 or 0xFFFFFFFF while streaming
    data_size = size if 0 < size <= available else available
    return Episode(
        id=episode_id if episode_id is not None else path.stem,
        wav_path=path,
        num_samples=data_size // SAMPLE_WIDTH,
        data_offset=data_offset,
    )


def read_samples(ep: Episode, start: int = 0, stop: int | None = None) -> bytes:
    """Raw little-endian PCM16 bytes for samples ``[start, stop)``."""
    stop = ep.num_samples if stop is None else stop
    with open(ep.wav_path, "rb") as fh:
        fh.seek(ep.data_offset + start * SAMPLE_WIDTH)
        return fh.read((stop - start) * SAMPLE_WIDTH)


def write_wav(path: str | Path, pcm: bytes) -> None:
    with wave.open(str(path), "wb") as w:
        w.setnchannels(CHANNELS)
        w.setsampwidth(SAMPLE_WIDTH)
        w.setframerate(SAMPLE_RATE)
        w.writeframes(pcm)


def cut_clip(ep: Episode, start_s: float, end_s: float, out_path: str | Path) -> ClipInfo:
    """Write samples ``[round(start_s * 16000), round(end_s * 16000))`` to ``out_path``."""
    if not 0 <= start_s < end_s <= ep.duration_s:
        raise OutOfRange(f"clip [{start_s}, {end_s}) outside [0, {ep.duration_s}] or inverted")
    start = seconds_to_sample(start_s)
    stop = min(seconds_to_sample(end_s), ep.num_samples)
    if stop <= start:
        raise OutOfRange(f"clip [{start_s}, {end_s}) rounds to zero samples")
    out_path = Path(out_path)
    try:
        pcm = read_samples(ep, start, stop)
        if len(pcm) != (stop - start) * SAMPLE_WIDTH:
            raise IoFailure(f"{ep.wav_path}: short read")
        write_wav(out_path, pcm)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return ClipInfo(out_path, (stop - start) / SAMPLE_RATE)
