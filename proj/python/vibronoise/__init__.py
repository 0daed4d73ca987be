"""Perceptual ego-noise suppression for vibrotactile signals."""

from ._core import (
    BandScheme,
    BoundaryMode,
    DomainError,
    Engine,
    EngineConfig,
    IoError,
    NoiseFilter,
    PerceptionModel,
    SeedMode,
    SiftParams,
    StateError,
    SynthState,
    ValidationError,
    calibrate,
    damped_update,
    decompose,
    dominant_frequency,
    ego_noise,
    frame_spectrum,
    generate,
    imf_amplitude,
    process,
    read_wav,
    render_frame,
    target_amplitude,
    write_wav,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
