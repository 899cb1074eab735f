"""Event-based sub-pixel motion magnification."""

from ._evmag import (
    EventStream,
    InvalidArgument,
    IoError,
    bar_scene,
    dominant_frequency,
    generate_dataset,
    load_events,
    magnify,
    motion_fields,
    psnr,
    reconstruct_intensity,
    simulate_events,
    ssim,
    temporal_bandpass,
)

__all__ = [
    "EventStream",
    "InvalidArgument",
    "IoError",
    "bar_scene",
    "dominant_frequency",
    "generate_dataset",
    "load_events",
    "magnify",
    "motion_fields",
    "psnr",
    "reconstruct_intensity",
    "simulate_events",
    "ssim",
    "temporal_bandpass",
]
