"""Parahydrogen thermophysical properties and tank flash."""
from .flash import FlashResult, flash_uv, mixture_energy, vent_to_pressure
from .properties import (
    FluidState,
    PropertyRangeError,
    PropertySet,
    default_properties,
    latent_heat,
    liquid_density,
    liquid_enthalpy,
    saturation_pressure,
    saturation_temperature,
    vapor_enthalpy,
)

__all__ = [
    "FlashResult", "FluidState", "PropertyRangeError", "PropertySet", "default_properties",
    "flash_uv", "latent_heat", "liquid_density", "liquid_enthalpy", "mixture_energy",
    "saturation_pressure", "saturation_temperature", "vapor_enthalpy", "vent_to_pressure",
]
