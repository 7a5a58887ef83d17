"""Built-in scenario presets for the two worked examples.

example1  -- two-point harvest {0.5, 1} w.p. {0.6, 0.4}, three fade states
             {0.4, 0.8, 1.0} w.p. {0.4, 0.5, 0.1}, unit noise, no leakage.

example2a / example2b -- three fade states {0.5, 1, 1.2} with processing
             cost alpha = 0.5 and unit noise. The published fade
             probabilities {0.1, 0.7, 0.1} do not sum to one; rather than
             guess a single intent the preset ships two documented
             reconstructions:
               example2a: {0.1, 0.8, 0.1}   (missing mass on the middle state)
               example2b: {1/9, 7/9, 1/9}   (renormalized)
             The harvest is a single point at 1.0 so that the mean-harvest
             sweep directly sets E[Y].
"""

from __future__ import annotations

from .models import DiscreteDist, Scenario

__all__ = ["PRESETS", "get_preset", "preset_sweep"]


def _example1() -> Scenario:
    return Scenario(
        harvest=DiscreteDist((0.5, 1.0), (0.6, 0.4)),
        fade=DiscreteDist((0.4, 0.8, 1.0), (0.4, 0.5, 0.1)),
        noise_var=1.0,
        beta1=0.7,
        beta2=0.0,
        arch="HSU",
        csit="perfect",
    )


def _example2(probs) -> Scenario:
    return Scenario(
        harvest=DiscreteDist((1.0,), (1.0,)),
        fade=DiscreteDist((0.5, 1.0, 1.2), probs),
        noise_var=1.0,
        alpha=0.5,
        arch="HSU",
        csit="perfect",
        sleep_enabled=True,
    )


PRESETS = {
    "example1": _example1,
    "example2a": lambda: _example2((0.1, 0.8, 0.1)),
    "example2b": lambda: _example2((1.0 / 9.0, 7.0 / 9.0, 1.0 / 9.0)),
}

# default sweep axes matching the two published figures
_SWEEPS = {
    "example1": ("beta1", [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8,
                           0.85, 0.9, 0.95, 1.0]),
    "example2a": ("mean_harvest_scale", [0.1, 0.25, 0.5, 1.0, 2.0, 5.0]),
    "example2b": ("mean_harvest_scale", [0.1, 0.25, 0.5, 1.0, 2.0, 5.0]),
}


def get_preset(name: str) -> Scenario:
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")


def preset_sweep(name: str):
    """(parameter, values) of the figure-reproduction sweep for a preset."""
    param, values = _SWEEPS[name]
    return param, list(values)
