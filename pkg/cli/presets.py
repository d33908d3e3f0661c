from typing import Any, Dict, List, Optional

from models.enums import ExperimentName, PotentialKind

# Desk-scale grids with the acceptance h sweeps
PRESETS: Dict[str, Dict[str, Any]] = {
    'harmonic': {
        'potential': {'kind': PotentialKind.harmonic.value},
        'grid': {'N': 200, 'K': 24},
        'h_values': [0.2, 0.15, 0.1, 0.08, 0.05],
    },
    'double_well': {
        'potential': {'kind': PotentialKind.double_well.value},
        'grid': {'N': 200, 'K': 24},
        'h_values': [0.2, 0.15, 0.1, 0.08, 0.05],
    },
    'tilted_double_well': {
        'potential': {'kind': PotentialKind.tilted_double_well.value, 'tilt': 0.2},
        'grid': {'N': 200, 'K': 24},
        'h_values': [0.2, 0.15, 0.1, 0.08],
    },
}

# Short alias accepted by --preset
PRESET_ALIASES = {'tilted': 'tilted_double_well'}


def preset_names() -> List[str]:
    return sorted(list(PRESETS) + list(PRESET_ALIASES))


def preset_config(name: str, experiments: Optional[List[str]] = None) -> Dict[str, Any]:
    """Raw ExperimentConfig data of a named preset, running every experiment unless told otherwise"""
    name = PRESET_ALIASES.get(name, name)
    if name not in PRESETS:
        raise KeyError(f"Unknown preset '{name}', expected one of {preset_names()}")
    data = {key: (dict(value) if isinstance(value, dict) else list(value)) for key, value in PRESETS[name].items()}
    data['experiments'] = list(experiments) if experiments else [e.value for e in ExperimentName.ordered()]
    return data
