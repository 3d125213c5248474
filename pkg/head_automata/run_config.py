import json
import os
from dataclasses import dataclass, field, fields
from typing import Any, Dict, Mapping, Optional

from .costs import TOLERANCE
from .transduce import EpsilonBudget

SCRIPT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DEFAULT_CONFIG_PATH = os.path.join(SCRIPT_DIR, "config-structure.json")

SAMPLE_FORMATS = ("trees", "sentences")


@dataclass
class SearchBounds:
    max_depth: int = 8
    max_width: Optional[int] = None
    max_nodes: Optional[int] = None


@dataclass
class RunConfig:
    command: str
    model_path: Optional[str] = None
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    dictionary_path: Optional[str] = None
    log_path: Optional[str] = None
    seed: Optional[int] = None
    count: int = 1
    bounds: SearchBounds = field(default_factory=SearchBounds)
    eps_budget: EpsilonBudget = field(default_factory=EpsilonBudget)
    iterations: int = 1
    delta: float = 0.0
    nbest: int = 1
    renormalize: bool = False
    tolerance: float = TOLERANCE
    workers: int = 1
    format: str = "trees"

    def validate(self) -> None:
        for name in ("max_depth", "max_width", "max_nodes"):
            value = getattr(self.bounds, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be positive, got {value}")
        for name in ("count", "iterations", "nbest", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.delta < 0:
            raise ValueError(f"delta must be non-negative, got {self.delta}")
        if self.tolerance <= 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.format not in SAMPLE_FORMATS:
            raise ValueError(f"format must be one of {', '.join(SAMPLE_FORMATS)}, got {self.format!r}")
        if self.command == "sample" and self.seed is None:
            raise ValueError("sample needs an explicit --seed")


class RunConfigLoader:
    """Run settings from a JSON file, the way a run is configured before flags are applied."""

    def __init__(self, settings: Mapping[str, Any]):
        self.defaults: Dict[str, Any] = {}
        self._parse_config(settings)

    def _parse_config(self, settings: Mapping[str, Any]):
        try:
            bounds = settings["bounds"]
            budget = settings["eps_budget"]
            self.defaults["bounds"] = SearchBounds(
                max_depth=bounds["max_depth"],
                max_width=bounds.get("max_width"),
                max_nodes=bounds.get("max_nodes"),
            )
            self.defaults["eps_budget"] = EpsilonBudget(
                per_head=budget["per_head"],
                total_factor=budget["total_factor"],
            )
        except KeyError as e:
            raise ValueError(f"Missing required field in run configuration: {e}")
        except (TypeError, AttributeError) as e:
            raise ValueError(f"Invalid run configuration: {e}")
        known = {f.name for f in fields(RunConfig)} - {"command", "bounds", "eps_budget"}
        for key, value in settings.items():
            if key in ("bounds", "eps_budget"):
                continue
            if key not in known:
                raise ValueError(f"Unknown field in run configuration: {key!r}")
            self.defaults[key] = value

    def build(self, command: str, overrides: Mapping[str, Any]) -> RunConfig:
        """A RunConfig for ``command``; overrides that are None keep the file's value."""
        values = dict(self.defaults)
        bounds = SearchBounds(**vars(values.pop("bounds")))
        budget = values.pop("eps_budget")
        per_head, total_factor = budget.per_head, budget.total_factor
        for key, value in overrides.items():
            if value is None:
                continue
            if key in ("max_depth", "max_width", "max_nodes"):
                setattr(bounds, key, value)
            elif key == "eps_per_head":
                per_head = value
            elif key == "eps_factor":
                total_factor = value
            else:
                values[key] = value
        config = RunConfig(command=command, bounds=bounds, eps_budget=EpsilonBudget(per_head, total_factor),
                           **values)
        config.validate()
        return config


def load_run_config(command: str, overrides: Mapping[str, Any], path: Optional[str] = None) -> RunConfig:
    """
    Resolve one invocation's settings.

    Explicit flags override the config file, and the config file overrides
    the built-in defaults. Without ``path`` the repository's
    config-structure.json is used when present.
    """
    if path is None:
        path = DEFAULT_CONFIG_PATH if os.path.exists(DEFAULT_CONFIG_PATH) else None
    if path is None:
        settings: Dict[str, Any] = {
            "bounds": vars(SearchBounds()),
            "eps_budget": {"per_head": EpsilonBudget().per_head, "total_factor": EpsilonBudget().total_factor},
        }
    else:
        try:
            with open(path, "r", encoding="utf-8") as f:
                settings = json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"Invalid run configuration JSON: {e}")
        except OSError as e:
            raise ValueError(f"Cannot read run configuration {path}: {e.strerror}")
        if not isinstance(settings, dict):
            raise ValueError("Invalid run configuration: expected a JSON object")
    return RunConfigLoader(settings).build(command, overrides)
