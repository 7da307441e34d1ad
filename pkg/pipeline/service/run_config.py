"""Resolving a RunConfig: profile defaults, then the TOML document section by section, then CLI overrides."""
import copy
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import ValidationError

from scenes.dao.config_dao import read_toml
from utils import config as settings
from utils.exceptions import ConfigError
from ..models.model import RunConfig, SweepSection

logger = logging.getLogger(__name__)


def merge_sections(base: Dict[str, Any], doc: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in doc.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key].update(value)
        else:
            merged[key] = value
    return merged


def config_from_document(
    doc: Dict[str, Any],
    source: str,
    profile: Optional[str] = None,
    seed: Optional[int] = None,
    out_dir: Optional[str] = None,
) -> RunConfig:
    name = profile or doc.get("profile") or settings.profile
    if name not in settings.PROFILES:
        raise ConfigError(f"unknown profile '{name}', expected one of {sorted(settings.PROFILES)}")

    base = merge_sections(settings.PROFILES[name], doc)
    base["profile"] = name
    base.setdefault("out_dir", settings.out_dir)
    base.setdefault("taxonomy", settings.taxonomy_name)
    if seed is not None:
        base["seed"] = seed
    if out_dir is not None:
        base["out_dir"] = out_dir

    try:
        return RunConfig.model_validate(base)
    except ValidationError as exc:
        raise ConfigError(f"invalid run config {source}: {exc}") from exc


def load_run_config(
    path: Union[str, Path, None] = None,
    profile: Optional[str] = None,
    seed: Optional[int] = None,
    out_dir: Optional[str] = None,
) -> RunConfig:
    doc: Dict[str, Any] = read_toml(path) if path is not None else {}
    cfg = config_from_document(doc, str(path or profile or "defaults"), profile, seed, out_dir)
    logger.info(f"Run config: profile={cfg.profile} seed={cfg.seed} out_dir={cfg.out_dir}")
    return cfg


def load_sweep(
    path: Union[str, Path],
    profile: Optional[str] = None,
    seed: Optional[int] = None,
    out_dir: Optional[str] = None,
) -> Tuple[SweepSection, List[RunConfig]]:
    """
    Expand a document with a ``[sweep]`` table into one run config per value.

    Every run writes below ``<out_dir>/<field>_<value>``.
    """
    doc = read_toml(path)
    if "sweep" not in doc:
        raise ConfigError(f"{path} has no [sweep] table")
    try:
        sweep = SweepSection.model_validate(doc.pop("sweep"))
    except ValidationError as exc:
        raise ConfigError(f"invalid sweep in {path}: {exc}") from exc

    root = Path(out_dir or doc.get("out_dir") or settings.out_dir)
    configs = []
    for value in sweep.values:
        variant = copy.deepcopy(doc)
        section = variant.setdefault(sweep.section, {})
        if not isinstance(section, dict):
            raise ConfigError(f"sweep key {sweep.key}: '{sweep.section}' is not a section")
        section[sweep.field] = value
        run_dir = str(root / f"{sweep.field}_{value}")
        configs.append(config_from_document(variant, f"{path} ({sweep.key}={value})", profile, seed, run_dir))
    logger.info(f"Sweep over {sweep.key}: {len(configs)} runs below {root}")
    return sweep, configs
