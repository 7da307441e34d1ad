"""Loading scene configs and taxonomies from TOML documents."""
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Union

from pydantic import ValidationError

from utils.exceptions import ConfigError
from ..models.model import ClassTaxonomy, SceneConfig
from ..service.generator import toy_scene_config
from ..service.taxonomies import PRESETS, get_taxonomy

logger = logging.getLogger(__name__)


def read_toml(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")
    try:
        with path.open("rb") as handle:
            return tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path} is not valid TOML: {exc}") from exc


def load_scene_config(path: Union[str, Path, None] = None, seed: int = 0) -> SceneConfig:
    """Read a scene config; keys missing from the document fall back to the toy layout."""
    if path is None:
        return toy_scene_config(seed)
    doc = read_toml(path)
    base = toy_scene_config(seed).model_dump()
    base.update(doc)
    try:
        cfg = SceneConfig.model_validate(base)
    except ValidationError as exc:
        raise ConfigError(f"invalid scene config {path}: {exc}") from exc
    logger.info(f"Loaded scene config from {path}")
    return cfg


def load_taxonomy(source: Union[str, Path, None]) -> ClassTaxonomy:
    """Resolve a preset name or a TOML taxonomy file."""
    if source is None:
        return get_taxonomy("toy")
    if str(source) in PRESETS:
        return get_taxonomy(str(source))
    doc = read_toml(source)
    doc.setdefault("name", Path(source).stem)
    try:
        return ClassTaxonomy.model_validate(doc)
    except ValidationError as exc:
        raise ConfigError(f"invalid taxonomy {source}: {exc}") from exc
