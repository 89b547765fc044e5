"""Structured config file loading (YAML or JSON).

The file has up to three sections: ``link`` (LinkConfig fields), ``channel``
(``tap_delays``, ``tap_powers``, ``rho``) and ``study`` (StudyConfig fields).
Unknown sections or keys are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

import yaml

from ..channel import ChannelProfile
from ..controller import BoundarySet
from ..errors import ConfigError
from ..grid import LinkConfig
from .studies import StudyConfig

_CHANNEL_KEYS = {"tap_delays", "tap_powers", "rho"}


@dataclass
class LoadedConfig:
    link: LinkConfig = field(default_factory=LinkConfig)
    channel: ChannelProfile | None = None
    study: StudyConfig = field(default_factory=StudyConfig)


def _check_keys(section: str, given: dict, allowed: set) -> None:
    unknown = set(given) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")


def parse_config(data: dict | None) -> LoadedConfig:
    data = data or {}
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a mapping at the top level")
    _check_keys("top level", data, {"link", "channel", "study"})

    link_kw = dict(data.get("link") or {})
    _check_keys("link", link_kw, {f.name for f in fields(LinkConfig)})
    link = LinkConfig(**link_kw)

    channel = None
    if data.get("channel") is not None:
        ch = dict(data["channel"])
        _check_keys("channel", ch, _CHANNEL_KEYS)
        channel = ChannelProfile(
            tuple(ch.get("tap_delays", ChannelProfile().tap_delays)),
            tuple(ch.get("tap_powers", ())),
            float(ch.get("rho", 1.0)),
        )

    study_kw = dict(data.get("study") or {})
    _check_keys("study", study_kw, {f.name for f in fields(StudyConfig)})
    for key in ("snr_grid", "boundary_sets", "models"):
        if key in study_kw:
            study_kw[key] = tuple(study_kw[key])
    if isinstance(study_kw.get("boundary_set"), dict):
        b = study_kw["boundary_set"]
        _check_keys("study.boundary_set", b, {"lower", "upper"})
        study_kw["boundary_set"] = BoundarySet(tuple(b["lower"]), tuple(b["upper"]))
    if isinstance(study_kw.get("channel_model"), dict):
        ch = study_kw["channel_model"]
        _check_keys("study.channel_model", ch, _CHANNEL_KEYS)
        study_kw["channel_model"] = ChannelProfile(
            tuple(ch["tap_delays"]), tuple(ch.get("tap_powers", ())), float(ch.get("rho", 1.0))
        )
    study = StudyConfig(**study_kw)
    return LoadedConfig(link, channel, study)


def load_config(path: str | Path) -> LoadedConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(yaml.safe_load(text))
