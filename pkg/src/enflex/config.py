"""Key-value configuration: store path, ingest token, port, buildings, sensors.

INI layout, one section per registered object:

    [service]
    store_path = ./store
    token = dev-token
    port = 8000

    [building:skola]
    timezone = Europe/Stockholm
    name = Technical high school
    holidays = 2018-10-29, 2018-10-30

    [sensor:skola-main]
    building = skola
    kind = power
    circuit = main
    room = distribution board

Environment variables STORE_PATH, INGEST_TOKEN and PORT override the file.
"""
from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

from .types import Building, Sensor

DEFAULT_TOKEN = "dev-token"
DEFAULT_PORT = 8000


@dataclass
class AppConfig:
    store_path: str = "./store"
    token: str = DEFAULT_TOKEN
    port: int = DEFAULT_PORT
    buildings: list[Building] = field(default_factory=list)
    sensors: list[Sensor] = field(default_factory=list)


def load_config(path: str | Path | None = None) -> AppConfig:
    config = AppConfig()
    if path is not None:
        parser = configparser.ConfigParser()
        read = parser.read(Path(path))
        if not read:
            raise FileNotFoundError(f"config file not found: {path}")
        if parser.has_section("service"):
            section = parser["service"]
            config.store_path = section.get("store_path", config.store_path)
            config.token = section.get("token", config.token)
            config.port = section.getint("port", config.port)
        for name in parser.sections():
            if name.startswith("building:"):
                section = parser[name]
                holidays = frozenset(
                    date.fromisoformat(d.strip())
                    for d in section.get("holidays", "").split(",") if d.strip())
                config.buildings.append(Building(
                    building_id=name.split(":", 1)[1],
                    timezone=section.get("timezone", "UTC"),
                    name=section.get("name"),
                    holidays=holidays))
            elif name.startswith("sensor:"):
                section = parser[name]
                config.sensors.append(Sensor(
                    sensor_id=name.split(":", 1)[1],
                    kind=section.get("kind", "power"),
                    building_id=section["building"],
                    room=section.get("room"),
                    orientation_note=section.get("orientation_note"),
                    circuit=section.get("circuit")))
    apply_env(config)
    return config


def apply_env(config: AppConfig, environ=os.environ) -> AppConfig:
    config.store_path = environ.get("STORE_PATH", config.store_path)
    config.token = environ.get("INGEST_TOKEN", config.token)
    port = environ.get("PORT")
    if port:
        config.port = int(port)
    return config
