# cli.py

# Utilidades compartidas por los comandos de gestión: ficheros de configuración JSON
# cuyos valores quedan sobrescritos por las opciones de línea de comandos.
import json
import os

from django.core.management.base import CommandError


def load_json_config(path):
    if not path:
        return {}
    if not os.path.exists(path):
        raise CommandError(f"config file {path} does not exist")
    try:
        with open(path, encoding='utf-8') as handle:
            config = json.load(handle)
    except json.JSONDecodeError as exc:
        raise CommandError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(config, dict):
        raise CommandError(f"config file {path} must hold a JSON object")
    return config


def merge_options(defaults, file_values, flag_values):
    """valores por defecto < archivo de configuración < flags; un flag en None no sobrescribe."""
    merged = dict(defaults)
    merged.update(file_values)
    merged.update({key: value for key, value in flag_values.items() if value is not None})
    return merged


def require_file(path, what):
    if not path or not os.path.isfile(path):
        raise CommandError(f"{what} {path} does not exist")
    return path


def ensure_parent(path):
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as exc:
        raise CommandError(f"cannot create {directory}: {exc}") from None
