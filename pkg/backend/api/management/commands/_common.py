"""
Helpers shared by the shadow-cut management commands: file loading, the
validation-error -> exit-code mapping and output writing.
"""
import json
from contextlib import contextmanager
from pathlib import Path

from django.core.management.base import CommandError
from rest_framework import serializers

from api.quantum.cutter import graph_from_json
from api.quantum.errors import ShadowCutError, SizeLimitError
from api.serializers import ObservableField, parse_circuit, parse_cuts

EXIT_VALIDATION = 2
EXIT_SIZE_LIMIT = 3


def int_list(text: str) -> list:
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise CommandError(f"expected comma-separated integers, got {text!r}",
                           returncode=EXIT_VALIDATION)


def load_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CommandError(f"no such file: {path}",
                           returncode=EXIT_VALIDATION)
    except json.JSONDecodeError as e:
        raise CommandError(f"{path}: invalid JSON ({e})",
                           returncode=EXIT_VALIDATION)


def load_circuit(path: str):
    return parse_circuit(load_json(path))


def load_cuts(path: str = None) -> list:
    if not path:
        return []
    return parse_cuts(load_json(path))


def load_cut_plan(circuit, cuts: str = None, graph: str = None) -> list:
    """Cuts from a cuts file, or from a fragment graph exported by `cut`."""
    if cuts and graph:
        raise CommandError("give --cuts or --graph, not both",
                           returncode=EXIT_VALIDATION)
    if graph:
        return list(graph_from_json(load_json(graph), circuit).cuts)
    return load_cuts(cuts)


def parse_observable(text: str):
    """Observable text, or @file holding text or JSON."""
    if text.startswith("@"):
        try:
            raw = Path(text[1:]).read_text(encoding="utf-8").strip()
            data = json.loads(raw) if raw.startswith("{") else raw
        except (OSError, json.JSONDecodeError) as e:
            raise CommandError(f"cannot read observable: {e}",
                               returncode=EXIT_VALIDATION)
    else:
        data = text
    return ObservableField().to_internal_value(data)


@contextmanager
def command_errors():
    try:
        yield
    except SizeLimitError as e:
        raise CommandError(str(e), returncode=EXIT_SIZE_LIMIT)
    except serializers.ValidationError as e:
        raise CommandError(f"invalid input: {e.detail}",
                           returncode=EXIT_VALIDATION)
    except ShadowCutError as e:
        raise CommandError(str(e), returncode=EXIT_VALIDATION)


def emit(command, data, out: str = None):
    """Write JSON to ``out`` or to stdout."""
    text = json.dumps(data, indent=2, sort_keys=True)
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n", encoding="utf-8")
        command.stdout.write(command.style.SUCCESS(f"Wrote {path}"))
    else:
        command.stdout.write(text)
