# freefront/services/config_service.py
"""
Run configuration loading.

Documents are TOML. Syntax errors surface as ConfigParseError with the
line and column reported by the parser; schema and regime failures as
ConfigValidationError listing every offending field.
"""
import logging
import re

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import ValidationError

from freefront.core.config import settings
from freefront.core.exception_handler import flatten_validation_errors
from freefront.core.exceptions import ConfigParseError, ConfigValidationError
from freefront.schemas.config_schema import RunConfig

logger = logging.getLogger(__name__)

_POSITION = re.compile(r"line (\d+), column (\d+)")


class ConfigService:
    def __init__(self):
        self._logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def parse_config(self, source: str, command: Optional[str] = None) -> RunConfig:
        """Validate a TOML document into a RunConfig.

        ``command`` (from the command line) fills in a missing ``command``
        key and must agree with it when both are given.
        """
        try:
            document: Dict[str, Any] = tomllib.loads(source)
        except tomllib.TOMLDecodeError as exc:
            match = _POSITION.search(str(exc))
            line, column = (int(match.group(1)), int(match.group(2))) if match else (None, None)
            raise ConfigParseError(detail=f"invalid TOML: {exc}", line=line, column=column) from exc

        if command is not None:
            declared = document.setdefault("command", command)
            if declared != command:
                raise ConfigValidationError(
                    detail=f"document declares command '{declared}' but '{command}' was requested",
                    field="command",
                )

        try:
            config = RunConfig.model_validate(document)
        except ValidationError as exc:
            errors = flatten_validation_errors(exc)
            detail = "; ".join(
                f"{e['field'] or 'config'}: {e['message'].removeprefix('Value error, ')}"
                for e in errors
            )
            raise ConfigValidationError(detail=detail, errors=errors) from exc

        overrides: Dict[str, Any] = {}
        if settings.OUTPUT_DIR:
            overrides["output"] = settings.OUTPUT_DIR
        if settings.THREADS and config.threads is None:
            overrides["threads"] = settings.THREADS
        if overrides:
            self._logger.debug("Environment overrides applied", extra={"overrides": overrides})
            config = config.model_copy(update=overrides)
        return config

    def load_config(self, path: Path, command: Optional[str] = None) -> RunConfig:
        try:
            source = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigParseError(detail=f"cannot read {path}: {exc.strerror}") from exc
        return self.parse_config(source, command)


config_service = ConfigService()
