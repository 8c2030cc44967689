"""Configuración central de repzeta.

Expone una dataclass `Settings` que lee variables de entorno y define los
límites de enumeración que protegen los cálculos por fuerza bruta.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from lib.exceptions import TooLarge

_OUTPUT_FORMATS = {"text", "latex", "structured"}


def _to_bool(value: Optional[str], *, default: bool = False) -> bool:
    """Convertir str booleano en bool real."""
    if value is None:
        return default
    return value.strip().lower() in {"1", "true", "t", "yes", "y"}


def _to_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw.replace("_", ""))
    except ValueError as exc:
        raise ValueError(f"{name} tiene que ser un entero (recibí {raw!r})") from exc


@dataclass(frozen=True)
class Settings:
    """Valores de configuración para la librería, la CLI y el servidor MCP.

    - Los guardas `max_*` acotan p^{N·d'}, p^{d'} y p^{ij} en las enumeraciones.
    - `unsafe_limits` desactiva todos los guardas (uso de investigación).
    """

    log_level: str = "INFO"
    max_enumeration: int = 10 ** 8
    max_classification: int = 10 ** 7
    max_rank_brute: int = 10 ** 7
    workers: int = 1
    seed: int = 0
    sv_symbolic_bound: int = 3
    euler_digits: int = 50
    lattice_dir: str = "lattices"
    output_format: str = "text"
    unsafe_limits: bool = False

    @classmethod
    def load(cls) -> "Settings":
        """Construye `Settings` leyendo variables de entorno."""
        instance = cls(
            log_level=os.getenv("LOG_LEVEL", "INFO").upper(),
            max_enumeration=_to_int("REPZETA_MAX_ENUMERATION", 10 ** 8),
            max_classification=_to_int("REPZETA_MAX_CLASSIFICATION", 10 ** 7),
            max_rank_brute=_to_int("REPZETA_MAX_RANK_BRUTE", 10 ** 7),
            workers=_to_int("REPZETA_WORKERS", 1),
            seed=_to_int("REPZETA_SEED", 0),
            sv_symbolic_bound=_to_int("REPZETA_SV_SYMBOLIC_BOUND", 3),
            euler_digits=_to_int("REPZETA_EULER_DIGITS", 50),
            lattice_dir=os.getenv("REPZETA_LATTICE_DIR", "lattices"),
            output_format=os.getenv("REPZETA_OUTPUT_FORMAT", "text").lower(),
            unsafe_limits=_to_bool(os.getenv("REPZETA_UNSAFE_LIMITS"), default=False),
        )
        instance.validate()
        return instance

    def validate(self) -> None:
        """Valida consistencia de la configuración cargada."""
        for name in ("max_enumeration", "max_classification", "max_rank_brute"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} debe ser mayor a cero")
        if self.workers <= 0:
            raise ValueError("REPZETA_WORKERS debe ser mayor a cero")
        if self.sv_symbolic_bound < 1:
            raise ValueError("REPZETA_SV_SYMBOLIC_BOUND debe ser al menos 1")
        if self.euler_digits < 15:
            raise ValueError("REPZETA_EULER_DIGITS debe ser al menos 15")
        if self.output_format not in _OUTPUT_FORMATS:
            raise ValueError(
                f"REPZETA_OUTPUT_FORMAT inválido: {self.output_format!r} "
                f"(opciones: {', '.join(sorted(_OUTPUT_FORMATS))})"
            )

    def guard(self, kind: str, size: int, what: str = "") -> None:
        """Levanta `TooLarge` si `size` supera el límite `max_<kind>`."""
        limit = getattr(self, f"max_{kind}")
        if size <= limit or self.unsafe_limits:
            return
        detail = f" ({what})" if what else ""
        raise TooLarge(
            f"La enumeración{detail} necesita {size} elementos y el límite es {limit}; "
            "usá --unsafe-limits si sabés lo que hacés"
        )

    def lattice_candidates(self, name: str) -> list[Path]:
        """Rutas donde buscar un archivo de retículo, en orden de prioridad.

        Acepta rutas relativas al directorio actual o al directorio de este
        módulo, y por último el directorio `lattice_dir` de fixtures.
        """
        path = Path(name)
        if path.is_absolute():
            return [path]
        module_dir = Path(__file__).resolve().parent
        candidates = [Path.cwd() / path, module_dir / path]
        lattice_dir = Path(self.lattice_dir)
        if not lattice_dir.is_absolute():
            candidates.append(Path.cwd() / lattice_dir / path)
            lattice_dir = module_dir / lattice_dir
        candidates.append(lattice_dir / path)
        if path.suffix != ".json":
            candidates.append(lattice_dir / f"{name}.json")
        return candidates


settings = Settings.load()
"""Instancia global de configuración, lista para importar."""
