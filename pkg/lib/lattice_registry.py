"""Almacén en memoria de retículos cargados y clasificaciones por núcleos."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .lattice import LieLattice


@dataclass
class LatticeRegistry:
    """Retículos registrados por nombre y clasificaciones memoizadas por (digest, p)."""

    _lattices: Dict[str, LieLattice] = field(default_factory=dict)
    _sources: Dict[str, str] = field(default_factory=dict)
    _classifications: Dict[Tuple[str, int], Any] = field(default_factory=dict)

    # ------------------------------------------------------------------
    # Retículos
    # ------------------------------------------------------------------
    def get_lattice(self, name: str) -> Optional[LieLattice]:
        return self._lattices.get(name)

    def store_lattice(self, lattice: LieLattice, name: Optional[str] = None, source: str = "") -> str:
        key = name or lattice.name
        self._lattices[key] = lattice
        self._sources[key] = source
        return key

    def remove_lattice(self, name: str) -> None:
        lattice = self._lattices.pop(name, None)
        self._sources.pop(name, None)
        if lattice is not None and not any(l.digest == lattice.digest for l in self._lattices.values()):
            self._remove_classifications(lattice.digest)

    def list_lattices(self) -> List[Dict[str, Any]]:
        return [
            {"name": name, "d": l.d, "d_prime": l.d_prime, "digest": l.digest, "source": self._sources.get(name, "")}
            for name, l in sorted(self._lattices.items())
        ]

    def lattice_count(self) -> int:
        return len(self._lattices)

    def has_lattice(self, name: str) -> bool:
        return name in self._lattices

    # ------------------------------------------------------------------
    # Clasificaciones
    # ------------------------------------------------------------------
    def get_classification(self, digest: str, p: int) -> Optional[Any]:
        return self._classifications.get((digest, p))

    def store_classification(self, digest: str, p: int, classification: Any) -> None:
        self._classifications[(digest, p)] = classification

    def classification_count(self) -> int:
        return len(self._classifications)

    def _remove_classifications(self, digest: str) -> None:
        keys = [key for key in self._classifications if key[0] == digest]
        for key in keys:
            del self._classifications[key]

    # ------------------------------------------------------------------
    # Limpieza
    # ------------------------------------------------------------------
    def cleanup(self) -> int:
        """Descarta clasificaciones de retículos que no están registrados. Devuelve cuántas."""
        registered = {l.digest for l in self._lattices.values()}
        orphans = [key for key in self._classifications if key[0] not in registered]
        for key in orphans:
            del self._classifications[key]
        return len(orphans)

    def clear(self) -> None:
        self._lattices.clear()
        self._sources.clear()
        self._classifications.clear()


lattice_registry = LatticeRegistry()
"""Registro global compartido por las herramientas MCP y la CLI."""
