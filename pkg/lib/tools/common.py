"""
Shared utilities and helper functions for MCP tools.

This module contains common functions used across all tool modules:
- FastMCP binding
- JSON serialization helpers
- Lattice lookup (registry, family names, files)
"""

import logging
from typing import Any, Dict, Optional, Tuple

import simplejson
from mcp.server.fastmcp import FastMCP

from config import settings
from lib.cli import resolve_lattice
from lib.exceptions import ZetaException
from lib.lattice import LieLattice

logger = logging.getLogger(__name__)

_FAST_MCP: Optional[FastMCP] = None


def bind_mcp(instance: FastMCP) -> None:
    """Bind the shared FastMCP instance for tool registration."""
    global _FAST_MCP
    _FAST_MCP = instance


def get_mcp() -> FastMCP:
    """Return the shared FastMCP instance."""
    if _FAST_MCP is None:
        raise RuntimeError("FastMCP instance not bound. Call bind_mcp() before importing tool modules.")
    return _FAST_MCP


def _safe_json(data: Dict[str, Any]) -> str:
    """Safely convert dict to JSON string."""
    try:
        return simplejson.dumps(data, default=str, sort_keys=True)
    except Exception as e:
        logger.error(f"JSON encoding error: {e}")
        return simplejson.dumps({"success": False, "error": str(e)})


def _failure(error: Exception) -> str:
    """Error payload; library exceptions add their class name as `kind`."""
    payload: Dict[str, Any] = {"success": False, "error": str(error)}
    if isinstance(error, ZetaException):
        payload["kind"] = type(error).__name__
        violations = getattr(error, "violations", None)
        if violations:
            payload["violations"] = violations
    return _safe_json(payload)


def _get_lattice(ref: str) -> Tuple[bool, Optional[str], Optional[LieLattice]]:
    """Busca un retículo por nombre registrado, familia G_mxn o archivo."""
    logger.debug(f"Buscando retículo {ref}")
    try:
        return True, None, resolve_lattice(ref, settings)
    except ZetaException as e:
        logger.debug(f"No pude resolver {ref}: {e}")
        return False, f"No pude cargar el retículo {ref!r}: {e}", None
