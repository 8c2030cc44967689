"""
Lattice tools.

This module contains MCP tools for:
- Loading lattice files into the in-memory registry
- Listing and inspecting registered lattices
- Brute-force Poincaré series
- The kernel-class formula, the smoothness probe and the α invariant
"""

import logging
from typing import Optional

from config import settings
from lib.cli import parse_lattice_file
from lib.lattice import commutator_matrix, validate
from lib.lattice_registry import lattice_registry
from lib.poincare import alpha as alpha_report
from lib.poincare import brute_poincare, classify_kernels, smoothness_probe, thm_tech_eval

from .common import _failure, _get_lattice, _safe_json, get_mcp

logger = logging.getLogger(__name__)

# Shared FastMCP instance provided by server
mcp = get_mcp()


@mcp.tool()
def load_lattice(path: str, name: Optional[str] = None) -> str:
    """
    Load a lattice file and keep it in memory.

    Args:
        path: Path to a lattice JSON file (or a bundled fixture name such as "heisenberg")
        name: Registry name (default: the name inside the file)

    Returns:
        JSON string with the registered name, ranks and digest
    """
    try:
        lattice = parse_lattice_file(path, settings)
        key = lattice_registry.store_lattice(lattice, name, source=path)
        logger.info(f"Retículo {key} cargado desde {path}")
        return _safe_json({
            "success": True,
            "name": key,
            "d": lattice.d,
            "d_prime": lattice.d_prime,
            "digest": lattice.digest,
        })
    except Exception as e:
        logger.error(f"Error cargando {path}: {e}")
        return _failure(e)


@mcp.tool()
def list_lattices() -> str:
    """
    List the lattices currently registered.

    Returns:
        JSON string with one entry per lattice
    """
    return _safe_json({
        "success": True,
        "count": lattice_registry.lattice_count(),
        "lattices": lattice_registry.list_lattices(),
        "cached_classifications": lattice_registry.classification_count(),
    })


@mcp.tool()
def lattice_info(lattice: str) -> str:
    """
    Describe a lattice: validation report, brackets and trimmed commutator matrix.

    Args:
        lattice: Registered name, lattice file or family name G_mxn

    Returns:
        JSON string with the lattice document and its commutator matrix
    """
    ok, error, L = _get_lattice(lattice)
    if not ok:
        return _safe_json({"success": False, "error": error})
    try:
        return _safe_json({
            "success": True,
            "lattice": L.to_document(),
            "digest": L.digest,
            "validation": validate(L).as_dict(),
            "commutator_matrix": str(commutator_matrix(L, trimmed=True)),
        })
    except Exception as e:
        logger.error(f"Error describiendo {lattice}: {e}")
        return _failure(e)


@mcp.tool()
def poincare_brute(lattice: str, p: int, max_weight: int) -> str:
    """
    Poincaré series by direct enumeration of primitive vectors.

    Args:
        lattice: Registered name, lattice file or family name G_mxn
        p: Prime
        max_weight: Truncation order K in t

    Returns:
        JSON string with the truncated series and its coefficients
    """
    ok, error, L = _get_lattice(lattice)
    if not ok:
        return _safe_json({"success": False, "error": error})
    try:
        series = brute_poincare(L, p, max_weight, settings)
        return _safe_json({
            "success": True,
            "lattice": L.name,
            "p": p,
            "series": str(series),
            "coefficients": [str(c) for c in series.coeffs],
        })
    except Exception as e:
        logger.error(f"Error en poincare_brute({lattice}, {p}, {max_weight}): {e}")
        return _failure(e)


@mcp.tool()
def thm_tech(lattice: str, p: int, probe: bool = True) -> str:
    """
    Poincaré series through kernel classes and chain counts.

    Args:
        lattice: Registered name, lattice file or family name G_mxn
        p: Prime
        probe: Run the smoothness probe and report its verdict (default: True)

    Returns:
        JSON string with the rational function, kernel classes and chain counts
    """
    ok, error, L = _get_lattice(lattice)
    if not ok:
        return _safe_json({"success": False, "error": error})
    try:
        result = thm_tech_eval(L, p, probe=probe, config=settings)
        return _safe_json({
            "success": True,
            "lattice": L.name,
            "p": p,
            "value": str(result.value),
            "smoothness_probe": result.probe.value,
            "classes": [c.as_dict() for c in classify_kernels(L, p, settings)],
            "sequences": result.sequences,
        })
    except Exception as e:
        logger.error(f"Error en thm_tech({lattice}, {p}): {e}")
        return _failure(e)


@mcp.tool()
def alpha(lattice: str, p: int) -> str:
    """
    The α invariant: largest root of ρ_ω over nondegenerate functionals.

    Args:
        lattice: Registered name, lattice file or family name G_mxn
        p: Prime

    Returns:
        JSON string with α, a witness and the table of strata
    """
    ok, error, L = _get_lattice(lattice)
    if not ok:
        return _safe_json({"success": False, "error": error})
    try:
        return _safe_json({"success": True, **alpha_report(L, p, settings).as_dict()})
    except Exception as e:
        logger.error(f"Error en alpha({lattice}, {p}): {e}")
        return _failure(e)


@mcp.tool()
def smoothness(lattice: str, p: int) -> str:
    """
    Finite probe of geometric smoothness of the rank loci.

    Args:
        lattice: Registered name, lattice file or family name G_mxn
        p: Prime

    Returns:
        JSON string with status pass / fail / inconclusive and its evidence
    """
    ok, error, L = _get_lattice(lattice)
    if not ok:
        return _safe_json({"success": False, "error": error})
    try:
        return _safe_json({"success": True, **smoothness_probe(L, p, settings).as_dict()})
    except Exception as e:
        logger.error(f"Error en smoothness({lattice}, {p}): {e}")
        return _failure(e)
