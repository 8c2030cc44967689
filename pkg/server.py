#!/usr/bin/env python3
"""MCP server for representation zeta functions of 2-nilpotent Lie lattices."""

import logging
import sys

try:
    from dotenv import load_dotenv
    load_dotenv()
except Exception:
    pass

from config import settings
from mcp.server.fastmcp import FastMCP

from lib import __version__
from lib.tools import register_all_tools

logging.basicConfig(
    level=getattr(logging, settings.log_level, logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    stream=sys.stderr,
)
logger = logging.getLogger("repzeta-mcp-server")

mcp = FastMCP(
    name="repzeta",
    instructions=(
        "Servidor MCP para funciones zeta de representaciones de retículos de Lie 2-nilpotentes. "
        "Carga retículos desde archivos JSON y los guarda en memoria. "
        "Incluye herramientas para series de Poincaré, clases de núcleo, el invariante α, "
        "las fórmulas cerradas de la familia G_mxn y verificación de identidades q-combinatorias."
    ),
)

register_all_tools(mcp)


if __name__ == "__main__":
    logger.info(f"🚀 Starting repzeta MCP Server {__version__}")
    logger.info("Lattice storage: in-memory")
    logger.info(f"Enumeration guard: {settings.max_enumeration} (unsafe={settings.unsafe_limits})")
    mcp.run()
