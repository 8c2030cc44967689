# repzeta - Library modules.
__version__ = "0.3.0"
