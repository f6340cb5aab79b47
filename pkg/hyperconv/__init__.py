"""
hyperconv - exact convolution engine for discrete semiconvos and hypergroups
"""

__version__ = "0.3.0"
