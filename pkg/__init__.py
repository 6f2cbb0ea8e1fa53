"""
Mean-Field Remote Estimation
Version: 1.0.0
"""

__version__ = "1.0.0"
