"""
KMBQKD - analytic rates and Monte Carlo sessions for the KMB09 key distribution protocol
"""

__version__ = "1.0.0"
__author__ = "KMBQKD Team"
__description__ = "Error rates, eavesdropping sweeps and session simulation for KMB09 and its three-basis variant"
