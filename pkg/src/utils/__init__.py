"""
Logging, exceptions and timing utilities for KMBQKD.
"""
