"""
Configuration package for KMBQKD.
"""
