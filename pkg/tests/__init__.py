"""
Test suite for KMBQKD.
"""
