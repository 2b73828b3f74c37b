"""
Integration tests for the trajectory supervisor.
"""
