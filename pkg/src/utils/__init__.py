"""Utility functions for the trajectory supervisor."""
