"""Test suite for the trajectory supervisor."""
