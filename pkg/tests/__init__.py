"""Test suite for sepfrag."""
