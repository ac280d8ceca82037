"""Test package for maxbpd."""
