"""Test suite for multicontract."""
