"""Scenario sampling, example mixing and dataset generation."""
