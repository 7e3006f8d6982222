"""Shoebox image-source RIR simulation."""
