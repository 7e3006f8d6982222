"""RIR descriptors, signal metrics and figures."""
