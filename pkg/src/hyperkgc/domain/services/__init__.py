"""Domain services for hyperkgc."""
