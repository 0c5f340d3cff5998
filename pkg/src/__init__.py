"""
Overlap lab: scalar-product protocols, the statevector simulator they run on, and resource accounting.
"""
