"""
Core numerics: density, kde, solver, simulator and experiments
"""
