"""
Smoothed central-field flow analysis.
McGehee-regularized flows of -1/r^alpha, plain and amended-potential smoothing,
orbit classification and equivalence reports.
"""
