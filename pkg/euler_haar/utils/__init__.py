"""
Utility package: runtime settings and error types.
"""
