"""
Models package: exact scalars, angle records, symbolic functions and result records.
"""
