"""Generalized planning with positive and negative examples.

A planning-program interpreter with exact failure-source detection,
compilations of program validation and synthesis into classical planning,
a desk-scale classical planner, and ML-style evaluation metrics over labeled
test sets.
"""

__version__ = "0.1.0"
