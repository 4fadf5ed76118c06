"""Correlation-surface verifier and overhead analyzer for RHG cluster-state MBQC."""
