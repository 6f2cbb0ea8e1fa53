"""
Storage layer for model, sample, policy and report files
"""
