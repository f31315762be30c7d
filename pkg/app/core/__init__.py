"""Exact arithmetic, local fields, characters, matrices and Schwartz functions"""
