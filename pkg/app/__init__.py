"""Rankin-Selberg local theory workbench"""
