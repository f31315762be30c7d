"""Local factors, integrals, sampling, checks and the suite"""
