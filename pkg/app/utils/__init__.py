"""Command-line parsing helpers"""
