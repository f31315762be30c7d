"""Pydantic schemas for reports and suite configuration files"""
