"""Celery app and suite tasks"""
