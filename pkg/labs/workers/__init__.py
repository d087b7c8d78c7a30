"""Celery worker configuration and benchmark-cell task registrations."""

from .celery_app import celery_app, configure_celery_app

__all__ = ["celery_app", "configure_celery_app"]
