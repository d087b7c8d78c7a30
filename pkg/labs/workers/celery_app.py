from __future__ import annotations

from celery import Celery

from labs.core.settings import get_settings

celery_app = Celery("labs_regression")


def configure_celery_app() -> None:
    settings = get_settings()
    celery_app.conf.update(
        broker_url=settings.celery.broker_url,
        result_backend=settings.celery.result_backend,
        task_default_queue=settings.celery.task_default_queue,
        task_always_eager=settings.celery.task_always_eager,
        task_eager_propagates=settings.celery.task_eager_propagates,
        worker_concurrency=settings.celery.worker_concurrency,
        task_serializer="json",
        result_serializer="json",
        accept_content=["json"],
    )


configure_celery_app()
celery_app.autodiscover_tasks(["labs.workers"])
