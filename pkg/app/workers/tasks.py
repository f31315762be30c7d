"""Celery tasks for suite items"""

import logging
from typing import List

from app.workers.celery_app import celery_app
from app.services.suite_service import suite_item

logger = logging.getLogger(__name__)


@celery_app.task(bind=True, name="run_suite_item")
def run_suite_item(self, item: str, config: dict) -> List[dict]:
    """
    Run one suite item and return its reports as JSON-ready dicts.
    The config dict is a dumped SuiteConfig.
    """
    logger.info(f"Running suite item {item} (task {self.request.id})")
    try:
        reports = suite_item(item, config)
    except Exception as e:
        logger.error(f"Suite item {item} failed: {e}", exc_info=True)
        raise
    logger.info(f"Suite item {item}: {len(reports)} reports")
    return reports
