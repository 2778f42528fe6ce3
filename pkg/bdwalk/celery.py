import os

from celery import Celery

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'bdwalk.settings')

celery = Celery('bdwalk.celery')
celery.config_from_object('django.conf:settings', namespace='CELERY')
celery.autodiscover_tasks()
