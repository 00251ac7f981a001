"""
WSGI config for the gridlink project.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'gridlink.settings')

application = get_wsgi_application()
