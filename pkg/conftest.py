import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'subdifusion.settings')
django.setup()
