SECRET_KEY = "orders-demo-not-secret"
DEBUG = True
ROOT_URLCONF = "shop.urls"

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "rest_framework",
    "silk",
]

MIDDLEWARE = [
    "silk.middleware.SilkyMiddleware",
]
