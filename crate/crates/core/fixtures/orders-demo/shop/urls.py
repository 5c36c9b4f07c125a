from rest_framework.routers import DefaultRouter

from ..views.ViewItem import ViewItem
from ..views.ViewOrder import ViewOrder

router = DefaultRouter()
router.register(r"items", ViewItem, basename="item")
router.register(r"orders", ViewOrder, basename="order")

urlpatterns = router.urls
