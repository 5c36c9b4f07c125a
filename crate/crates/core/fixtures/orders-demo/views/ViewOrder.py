from rest_framework.decorators import action
from rest_framework.response import Response
from rest_framework.viewsets import ModelViewSet
from ..serializers.OrderSerializer import OrderSerializer
from ..models.Order import Order

class ViewOrder(ModelViewSet):
  queryset = Order.objects.all()
  serializer_class = OrderSerializer

  @action(methods=['get'], detail=False)
  def get_order_details(self, request):
    if request.GET.get('items', None):
      data = self.serializer_class(self.queryset, many=True).to_representation(self.queryset)
      for order in data:
        order['items'] = Order.objects.get_order_items(order['id'])
      return Response(data)
    else:
      return Response(OrderSerializer(self.queryset, many=True).data)

  def list(self):
    return Response(OrderSerializer(Order.objects.all(), many=True).data)
