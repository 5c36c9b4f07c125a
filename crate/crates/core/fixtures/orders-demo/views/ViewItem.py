from rest_framework.decorators import action
from rest_framework.response import Response
from rest_framework.viewsets import ModelViewSet
from ..models.Attribute import Attribute
from ..serializers.ItemSerializer import ItemSerializer
from ..models.Item import Item

class ViewItem(ModelViewSet):
  queryset = Item.objects.all()
  serializer_class = ItemSerializer

  @action(methods=['get'], detail=False)
  def get_item_details(self, request):
    if request.GET.get('attributes', None):
      data = self.serializer_class(self.queryset, many=True).to_representation(self.queryset)
      for item in data:
        item['attributes'] = Attribute.objects.get_by_item(item['id'])
      return Response(data)
    else:
      return Response(ItemSerializer(Item.objects.all(), many=True).data)
