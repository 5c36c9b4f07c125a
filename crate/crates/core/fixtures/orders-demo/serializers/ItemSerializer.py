from rest_framework import serializers


class ItemSerializer(serializers.Serializer):
    id = serializers.IntegerField(read_only=True)
    name = serializers.CharField(max_length=120)
    price = serializers.DecimalField(max_digits=8, decimal_places=2)
