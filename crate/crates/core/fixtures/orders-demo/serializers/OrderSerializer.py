from rest_framework import serializers


class OrderSerializer(serializers.Serializer):
    id = serializers.IntegerField(read_only=True)
    reference = serializers.CharField(max_length=32)
    created_at = serializers.DateTimeField(read_only=True)
