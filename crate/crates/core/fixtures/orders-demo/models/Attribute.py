from django.db import models


class Attribute(models.Model):
    item_id = models.IntegerField(db_index=True)
    key = models.CharField(max_length=64)
    value = models.TextField(blank=True)
