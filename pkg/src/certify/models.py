from django.db import models


# Create your models here.
class CertificationRun(models.Model):
    """
    One management-command run kept for later comparison.

    'command': 'vertices',
    'parameters': {'scenario': '3,2,2', 'method': 'sample', 'seed': 20140101, 'count': 500},
    'result': {'n': 1, 'bound': 1, 'pass': True, ...},
    'passed': True,
    """
    command = models.CharField(max_length=50, db_index=True)
    parameters = models.JSONField(default=dict)
    result = models.JSONField(default=dict)
    passed = models.BooleanField(default=True)
    created = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created']

    def __str__(self):
        state = "pass" if self.passed else "fail"
        return f"{self.command} ({state})"
