from django.db import models
from django.conf import settings


class ExperimentRun(models.Model):
    clusters = models.IntegerField(default=3)
    cluster_size = models.IntegerField(default=3)
    trials = models.IntegerField(default=50)
    base_seed = models.BigIntegerField(default=0)
    penalty_mode = models.BooleanField(default=False)
    estimator = models.CharField(max_length=40, default="mean")

    # full ExperimentConfig and the CSV sidecar metadata
    config = models.JSONField(default=dict)
    meta = models.JSONField(default=dict, blank=True)

    csv_path = models.CharField(max_length=500, blank=True, null=True)
    complete = models.BooleanField(default=False)
    created_at = models.DateTimeField(auto_now_add=True)
    created_by = models.ForeignKey(settings.AUTH_USER_MODEL,
                                   null=True,
                                   blank=True,
                                   on_delete=models.SET_NULL,
                                   related_name="experiment_runs")

    def __str__(self):
        return (f"run {self.pk}: {self.clusters}x{self.cluster_size}, "
                f"{self.trials} trials, seed {self.base_seed}")


class TrialResult(models.Model):
    run = models.ForeignKey(ExperimentRun,
                            on_delete=models.CASCADE,
                            related_name="results")
    trial = models.IntegerField()
    n_fragments = models.IntegerField()
    shots = models.IntegerField()
    obs_size = models.IntegerField()
    estimate = models.FloatField()
    exact = models.FloatField()
    abs_error = models.FloatField()
    unobserved = models.BooleanField(default=False)
    seed = models.BigIntegerField()

    class Meta:
        ordering = ["run", "trial", "n_fragments", "shots", "obs_size"]
        constraints = [
            models.UniqueConstraint(
                fields=["run", "trial", "n_fragments", "shots", "obs_size"],
                name="unique_trial_cell"),
        ]

    def __str__(self):
        return (f"run {self.run_id} trial {self.trial} |F|={self.n_fragments} "
                f"shots={self.shots} size={self.obs_size}")
