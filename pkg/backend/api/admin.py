from django.contrib import admin
from .models import ExperimentRun, TrialResult


class TrialResultInline(admin.TabularInline):
    model = TrialResult
    extra = 0
    can_delete = False
    readonly_fields = ("trial", "n_fragments", "shots", "obs_size",
                       "estimate", "exact", "abs_error", "unobserved", "seed")


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    list_display = (
        "id",
        "clusters",
        "cluster_size",
        "trials",
        "base_seed",
        "penalty_mode",
        "estimator",
        "complete",
        "created_at",
        "created_by",
    )
    list_filter = ("penalty_mode", "complete", "estimator")
    search_fields = ("id", "csv_path", "created_by__username")
    readonly_fields = ("config", "meta", "created_at")
    inlines = [TrialResultInline]


@admin.register(TrialResult)
class TrialResultAdmin(admin.ModelAdmin):
    list_display = ("id", "run", "trial", "n_fragments", "shots", "obs_size",
                    "abs_error", "unobserved")
    list_filter = ("n_fragments", "shots", "obs_size", "unobserved")
    search_fields = ("run__id", )
