# Generated by Django 5.0.6 on 2026-10-18 09:12

import django.db.models.deletion
from django.conf import settings
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
        migrations.swappable_dependency(settings.AUTH_USER_MODEL),
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('clusters', models.IntegerField(default=3)),
                ('cluster_size', models.IntegerField(default=3)),
                ('trials', models.IntegerField(default=50)),
                ('base_seed', models.BigIntegerField(default=0)),
                ('penalty_mode', models.BooleanField(default=False)),
                ('estimator', models.CharField(default='mean', max_length=40)),
                ('config', models.JSONField(default=dict)),
                ('meta', models.JSONField(blank=True, default=dict)),
                ('csv_path', models.CharField(blank=True, max_length=500, null=True)),
                ('complete', models.BooleanField(default=False)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('created_by', models.ForeignKey(blank=True, null=True, on_delete=django.db.models.deletion.SET_NULL, related_name='experiment_runs', to=settings.AUTH_USER_MODEL)),
            ],
        ),
        migrations.CreateModel(
            name='TrialResult',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('trial', models.IntegerField()),
                ('n_fragments', models.IntegerField()),
                ('shots', models.IntegerField()),
                ('obs_size', models.IntegerField()),
                ('estimate', models.FloatField()),
                ('exact', models.FloatField()),
                ('abs_error', models.FloatField()),
                ('unobserved', models.BooleanField(default=False)),
                ('seed', models.BigIntegerField()),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='results', to='api.experimentrun')),
            ],
            options={
                'ordering': ['run', 'trial', 'n_fragments', 'shots', 'obs_size'],
            },
        ),
        migrations.AddConstraint(
            model_name='trialresult',
            constraint=models.UniqueConstraint(fields=('run', 'trial', 'n_fragments', 'shots', 'obs_size'), name='unique_trial_cell'),
        ),
    ]
