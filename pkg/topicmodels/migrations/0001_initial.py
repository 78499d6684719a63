# Generated by Django 5.2.4 on 2026-10-18 21:40

import django.utils.timezone
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('run_id', models.CharField(max_length=200, unique=True)),
                ('sweep', models.CharField(blank=True, default='', max_length=100)),
                ('algorithm', models.CharField(choices=[('albu', 'ALBU'), ('gibbs', 'Collapsed Gibbs')], max_length=10)),
                ('dataset', models.CharField(max_length=200)),
                ('M', models.IntegerField()),
                ('K', models.IntegerField()),
                ('seed', models.IntegerField()),
                ('epochs', models.IntegerField()),
                ('avg_kld', models.FloatField(blank=True, null=True)),
                ('coherence', models.FloatField(blank=True, null=True)),
                ('runtime_ms', models.FloatField(blank=True, null=True)),
                ('created', models.DateTimeField(default=django.utils.timezone.now)),
            ],
            options={
                'ordering': ['run_id'],
            },
        ),
    ]
