# Generated by Django 3.1 on 2026-10-18 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='RunManifest',
            fields=[
                ('id', models.AutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(max_length=50)),
                ('arguments', models.JSONField(default=dict)),
                ('config_hash', models.CharField(blank=True, max_length=64)),
                ('started', models.DateTimeField(auto_now_add=True)),
                ('finished', models.DateTimeField(blank=True, null=True)),
                ('status', models.CharField(choices=[('running', 'Running'), ('succeeded', 'Succeeded'), ('failed', 'Failed')], default='running', max_length=10)),
                ('message', models.TextField(blank=True)),
                ('directory', models.CharField(blank=True, max_length=255)),
                ('artifacts', models.JSONField(default=list)),
                ('versions', models.JSONField(default=dict)),
            ],
            options={
                'ordering': ['-started', '-id'],
            },
        ),
    ]
