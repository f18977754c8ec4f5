from django import forms
from django.core.exceptions import ValidationError

from .bogoliubov_core import DosForm, KernelForm
from .collision_integrals import QuadratureSpec
from .effective_scattering import AlphaSMode
from .mc_oracle import McSpec


class RunConfigForm(forms.Form):
    """Validates the merged run config (defaults < config file < flags)."""

    # quadrature
    rel_tol = forms.FloatField(min_value=1e-13)
    abs_tol = forms.FloatField(min_value=0.0)
    e_max = forms.FloatField(min_value=20.0)
    max_subdivisions = forms.IntegerField(min_value=1)
    # modes
    kernel_form = forms.ChoiceField(choices=KernelForm.choices)
    dos_form = forms.ChoiceField(choices=DosForm.choices)
    alpha_s_mode = forms.ChoiceField(choices=AlphaSMode.choices)
    # energy grids
    points = forms.IntegerField(min_value=2)
    emin_frac = forms.FloatField()
    emax = forms.FloatField()
    population_points = forms.IntegerField(min_value=4)
    threshold = forms.FloatField()
    # monte carlo
    samples = forms.IntegerField(min_value=10_000)
    seed = forms.IntegerField(min_value=0)
    threads = forms.IntegerField(min_value=0)

    def clean_emin_frac(self):
        value = self.cleaned_data['emin_frac']
        if not value > 0:
            raise ValidationError('emin_frac must be positive.')
        return value

    def clean_threshold(self):
        value = self.cleaned_data['threshold']
        if not value > 1:
            raise ValidationError('threshold must exceed 1.')
        return value

    def clean(self):
        cleaned = super().clean()
        emax = cleaned.get('emax')
        if emax is not None and not emax > 0:
            self.add_error('emax', 'emax must be positive.')
        return cleaned

    def quadrature_spec(self):
        data = self.cleaned_data
        return QuadratureSpec(
            rel_tol=data['rel_tol'],
            abs_tol=data['abs_tol'],
            e_max=data['e_max'],
            max_subdivisions=data['max_subdivisions'],
        )

    def mc_spec(self):
        return McSpec(samples=self.cleaned_data['samples'], seed=self.cleaned_data['seed'])

    def error_text(self):
        return '; '.join(
            f"{field}: {' '.join(messages)}" for field, messages in self.errors.items()
        )
