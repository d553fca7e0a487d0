import math

from django import forms
from django.conf import settings


class SectionForm(forms.Form):
    """
    Форма одной секции файла конфигурации.
    Недостающие ключи заполняются значениями initial полей;
    поля без initial обязательны.
    """

    section = ''

    def __init__(self, data=None, **kwargs):
        merged = {}
        for name, field in self.base_fields.items():
            initial = field.initial() if callable(field.initial) else (
                field.initial
            )
            if initial is not None:
                merged[name] = initial
        merged.update(data or {})
        super().__init__(merged, **kwargs)

    @classmethod
    def unknown_keys(cls, keys):
        return sorted(set(keys) - set(cls.base_fields))


class PositiveFloatField(forms.FloatField):
    def validate(self, value):
        super().validate(value)
        if value is not None and not value > 0:
            raise forms.ValidationError('Значение должно быть больше нуля.')


class GeometryForm(SectionForm):
    """Расстояния a, b и полуширина окна решётки."""

    section = 'geometry'

    a = PositiveFloatField(initial=2.0)
    b = PositiveFloatField(initial=2.2)
    half_width = forms.IntegerField(
        min_value=3, initial=lambda: settings.TILTLAB_WINDOW_HALF_WIDTH
    )


class DriveForm(SectionForm):
    """
    Параметры накачки. Наклон задаётся либо E0, либо delta_a = E0·a/omega.
    Без обоих наклон нулевой.
    """

    section = 'drive'

    J0 = forms.FloatField()
    deltaJ = forms.FloatField(initial=0.0)
    E0 = forms.FloatField(required=False)
    delta_a = forms.FloatField(required=False)
    omega = PositiveFloatField()
    m = forms.IntegerField(min_value=0, initial=2)
    phi = forms.FloatField(initial=0.0)

    def clean(self):
        cleaned_data = super().clean()
        if (
            cleaned_data.get('E0') is not None
            and cleaned_data.get('delta_a') is not None
        ):
            raise forms.ValidationError(
                'Укажите либо E0, либо delta_a, но не оба сразу.'
            )
        return cleaned_data


class IntegratorForm(SectionForm):
    section = 'integrator'

    rtol = PositiveFloatField(initial=lambda: settings.TILTLAB_RTOL)
    atol = PositiveFloatField(initial=lambda: settings.TILTLAB_ATOL)
    edge_leak_tol = PositiveFloatField(
        initial=lambda: settings.TILTLAB_EDGE_LEAK_TOL
    )
    dt_max = PositiveFloatField(required=False)
    t_end = PositiveFloatField(initial=100.0)
    samples = forms.IntegerField(
        min_value=1, initial=lambda: settings.TILTLAB_SAMPLES
    )
    start_site = forms.IntegerField(initial=0)


class ScanForm(SectionForm):
    section = 'scan'

    phi_min = forms.FloatField(initial=0.0)
    phi_max = forms.FloatField(initial=math.pi)
    steps = forms.IntegerField(min_value=2, initial=1000)
    workers = forms.IntegerField(
        min_value=1, initial=lambda: settings.TILTLAB_WORKERS
    )

    def clean(self):
        cleaned_data = super().clean()
        low, high = cleaned_data.get('phi_min'), cleaned_data.get('phi_max')
        if low is not None and high is not None and not low < high:
            raise forms.ValidationError('phi_min должно быть меньше phi_max.')
        return cleaned_data


class SolveForm(SectionForm):
    """Вид условия и скобки для поиска корней."""

    section = 'solve'

    KINDS = (
        ('cdt', 'CDT: обе скорости равны нулю'),
        ('cdt_pair', 'CDT: подбор delta_b к delta_a'),
        ('dl_forward', 'DL: нулевая скорость вперёд'),
        ('dl_backward', 'DL: нулевая скорость назад'),
        ('instability', 'Неустойчивость: F(Δ_a) = -F(-Δ_b)'),
    )

    kind = forms.ChoiceField(choices=KINDS, initial='instability')
    bracket_lo = forms.FloatField(initial=0.0)
    bracket_hi = forms.FloatField(initial=math.pi)
    delta_b_lo = forms.FloatField(initial=4.5)
    delta_b_hi = forms.FloatField(initial=6.0)
    ratio_tol = PositiveFloatField(
        initial=lambda: settings.TILTLAB_CDT_RATIO_TOL
    )


class TransportForm(SectionForm):
    section = 'transport'

    cycles = forms.IntegerField(min_value=1, initial=3)
    start_site = forms.IntegerField(initial=0)
    parity = forms.ChoiceField(
        choices=(('even', 'чётный старт'), ('odd', 'нечётный старт')),
        initial='even',
    )
    dwell = forms.ChoiceField(
        choices=(
            ('transfer', 'полный перенос π/(2ω)'),
            ('half_period', 'полупериод π/ω'),
        ),
        initial='transfer',
    )
    workers = forms.IntegerField(
        min_value=1, initial=lambda: settings.TILTLAB_WORKERS
    )


SECTION_FORMS = {
    form.section: form
    for form in (
        GeometryForm,
        DriveForm,
        IntegratorForm,
        ScanForm,
        SolveForm,
        TransportForm,
    )
}
