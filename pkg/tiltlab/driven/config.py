"""
Файл конфигурации прогона: секции [geometry], [drive], [integrator],
[scan], [solve], [transport] со строками key = value.
"""
import configparser
import io
import math
from dataclasses import dataclass, field
from typing import Dict

from .dynamics import IntegratorConfig
from .exceptions import ConfigError
from .forms import SECTION_FORMS
from .lattice import DriveParams, GapArguments, LatticeGeometry


def _parser():
    parser = configparser.ConfigParser(
        interpolation=None,
        comment_prefixes=('#', ';'),
        inline_comment_prefixes=('#', ';'),
        default_section='__defaults__',
    )
    parser.optionxform = str
    return parser


def _form_errors(section, form):
    lines = []
    for name, errors in form.errors.items():
        where = section if name == '__all__' else f'{section}.{name}'
        lines.append(f'[{where}] ' + ' '.join(errors))
    return '; '.join(lines)


@dataclass
class RunConfig:
    """Проверенные значения всех секций, недостающие взяты по умолчанию."""

    sections: Dict[str, dict] = field(default_factory=dict)

    def __getitem__(self, section):
        return self.sections[section]

    def geometry(self):
        values = self['geometry']
        return LatticeGeometry.centered(
            values['a'], values['b'], values['half_width']
        )

    def drive(self):
        values = self['drive']
        E0 = values['E0']
        if E0 is None:
            delta_a = values['delta_a'] or 0.0
            E0 = delta_a * values['omega'] / self['geometry']['a']
        return DriveParams(
            J0=values['J0'],
            deltaJ=values['deltaJ'],
            E0=E0,
            omega=values['omega'],
            m=values['m'],
            phi=values['phi'],
        )

    def gaps(self):
        return GapArguments.of(self.geometry(), self.drive())

    def integrator(self):
        values = self['integrator']
        dt_max = values['dt_max']
        return IntegratorConfig(
            rtol=values['rtol'],
            atol=values['atol'],
            edge_leak_tol=values['edge_leak_tol'],
            samples=values['samples'],
            dt_max=math.inf if dt_max is None else dt_max,
        )


def parse_config(text='', overrides=None):
    """
    Разбирает текст конфигурации и применяет overrides
    вида {(section, key): value}. Ошибки поднимаются как ConfigError.
    """
    parser = _parser()
    try:
        parser.read_string(text)
    except configparser.Error as error:
        raise ConfigError(f'cannot parse config: {error}') from error
    raw = {section: dict(parser[section]) for section in parser.sections()}
    unknown = sorted(set(raw) - set(SECTION_FORMS))
    if unknown:
        raise ConfigError(f'unknown config section(s): {", ".join(unknown)}')
    for (section, key), value in (overrides or {}).items():
        if section not in SECTION_FORMS:
            raise ConfigError(f'unknown config section: {section}')
        raw.setdefault(section, {})[key] = value
    sections = {}
    for section, form_class in SECTION_FORMS.items():
        values = raw.get(section, {})
        unknown = form_class.unknown_keys(values)
        if unknown:
            raise ConfigError(
                f'unknown key(s) in [{section}]: {", ".join(unknown)}'
            )
        form = form_class(values)
        if not form.is_valid():
            raise ConfigError(_form_errors(section, form))
        sections[section] = form.cleaned_data
    return RunConfig(sections=sections)


def load_config(path=None, overrides=None):
    if path is None:
        return parse_config('', overrides)
    try:
        with open(path, encoding='utf-8') as stream:
            text = stream.read()
    except OSError as error:
        raise ConfigError(f'cannot read config {path}: {error}') from error
    return parse_config(text, overrides)


def _render_value(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_config(config):
    """Полная конфигурация в том же формате; пустые поля пропускаются."""
    parser = _parser()
    for section, values in config.sections.items():
        parser[section] = {
            key: _render_value(value)
            for key, value in values.items()
            if value is not None
        }
    stream = io.StringIO()
    parser.write(stream)
    return stream.getvalue()
