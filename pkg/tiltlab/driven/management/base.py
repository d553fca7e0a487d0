import logging

from django.core.management.base import BaseCommand, CommandError

from driven.config import load_config, render_config
from driven.exceptions import TiltlabError
from driven.export import write_text
from driven.forms import SECTION_FORMS

logger = logging.getLogger('driven')


class TiltlabCommand(BaseCommand):
    """
    Общая часть команд: --config, --output, --print-config
    и переопределения --<секция>.<ключ>.
    """

    requires_system_checks = []
    # короткие опции команды, которые пишутся в секции конфигурации
    shortcuts = {}

    def add_arguments(self, parser):
        parser.add_argument(
            '--config', help='Файл конфигурации (секции key = value).'
        )
        parser.add_argument(
            '--output', help='Куда записать данные; по умолчанию stdout.'
        )
        parser.add_argument(
            '--print-config',
            action='store_true',
            help='Напечатать итоговую конфигурацию и выйти.',
        )
        for section, form_class in SECTION_FORMS.items():
            group = parser.add_argument_group(f'[{section}]')
            for key in form_class.base_fields:
                group.add_argument(
                    f'--{section}.{key}',
                    dest=f'{section}.{key}',
                    metavar='VALUE',
                )
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        if options['verbosity'] > 1:
            logger.setLevel(logging.DEBUG)
        overrides = {
            tuple(name.split('.', 1)): value
            for name, value in options.items()
            if '.' in name and value is not None
        }
        for option, target in self.shortcuts.items():
            if options.get(option) is not None:
                overrides[target] = options[option]
        try:
            config = load_config(options['config'], overrides)
            if options['print_config']:
                self.stdout.write(render_config(config), ending='')
                return
            self.run(config, options)
        except TiltlabError as error:
            raise CommandError(
                str(error), returncode=error.exit_code
            ) from error

    def run(self, config, options):
        raise NotImplementedError

    def emit(self, text, path):
        """Данные идут в файл path, а без него - в stdout."""
        if path is None:
            self.stdout.write(text, ending='')
        else:
            write_text(text, path)
            logger.info('wrote %s', path)
