from bdwalk.core.config import read_json_config
from bdwalk.core.exceptions import ConfigError
from bdwalk.experiments.management.sweepcmd import SweepCommand


class Command(SweepCommand):
    """ Sweeps the grid of an experiment config file """

    help = "Classifies every point of a parameter grid"

    def add_command_arguments(self, parser):
        self.add_option(
            parser, 'experiment', nargs='?', help="JSON file with the experiment"
        )
        super().add_command_arguments(parser)

    def base_config(self, options):
        if not options.get('experiment'):
            raise ConfigError([('experiment', 'an experiment config is required')])
        return read_json_config(options['experiment'])
