from bdwalk.experiments.examples import EXAMPLES, example_config
from bdwalk.experiments.management.sweepcmd import SweepCommand


class Command(SweepCommand):
    """ Runs one of the four worked examples """

    help = "Sweeps the grid of example 1, 2, 3 or 4"

    def add_command_arguments(self, parser):
        self.add_option(
            parser, 'id', nargs='?', type=int, choices=sorted(EXAMPLES)
        )
        super().add_command_arguments(parser)

    def base_config(self, options):
        config = example_config(options.get('id'))
        if options.get('seed') is None:
            config['seed'] = 0
        return config
