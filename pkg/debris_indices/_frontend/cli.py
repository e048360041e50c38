#
#  Copyright (C) 2026 The debris-indices authors
#
#  This program is free software; you can redistribute it and/or
#  modify it under the terms of the GNU Lesser General Public
#  License as published by the Free Software Foundation; either
#  version 2 of the License, or (at your option) any later version.
#
#  This library is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
#  Lesser General Public License for more details.
#
#  You should have received a copy of the GNU Lesser General Public
#  License along with this library. If not, see <http://www.gnu.org/licenses/>.

"""The ``debris`` command line

Every command writes data to stdout and logs to stderr. Exit codes
are 0 on success, 2 for data and I/O errors, 3 for configuration and
usage errors and 4 for internal errors.
"""

import functools
import json
import os
import sys
import traceback
from collections import OrderedDict

import click

from .. import __version__
from .._exceptions import DebrisError, ConfigError, ConfigErrorReason, RasterError, RasterErrorReason
from .._exceptions import EXIT_CONFIG, EXIT_INTERNAL
from .._message import get_logger, timed_activity
from .._plugins import detector_kinds, load_detector
from ..classifier import THRESHOLD_MODES, ThresholdConfig
from ..evaluation import format_table, per_index_report, reports_to_json, LabelMapping
from ..pipeline import compute_indices, detect_scene
from ..raster.files import read_mask, write_index, write_mask, write_stack
from ..raster.header import LabeledScene
from ..render import write_overlay, write_quicklook
from ..spectral import INDEX_KINDS, WavelengthTable
from ..synth import EndmemberLibrary, SceneSpec, generate, sensitivity_curve
from .app import App

logger = get_logger('frontend')


def _parse_list(value, convert=str):
    if value is None:
        return None
    return [convert(item.strip()) for item in value.split(',') if item.strip()]


def _emit(data):
    click.echo(json.dumps(data, indent=2))


# threshold_options()
#
# Decorator adding the threshold overrides to the commands which
# classify pixels. The command receives them as a ThresholdConfig
# in the ``thresholds`` keyword argument.
#
def threshold_options(func):
    options = [
        click.option('--mode', type=click.Choice(THRESHOLD_MODES), default=None,
                     help="Fixed thresholds, or Otsu thresholds per scene"),
        click.option('--water-correlation', type=float, default=None,
                     help="Water correlation threshold"),
        click.option('--fdi', 'fdi_threshold', type=float, default=None,
                     help="FDI threshold"),
        click.option('--ndvi-low', type=float, default=None,
                     help="NDVI separating debris from other floating matter"),
        click.option('--ndvi-high', type=float, default=None,
                     help="NDVI above which unclaimed pixels are wakes")
    ]

    @functools.wraps(func)
    def wrapper(app, *args, mode, water_correlation, fdi_threshold, ndvi_low, ndvi_high, **kwargs):
        thresholds = app.config.thresholds.to_node()
        for key, value in (('mode', mode), ('water-correlation', water_correlation), ('fdi', fdi_threshold),
                           ('ndvi-low', ndvi_low), ('ndvi-high', ndvi_high)):
            if value is not None:
                thresholds[key] = value
        return func(app, *args, thresholds=ThresholdConfig.from_node(thresholds), **kwargs)

    for option in reversed(options):
        wrapper = option(wrapper)
    return wrapper


# DebrisGroup
#
# Runs the commands outside click's standalone mode and turns
# errors into the documented exit codes.
#
class DebrisGroup(click.Group):

    def main(self, args=None, prog_name=None, **extra):
        extra.pop('standalone_mode', None)
        try:
            code = super().main(args=args, prog_name=prog_name, standalone_mode=False, **extra)
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_INTERNAL)
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_CONFIG)
        except DebrisError as e:
            click.echo("Error: {}".format(e), err=True)
            sys.exit(e.exit_code)
        except Exception:  # pylint: disable=broad-except
            logger.error("Internal error\n\n%s", traceback.format_exc())
            click.echo("Internal error: {}".format(sys.exc_info()[1]), err=True)
            sys.exit(EXIT_INTERNAL)

        sys.exit(code if isinstance(code, int) else 0)


##################################################################
#                         Main Options                           #
##################################################################
@click.group(cls=DebrisGroup, context_settings=dict(help_option_names=['-h', '--help']))
@click.version_option(version=__version__)
@click.option('--config', '-c', type=click.Path(dir_okay=False),
              help="Run configuration file (JSON, YAML or TOML)")
@click.option('--sensor', default=None,
              help="Sensor of the input stacks, s2a, s2b or a band table file")
@click.option('--band-order', default=None,
              help="Comma separated band names of stacks without band metadata")
@click.option('--scale', type=float, default=None,
              help="Reflectance scale overriding the scale recorded in input files")
@click.option('--threads', type=int, default=None,
              help="Worker count (default: DEBRIS_THREADS or 1)")
@click.option('--verbose', '-v', 'verbose', is_flag=True, default=False,
              help="Log debugging messages")
@click.option('--quiet', '-q', 'quiet', is_flag=True, default=False,
              help="Log errors only")
@click.pass_context
def cli(context, config, sensor, band_order, scale, threads, verbose, quiet):
    """Detect floating marine debris in Sentinel-2 band stacks"""
    overrides = {
        'sensor': sensor,
        'band-order': _parse_list(band_order),
        'scale': scale,
        'threads': threads
    }
    verbosity = 1 if verbose else (-1 if quiet else 0)
    context.obj = App(config, overrides, verbosity)


##################################################################
#                         Index Command                          #
##################################################################
@cli.command(short_help="Compute a spectral index")
@click.option('--kind', '-k', required=True,
              help="The index, one of: {}".format(', '.join(INDEX_KINDS)))
@click.option('--output', '-o', required=True, type=click.Path(dir_okay=False),
              help="The index raster to write")
@click.option('--water-reference', type=click.Path(dir_okay=False),
              help="Water reference file for the WCI")
@click.option('--water-mask', type=click.Path(dir_okay=False),
              help="Mask whose water pixels give the WCI reference")
@click.option('--mapping', type=click.Path(dir_okay=False),
              help="Label mapping of the water mask")
@click.argument('stack', type=click.Path(dir_okay=False))
@click.pass_obj
def index(app, kind, output, water_reference, water_mask, mapping, stack):
    """Compute one index of STACK

    Writes a float32 raster in which invalid pixels hold the fill
    value, and its statistics to OUTPUT.stats.json and stdout.
    """
    if kind not in INDEX_KINDS:
        raise ConfigError("Unknown index kind '{}'".format(kind),
                          detail="Known kinds: {}".format(', '.join(INDEX_KINDS)),
                          reason=ConfigErrorReason.UNKNOWN_KIND)

    bands = app.harmonize(app.read_stack(stack))
    water_ref = None
    if kind == 'wci':
        mapping = app.config.label_mapping(mapping) if water_mask else None
        water_ref = app.water_reference(bands, water_reference, water_mask, mapping)
    fdi_params = app.fdi_params(bands) if kind == 'fdi' else None

    indices = compute_indices(bands, water_ref, fdi_params=fdi_params, kinds=[kind],
                              threads=app.threads, estimator=app.config.estimator)
    result = indices[kind]

    write_index(result, output)
    stats = result.stats()
    stats_path = output + '.stats.json'
    try:
        with open(stats_path, 'w') as f:
            json.dump(stats, f, indent=2)
            f.write('\n')
    except OSError as e:
        raise RasterError("{}: Could not write file: {}".format(stats_path, e),
                          reason=RasterErrorReason.IO_FAILURE) from e

    _emit(stats)


##################################################################
#                         Detect Command                         #
##################################################################
@cli.command(short_help="Classify the pixels of a stack")
@click.pass_obj
@threshold_options
@click.option('--output-directory', '-o', type=click.Path(file_okay=False),
              help="Directory for the class raster, overlay and summary")
@click.option('--detector', '-d', default=None,
              help="The detector (default: from the configuration)")
@click.option('--water-reference', type=click.Path(dir_okay=False),
              help="Water reference file for the WCI")
@click.option('--water-mask', type=click.Path(dir_okay=False),
              help="Mask whose water pixels give the WCI reference")
@click.option('--mapping', type=click.Path(dir_okay=False),
              help="Label mapping of the water mask")
@click.option('--quicklook', is_flag=True, default=False,
              help="Also write a true colour PNG")
@click.argument('stack', type=click.Path(dir_okay=False))
def detect(app, thresholds, output_directory, detector, water_reference, water_mask, mapping, quicklook, stack):
    """Classify the pixels of STACK

    Writes STEM_classes.tif, the STEM_classes.png overlay and the
    STEM_run.json summary, where STEM is the basename of STACK.
    """
    config = app.config
    kind = detector or config.detector
    detector = load_detector(kind, config.detector_config(kind))

    bands = app.harmonize(app.read_stack(stack))
    mapping = config.label_mapping(mapping) if water_mask else None
    water_ref = app.water_reference(bands, water_reference, water_mask, mapping)
    fdi_params = app.fdi_params(bands) if 'fdi' in detector.INDICES or thresholds.mode == 'otsu' else None

    stem = os.path.splitext(os.path.basename(stack))[0]
    with timed_activity("Detecting debris", detail=stack, logger=logger):
        classes, indices, resolved = detect_scene(bands, thresholds, water_ref=water_ref, detector=detector,
                                                  fdi_params=fdi_params, threads=app.threads,
                                                  estimator=config.estimator)

    raster_path = app.output_path(output_directory, stem + '_classes.tif')
    overlay_path = app.output_path(output_directory, stem + '_classes.png')
    summary_path = app.output_path(output_directory, stem + '_run.json')

    write_mask(classes, raster_path)
    write_overlay(classes, overlay_path, config.palette)
    if quicklook:
        write_quicklook(bands, app.output_path(output_directory, stem + '_rgb.png'))

    reference = indices.water_reference
    summary = OrderedDict([
        ('stack', stack),
        ('detector', kind),
        ('detector-key', detector.get_unique_key()),
        ('thresholds', resolved.to_node()),
        ('water-reference', reference.provenance if reference is not None else None),
        ('classes', classes.counts()),
        ('outputs', [raster_path, overlay_path])
    ])
    try:
        with open(summary_path, 'w') as f:
            json.dump(summary, f, indent=2)
            f.write('\n')
    except OSError as e:
        raise RasterError("{}: Could not write file: {}".format(summary_path, e),
                          reason=RasterErrorReason.IO_FAILURE) from e

    _emit(summary)


##################################################################
#                        Evaluate Command                        #
##################################################################
@cli.command(short_help="Score the detectors against a truth mask")
@click.pass_obj
@threshold_options
@click.option('--mapping', type=click.Path(dir_okay=False),
              help="Label mapping of the mask (default: MARIDA classes)")
@click.option('--format', 'output_format', type=click.Choice(['json', 'table']), default='json',
              help="Output format (default: json)")
@click.option('--water-reference', type=click.Path(dir_okay=False),
              help="Water reference file for the WCI")
@click.option('--water-mask', type=click.Path(dir_okay=False),
              help="Mask whose water pixels give the WCI reference")
@click.argument('stack', type=click.Path(dir_okay=False))
@click.argument('mask', type=click.Path(dir_okay=False))
def evaluate(app, thresholds, mapping, output_format, water_reference, water_mask, stack, mask):
    """Evaluate every detector on STACK against the truth MASK

    The water reference is estimated from STACK unless a reference
    file or a water mask is given, the truth is not used for it.
    """
    config = app.config
    label_mapping = config.label_mapping(mapping)

    bands = app.harmonize(app.read_stack(stack))
    scene = LabeledScene(bands, read_mask(mask), scene_id=os.path.basename(stack))
    water_ref = app.water_reference(bands, water_reference, water_mask, label_mapping)

    reports = per_index_report(scene, thresholds, water_ref, mapping=label_mapping,
                               fdi_params=app.fdi_params(bands), threads=app.threads,
                               estimator=config.estimator)

    if output_format == 'table':
        click.echo(format_table(reports))
    else:
        click.echo(reports_to_json(reports))


##################################################################
#                          Synth Command                         #
##################################################################
@cli.command(short_help="Generate a synthetic scene")
@click.option('--output-directory', '-o', type=click.Path(file_okay=False),
              help="Directory for the scene files")
@click.option('--endmembers', type=click.Path(dir_okay=False),
              help="Endmember library extending the built-in endmembers")
@click.option('--format', 'output_format', type=click.Choice(['tif', 'bsf']), default='tif',
              help="Raster format (default: tif)")
@click.argument('spec', type=click.Path(dir_okay=False))
@click.pass_obj
def synth(app, output_directory, endmembers, output_format, spec):
    """Generate the scene described by SPEC

    Writes the stack, its truth mask and the identity label mapping
    of the mask.
    """
    scene_spec = SceneSpec.load(spec)
    library = EndmemberLibrary.load(endmembers) if endmembers else EndmemberLibrary.builtin()
    table = WavelengthTable.for_band_count(11, app.config.sensor, app.config.band_order)

    scene = generate(scene_spec, table, library)

    scene_id = scene.scene_id
    stack_path = app.output_path(output_directory, '{}.{}'.format(scene_id, output_format))
    truth_path = app.output_path(output_directory, '{}_truth.{}'.format(scene_id, output_format))
    mapping_path = app.output_path(output_directory, '{}_mapping.json'.format(scene_id))

    write_stack(scene.stack, stack_path)
    write_mask(scene.truth, truth_path)
    LabelMapping.identity().save(mapping_path)

    _emit(OrderedDict([
        ('scene-id', scene_id),
        ('stack', stack_path),
        ('truth', truth_path),
        ('mapping', mapping_path),
        ('classes', scene.truth.counts())
    ]))


##################################################################
#                       Sensitivity Command                      #
##################################################################
@cli.command(short_help="Detection rate against coverage")
@click.pass_obj
@threshold_options
@click.option('--endmember', '-e', default='plastic',
              help="The planted endmember (default: plastic)")
@click.option('--background', '-b', default='water',
              help="The background endmember (default: water)")
@click.option('--alphas', default='0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0',
              help="Comma separated coverage fractions")
@click.option('--detector', '-d', default=None,
              help="The detector (default: from the configuration)")
@click.option('--realizations', type=click.IntRange(min=1), default=100,
              help="Noise realizations per coverage fraction")
@click.option('--noise-sigma', type=click.FloatRange(min=0.0), default=0.005,
              help="Noise standard deviation")
@click.option('--size', type=click.IntRange(min=2), default=16,
              help="Side of the square scenes")
@click.option('--seed', type=int, default=0,
              help="Seed of the first realization")
@click.option('--endmembers', type=click.Path(dir_okay=False),
              help="Endmember library extending the built-in endmembers")
def sensitivity(app, thresholds, endmember, background, alphas, detector, realizations, noise_sigma, size, seed,
                endmembers):
    """Print the detection rate of planted pixels per coverage fraction"""
    config = app.config
    library = EndmemberLibrary.load(endmembers) if endmembers else EndmemberLibrary.builtin()
    try:
        alpha_grid = _parse_list(alphas, float)
    except ValueError as e:
        raise ConfigError("Invalid coverage fractions '{}'".format(alphas),
                          reason=ConfigErrorReason.INVALID_VALUE) from e

    kind = detector or config.detector
    curve = sensitivity_curve(endmember, background, alpha_grid,
                              load_detector(kind, config.detector_config(kind)),
                              realizations=realizations, noise_sigma=noise_sigma, size=size, seed=seed,
                              thresholds=thresholds,
                              wavelengths=WavelengthTable.for_band_count(11, config.sensor, config.band_order),
                              library=library, threads=app.threads)

    _emit([{'alpha': alpha, 'detection-rate': rate} for alpha, rate in curve])


##################################################################
#                       Dump Bands Command                       #
##################################################################
@cli.command(name='dump-bands', short_help="Print a sensor band table")
@click.option('--sensor', default=None,
              help="s2a, s2b or a band table file (default: from the configuration)")
@click.pass_obj
def dump_bands(app, sensor):
    """Print the band table of a sensor as JSON"""
    _emit(app.wavelength_table(sensor).to_node())


##################################################################
#                      Detectors Command                         #
##################################################################
@cli.command(short_help="List the available detectors")
@click.pass_obj
def detectors(app):
    """List the detector kinds, one per line"""
    for kind in detector_kinds():
        click.echo(kind)
