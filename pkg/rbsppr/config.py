#!/usr/bin/env python3
# This file is part of rbs-ppr, a toolkit for single-target Personalized
# PageRank queries.
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License version 3, as
# published by the Free Software Foundation.
#
# This program is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranties of
# MERCHANTABILITY, SATISFACTORY QUALITY, or FITNESS FOR A PARTICULAR
# PURPOSE.  See the GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program. If not, see <http://www.gnu.org/licenses/>.
"""Config handling routines."""

from argparse import ArgumentParser

from confuse import Configuration

COMMANDS = (
    "st-query",
    "ss-query",
    "heavy-hitters",
    "ppr-matrix",
    "hop-index",
    "tradeoff",
    "verify",
    "gen-graph",
)


def _common_options():
    """Options every command accepts."""
    common = ArgumentParser(add_help=False)
    common.add_argument(
        "-l",
        "--log-level",
        type=str,
        help="The default log level, valid options are info, warn, error or debug",
        dest="logging.loglevel",
    )
    common.add_argument(
        "--logfile",
        "-L",
        help="File to log to in addition to stderr",
        dest="logging.file",
    )
    common.add_argument("--seed", type=int, help="Seed of every random stream")
    common.add_argument(
        "--out",
        "-o",
        metavar="PATH",
        help="Write results to %(metavar)s instead of stdout",
    )
    common.add_argument(
        "--workers", type=int, help="Threads used by matrix, index and sweep builds"
    )
    return common


def _graph_options():
    """Options of commands that read a graph."""
    graph = ArgumentParser(add_help=False)
    graph.add_argument("--graph", "-g", metavar="PATH", help="Edge list to load")
    graph.add_argument(
        "--undirected",
        action="store_true",
        default=None,
        help="Read every line 'u v' as both u->v and v->u",
    )
    graph.add_argument(
        "--alpha", type=float, help="Teleport probability (default 0.2)"
    )
    graph.add_argument(
        "--cache",
        metavar="DIR",
        help="Directory for preprocessed graphs and ground-truth vectors",
    )
    return graph


def _error_options(parser, modes=True):
    """Error parameters of randomized and push queries."""
    if modes:
        parser.add_argument("--mode", choices=["relative", "additive"])
    parser.add_argument("--eps", type=float, help="Additive error bound")
    parser.add_argument("--delta", type=float, help="Relative error threshold")
    parser.add_argument("--theta", type=float, help="Override the derived theta")
    parser.add_argument(
        "--theta-setting",
        choices=["experimental", "theoretical"],
        dest="theta_setting",
        help="How theta is derived from --eps or --delta",
    )
    parser.add_argument("--boost", type=int, help="Odd number of median repetitions")


class Config(Configuration):
    """Helper class for holding parsed config, extending confuse's Configuration class."""

    def __init__(self, argv=None):
        """Read defaults, the user config file and the command line, in that order."""
        super().__init__("rbs-ppr", __name__)

        self.parser = ArgumentParser(
            description="Single-target Personalized PageRank queries and experiments"
        )
        common, graph = _common_options(), _graph_options()
        commands = self.parser.add_subparsers(dest="command", metavar="COMMAND")

        st_query = commands.add_parser(
            "st-query", parents=[common, graph], help="pi(s, t) for every s"
        )
        st_query.add_argument("--method", choices=["power", "bs", "rbs"], default="rbs")
        st_query.add_argument("--target", "-t", type=int, required=True)
        st_query.add_argument(
            "--hop-table", dest="hop_table", metavar="PATH", help="Also dump RBS hop levels"
        )
        _error_options(st_query)

        ss_query = commands.add_parser(
            "ss-query", parents=[common, graph], help="pi(s, t) for every t"
        )
        ss_query.add_argument("--method", choices=["power", "fs", "mc"], default="power")
        ss_query.add_argument("--source", "-s", type=int, required=True)
        ss_query.add_argument("--eps", type=float, help="Forward search residue bound")
        ss_query.add_argument("--walks", type=int, dest="mc.walks")

        hitters = commands.add_parser(
            "heavy-hitters", parents=[common, graph], help="Sources for which t is important"
        )
        hitters.add_argument("--target", "-t", type=int, required=True)
        hitters.add_argument("--phi", type=float, dest="heavy_hitters.phi")
        hitters.add_argument("--c", type=float, dest="heavy_hitters.c")
        hitters.add_argument(
            "--pagerank",
            type=float,
            help="Known n*pi(t); computed exactly when omitted",
        )
        hitters.add_argument("--theta", type=float, help="Override theta")
        hitters.add_argument(
            "--theta-setting", choices=["experimental", "theoretical"], dest="theta_setting"
        )
        hitters.add_argument("--boost", type=int)

        matrix = commands.add_parser(
            "ppr-matrix", parents=[common, graph], help="Approximate all-pairs PPR"
        )
        matrix.add_argument(
            "--method",
            choices=["rbs", "bs", "fs"],
            default="rbs",
            help="rbs: additive RBS per target, bs: backward search, fs: forward search",
        )
        matrix.add_argument("--eps", type=float, required=True)
        matrix.add_argument("--boost", type=int)
        matrix.add_argument(
            "--binary", metavar="PATH", help="Also write the binary matrix cache"
        )

        index = commands.add_parser(
            "hop-index", parents=[common, graph], help="l-hop PPR index for chosen targets"
        )
        index.add_argument(
            "--targets", required=True, help="Comma separated target node ids"
        )
        _error_options(index)

        tradeoff = commands.add_parser(
            "tradeoff", parents=[common, graph], help="Error/cost sweep over sampled targets"
        )
        tradeoff.add_argument(
            "--method",
            choices=["power", "bs", "bs_relative", "rbs_additive", "rbs_relative"],
            required=True,
        )
        tradeoff.add_argument(
            "--sweep", required=True, help="Comma separated error parameters"
        )
        tradeoff.add_argument("--targets", type=int, dest="harness.targets")
        tradeoff.add_argument(
            "--sampling", choices=["degree_weighted", "uniform"], dest="harness.sampling"
        )
        tradeoff.add_argument("--k", type=int, dest="harness.k")
        tradeoff.add_argument("--boost", type=int)
        tradeoff.add_argument(
            "--wall-time",
            action="store_true",
            default=None,
            dest="wall_time",
            help="Fill the wall_ms column (output no longer reproducible)",
        )

        verify = commands.add_parser(
            "verify", parents=[common, graph], help="Statistical checks of the RBS estimators"
        )
        verify.add_argument("--target", "-t", type=int, required=True)
        verify.add_argument("--trials", type=int, dest="harness.trials")
        _error_options(verify)

        generate = commands.add_parser(
            "gen-graph", parents=[common], help="Write a synthetic edge list"
        )
        generate.add_argument(
            "kind",
            choices=["complete", "cycle", "path", "star_in", "erdos_renyi", "ba_powerlaw"],
        )
        generate.add_argument("--n", type=int, required=True)
        generate.add_argument("--p", type=float, help="Edge probability (erdos_renyi)")
        generate.add_argument(
            "--attach", type=int, help="Edges per new node (ba_powerlaw)"
        )
        generate.add_argument("--undirected", action="store_true", default=None)

        args = self.parser.parse_args(argv)
        self.check_conflicts(args)
        self.set_args(args, dots=True)

    def check_conflicts(self, args):
        """Reject flag combinations that contradict each other (exit status 2)."""
        if args.command is None:
            return
        mode = getattr(args, "mode", None)
        if mode == "relative" and getattr(args, "eps", None) is not None:
            self.parser.error("--eps is an additive error bound, use --delta with --mode relative")
        if mode == "additive" and getattr(args, "delta", None) is not None:
            self.parser.error("--delta is a relative threshold, use --eps with --mode additive")
        if getattr(args, "eps", None) is not None and getattr(args, "delta", None) is not None:
            self.parser.error("--eps and --delta are mutually exclusive")
        boost = getattr(args, "boost", None)
        if boost is not None and (boost < 1 or boost % 2 == 0):
            self.parser.error("--boost must be a positive odd count")
