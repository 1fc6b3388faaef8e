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
"""Main entrypoint for the rbs-ppr CLI."""
import csv
import hashlib
import json
import os.path
import sys
from contextlib import contextmanager
from importlib.metadata import PackageNotFoundError, version

from rbsppr import cache as graph_cache
from rbsppr.apps.heavy_hitters import HeavyHitterConfig, heavy_hitters, query_theta
from rbsppr.apps.hop_index import build_hop_index
from rbsppr.apps.ppr_matrix import build_ppr_matrix
from rbsppr.baselines import backward_search, forward_search, monte_carlo_single_source
from rbsppr.cache import GroundTruthCache
from rbsppr.config import Config
from rbsppr.exact import pagerank_mass, power_single_source, power_single_target
from rbsppr.graph import GraphSource, generate_graph, load_graph, write_edge_list
from rbsppr.harness import (
    TRADEOFF_COLUMNS,
    TargetSampler,
    run_tradeoff,
    verify_lemmas,
    write_tradeoff_csv,
)
from rbsppr.logging import Logger
from rbsppr.rbs import ADDITIVE, RELATIVE, RbsConfig, derive_theta, rbs_boosted
from rbsppr.scores import QueryStats, ScoreVector
from rbsppr.util import PprError, atomic_write, format_float, ground_truth_iterations

MATRIX_METHOD_NAMES = {"rbs": "rbs_additive", "bs": "backward_search", "fs": "forward_search"}


class Cli:
    """Core class of the CLI for rbs-ppr."""

    def __init__(self, argv=None):
        """Create new CLI and configure runtime environment."""
        self.config = Config(argv)
        self.logger = Logger(
            self.config["logging"]["loglevel"].get(),
            self.config["logging"]["file"].get(),
        )

        # get the version of the current package if available
        # this will fail if not running from an installed package
        # e.g. during unit tests
        try:
            self.version = version("rbsppr")
        except PackageNotFoundError:
            self.version = "unknown"

        self.command = self.option("command")
        self.resolved = {"command": self.command}

    def option(self, name, default=None):
        """Value of a top-level option, ``default`` when unset."""
        if name in self.config and self.config[name].get() is not None:
            return self.config[name].get()
        return default

    @property
    def alpha(self):
        """Teleport probability in use."""
        return float(self.option("alpha", 0.2))

    @property
    def seed(self):
        """Base seed in use."""
        return int(self.option("seed", 0))

    def startup_message(self):
        """Print startup message to log."""
        self.logger.info(
            (
                "rbs-ppr version {} starting...\n"
                "\t* Config directory: {}\n"
                "\t* Command: {}\n"
                "\t* Graph: {}\n"
                "\t* Log level: {}\n"
            ).format(
                self.version,
                self.config.config_dir(),
                self.command,
                self.option("graph", "none"),
                self.config["logging"]["loglevel"].get(),
            )
        )

    def usage(self):
        """Print program usage."""
        self.config.parser.print_help()

    def load_graph(self):
        """Load --graph, going through the binary cache when --cache is set."""
        path = self.option("graph")
        if not path or not os.path.isfile(path):
            Logger.fubar("Could not locate graph file {}".format(path), exit_code=1)
        directed = not self.option("undirected", False)
        self.resolved.update({"graph": path, "undirected": not directed})

        cache_dir = self.option("cache")
        cached = None
        if cache_dir:
            with open(path, "rb") as handle:
                digest = hashlib.sha256(handle.read()).hexdigest()[:16]
            cached = os.path.join(cache_dir, "{}-{}.graph".format(digest, int(directed)))
            if os.path.isfile(cached):
                self.logger.debug("Reading cached graph {}".format(cached))
                return graph_cache.load_cached_graph(cached)
        g = load_graph(GraphSource(path=path, directed=directed))
        if cached:
            graph_cache.save_graph(g, cached)
        return g

    def ground_truth_cache(self):
        """Ground-truth cache rooted under --cache, or a no-op cache."""
        cache_dir = self.option("cache")
        return GroundTruthCache(os.path.join(cache_dir, "truth") if cache_dir else None)

    def query_config(self, default_mode=RELATIVE):
        """Resolve mode and theta from --mode, --eps, --delta and --theta."""
        mode = self.option("mode")
        eps, delta = self.option("eps"), self.option("delta")
        if mode is None:
            mode = ADDITIVE if eps is not None else RELATIVE if delta is not None else default_mode
        error = eps if mode == ADDITIVE else delta
        setting = self.option("theta_setting", "experimental")
        theta = self.option("theta")
        if theta is not None:
            mapping = "theta = {} (given)".format(theta)
        else:
            if error is None:
                raise PprError("one of --eps, --delta or --theta is required")
            theta = derive_theta(mode, error, self.alpha, setting)
            mapping = "theta = {} from {} = {} ({} setting)".format(
                theta, "eps" if mode == ADDITIVE else "delta", error, setting
            )
        self.logger.info(mapping)
        cfg = RbsConfig(
            alpha=self.alpha,
            mode=mode,
            theta=theta,
            seed=self.seed,
            boost=int(self.option("boost", 1)),
        )
        self.resolved.update(cfg.as_dict())
        self.resolved.update({"eps": eps, "delta": delta, "theta_mapping": mapping})
        return cfg

    @contextmanager
    def output(self, path=None):
        """Yield a text handle for results: a file written atomically, or stdout."""
        path = path or self.option("out")
        if path:
            with atomic_write(path) as handle:
                yield handle
        else:
            yield sys.stdout

    def write_header(self, handle):
        """Echo the resolved configuration as a comment line."""
        handle.write("# config: {}\n".format(json.dumps(self.resolved, sort_keys=True)))

    def write_scores(self, g, scores, column="estimate"):
        """Write a score vector as 'node,<column>' CSV with original ids."""
        with self.output() as handle:
            self.write_header(handle)
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["node", column])
            for node, value in scores.rows():
                writer.writerow([g.label_of(node), format_float(value)])

    def write_stats(self, stats: QueryStats):
        """Write counters next to --out, or log them."""
        self.logger.info("wall time {:.3f}s".format(stats.wall_time))
        out = self.option("out")
        if not out:
            self.logger.info("stats: {}".format(json.dumps(stats.counters(), sort_keys=True)))
            return
        with atomic_write(out + ".stats.json") as handle:
            json.dump(stats.counters(), handle, indent=2, sort_keys=True)
            handle.write("\n")

    def st_query(self):
        """Answer a single-target query."""
        g = self.load_graph()
        t = g.node_of(self.option("target"))
        method = self.option("method", "rbs")
        self.resolved.update({"method": method, "target": self.option("target")})
        if method == "power":
            self.resolved["alpha"] = self.alpha
            stats = QueryStats()
            with stats.timed():
                truth = power_single_target(g, t, self.alpha, cache=self.ground_truth_cache())
            scores = ScoreVector.from_dense(truth.values)
        elif method == "bs":
            eps = self.option("eps", self.option("delta"))
            if eps is None:
                raise PprError("backward search needs --eps (or --delta)")
            self.resolved.update({"alpha": self.alpha, "eps": eps})
            scores, _, stats = backward_search(g, t, self.alpha, eps)
        else:
            cfg = self.query_config()
            table, scores, stats = rbs_boosted(g, t, cfg)
            hop_path = self.option("hop_table")
            if hop_path:
                with self.output(hop_path) as handle:
                    writer = csv.writer(handle, lineterminator="\n")
                    writer.writerow(["ell", "node", "estimate"])
                    for ell, node, value in table.rows():
                        writer.writerow([ell, g.label_of(node), format_float(value)])
        self.write_scores(g, scores)
        self.write_stats(stats)

    def ss_query(self):
        """Answer a single-source query."""
        g = self.load_graph()
        s = g.node_of(self.option("source"))
        method = self.option("method", "power")
        self.resolved.update(
            {"method": method, "source": self.option("source"), "alpha": self.alpha}
        )
        stats = QueryStats()
        if method == "power":
            with stats.timed():
                scores = ScoreVector.from_dense(
                    power_single_source(g, s, self.alpha, cache=self.ground_truth_cache()).values
                )
        elif method == "fs":
            eps = self.option("eps")
            if eps is None:
                raise PprError("forward search needs --eps")
            self.resolved["eps"] = eps
            scores, _, stats = forward_search(g, s, self.alpha, eps)
        else:
            walks = int(self.config["mc"]["walks"].get())
            workers = int(self.option("workers", 1))
            self.resolved.update({"walks": walks, "seed": self.seed, "workers": workers})
            with stats.timed():
                scores = monte_carlo_single_source(g, s, self.alpha, walks, self.seed, workers)
        self.write_scores(g, scores)
        self.write_stats(stats)

    def heavy_hitters(self):
        """Report the approximate heavy hitters of a target."""
        g = self.load_graph()
        t = g.node_of(self.option("target"))
        given = self.option("pagerank")
        if given is None:
            mass = pagerank_mass(g, t, self.alpha, cache=self.ground_truth_cache())
            provenance = "exact"
        else:
            mass, provenance = float(given), "user"
        hh_cfg = HeavyHitterConfig(
            phi=self.config["heavy_hitters"]["phi"].get(float),
            c=self.config["heavy_hitters"]["c"].get(float),
            pagerank_of_t=mass,
            provenance=provenance,
        )
        theta_setting = self.option("theta_setting", "experimental")
        theta = query_theta(hh_cfg, self.alpha, theta_setting, self.option("theta"))
        rbs_cfg = RbsConfig(
            alpha=self.alpha,
            mode=RELATIVE,
            theta=theta,
            seed=self.seed,
            boost=int(self.option("boost", 1)),
        )
        self.resolved.update(rbs_cfg.as_dict())
        self.resolved.update(
            {
                "target": self.option("target"),
                "phi": hh_cfg.phi,
                "c": hh_cfg.c,
                "pagerank_of_t": mass,
                "pagerank_provenance": provenance,
                "theta_setting": theta_setting,
            }
        )
        hitters = heavy_hitters(g, t, hh_cfg, rbs_cfg, theta_override=theta)
        with self.output() as handle:
            self.write_header(handle)
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["node", "estimate", "classification"])
            for hitter in sorted(hitters, key=lambda h: h.node):
                writer.writerow(
                    [g.label_of(hitter.node), format_float(hitter.estimate), hitter.classification]
                )
        self.logger.info("{} heavy hitters found".format(len(hitters)))

    def ppr_matrix(self):
        """Build the approximate PPR matrix."""
        g = self.load_graph()
        method = MATRIX_METHOD_NAMES[self.option("method", "rbs")]
        eps = float(self.option("eps"))
        workers = int(self.option("workers", 1))
        self.resolved.update(
            {
                "method": method,
                "eps": eps,
                "alpha": self.alpha,
                "seed": self.seed,
                "workers": workers,
            }
        )
        matrix = build_ppr_matrix(
            g,
            method,
            eps,
            workers=workers,
            alpha=self.alpha,
            seed=self.seed,
            boost=int(self.option("boost", 1)),
        )
        with self.output() as handle:
            self.write_header(handle)
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["s", "t", "value"])
            for s, t, value in matrix.triples():
                writer.writerow([g.label_of(s), g.label_of(t), format_float(value)])
        if self.option("binary"):
            matrix.save(self.option("binary"))
        self.write_stats(matrix.stats)

    def hop_index(self):
        """Precompute l-hop PPR values for the given targets."""
        g = self.load_graph()
        labels = [int(item) for item in str(self.option("targets")).split(",") if item.strip()]
        targets = [g.node_of(label) for label in labels]
        cfg = self.query_config(default_mode=ADDITIVE)
        workers = int(self.option("workers", 1))
        self.resolved.update({"targets": labels, "workers": workers})
        index = build_hop_index(g, targets, cfg, workers=workers)
        with self.output() as handle:
            self.write_header(handle)
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["target", "ell", "node", "value"])
            for target, ell, node, value in index.rows():
                writer.writerow([g.label_of(target), ell, g.label_of(node), format_float(value)])
        self.write_stats(index.stats)

    def tradeoff(self):
        """Sweep an error parameter and write the tradeoff CSV."""
        g = self.load_graph()
        sweep = [float(item) for item in str(self.option("sweep")).split(",") if item.strip()]
        harness = self.config["harness"]
        sampler = TargetSampler(
            kind=harness["sampling"].get(), count=harness["targets"].get(int), seed=self.seed
        )
        method = self.option("method")
        self.resolved.update(
            {"method": method, "sweep": sweep, "alpha": self.alpha, "k": harness["k"].get(int)}
        )
        self.resolved.update(sampler.metadata())
        rows = run_tradeoff(
            g,
            method,
            sweep,
            sampler,
            alpha=self.alpha,
            seed=self.seed,
            k=harness["k"].get(int),
            boost=int(self.option("boost", 1)),
            cache=self.ground_truth_cache(),
            record_wall_time=bool(self.option("wall_time", False)),
            workers=int(self.option("workers", 1)),
        )
        out = self.option("out")
        if out:
            write_tradeoff_csv(rows, out, header=self.resolved)
        else:
            self.write_header(sys.stdout)
            sys.stdout.write(",".join(TRADEOFF_COLUMNS) + "\n")
            for row in rows:
                sys.stdout.write(",".join(row.as_list()) + "\n")

    def verify(self):
        """Run the statistical lemma checks and write the JSON report."""
        g = self.load_graph()
        t = g.node_of(self.option("target"))
        cfg = self.query_config()
        trials = self.config["harness"]["trials"].get(int)
        report = verify_lemmas(g, t, cfg, trials)
        out = self.option("out")
        if out:
            report.write_json(out)
        else:
            json.dump(report.as_dict(), sys.stdout, indent=2, sort_keys=True)
            sys.stdout.write("\n")
        if not report.passed:
            self.logger.warn("some lemma checks failed")

    def gen_graph(self):
        """Write a synthetic edge list."""
        g = generate_graph(
            self.option("kind"),
            int(self.option("n")),
            seed=self.seed,
            p=self.option("p"),
            k=self.option("attach"),
            undirected=bool(self.option("undirected", False)),
        )
        self.logger.info("generated {} graph with n={} m={}".format(self.option("kind"), g.n, g.m))
        with self.output() as handle:
            write_edge_list(g, handle)

    def run(self):
        """Dispatch the parsed command; return the exit code."""
        handlers = {
            "st-query": self.st_query,
            "ss-query": self.ss_query,
            "heavy-hitters": self.heavy_hitters,
            "ppr-matrix": self.ppr_matrix,
            "hop-index": self.hop_index,
            "tradeoff": self.tradeoff,
            "verify": self.verify,
            "gen-graph": self.gen_graph,
        }
        if self.command not in handlers:
            self.usage()
            return 2
        try:
            handlers[self.command]()
        except PprError as error:
            Logger.fubar(error.message, exit_code=1)
        return 0


def main(argv=None):
    """Program entry point."""
    cli = Cli(argv)
    cli.startup_message()
    sys.exit(cli.run())


if __name__ == "__main__":  # pragma: no cover
    main()
