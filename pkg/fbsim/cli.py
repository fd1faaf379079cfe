import argparse
import contextlib
import dataclasses
import logging
import sys
from typing import Optional, Sequence

import numpy as np
import requests

from .config import RunConfig, load_config_file
from .evaluation import *
from .fbs import fbs_query
from .graph import graph_stats, open_graph, write_edge_list
from .measures import get_measure, implementations
from .simexceptions import *

"""
The fbsim command: graph statistics, similarity queries, evaluations and synthetic graphs.

Exit codes: 0 on success, 2 on an input error, 3 on a query error, 4 on a numerical error.
"""

__all__ = ['main', 'build_parser', 'EXIT_OK', 'EXIT_INPUT', 'EXIT_QUERY', 'EXIT_NUMERICAL']

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_QUERY = 3
EXIT_NUMERICAL = 4

# command line option -> RunConfig field
_FLAG_FIELDS = {
    'epsilon': 'epsilon', 'tolerance': 'tolerance', 'max_iterations': 'max_iterations',
    'dangling': 'dangling', 'n': 'n', 'lam': 'lam', 'combiner': 'combiner', 'k1': 'k1', 'k2': 'k2',
    'rounds': 'rounds', 'seed': 'seed', 'k': 'k', 'folds': 'folds', 'include_zero': 'include_zero',
    'simrank_c': 'simrank_c', 'simrank_t': 'simrank_t', 'simrank_r': 'simrank_r',
}


def _comma_separated(text: str) -> list[str]:
    return [item.strip() for item in text.split(',') if item.strip()]


def _float_list(text: str) -> list[float]:
    try:
        return [float(item) for item in _comma_separated(text)]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma separated numbers, got {!r}".format(text)) from None


def _settings_parser() -> argparse.ArgumentParser:
    """Options shared by the commands that run measures."""
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group('settings', 'override the config file and the defaults')
    group.add_argument('--config', metavar='FILE', help="key=value config file")
    group.add_argument('--epsilon', type=float, help="reset probability (default 0.15)")
    group.add_argument('--tolerance', type=float, help="L1 convergence tolerance (default 1e-6)")
    group.add_argument('--max-iterations', type=int, help="power iteration cap (default 1000)")
    group.add_argument('--dangling', choices=('query', 'uniform', 'leak'),
                       help="where the walk mass of nodes without out-edges goes (default query)")
    group.add_argument('--lambda', dest='lam', type=float, help="combiner weight of the forward score")
    group.add_argument('--combiner', choices=('linear', 'saturation'), help="FBS combiner (default linear)")
    group.add_argument('--k1', type=float, help="saturation constant of the forward score (default 0.72)")
    group.add_argument('--k2', type=float, help="saturation constant of the backward score (default 0.3)")
    group.add_argument('--n', type=int, help="FBS candidate list size (default 20)")
    group.add_argument('--rounds', type=int, help="FBS forward/backward rounds (default 1)")
    group.add_argument('--k', type=int, help="ranking cutoff (default 10)")
    group.add_argument('--seed', type=int, help="seed of every random draw (default 42)")
    group.add_argument('--folds', type=int, help="cross-validation folds (default 5)")
    group.add_argument('--simrank-c', type=float, help="SimRank decay (default 0.8)")
    group.add_argument('--simrank-t', type=int, help="SimRank walk length (default 100)")
    group.add_argument('--simrank-r', type=int, help="SimRank walk pairs (default 10000)")
    group.add_argument('--include-zero', action='store_true', default=None,
                       help="also list the nodes scoring 0")
    parent.add_argument('--undirected', action='store_true', help="read the edge list as undirected")
    parent.add_argument('--json', action='store_true', help="write reports as JSON")
    parent.add_argument('-o', '--output', metavar='FILE', help="write to FILE instead of stdout")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='fbsim', description="Forward backward similarity search on graphs")
    parser.add_argument('-v', '--verbose', action='count', default=0, help="-v for info, -vv for debug logs")
    commands = parser.add_subparsers(dest='command', metavar='command', required=True)
    settings = _settings_parser()

    stats = commands.add_parser('stats', parents=[settings], help="graph statistics")
    stats.add_argument('graph', help="edge list path or http(s) URL")
    stats.add_argument('--communities', metavar='FILE', help="also report modularity and communities per vertex")
    stats.set_defaults(handler=cmd_stats)

    query = commands.add_parser('query', parents=[settings], help="rank the nodes similar to a query node")
    query.add_argument('graph')
    query.add_argument('-q', '--query', required=True, help="label of the query node")
    query.add_argument('--measure', default='fbs', choices=list(implementations), help="(default fbs)")
    query.set_defaults(handler=cmd_query)

    community = commands.add_parser('eval-community', parents=[settings],
                                    help="mean average Jaccard of PPR and FBS rankings")
    community.add_argument('graph')
    community.add_argument('communities', help="node<TAB>community,... file")
    community.add_argument('--lambdas', type=_float_list, default=[0.05, 0.5, 0.95],
                           help="comma separated FBS lambdas (default 0.05,0.5,0.95)")
    community.add_argument('--samples', type=int, default=100, help="number of query nodes (default 100)")
    community.add_argument('--measures', type=_comma_separated, default=[],
                           help="comma separated extra measures to evaluate")
    community.add_argument('--normalized', action='store_true', help="divide every inner Jaccard sum by its rank")
    community.set_defaults(handler=cmd_eval_community)

    linkpred = commands.add_parser('eval-linkpred', parents=[settings],
                                   help="link prediction AUC of logistic regressions")
    linkpred.add_argument('graph')
    linkpred.add_argument('--positives', type=int, default=10000, help="edges to predict (default 10000)")
    linkpred.add_argument('--negatives', type=int, default=10000, help="non-edges to reject (default 10000)")
    linkpred.add_argument('--features', type=_comma_separated, default=['fbs', 'ppr'],
                          help="comma separated feature sets, measures of a set joined by '+' (default fbs,ppr)")
    linkpred.set_defaults(handler=cmd_eval_linkpred)

    ndcg = commands.add_parser('eval-ndcg', parents=[settings],
                               help="nDCG of the ranking of voted candidates")
    ndcg.add_argument('graph')
    ndcg.add_argument('relevance', help="candidate<TAB>votes file")
    ndcg.add_argument('-q', '--query', required=True)
    ndcg.add_argument('--measure', default='fbs', choices=list(implementations))
    ndcg.set_defaults(handler=cmd_eval_ndcg)

    gen = commands.add_parser('gen', help="draw a planted partition graph")
    gen.add_argument('--k', type=int, default=4, help="number of communities (default 4)")
    gen.add_argument('--size', type=int, default=50, help="nodes per community (default 50)")
    gen.add_argument('--p-in', type=float, default=0.2, help="edge probability inside a community")
    gen.add_argument('--p-out', type=float, default=0.01, help="edge probability across communities")
    gen.add_argument('--directed', action='store_true')
    gen.add_argument('--hubs', type=int, default=0, help="nodes linked from every community")
    gen.add_argument('--p-hub', type=float, default=0.0, help="probability of a link to each hub")
    gen.add_argument('--seed', type=int, default=42)
    gen.add_argument('-o', '--output', metavar='FILE', required=True, help="edge list to write")
    gen.add_argument('--communities-output', metavar='FILE', required=True, help="community file to write")
    gen.set_defaults(handler=cmd_gen)
    return parser


def _run_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        try:
            cfg = cfg.merged(load_config_file(args.config))
        except OSError as e:
            raise InputFileException(args.config, e.strerror or str(e)) from None
    return cfg.merged({field: getattr(args, option) for option, field in _FLAG_FIELDS.items()})


def _load_graph(path: str, directed: bool):
    try:
        return open_graph(path, directed=directed)
    except (EdgeListParseException, EmptyGraphException) as e:
        raise InputFileException(path, str(e)) from None
    except OSError as e:
        raise InputFileException(path, e.strerror or str(e)) from None
    except requests.RequestException as e:
        raise InputFileException(path, str(e)) from None


def _read_with(path: str, reader, *arguments):
    try:
        with open(path, 'rb') as f:
            return reader(f, *arguments)
    except EdgeListParseException as e:
        raise InputFileException(path, str(e)) from None
    except OSError as e:
        raise InputFileException(path, e.strerror or str(e)) from None


@contextlib.contextmanager
def _output(args):
    if getattr(args, 'output', None):
        with open(args.output, 'w', encoding='utf-8', newline='\n') as f:
            yield f
    else:
        yield sys.stdout


def _write_report(args, report: EvalReport) -> None:
    with _output(args) as out:
        out.write(report.to_json() + "\n" if args.json else report.to_text())


def cmd_stats(args) -> int:
    g = _load_graph(args.graph, not args.undirected)
    report = graph_stats(g)
    if args.communities:
        comms = _read_with(args.communities, load_communities, g)
        try:
            report = dataclasses.replace(report, modularity=modularity(g, comms.partition()), cpv=cpv(comms))
        except ValueError as e:
            logger.warning("modularity needs one community per node (%s)", e)
            report = dataclasses.replace(report, cpv=cpv(comms))
    with _output(args) as out:
        out.write((report.to_json() if args.json else report.to_text()) + "\n")
    return EXIT_OK


def cmd_query(args) -> int:
    cfg = _run_config(args)
    g = _load_graph(args.graph, not args.undirected)
    u = g.node_id(args.query)
    with _output(args) as out:
        get_measure(args.measure).write_query(g, u, cfg, out)
    return EXIT_OK


def cmd_eval_community(args) -> int:
    cfg = _run_config(args)
    g = _load_graph(args.graph, not args.undirected)
    comms = _read_with(args.communities, load_communities, g)
    queries = sample_queries(comms, args.samples, cfg.seed)
    series = community_effect_trial(g, comms, queries, cfg.k, args.lambdas, cfg.fbs_config(), args.normalized)
    for name in args.measures:
        measure = get_measure(name)
        ranked = [measure.ranking(g, q, cfg)[:cfg.k] for q in queries]
        series[name] = [maj_at_k(queries, ranked, comms, cutoff, args.normalized) for cutoff in range(1, cfg.k + 1)]
    report = EvalReport('MAJ', series, {name: values[-1] for name, values in series.items()},
                        dict(cfg.as_dict(), samples=len(queries), normalized=args.normalized))
    _write_report(args, report)
    return EXIT_OK


def cmd_eval_linkpred(args) -> int:
    cfg = _run_config(args)
    g = _load_graph(args.graph, not args.undirected)
    lp = build_link_prediction_set(g, args.positives, args.negatives, cfg.seed)
    pairs, labels = lp.pairs, lp.labels
    columns = {}
    aggregate, roc_points = {}, {}
    for feature_set in args.features:
        names = feature_set.split('+')
        for name in names:
            if name not in columns:
                logger.info("computing %s features of %d pairs", name, len(pairs))
                columns[name] = get_measure(name).pair_features(g, pairs, cfg)
        features = np.hstack([columns[name] for name in names])
        area, roc = logistic_cv_auc(features, labels, cfg.folds, cfg.seed)
        aggregate[feature_set] = area
        aggregate[feature_set + ' se'] = auc_standard_error(area, len(lp.positives), len(lp.negatives))
        roc_points[feature_set] = roc
    config = dict(cfg.as_dict(), positives=len(lp.positives), negatives=len(lp.negatives))
    _write_report(args, EvalReport('AUC', {}, aggregate, config, {'roc': roc_points}))
    return EXIT_OK


def cmd_eval_ndcg(args) -> int:
    cfg = _run_config(args)
    g = _load_graph(args.graph, not args.undirected)
    votes = _read_with(args.relevance, load_relevance)
    u = g.node_id(args.query)
    candidates = [g.node_id(label) for label in votes]
    measure = get_measure(args.measure)
    scores = measure.score_map(g, u, cfg).scores
    ordered = sorted(candidates, key=lambda v: (-scores[v], v))
    relevance = [votes[g.label(v)] for v in ordered]
    cutoff = min(cfg.k, len(relevance))
    series = {measure.name: [ndcg_at_k(relevance, k) for k in range(1, cutoff + 1)]}
    aggregate = {'ndcg@{}'.format(cutoff): series[measure.name][-1]}
    extra = {'ranking': [g.label(v) for v in ordered]}
    if measure.name == 'fbs':
        extra['backward_weight'] = not fbs_query(g, u, cfg.fbs_config()).zero_backward
    _write_report(args, EvalReport('nDCG', series, aggregate, cfg.as_dict(), extra))
    return EXIT_OK


def cmd_gen(args) -> int:
    g, comms = planted_partition(args.k, args.size, args.p_in, args.p_out, args.directed, args.seed,
                                 args.hubs, args.p_hub)
    with open(args.output, 'w', encoding='utf-8', newline='\n') as f:
        write_edge_list(g, f)
    with open(args.communities_output, 'w', encoding='utf-8', newline='\n') as f:
        write_communities(comms, g.labels, f)
    logger.info("wrote %r", g)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args)
    except NodeNotFoundException as e:
        print("fbsim: error: {}".format(e), file=sys.stderr)
        return EXIT_QUERY
    except NonConvergenceException as e:
        print("fbsim: error: {}".format(e), file=sys.stderr)
        return EXIT_NUMERICAL
    except (FbsimException, ValueError, OSError) as e:
        print("fbsim: error: {}".format(e), file=sys.stderr)
        return EXIT_INPUT


if __name__ == '__main__':
    sys.exit(main())
