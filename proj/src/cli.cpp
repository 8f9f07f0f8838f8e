#include "loglin/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "loglin/trainer.hpp"

namespace loglin {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fmt_fixed(double x) {
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::string fmt_full(double x) {
  if (x == 0.0) x = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Formatter {
  bool full = false;
  std::string operator()(double x) const { return full ? fmt_full(x) : fmt_fixed(x); }
};

std::string clause_path(const ProofTree& t) {
  std::string out;
  for (std::size_t i = 1; i < t.nodes.size(); ++i) {
    if (i > 1) out += ',';
    out += std::to_string(t.nodes[i].clause);
  }
  return out;
}

struct EnumerateOpts {
  std::string program_path, query;
  EnumLimits limits;
};

int do_enumerate(const EnumerateOpts& o, std::ostream& out, std::ostream& err) {
  Program program = load_program(read_file(o.program_path));
  Goal goal = parse_goal(o.query, program);
  Enumeration en = enumerate_proof_trees(program, goal, o.limits);
  if (en.truncated)
    err << "warning: enumeration truncated at " << o.limits.max_trees << " trees\n";
  for (std::size_t k = 0; k < en.trees.size(); ++k) {
    const ProofTree& t = en.trees[k];
    out << "tree " << (k + 1) << ":\n";
    for (std::size_t n = 0; n < t.nodes.size(); ++n)
      out << std::string(2 * (n + 1), ' ') << render_node(t, n, program) << "\n";
    out << "  answer: " << render_store(t, answer(t), program) << "\n";
  }
  out << "total: " << en.trees.size() << "\n";
  return en.trees.empty() ? 1 : 0;
}

struct TrainOpts {
  std::string program_path, corpus_path, model_path;
  std::string fixed_properties;
  std::string init_lambda;
  EnumLimits limits;
  IMConfig im;
  double gain_threshold = 1e-4;
  int max_properties = 50;
  int max_rounds = 50;
  bool trace = false;
  bool selection_log = false;
  bool full_precision = false;
};

void print_trace(const IMTrace& trace, const Formatter& fmt, std::ostream& out) {
  for (std::size_t t = 0; t < trace.iterates.size(); ++t) {
    const IMIterate& it = trace.iterates[t];
    out << t << '\t' << fmt(it.loglik);
    for (Eigen::Index i = 0; i < it.lambda.size(); ++i) out << '\t' << fmt(it.lambda[i]);
    out << '\n';
  }
}

Eigen::VectorXd parse_init_lambda(const std::string& text, std::size_t expected) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string item = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    char* end = nullptr;
    double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0')
      throw ValidationError("bad --init-lambda entry '" + item + "'");
    values.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (values.size() != expected)
    throw ValidationError("--init-lambda has " + std::to_string(values.size()) +
                          " entries, expected " + std::to_string(expected));
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

int do_train(const TrainOpts& o, std::ostream& out, std::ostream& err) {
  Program program = load_program(read_file(o.program_path));
  std::vector<CorpusEntry> corpus = load_corpus(read_file(o.corpus_path), program);
  if (corpus.empty()) throw ValidationError("corpus is empty: " + o.corpus_path);
  TreeSpace space = build_space(program, corpus, o.limits);
  for (const QueryTrees& q : space.queries)
    if (q.truncated)
      err << "warning: trees for query on line " << q.line << " truncated at "
          << o.limits.max_trees << "\n";

  Formatter fmt{o.full_precision};
  LogLinearModel final_model;
  if (!o.fixed_properties.empty()) {
    std::vector<PropertyPattern> patterns;
    std::istringstream lines(read_file(o.fixed_properties));
    std::string line;
    while (std::getline(lines, line)) {
      std::size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      std::size_t b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos) continue;
      std::size_t e = line.find_last_not_of(" \t\r");
      patterns.push_back(parse_pattern(line.substr(b, e - b + 1), program));
    }
    if (patterns.empty())
      throw ValidationError("no properties found in " + o.fixed_properties);
    Eigen::VectorXd lambda0;
    if (!o.init_lambda.empty()) lambda0 = parse_init_lambda(o.init_lambda, patterns.size());
    LogLinearModel model = make_model(space, std::move(patterns), lambda0);
    auto [estimated, trace] = estimate(model, space, o.im);
    final_model = std::move(estimated);
    if (o.trace) print_trace(trace, fmt, out);
  } else {
    TrainerConfig cfg{o.im, o.gain_threshold, o.max_properties, o.max_rounds};
    InduceHooks hooks;
    if (o.selection_log)
      hooks.on_candidates = [&](int round, const std::vector<GainReport>& scored) {
        err << "# round " << round << "\n";
        for (const GainReport& g : scored)
          err << g.pattern.canon << '\t' << fmt(g.alpha_hat) << '\t' << fmt(g.gain) << "\n";
      };
    hooks.on_round = [&](int round, const RoundRecord& r, const IMTrace& trace) {
      out << round << '\t' << r.pattern.canon << '\t' << fmt(r.alpha_hat) << '\t'
          << fmt(r.gain) << '\t' << fmt(r.loglik_after) << "\n";
      if (o.trace) print_trace(trace, fmt, out);
    };
    InduceResult result = induce(program, space, cfg, hooks);
    final_model = std::move(result.model);
  }

  std::ofstream model_out(o.model_path, std::ios::binary);
  if (!model_out) throw ValidationError("cannot write model file: " + o.model_path);
  save_model(final_model, o.limits.max_depth, model_out);
  return 0;
}

struct RankOpts {
  std::string model_path, program_path, query;
  EnumLimits limits;
  bool depth_given = false;
  bool trees_given = false;
  bool full_precision = false;
};

int do_rank(const RankOpts& o, std::ostream& out, std::ostream& err) {
  Program program = load_program(read_file(o.program_path));
  std::istringstream model_in(read_file(o.model_path));
  LoadedModel loaded = load_model(model_in, program);
  Goal goal = parse_goal(o.query, program);
  EnumLimits limits = o.limits;
  if (!o.depth_given) limits.max_depth = loaded.depth;
  RankResult result = rank(loaded.patterns, loaded.lambda, program, goal, limits);
  if (result.truncated)
    err << "warning: enumeration truncated at " << limits.max_trees << " trees\n";
  if (result.no_parse) {
    err << "no parse\n";
    return 1;
  }
  Formatter fmt{o.full_precision};
  for (const RankedTree& item : result.items)
    out << fmt(item.probability) << '\t' << render_store(item.tree, answer(item.tree), program)
        << '\t' << clause_path(item.tree) << "\n";
  return 0;
}

struct LoglikOpts {
  std::string model_path, program_path, corpus_path;
  EnumLimits limits;
  bool depth_given = false;
  bool full_precision = false;
};

int do_loglik(const LoglikOpts& o, std::ostream& out) {
  Program program = load_program(read_file(o.program_path));
  std::istringstream model_in(read_file(o.model_path));
  LoadedModel loaded = load_model(model_in, program);
  std::vector<CorpusEntry> corpus = load_corpus(read_file(o.corpus_path), program);
  Formatter fmt{o.full_precision};
  if (corpus.empty()) {
    out << fmt(0.0) << "\n";
    return 0;
  }
  EnumLimits limits = o.limits;
  if (!o.depth_given) limits.max_depth = loaded.depth;
  TreeSpace space = build_space(program, corpus, limits);
  LogLinearModel model = make_model(space, loaded.patterns, loaded.lambda);
  out << fmt(log_likelihood(model, space)) << "\n";
  return 0;
}

void add_limit_flags(CLI::App* cmd, EnumLimits& limits) {
  cmd->add_option("--max-depth", limits.max_depth, "Resolution depth bound per derivation")
      ->capture_default_str();
  cmd->add_option("--max-trees", limits.max_trees, "Cap on enumerated proof trees per query")
      ->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Log-linear probabilistic ranking and training for constraint logic programs"};
  app.name("loglin-clp");
  app.require_subcommand(1);

  EnumerateOpts eo;
  CLI::App* enumerate_cmd =
      app.add_subcommand("enumerate", "List all proof trees of a query with their answers");
  enumerate_cmd->add_option("program", eo.program_path, "Program file")->required();
  enumerate_cmd->add_option("query", eo.query, "Query goal, e.g. 's(Z) & Z = a'")->required();
  add_limit_flags(enumerate_cmd, eo.limits);

  TrainOpts to;
  CLI::App* train_cmd =
      app.add_subcommand("train", "Induce or estimate a model from a query corpus");
  train_cmd->add_option("program", to.program_path, "Program file")->required();
  train_cmd->add_option("corpus", to.corpus_path, "Corpus file: <count><TAB><goal> per line")
      ->required();
  train_cmd->add_option("model", to.model_path, "Output model file")->required();
  add_limit_flags(train_cmd, to.limits);
  train_cmd->add_option("--tol-loglik", to.im.loglik_tol, "Log-likelihood convergence tolerance")
      ->capture_default_str();
  train_cmd->add_option("--tol-root", to.im.root_tol, "Update-equation root tolerance")
      ->capture_default_str();
  train_cmd->add_option("--max-iter", to.im.max_iters, "Estimation iteration cap")
      ->capture_default_str();
  train_cmd->add_option("--max-properties", to.max_properties, "Cap on selected properties")
      ->capture_default_str();
  train_cmd->add_option("--max-rounds", to.max_rounds, "Cap on selection rounds")
      ->capture_default_str();
  train_cmd
      ->add_option("--gain-threshold", to.gain_threshold,
                   "Stop selecting when the best gain falls below this")
      ->capture_default_str();
  train_cmd->add_flag("--trace", to.trace, "Print one line per estimation iteration");
  train_cmd->add_flag("--selection-log", to.selection_log,
                      "Print per-round candidate scores to stderr");
  train_cmd->add_option("--fixed-properties", to.fixed_properties,
                        "Skip selection; estimate these patterns (one per line)");
  train_cmd->add_option("--init-lambda", to.init_lambda,
                        "Comma-separated initial parameters (with --fixed-properties)");
  train_cmd->add_flag("--full-precision", to.full_precision,
                      "Print 17 significant digits instead of 6 decimals");

  RankOpts ro;
  CLI::App* rank_cmd = app.add_subcommand("rank", "Rank the proof trees of a query");
  rank_cmd->add_option("model", ro.model_path, "Model file")->required();
  rank_cmd->add_option("program", ro.program_path, "Program file")->required();
  rank_cmd->add_option("query", ro.query, "Query goal")->required();
  add_limit_flags(rank_cmd, ro.limits);
  rank_cmd->add_flag("--full-precision", ro.full_precision,
                     "Print 17 significant digits instead of 6 decimals");

  LoglikOpts lo;
  CLI::App* loglik_cmd =
      app.add_subcommand("loglik", "Incomplete-data log-likelihood of a corpus under a model");
  loglik_cmd->add_option("model", lo.model_path, "Model file")->required();
  loglik_cmd->add_option("program", lo.program_path, "Program file")->required();
  loglik_cmd->add_option("corpus", lo.corpus_path, "Corpus file")->required();
  add_limit_flags(loglik_cmd, lo.limits);
  loglik_cmd->add_flag("--full-precision", lo.full_precision,
                       "Print 17 significant digits instead of 6 decimals");

  int code = 0;
  enumerate_cmd->callback([&] { code = do_enumerate(eo, out, err); });
  train_cmd->callback([&] { code = do_train(to, out, err); });
  rank_cmd->callback([&] {
    ro.depth_given = rank_cmd->count("--max-depth") > 0;
    code = do_rank(ro, out, err);
  });
  loglik_cmd->callback([&] {
    lo.depth_given = loglik_cmd->count("--max-depth") > 0;
    code = do_loglik(lo, out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return code;
}

}  // namespace loglin
