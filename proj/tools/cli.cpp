#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "syncomp/deptree.hpp"
#include "syncomp/mstdecode.hpp"
#include "syncomp/stats.hpp"

namespace syncomp::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data that is not covered by a more specific error type.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path.string());
  return ss.str();
}

// Files and directories (non-recursive, *.conllu, sorted) in argument order.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    const fs::path p(in);
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".conllu") {
          files.push_back(entry.path());
        }
      }
      std::sort(files.begin(), files.end());
      out.insert(out.end(), files.begin(), files.end());
    } else if (fs::exists(p, ec)) {
      out.push_back(p);
    } else {
      throw IoError("no such file or directory: " + in);
    }
  }
  if (out.empty()) throw IoError("no input files");
  return out;
}

void emit(const RunConfig& config, const std::string& text, std::ostream& out) {
  if (config.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(config.out, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + config.out);
  file << text;
  if (!file) throw IoError("error while writing " + config.out);
}

LoadResult load(const RunConfig& config, bool allow_monologue) {
  std::vector<Document> docs;
  for (const auto& path : expand_inputs(config.inputs)) {
    docs.push_back({path.string(), read_file(path)});
  }
  Manifest manifest;
  if (!config.manifest.empty()) {
    std::istringstream in(read_file(config.manifest));
    manifest = read_manifest(in);
  }
  LoadOptions options;
  options.corpus_name = config.corpus_name;
  options.layout = config.layout;
  options.lenient = config.lenient;
  options.allow_monologue = allow_monologue;
  return load_corpus(docs, config.manifest.empty() ? nullptr : &manifest, options);
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "syncomp: warning: " << w << '\n';
}

struct Scored {
  std::vector<ComplexityRecord> records;
  std::size_t dialogues = 0;
};

// Records from CoNLL-U inputs, or from a single score CSV.
Scored score_inputs(const RunConfig& config, std::ostream& err) {
  Scored s;
  if (config.inputs.size() == 1 && fs::path(config.inputs.front()).extension() == ".csv") {
    std::istringstream in(read_file(config.inputs.front()));
    try {
      s.records = read_records_csv(in);
    } catch (const std::runtime_error& e) {
      throw DataError(e.what());
    }
    std::vector<std::string> ids;
    for (const auto& r : s.records) ids.push_back(r.dialogue_id);
    std::sort(ids.begin(), ids.end());
    s.dialogues = static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
    return s;
  }
  auto loaded = load(config, config.command == Command::kScore);
  print_warnings(loaded.warnings, err);
  s.records = complexity_series(loaded.corpus, config.complexity);
  s.dialogues = loaded.corpus.dialogues.size();
  return s;
}

std::vector<ComplexityRecord> for_role(const std::vector<ComplexityRecord>& records, Role role) {
  std::vector<ComplexityRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [role](const ComplexityRecord& r) { return r.role == role; });
  return out;
}

Json result_json(const RegressionResult& r) {
  Json j;
  j["method"] = to_string(r.method);
  j["slope"] = r.slope;
  j["intercept"] = r.intercept;
  j["se"] = r.slope_se;
  j["p"] = r.p_value;
  j["stars"] = significance_stars(r.p_value);
  j["sigma_u2"] = r.sigma_u2;
  j["sigma_e2"] = r.sigma_e2;
  j["theta"] = r.theta;
  j["n_obs"] = r.n_obs;
  j["n_groups"] = r.n_groups;
  j["degenerate"] = r.degenerate;
  if (r.quadratic) {
    j["quadratic"] = {{"coef", r.quadratic->coef},
                      {"se", r.quadratic->se},
                      {"p", r.quadratic->p_value},
                      {"stars", significance_stars(r.quadratic->p_value)}};
  }
  j["warnings"] = r.warnings;
  return j;
}

Json bands_json(const std::vector<BootstrapBand>& bands) {
  Json arr = Json::array();
  for (const auto& b : bands) {
    arr.push_back({{"bin", b.bin},
                   {"mean", b.mean_sc},
                   {"lo", b.ci_low},
                   {"hi", b.ci_high},
                   {"n", b.n_dialogues}});
  }
  return arr;
}

BootstrapOptions bootstrap_options(const RunConfig& config) {
  BootstrapOptions b;
  b.n_bins = config.n_bins;
  b.n_resamples = config.n_resamples;
  b.seed = config.seed;
  b.threads = config.threads;
  return b;
}

int cmd_validate(const RunConfig& config, std::ostream& out) {
  std::ostringstream report;
  bool clean = true;
  for (const auto& path : expand_inputs(config.inputs)) {
    const auto text = read_file(path);
    std::vector<DepTree> trees;
    try {
      trees = parse_conllu(text);
    } catch (const ParseError& e) {
      report << path.string() << ": parse_error: " << e.what() << '\n';
      clean = false;
      continue;
    }
    std::size_t bad = 0;
    for (std::size_t i = 0; i < trees.size(); ++i) {
      const auto result = validate_tree(trees[i]);
      for (const auto& v : result.violations) {
        report << path.string() << " sentence " << i + 1 << ": " << to_string(v.kind) << ": "
               << v.message << '\n';
      }
      bad += result.ok() ? 0 : 1;
    }
    if (bad == 0) {
      report << path.string() << ": ok (" << trees.size() << " sentences)\n";
    } else {
      clean = false;
    }
  }
  emit(config, report.str(), out);
  return clean ? kOk : kValidationFailure;
}

int cmd_score(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto scored = score_inputs(config, err);
  std::ostringstream csv;
  write_records_csv(csv, scored.records, config.with_isc);
  emit(config, csv.str(), out);
  return kOk;
}

int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto scored = score_inputs(config, err);

  FitOptions lmm_options;
  lmm_options.normalized_position = config.normalized_position;
  FitOptions ols_options = lmm_options;
  ols_options.quadratic = config.quadratic;

  Json report;
  report["corpus"] = config.corpus_name;
  report["n_dialogues"] = scored.dialogues;
  report["n_records"] = scored.records.size();
  report["settings"] = {{"lambda", config.complexity.lambda},
                        {"alpha", config.alpha},
                        {"bins", config.n_bins},
                        {"resamples", config.n_resamples},
                        {"seed", config.seed},
                        {"position", config.normalized_position ? "normalized" : "raw"},
                        {"quadratic", config.quadratic}};

  std::ostringstream results_csv;
  write_results_csv_header(results_csv);

  RegressionResult lmm[2];
  Json results;
  Json bands;
  for (Role role : {Role::kInitiator, Role::kFollower}) {
    const auto records = for_role(scored.records, role);
    const int idx = role == Role::kInitiator ? 0 : 1;
    lmm[idx] = fit_lmm(records, lmm_options);
    const auto ols = fit_ols(records, ols_options);
    results[to_string(role)] = {{"lmm", result_json(lmm[idx])}, {"ols", result_json(ols)}};
    bands[to_string(role)] = bands_json(bootstrap_bands(records, bootstrap_options(config)));
    write_results_csv_row(results_csv, role, lmm[idx]);
    write_results_csv_row(results_csv, role, ols);
  }
  const auto label = classify_convergence(lmm[0], lmm[1], config.alpha);
  report["results"] = results;
  report["convergence"] = {{"label", to_string(label.label)},
                           {"alpha", label.alpha},
                           {"initiator_slope", label.initiator.slope},
                           {"follower_slope", label.follower.slope}};
  report["bands"] = bands;

  if (!config.results_csv.empty()) {
    RunConfig csv_target = config;
    csv_target.out = config.results_csv;
    emit(csv_target, results_csv.str(), out);
  }
  emit(config, report.dump(2) + "\n", out);
  return kOk;
}

int cmd_plotdata(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto scored = score_inputs(config, err);
  std::ostringstream csv;
  write_bands_csv_header(csv);
  for (Role role : {Role::kInitiator, Role::kFollower}) {
    const auto records = for_role(scored.records, role);
    write_bands_csv_rows(csv, role, bootstrap_bands(records, bootstrap_options(config)));
  }
  emit(config, csv.str(), out);
  return kOk;
}

int cmd_decode(const RunConfig& config, std::ostream& out) {
  if (config.inputs.size() != 1) throw CLI::ValidationError("decode takes exactly one input");
  ScoreMatrix scores;
  try {
    scores = ScoreMatrix::from_json(read_file(config.inputs.front()));
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  auto tree = tree_from_heads(mst_decode(scores), "X", "dep");
  require_valid(tree);
  emit(config, serialize_conllu({tree}), out);
  return kOk;
}

int cmd_synth(const RunConfig& config, std::ostream& out) {
  emit(config, serialize_conllu(synthesize_corpus(config.synth)), out);
  return kOk;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

int fail(std::ostream& err, const char* kind, const std::string& message, int code) {
  err << "syncomp: error: " << kind << ": " << one_line(message) << '\n';
  return code;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.complexity.validate();
    switch (config.command) {
      case Command::kValidate: return cmd_validate(config, out);
      case Command::kScore: return cmd_score(config, out, err);
      case Command::kAnalyze: return cmd_analyze(config, out, err);
      case Command::kPlotData: return cmd_plotdata(config, out, err);
      case Command::kDecode: return cmd_decode(config, out);
      case Command::kSynth: return cmd_synth(config, out);
      case Command::kNone: break;
    }
    return fail(err, "usage", "no command given", kUsageError);
  } catch (const IoError& e) {
    return fail(err, "io", e.what(), kIoError);
  } catch (const DegenerateDesignError& e) {
    return fail(err, "degenerate", e.what(), kDegenerateStatistics);
  } catch (const ParseError& e) {
    return fail(err, "parse", e.what(), kValidationFailure);
  } catch (const InvalidTreeError& e) {
    return fail(err, "invalid_tree", e.what(), kValidationFailure);
  } catch (const LoadError& e) {
    return fail(err, "load", e.what(), kValidationFailure);
  } catch (const DataError& e) {
    return fail(err, "data", e.what(), kValidationFailure);
  } catch (const CLI::Error& e) {
    return fail(err, "usage", e.what(), kUsageError);
  } catch (const std::invalid_argument& e) {
    return fail(err, "usage", e.what(), kUsageError);
  } catch (const std::exception& e) {
    return fail(err, "internal", e.what(), kValidationFailure);
  }
}

namespace {

void add_corpus_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("inputs", c.inputs, "CoNLL-U files or directories")->required();
  sub->add_option("--manifest", c.manifest, "CSV dialogue_id,utterance_id,speaker");
  sub->add_option("--name", c.corpus_name, "Corpus name for reports");
  sub->add_option("--layout", c.layout, "concatenated or per-dialogue")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Layout>{{"concatenated", Layout::kConcatenated},
                                        {"per-dialogue", Layout::kPerDialogueFile}}));
  sub->add_flag("--lenient", c.lenient, "Drop invalid sentences and dialogues with a warning");
  sub->add_option("--lambda", c.complexity.lambda, "Length/depth trade-off in [0,1]")
      ->capture_default_str();
  sub->add_flag("--exclude-punct,!--include-punct", c.complexity.metrics.exclude_punct,
                "Leave PUNCT tokens out of the sentence length (default on)");
  sub->add_flag("--exclude-punct-structure", c.complexity.metrics.exclude_punct_structure,
                "Also leave PUNCT tokens out of heads, depth and branching");
  sub->add_option_function<std::vector<double>>(
         "--isc-weights",
         [&c](const std::vector<double>& w) {
           if (w.size() != 4) throw CLI::ValidationError("--isc-weights needs 4 values");
           c.complexity.isc_weights = {w[0], w[1], w[2], w[3]};
         },
         "sconj,wh,nonfinite,nominal")
      ->delimiter(',')
      ->expected(4);
  sub->add_option_function<std::string>(
         "--isc-preset",
         [&c](const std::string& name) {
           if (name == "classical") {
             c.complexity.isc_weights = IscWeights::classical();
           } else if (name == "uniform") {
             c.complexity.isc_weights = IscWeights{};
           } else {
             throw CLI::ValidationError("unknown ISC preset '" + name + "'");
           }
         },
         "uniform or classical");
  sub->add_option("--out", c.out, "Output path (default: standard output)");
}

void add_bootstrap_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--bins", c.n_bins, "Position bins")->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--resamples", c.n_resamples, "Bootstrap resamples")
      ->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  sub->add_option("--threads", c.threads, "Bootstrap worker threads (0: all cores)");
  sub->add_flag("--normalized-position", c.normalized_position,
                "Use position / utterances-of-role instead of the raw index");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Syntactic complexity and dialogue convergence toolkit", "syncomp"};
  app.require_subcommand(1);

  auto* validate = app.add_subcommand("validate", "Check CoNLL-U files for tree well-formedness");
  validate->add_option("inputs", c.inputs, "CoNLL-U files or directories")->required();
  validate->add_option("--out", c.out, "Report path (default: standard output)");

  auto* score = app.add_subcommand("score", "Per-utterance complexity records as CSV");
  add_corpus_options(score, c);
  score->add_flag("--with-isc", c.with_isc, "Append an isc column");

  auto* analyze = app.add_subcommand("analyze", "Regressions, convergence label and bands as JSON");
  add_corpus_options(analyze, c);
  add_bootstrap_options(analyze, c);
  analyze->add_option("--alpha", c.alpha, "Significance level")->capture_default_str();
  analyze->add_flag("--quadratic", c.quadratic, "Add a position^2 term to the OLS fit");
  analyze->add_option("--results-csv", c.results_csv, "Also write the regression table here");

  auto* plotdata = app.add_subcommand("plotdata", "Bootstrap bands per role as CSV");
  add_corpus_options(plotdata, c);
  add_bootstrap_options(plotdata, c);

  auto* decode = app.add_subcommand("decode", "Decode a JSON score matrix to CoNLL-U");
  decode->add_option("input", c.inputs, "Score-matrix JSON")->required();
  decode->add_option("--out", c.out, "Output path (default: standard output)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth->group("");
  auto& s = c.synth;
  synth->add_option("--initiator-slope", s.initiator.slope);
  synth->add_option("--follower-slope", s.follower.slope);
  synth->add_option("--initiator-intercept", s.initiator.intercept);
  synth->add_option("--follower-intercept", s.follower.intercept);
  synth->add_option("--initiator-utterances", s.initiator.utterances)->check(CLI::PositiveNumber);
  synth->add_option("--follower-utterances", s.follower.utterances)->check(CLI::PositiveNumber);
  synth->add_option("--sigma-u", s.sigma_u)->check(CLI::NonNegativeNumber);
  synth->add_option("--sigma", s.sigma)->check(CLI::NonNegativeNumber);
  synth->add_option("--dialogues", s.dialogues)->check(CLI::PositiveNumber);
  synth->add_option("--seed", s.seed);
  synth->add_option("--out", c.out);

  std::vector<std::string> argv_storage{"syncomp"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    return fail(err, "usage", e.what(), kUsageError);
  }

  if (validate->parsed()) c.command = Command::kValidate;
  if (score->parsed()) c.command = Command::kScore;
  if (analyze->parsed()) c.command = Command::kAnalyze;
  if (plotdata->parsed()) c.command = Command::kPlotData;
  if (decode->parsed()) c.command = Command::kDecode;
  if (synth->parsed()) c.command = Command::kSynth;
  return run(c, out, err);
}

}  // namespace syncomp::cli
