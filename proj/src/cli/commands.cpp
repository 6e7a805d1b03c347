#include "gp/cli/commands.hpp"

#include <algorithm>
#include <fnmatch.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <map>
#include <optional>

#include "gp/cli/review_server.hpp"
#include "gp/core/error.hpp"
#include "gp/core/io.hpp"
#include "gp/core/log.hpp"
#include "gp/dataset/generate.hpp"
#include "gp/dataset/split.hpp"
#include "gp/harness/client.hpp"
#include "gp/harness/runner.hpp"
#include "gp/harness/teacher.hpp"
#include "gp/report/report.hpp"
#include "gp/stats/report.hpp"

namespace gp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Raised for conditions that map to a specific exit code.
struct ExitError : std::runtime_error {
  ExitError(int code, const std::string& message) : std::runtime_error(message), code(code) {}
  int code;
};

fs::path data_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("GP_DATA_DIR")) return env;
  return GP_DEFAULT_DATA_DIR;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    const auto item = trim(std::string_view(text).substr(start, end - start));
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

std::vector<VariantKind> parse_variants(const std::string& text) {
  if (text == "all") return {kAllVariants.begin(), kAllVariants.end()};
  std::vector<VariantKind> out;
  for (const auto& name : split_list(text)) out.push_back(parse_variant_kind(name));
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no variants selected");
  return out;
}

std::vector<InstructionType> parse_types(const std::string& text) {
  if (text == "all") return {InstructionType::Direct, InstructionType::Relational};
  std::vector<InstructionType> out;
  for (const auto& name : split_list(text)) out.push_back(parse_instruction_type(name));
  return out;
}

std::vector<bool> parse_reasoning(const std::string& text) {
  if (text == "all") return {false, true};
  std::vector<bool> out;
  for (const auto& name : split_list(text)) {
    if (name == "true" || name == "reasoning") {
      out.push_back(true);
    } else if (name == "false" || name == "noreasoning") {
      out.push_back(false);
    } else {
      throw Error(ErrorCode::InvalidArgument, "reasoning must be true, false or all, got '" + name + "'");
    }
  }
  return out;
}

void write_effective_config(const fs::path& dir, const std::string& command, json settings) {
  settings["command"] = command;
  fs::create_directories(dir);
  write_file_atomic(dir / "effective_config.json", settings.dump(2) + "\n");
}

fs::path absolute_or_empty(const std::string& p) { return p.empty() ? fs::path() : fs::absolute(p); }

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::string steps;
  std::string mhtml_dir;
  std::string variants = "all";
  std::string out;
  std::uint64_t seed = 0;
  int workers = 4;
  int style_copies = 1;
  std::string theme;
  std::string browser;
  std::string data_dir;
  std::string split;
  std::size_t split_size = 0;
  std::string teacher_endpoint;
  std::string teacher_family = "uitars";
  std::string teacher_model;
  std::string api_key_env = "GP_API_KEY";
};

int cmd_generate(const GenerateArgs& a) {
  const fs::path data = data_dir(a.data_dir);
  const auto steps = dataset::load_steps(a.steps, a.mhtml_dir.empty() ? std::nullopt : std::optional<fs::path>(a.mhtml_dir));
  const auto themes = perturb::ThemeRegistry::load(data / "themes");
  const auto templates = instr::TemplateSet::load(data / "templates");

  dataset::GenerateOptions options;
  options.variants = parse_variants(a.variants);
  options.seed = a.seed;
  options.workers = a.workers;
  options.style_copies = a.style_copies;
  options.theme = a.theme;
  if (!a.browser.empty()) options.session.browser_path = a.browser;
  if (a.workers < 1 || a.style_copies < 1) throw Error(ErrorCode::InvalidArgument, "workers and style-copies must be >= 1");

  std::optional<dataset::SplitSpec> split;
  if (!a.split.empty()) {
    // Without an explicit size the split takes every complete step.
    split = dataset::SplitSpec::preset(a.split, a.split_size > 0 ? a.split_size : std::numeric_limits<std::size_t>::max());
  }

  const fs::path out = a.out;
  write_effective_config(out, "generate",
                         {{"steps", fs::absolute(a.steps).string()},
                          {"mhtml-dir", absolute_or_empty(a.mhtml_dir).string()},
                          {"variants", a.variants},
                          {"out", fs::absolute(out).string()},
                          {"seed", a.seed},
                          {"workers", a.workers},
                          {"style-copies", a.style_copies},
                          {"theme", a.theme},
                          {"browser", a.browser},
                          {"data-dir", fs::absolute(data).string()},
                          {"split", a.split},
                          {"split-size", a.split_size},
                          {"teacher-endpoint", a.teacher_endpoint},
                          {"teacher-family", a.teacher_family},
                          {"teacher-model", a.teacher_model},
                          {"api-key-env", a.api_key_env}});

  const dataset::GenerationContext ctx{&themes, &templates, out};
  const auto report = dataset::generate_dataset(steps, options, ctx);
  std::cout << "generated " << report.accepted << " of " << report.jobs << " samples";
  if (!report.rejections.empty()) std::cout << " (" << report.rejections.size() << " rejected)";
  std::cout << " in " << out.string() << "\n";
  for (const auto& r : report.rejections) {
    std::cout << "  rejected " << r.task_id << ":" << r.step_id << ":" << to_string(r.variant) << " at "
              << r.stage << " (" << r.cause << "): " << r.message << "\n";
  }
  if (report.accepted == 0) throw ExitError(kExitNoSamples, "no samples were produced");

  const auto ds = dataset::Dataset::load(out);
  if (split) {
    const auto manifest = dataset::build_split(ds.samples, *split, a.seed);
    write_file_atomic(out / ("split_" + manifest.name + ".json"), json(manifest).dump(2) + "\n");
    std::cout << "split " << manifest.name << ": " << manifest.sample_ids.size() << " samples from "
              << manifest.steps << " steps\n";
  }

  if (!a.teacher_endpoint.empty()) {
    const auto prompts = harness::PromptSet::load(data / "prompts");
    const auto backend = harness::make_http_backend(harness::resolve_http_options(a.teacher_endpoint, a.api_key_env));
    harness::TeacherConfig teacher;
    teacher.family = harness::parse_family(a.teacher_family);
    teacher.model_name = a.teacher_model;
    std::string lines;
    std::map<std::string, std::size_t> counts;
    for (const auto& s : ds.samples) {
      const auto result = harness::teacher_filter(ds, s, *backend, prompts, teacher);
      ++counts[std::string(harness::to_string(result.verdict))];
      lines += json(result).dump() + "\n";
    }
    write_file_atomic(out / "teacher_filter.jsonl", lines);
    std::cout << "teacher filter: keep " << counts["keep"] << ", reject " << counts["reject"] << ", unfiltered "
              << counts["unfiltered"] << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string dataset;
  std::string model_family;
  std::string model_name;
  std::string endpoint;
  std::string api_key_env = "GP_API_KEY";
  std::string instruction_type = "all";
  std::string reasoning = "all";
  std::string variants = "all";
  int concurrency = 8;
  std::string out;
  bool map_back = true;
  bool resume = true;
  int attempts = 3;
  int backoff_ms = 500;
  std::string data_dir;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const fs::path data = data_dir(a.data_dir);
  const auto ds = dataset::Dataset::load(a.dataset);
  const auto prompts = harness::PromptSet::load(data / "prompts");
  const harness::ModelFamily family = harness::parse_family(a.model_family);
  const std::string model_name = a.model_name.empty() ? std::string(harness::to_string(family)) : a.model_name;
  const auto http = harness::resolve_http_options(a.endpoint, a.api_key_env);
  const auto variants = parse_variants(a.variants);
  const auto types = parse_types(a.instruction_type);
  const auto modes = parse_reasoning(a.reasoning);
  if (a.concurrency < 1 || a.attempts < 1) throw Error(ErrorCode::InvalidArgument, "concurrency and attempts must be >= 1");

  harness::RunOptions options;
  options.out_dir = a.out.empty() ? fs::path(a.dataset) / "predictions" : fs::path(a.out);
  options.parallelism = a.concurrency;
  options.map_back = a.map_back;
  options.resume = a.resume;
  options.attempts = a.attempts;
  options.backoff_ms = a.backoff_ms;

  // The endpoint goes into the snapshot, the key never does.
  write_effective_config(options.out_dir, "evaluate",
                         {{"dataset", fs::absolute(a.dataset).string()},
                          {"model-family", std::string(harness::to_string(family))},
                          {"model-name", model_name},
                          {"endpoint", http.endpoint},
                          {"api-key-env", a.api_key_env},
                          {"instruction-type", a.instruction_type},
                          {"reasoning", a.reasoning},
                          {"variants", a.variants},
                          {"concurrency", a.concurrency},
                          {"out", fs::absolute(options.out_dir).string()},
                          {"map-back", a.map_back},
                          {"resume", a.resume},
                          {"attempts", a.attempts},
                          {"backoff-ms", a.backoff_ms},
                          {"data-dir", fs::absolute(data).string()}});

  const auto backend = harness::make_http_backend(http);
  for (const VariantKind variant : variants) {
    const bool present = std::any_of(ds.samples.begin(), ds.samples.end(),
                                     [&](const dataset::SampleRecord& s) { return s.variant == variant; });
    if (!present) {
      std::cout << to_string(variant) << ": no samples in dataset, skipped\n";
      continue;
    }
    for (const InstructionType type : types) {
      for (const bool reasoning : modes) {
        harness::EvalConfig config;
        config.variant = variant;
        config.instruction_type = type;
        config.reasoning = reasoning;
        config.family = family;
        config.endpoint = http.endpoint;
        config.model_name = model_name;
        harness::RunResult result;
        try {
          result = harness::run_configuration(ds, config, *backend, prompts, options);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::EndpointUnreachable) throw ExitError(kExitUnreachable, e.what());
          throw;
        }
        std::size_t hits = 0;
        for (const auto& r : result.records) hits += r.scored_hit() ? 1 : 0;
        std::cout << config.cell() << ": " << hits << "/" << result.records.size() << " hits";
        if (result.skipped) std::cout << ", " << result.skipped << " skipped";
        if (result.resumed) std::cout << ", " << result.resumed << " resumed";
        std::cout << " -> " << result.path.string() << "\n";
      }
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::vector<std::string> predictions;
  std::string baseline_variant = "original";
  std::string out;
  std::uint64_t seed = stats::kDefaultSeed;
  int resamples = stats::kDefaultResamples;
};

std::vector<fs::path> expand_predictions(const std::vector<std::string>& patterns) {
  std::vector<fs::path> files;
  for (const auto& pattern : patterns) {
    fs::path p(pattern);
    std::error_code ec;
    if (fs::is_directory(p, ec)) p /= "predictions_*.jsonl";
    const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    const std::string glob = p.filename().string();
    if (glob.find_first_of("*?[") == std::string::npos) {
      if (!fs::exists(p, ec)) throw Error(ErrorCode::InvalidArgument, "no such predictions file: " + p.string());
      files.push_back(p);
      continue;
    }
    if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::InvalidArgument, "no such directory: " + dir.string());
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && fnmatch(glob.c_str(), entry.path().filename().c_str(), 0) == 0) {
        files.push_back(entry.path());
      }
    }
  }
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());
  return files;
}

int cmd_analyze(const AnalyzeArgs& a) {
  const VariantKind baseline = parse_variant_kind(a.baseline_variant);
  const auto files = expand_predictions(a.predictions);
  if (files.empty()) throw ExitError(kExitNoBaseline, "no predictions files matched");

  std::vector<stats::CellInput> cells;
  json directions = json::array();
  std::string direction_csv = "model,cell,direction,n,hits,rate,cp_lo,cp_hi\n";
  for (const auto& f : files) {
    const auto file = harness::PredictionFile::load(f);
    cells.push_back(report::cell_from_predictions(file));
    if (file.header.config.instruction_type != InstructionType::Relational || file.records.empty()) continue;
    const auto breakdown = report::direction_breakdown(file.records);
    directions.push_back({{"model", cells.back().model},
                          {"cell", file.header.config.cell()},
                          {"breakdown", report::to_json_value(breakdown)}});
    const std::string csv = report::render_direction_csv(breakdown);
    for (std::size_t at = csv.find('\n') + 1; at < csv.size();) {
      const auto end = csv.find('\n', at);
      direction_csv += cells.back().model + "," + file.header.config.cell() + "," + csv.substr(at, end - at) + "\n";
      at = end + 1;
    }
  }

  stats::RobustnessReport rep;
  try {
    rep = stats::build_report(cells, baseline, a.seed, a.resamples);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MissingBaseline) throw ExitError(kExitNoBaseline, e.what());
    throw;
  }

  const fs::path out = a.out;
  std::vector<std::string> inputs;
  for (const auto& f : files) inputs.push_back(fs::absolute(f).string());
  write_effective_config(out, "analyze",
                         {{"predictions", a.predictions},
                          {"baseline-variant", a.baseline_variant},
                          {"out", fs::absolute(out).string()},
                          {"seed", a.seed},
                          {"resamples", a.resamples}});
  json full = stats::to_json_value(rep);
  full["inputs"] = inputs;
  full["directions"] = directions;
  write_file_atomic(out / "report.json", full.dump(2) + "\n");
  fs::create_directories(out / "tables");
  fs::create_directories(out / "figures");
  const std::string text = report::render_table(rep, report::TableFormat::Text);
  write_file_atomic(out / "tables" / "robustness.txt", text);
  write_file_atomic(out / "tables" / "robustness.json", report::render_table(rep, report::TableFormat::Json));
  write_file_atomic(out / "report.csv", report::render_table(rep, report::TableFormat::Csv));
  write_file_atomic(out / "figures" / "hit_rates.csv", report::render_hit_rate_csv(rep));
  write_file_atomic(out / "figures" / "flip_rates.csv", report::render_flip_rate_csv(rep));
  write_file_atomic(out / "figures" / "directions.csv", direction_csv);

  std::cout << text;
  for (const auto& m : rep.models) {
    char base[32];
    std::snprintf(base, sizeof base, "%.1f%%", 100 * m.base_accuracy);
    std::cout << m.model << ": base accuracy " << base;
    if (m.direct_vs_relational) std::cout << ", direct vs relational z = " << m.direct_vs_relational->z;
    std::cout << "\n";
  }
  std::cout << "report written to " << out.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- review / tag

struct ReviewArgs {
  std::string dataset;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string decisions;
  std::string ui_dir;
};

int cmd_review(const ReviewArgs& a) {
  ReviewServerOptions options;
  options.dataset_dir = a.dataset;
  options.decisions_path = a.decisions;
  if (!a.ui_dir.empty()) options.ui_dir = fs::path(a.ui_dir);
  ReviewServer server(options);
  const int port = server.start(a.host, a.port);
  std::cout << "review API on http://" << a.host << ":" << port << "/" << std::endl;
  server.wait();
  return kExitOk;
}

struct TagArgs {
  std::string tags = "tags.jsonl";
  std::string sample;
  std::string config;
  std::string mode;
  std::string category;
  std::string note;
};

int cmd_tag(const TagArgs& a) {
  report::FailureTag tag{a.sample, a.config, a.category, a.mode, a.note};
  const bool stored = report::tag_failure(a.tags, tag);
  std::cout << (stored ? "stored" : "already tagged") << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- config files

/// Expands "--config FILE" into "--key=value" tokens placed right after the
/// subcommand, so later command-line flags take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::optional<std::string> config;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  std::vector<std::string> out{args.empty() ? "gui-perturb" : args[0]};
  if (!config || rest.empty()) {
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
  }
  const json settings = json::parse(read_file(*config), nullptr, false);
  if (!settings.is_object()) throw Error(ErrorCode::InvalidArgument, "config file must hold a JSON object: " + *config);
  out.push_back(rest.front());
  for (const auto& [key, value] : settings.items()) {
    if (key == "command") continue;
    const auto token = [&](const json& v) {
      return "--" + key + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
    };
    if (value.is_array()) {
      for (const auto& v : value) out.push_back(token(v));
    } else if (!(value.is_string() && value.get<std::string>().empty())) {
      out.push_back(token(value));
    }
  }
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

}  // namespace

int run(const std::vector<std::string>& raw_args) {
  CLI::App app{"Perturbed GUI grounding datasets: generation, evaluation, analysis and review."};
  app.name("gui-perturb");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  app.add_option("--config", "JSON settings file (keys are long option names)");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Render perturbed samples from archived pages");
  generate->add_option("--steps", gen.steps, "Step JSONL")->required()->check(CLI::ExistingFile);
  generate->add_option("--mhtml-dir", gen.mhtml_dir, "Directory relative mhtml paths resolve against");
  generate->add_option("--variants", gen.variants, "Comma list or 'all'")->capture_default_str();
  generate->add_option("--out", gen.out, "Dataset directory")->required();
  generate->add_option("--seed", gen.seed, "Run seed")->capture_default_str();
  generate->add_option("--workers", gen.workers, "Browser sessions in parallel")->capture_default_str();
  generate->add_option("--style-copies", gen.style_copies, "Style samples per step")->capture_default_str();
  generate->add_option("--theme", gen.theme, "Force one theme for style variants");
  generate->add_option("--browser", gen.browser, "Chromium executable (else GP_BROWSER, PATH)");
  generate->add_option("--data-dir", gen.data_dir, "Themes/templates/prompts directory");
  generate->add_option("--split", gen.split, "Also write a training split (style, text_shrink_precision, all, all_25k)");
  generate->add_option("--split-size", gen.split_size, "Split target size (default: every complete step)");
  generate->add_option("--teacher-endpoint", gen.teacher_endpoint, "Run teacher filtering against this endpoint");
  generate->add_option("--teacher-family", gen.teacher_family, "Teacher prompt family")->capture_default_str();
  generate->add_option("--teacher-model", gen.teacher_model, "Teacher model name");
  generate->add_option("--api-key-env", gen.api_key_env, "Env var holding the API key")->capture_default_str();

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Query a grounding model over configuration cells");
  evaluate->add_option("--dataset", ev.dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  evaluate->add_option("--model-family", ev.model_family, "uitars, gta1 or qwen")->required();
  evaluate->add_option("--model-name", ev.model_name, "Model name sent to the endpoint (default: family)");
  evaluate->add_option("--endpoint", ev.endpoint, "OpenAI-compatible base URL (else GP_API_BASE)");
  evaluate->add_option("--api-key-env", ev.api_key_env, "Env var holding the API key")->capture_default_str();
  evaluate->add_option("--instruction-type", ev.instruction_type, "direct, relational or all")->capture_default_str();
  evaluate->add_option("--reasoning", ev.reasoning, "true, false or all")->capture_default_str();
  evaluate->add_option("--variants", ev.variants, "Comma list or 'all'")->capture_default_str();
  evaluate->add_option("--concurrency", ev.concurrency, "Requests in flight")->capture_default_str();
  evaluate->add_option("--out", ev.out, "Output directory (default <dataset>/predictions)");
  evaluate->add_option("--map-back", ev.map_back, "Map points to screenshot pixels before hit testing")
      ->capture_default_str();
  evaluate->add_option("--resume", ev.resume, "Reuse matching records from earlier runs")->capture_default_str();
  evaluate->add_option("--attempts", ev.attempts, "Tries per request on transport errors")->capture_default_str();
  evaluate->add_option("--backoff-ms", ev.backoff_ms, "First retry delay")->capture_default_str();
  evaluate->add_option("--data-dir", ev.data_dir, "Themes/templates/prompts directory");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Robustness statistics and tables from predictions");
  analyze->add_option("--predictions", an.predictions, "Files, directories or filename globs")
      ->required()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  analyze->add_option("--baseline-variant", an.baseline_variant, "Variant perturbations are paired against")
      ->capture_default_str();
  analyze->add_option("--out", an.out, "Report directory")->required();
  analyze->add_option("--seed", an.seed, "Bootstrap seed")->capture_default_str();
  analyze->add_option("--resamples", an.resamples, "Bootstrap resamples")->capture_default_str();

  ReviewArgs rv;
  auto* review = app.add_subcommand("review", "Serve the review API");
  review->add_option("--dataset", rv.dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  review->add_option("--host", rv.host, "Bind address")->capture_default_str();
  review->add_option("--port", rv.port, "Port (0 picks one)")->capture_default_str();
  review->add_option("--decisions", rv.decisions, "Decision log (default <dataset>/decisions.jsonl)");
  review->add_option("--ui-dir", rv.ui_dir, "Built review UI to serve at /");

  TagArgs tg;
  auto* tag = app.add_subcommand("tag", "Record a failure-mode tag for a prediction");
  tag->add_option("--tags", tg.tags, "Tag log")->capture_default_str();
  tag->add_option("--sample", tg.sample, "Sample id")->required();
  tag->add_option("--cell", tg.config, "Configuration cell of the prediction");
  tag->add_option("--mode", tg.mode, "Failure mode, e.g. 'Text Matching Bias'")->required();
  tag->add_option("--category", tg.category, "Optional category check");
  tag->add_option("--note", tg.note, "Free text");

  try {
    const std::vector<std::string> args = expand_config(raw_args);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (verbose) log::set_level(log::Level::Debug);

  try {
    if (*generate) return cmd_generate(gen);
    if (*evaluate) return cmd_evaluate(ev);
    if (*analyze) return cmd_analyze(an);
    if (*review) return cmd_review(rv);
    if (*tag) return cmd_tag(tg);
  } catch (const ExitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::EndpointUnreachable: return kExitUnreachable;
      case ErrorCode::MissingBaseline: return kExitNoBaseline;
      case ErrorCode::InvalidArgument:
      case ErrorCode::ThemeNotFound:
      case ErrorCode::MissingTemplate:
      case ErrorCode::UnknownFamily:
      case ErrorCode::UnknownMode:
      case ErrorCode::InvalidSpec:
      case ErrorCode::BrowserNotFound:
      case ErrorCode::InsufficientPool:
      case ErrorCode::IoError: return kExitConfig;
      default: return kExitFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitConfig;
}

}  // namespace gp::cli
