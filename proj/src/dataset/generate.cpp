#include "gp/dataset/generate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <optional>
#include <thread>

#include "gp/core/io.hpp"
#include "gp/core/log.hpp"
#include "gp/core/random.hpp"

namespace gp::dataset {

using browser::ElementRecord;
using nlohmann::json;

StepRejected::StepRejected(std::string stage, ErrorCode cause, const std::string& message)
    : Error(ErrorCode::StepRejected, stage + ": " + std::string(to_string(cause)) + ": " + message),
      stage_(std::move(stage)),
      cause_(cause) {}

namespace {

// Runs one pipeline stage, converting any toolkit error into a rejection
// tagged with the stage name.
template <typename F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StepRejected&) {
    throw;
  } catch (const Error& e) {
    throw StepRejected(name, e.code(), e.what());
  }
}

constexpr std::string_view kScrollTo = R"js(((y) => {
  window.scrollTo(0, y);
  return [scrollX, scrollY];
}))js";

// The first anchor, nearest first, whose relational instruction passes the
// unambiguity check; none when no anchor qualifies.
std::optional<instr::InstructionPair> relational_instructions(
    const StepInput& step, const ElementRecord& target, const std::vector<ElementRecord>& elements,
    const instr::TemplateSet& templates) {
  std::vector<ElementRecord> candidates;
  for (const auto& e : elements) {
    if (e.node_ref != target.node_ref) candidates.push_back(e);
  }
  for (const auto& choice : instr::rank_anchors(target, candidates)) {
    auto pair = instr::generate_instructions(step.action, target, choice, templates, step.value);
    if (instr::check_unambiguous(pair, InstructionType::Relational, elements, target).unambiguous) {
      return pair;
    }
  }
  return std::nullopt;
}

}  // namespace

SampleRecord generate_step(const StepInput& step, const perturb::VariantSpec& spec,
                           browser::Session& session, const GenerationContext& ctx) {
  auto page = stage("load", [&] { return browser::load_archive(session, step.mhtml_path); });

  // Resolve the step's target on the unperturbed page first; its node
  // reference then follows the element through the perturbation.
  perturb::TargetDescriptor target{step.bbox, step.target_tag, step.target_text, std::nullopt};
  target.node_ref = stage("resolve_target", [&] {
    const auto elements = browser::query_interactables(page);
    return perturb::match_target(elements, target, perturb::VariantSpec{}).node_ref;
  });

  Rng rng(spec.seed);
  const perturb::AppliedSpec applied =
      stage("apply_variant", [&] { return perturb::apply_variant(page, spec, *ctx.themes, rng); });

  const auto elements = stage("relocate_bbox", [&] { return browser::query_interactables(page); });
  const ElementRecord located =
      stage("relocate_bbox", [&] { return perturb::match_target(elements, target, spec); });

  const auto instructions = stage("generate_instructions", [&] {
    auto pair = instr::generate_instructions(step.action, located, std::nullopt, *ctx.templates,
                                             step.value);
    if (auto relational = relational_instructions(step, located, elements, *ctx.templates)) {
      relational->direct = pair.direct;
      return *relational;
    }
    return pair;
  });

  const Size viewport = session.viewport();
  const auto [shot, bbox] = stage("capture_screenshot", [&] {
    Point scroll{0, 0};
    const bool off_screen = located.bbox.right() > viewport.width ||
                            located.bbox.bottom() > viewport.height;
    if (off_screen) {
      const double wanted = std::max(0.0, located.bbox.center().y - viewport.height / 2.0);
      const json reply = browser::run_script(page, "(" + std::string(kScrollTo) + ")(" +
                                                       std::to_string(std::floor(wanted)) + ")");
      scroll = {reply.at(0).get<double>(), reply.at(1).get<double>()};
    }
    auto captured = browser::capture_screenshot(page);
    Bbox b = located.bbox.translated(-scroll.x, -scroll.y);
    const double x0 = std::max(0.0, b.x);
    const double y0 = std::max(0.0, b.y);
    const double x1 = std::min<double>(captured.size.width, b.right());
    const double y1 = std::min<double>(captured.size.height, b.bottom());
    if (x1 - x0 < 1 || y1 - y0 < 1) {
      throw Error(ErrorCode::TargetLost, "target is outside the captured viewport");
    }
    return std::pair{std::move(captured), Bbox{x0, y0, x1 - x0, y1 - y0}};
  });

  SampleRecord record;
  record.task_id = step.task_id;
  record.step_id = step.step_id;
  record.variant = spec.kind;
  record.screenshot = store_screenshot(ctx.dataset_dir, shot.png);
  record.image_dims = shot.size;
  record.bbox = bbox;
  record.instruction_direct = instructions.direct;
  record.instruction_relational = instructions.relational;
  record.anchor_text = instructions.anchor_text;
  if (instructions.direction) record.direction = std::string(instr::to_string(*instructions.direction));
  record.action = step.action;
  record.applied_spec = applied;
  record.viewport = viewport;
  return record;
}

std::uint64_t derive_seed(std::uint64_t run_seed, const std::string& step_key, VariantKind kind,
                          int copy) {
  const std::string key =
      step_key + "|" + std::string(to_string(kind)) + "|" + std::to_string(copy);
  const std::string digest = sha256_hex(key);
  const std::uint64_t stream = std::stoull(digest.substr(0, 16), nullptr, 16);
  return Rng::substream(run_seed, stream).next();
}

json GenerationReport::to_json() const {
  json by_stage = json::object();
  json rejected = json::array();
  for (const auto& r : rejections) {
    by_stage[r.stage] = by_stage.value(r.stage, 0) + 1;
    rejected.push_back({{"task_id", r.task_id},
                        {"step_id", r.step_id},
                        {"variant", to_string(r.variant)},
                        {"copy", r.copy},
                        {"stage", r.stage},
                        {"cause", r.cause},
                        {"message", r.message}});
  }
  return json{{"jobs", jobs},
              {"accepted", accepted},
              {"rejected", rejections.size()},
              {"rejected_by_stage", by_stage},
              {"rejections", rejected}};
}

GenerationReport generate_dataset(const std::vector<StepInput>& steps, const GenerateOptions& options,
                                  const GenerationContext& ctx) {
  struct Job {
    const StepInput* step;
    perturb::VariantSpec spec;
  };
  std::vector<Job> jobs;
  for (const auto& step : steps) {
    for (VariantKind kind : options.variants) {
      const int copies = kind == VariantKind::Style ? std::max(1, options.style_copies) : 1;
      for (int copy = 0; copy < copies; ++copy) {
        perturb::VariantSpec spec = options.defaults;
        spec.kind = kind;
        spec.theme = kind == VariantKind::Style ? options.theme : "";
        spec.copy = copy;
        spec.seed = derive_seed(options.seed, step.key(), kind, copy);
        jobs.push_back({&step, spec});
      }
    }
  }

  std::filesystem::create_directories(ctx.dataset_dir / "shots");

  std::mutex mu;
  std::vector<SampleRecord> samples;
  GenerationReport report;
  report.jobs = jobs.size();
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;

  auto worker = [&] {
    std::optional<browser::Session> session;
    try {
      session.emplace(browser::Session::launch(options.session));
    } catch (...) {
      std::lock_guard lock(mu);
      if (!fatal) fatal = std::current_exception();
      return;
    }
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      try {
        SampleRecord record = generate_step(*job.step, job.spec, *session, ctx);
        std::lock_guard lock(mu);
        samples.push_back(std::move(record));
        ++report.accepted;
      } catch (const StepRejected& e) {
        log::warn("rejected " + job.step->key() + " " + std::string(to_string(job.spec.kind)) +
                  ": " + e.what());
        std::lock_guard lock(mu);
        report.rejections.push_back({job.step->task_id, job.step->step_id, job.spec.kind,
                                     job.spec.copy, e.stage(), std::string(to_string(e.cause())),
                                     e.what()});
      }
    }
  };

  const int n_workers =
      std::clamp<int>(options.workers, 1, static_cast<int>(std::max<std::size_t>(1, jobs.size())));
  std::vector<std::thread> threads;
  for (int i = 0; i < n_workers; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (fatal && report.accepted == 0 && report.rejections.empty()) std::rethrow_exception(fatal);

  std::sort(report.rejections.begin(), report.rejections.end(), [](const Rejection& a, const Rejection& b) {
    return std::tie(a.task_id, a.step_id, a.variant, a.copy) <
           std::tie(b.task_id, b.step_id, b.variant, b.copy);
  });
  write_samples(ctx.dataset_dir / "samples.jsonl", std::move(samples));
  write_file_atomic(ctx.dataset_dir / "generation_report.json", report.to_json().dump(2) + "\n");
  return report;
}

}  // namespace gp::dataset
