#include "gp/harness/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "gp/browser/session.hpp"
#include "gp/core/error.hpp"
#include "gp/core/io.hpp"
#include "gp/core/log.hpp"
#include "gp/stats/stats.hpp"

namespace gp::harness {

using nlohmann::json;

namespace {

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

}  // namespace

void to_json(json& j, const PredictionRecord& r) {
  j = json{{"sample_id", r.sample_id},
           {"step_key", r.step_key},
           {"variant", to_string(r.variant)},
           {"instruction_type", to_string(r.instruction_type)},
           {"instruction", r.instruction},
           {"bbox", r.bbox},
           {"direction", optional_json(r.direction)},
           {"raw_response", r.raw_response},
           {"point", optional_json(r.point)},
           {"point_original", optional_json(r.point_original)},
           {"hit", optional_json(r.hit)},
           {"parse_error", optional_json(r.parse_error)},
           {"latency_ms", r.latency_ms}};
}

void from_json(const json& j, PredictionRecord& r) {
  r.sample_id = j.at("sample_id").get<std::string>();
  r.step_key = j.at("step_key").get<std::string>();
  r.variant = parse_variant_kind(j.at("variant").get<std::string>());
  r.instruction_type = parse_instruction_type(j.at("instruction_type").get<std::string>());
  r.instruction = j.value("instruction", "");
  r.bbox = j.at("bbox").get<Bbox>();
  r.direction = optional_field<std::string>(j, "direction");
  r.raw_response = j.value("raw_response", "");
  r.point = optional_field<Point>(j, "point");
  r.point_original = optional_field<Point>(j, "point_original");
  r.hit = optional_field<bool>(j, "hit");
  r.parse_error = optional_field<std::string>(j, "parse_error");
  r.latency_ms = j.value("latency_ms", 0.0);
}

void to_json(json& j, const PredictionHeader& h) {
  j = json{{"kind", "header"},
           {"config", h.config},
           {"cell", h.config.cell()},
           {"config_hash", h.config_hash},
           {"map_back", h.map_back},
           {"total", h.total},
           {"skipped", h.skipped},
           {"skipped_ids", h.skipped_ids}};
}

void from_json(const json& j, PredictionHeader& h) {
  if (j.value("kind", "") != "header") {
    throw Error(ErrorCode::InvalidArgument, "predictions file does not start with a header record");
  }
  h.config = j.at("config").get<EvalConfig>();
  h.config_hash = j.at("config_hash").get<std::string>();
  h.map_back = j.value("map_back", true);
  h.total = j.value("total", std::size_t{0});
  h.skipped = j.value("skipped", std::size_t{0});
  h.skipped_ids = j.value("skipped_ids", std::vector<std::string>{});
}

PredictionFile PredictionFile::load(const std::filesystem::path& path) {
  const auto lines = read_jsonl(path);
  if (lines.empty()) throw Error(ErrorCode::InvalidArgument, "empty predictions file " + path.string());
  PredictionFile file;
  file.header = lines.front().get<PredictionHeader>();
  for (std::size_t i = 1; i < lines.size(); ++i) file.records.push_back(lines[i].get<PredictionRecord>());
  return file;
}

std::string predictions_filename(const std::string& model_name, const std::string& cell) {
  std::string safe = model_name.empty() ? "model" : model_name;
  for (char& ch : safe) {
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' || ch == '_';
    if (!ok) ch = '_';
  }
  return "predictions_" + safe + "_" + cell + ".jsonl";
}

void score_response(PredictionRecord& record, ModelFamily family, const ResizePlan& plan, bool map_back) {
  record.point.reset();
  record.point_original.reset();
  record.hit.reset();
  record.parse_error.reset();
  try {
    const ParsedPoint parsed = parse_prediction(family, record.raw_response);
    const Point original = map_back ? map_to_original(parsed.point, plan) : parsed.point;
    record.point = parsed.point;
    record.point_original = original;
    record.hit = stats::hit_test(original, record.bbox);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ParseFailed && e.code() != ErrorCode::PointOutOfRange) throw;
    record.parse_error = e.what();
  }
}

std::string complete_with_retry(ChatBackend& backend, const json& messages, const std::string& model,
                                int attempts, int backoff_ms) {
  int delay = backoff_ms;
  for (int attempt = 1;; ++attempt) {
    try {
      return backend.complete(messages, model).text;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EndpointUnreachable || attempt >= attempts) throw;
      log::warn(std::string("request failed (attempt ") + std::to_string(attempt) + "): " + e.what());
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
      delay *= 2;
    }
  }
}

namespace {

struct Job {
  const dataset::SampleRecord* sample;
  std::string id;
  std::string instruction;
};

std::map<std::string, PredictionRecord> resumable_records(const std::filesystem::path& path,
                                                          const PredictionHeader& header) {
  std::map<std::string, PredictionRecord> out;
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return out;
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) return out;
  const json first = json::parse(line, nullptr, false);
  PredictionHeader previous;
  try {
    previous = first.get<PredictionHeader>();
  } catch (const std::exception& e) {
    log::warn("not resuming " + path.string() + ": " + e.what());
    return out;
  }
  if (previous.config_hash != header.config_hash || previous.map_back != header.map_back) {
    log::warn("not resuming " + path.string() + ": written for a different configuration");
    return out;
  }
  while (std::getline(in, line)) {
    // An interrupted run can leave a truncated last line; it is dropped and
    // that sample is evaluated again.
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    try {
      auto r = j.get<PredictionRecord>();
      out[r.sample_id] = std::move(r);
    } catch (const std::exception&) {
    }
  }
  return out;
}

std::string header_and_records(const PredictionHeader& header, const std::vector<PredictionRecord>& records) {
  std::string text = json(header).dump() + "\n";
  for (const auto& r : records) text += json(r).dump() + "\n";
  return text;
}

}  // namespace

RunResult run_configuration(const dataset::Dataset& dataset, const EvalConfig& config, ChatBackend& backend,
                            const PromptSet& prompts, const RunOptions& options) {
  RunResult result;
  std::filesystem::create_directories(options.out_dir);
  result.path = options.out_dir / predictions_filename(config.model_name, config.cell());

  PredictionHeader header;
  header.config = config;
  header.config_hash = config.hash();
  header.map_back = options.map_back;

  std::vector<Job> jobs;
  for (const auto& s : dataset.samples) {
    if (s.variant != config.variant || s.applied_spec.copy != 0) continue;
    const std::string id = dataset::sample_id(s);
    if (config.instruction_type == InstructionType::Relational && !s.instruction_relational) {
      header.skipped_ids.push_back(id);
      continue;
    }
    const std::string& text = config.instruction_type == InstructionType::Direct ? s.instruction_direct
                                                                                  : *s.instruction_relational;
    jobs.push_back({&s, id, text});
  }
  std::sort(header.skipped_ids.begin(), header.skipped_ids.end());
  header.skipped = header.skipped_ids.size();
  header.total = jobs.size();
  result.skipped = header.skipped;

  std::map<std::string, PredictionRecord> done;
  if (options.resume) done = resumable_records(result.path, header);
  std::vector<const Job*> pending;
  std::vector<PredictionRecord> records;
  for (const auto& job : jobs) {
    const auto it = done.find(job.id);
    if (it != done.end()) {
      records.push_back(it->second);
    } else {
      pending.push_back(&job);
    }
  }
  result.resumed = records.size();

  // Rewrite the file with what is known so far, then append as we go.
  write_file_atomic(result.path, header_and_records(header, records));
  std::ofstream out(result.path, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot append to " + result.path.string());

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> completed{0};
  std::atomic<bool> abort{false};
  std::optional<Error> failure;

  const auto worker = [&] {
    while (!abort) {
      const std::size_t i = next++;
      if (i >= pending.size()) return;
      const Job& job = *pending[i];
      const dataset::SampleRecord& s = *job.sample;
      PredictionRecord record;
      record.sample_id = job.id;
      record.step_key = dataset::step_key(s);
      record.variant = s.variant;
      record.instruction_type = config.instruction_type;
      record.instruction = job.instruction;
      record.bbox = s.bbox;
      record.direction = config.instruction_type == InstructionType::Relational ? s.direction : std::nullopt;
      try {
        const std::string png = read_file(dataset.screenshot_path(s));
        const Size dims = browser::png_dimensions(png);
        const ResizePlan plan = smart_resize(dims.height, dims.width);
        const json messages = render_prompt(config, prompts, job.instruction, plan, resize_png(png, plan));
        const auto start = std::chrono::steady_clock::now();
        try {
          record.raw_response =
              complete_with_retry(backend, messages, config.model_name, options.attempts, options.backoff_ms);
          score_response(record, config.family, plan, options.map_back);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::RequestFailed) throw;
          record.parse_error = std::string("request failed: ") + e.what();
        }
        record.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      } catch (const Error& e) {
        std::lock_guard lock(mu);
        if (!failure) failure = e;
        abort = true;
        return;
      }
      std::lock_guard lock(mu);
      out << json(record).dump() << "\n";
      out.flush();
      records.push_back(std::move(record));
      const std::size_t n = ++completed;
      if (n % 50 == 0 || n == pending.size()) {
        log::info(config.cell() + ": " + std::to_string(n) + "/" + std::to_string(pending.size()));
      }
    }
  };

  const int threads = std::max(1, std::min<int>(options.parallelism, static_cast<int>(pending.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < threads && !pending.empty(); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  out.close();

  if (failure) {
    log::warn(config.cell() + ": aborted after " + std::to_string(completed.load()) + " new records; partial results kept in " +
              result.path.string());
    throw *failure;
  }

  std::sort(records.begin(), records.end(),
            [](const PredictionRecord& a, const PredictionRecord& b) { return a.sample_id < b.sample_id; });
  write_file_atomic(result.path, header_and_records(header, records));
  result.records = std::move(records);
  return result;
}

}  // namespace gp::harness
