// Local OpenAI-compatible endpoint answering from a dataset's ground truth,
// for hermetic evaluation runs.
#include <CLI11.hpp>
#include <iostream>

#include "gp/core/error.hpp"
#include "gp/harness/mock_server.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mock grounding model"};
  std::string dataset_dir;
  std::string behavior = "oracle";
  double malformed_rate = 0;
  std::string host = "127.0.0.1";
  int port = 0;
  app.add_option("--dataset", dataset_dir, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  app.add_option("--behavior", behavior, "oracle | fixed:X,Y | offset:D[:variants]")->capture_default_str();
  app.add_option("--malformed-rate", malformed_rate, "Fraction of unparsable answers")->capture_default_str();
  app.add_option("--host", host, "Bind address")->capture_default_str();
  app.add_option("--port", port, "Port (0 picks one)")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    const auto dataset = gp::dataset::Dataset::load(dataset_dir);
    auto parsed = gp::harness::MockBehavior::parse(behavior);
    parsed.malformed_rate = malformed_rate;
    gp::harness::MockModelServer server(dataset, parsed);
    server.start(host, port);
    std::cout << server.endpoint() << std::endl;
    server.wait();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
