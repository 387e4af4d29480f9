#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "calkit/run.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw calkit::ValidationError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"calkit - grouped calibration and fairness scoring for probabilistic predictors"};

  std::string config_path;
  std::string data_override;
  std::string out_override;
  std::optional<std::int64_t> seed_override;
  bool list_scores = false;

  app.add_option("--config", config_path, "run configuration file (JSON)");
  app.add_option("--data", data_override, "dataset path (overrides config)");
  app.add_option("--out", out_override, "report output path (overrides config)");
  app.add_option("--seed", seed_override, "master seed (overrides config)");
  app.add_flag("--list-scores", list_scores,
               "print the registered grouping/agglomerator catalog");

  CLI11_PARSE(app, argc, argv);

  if (list_scores) {
    std::cout << calkit::catalog_text();
    return 0;
  }

  try {
    if (config_path.empty())
      throw calkit::ValidationError("--config is required (or use --list-scores)");

    const std::string base_dir =
        std::filesystem::path(config_path).parent_path().string();
    calkit::RunConfig config = calkit::parse_config(read_file(config_path), base_dir);

    if (!data_override.empty()) config.data_path = data_override;
    if (seed_override) config.seed = static_cast<std::uint64_t>(*seed_override);
    if (!out_override.empty()) config.out_path = out_override;

    const calkit::RunOutput output = calkit::run(config);

    std::ofstream out(config.out_path, std::ios::binary);
    if (!out)
      throw calkit::ExecutionError("cannot write report to '" + config.out_path + "'");
    out << output.report_json;
    out.close();

    std::cout << output.human_text;
    std::cout << "report written to " << config.out_path << "\n";
    return 0;
  } catch (const calkit::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const calkit::ExecutionError& e) {
    std::cerr << "execution error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
