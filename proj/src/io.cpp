#include "calkit/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace calkit {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

double parse_cell(const std::string& cell, int row, const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw ValidationError("data row " + std::to_string(row) + ", column '" + column +
                          "': '" + cell + "' is not numeric");
  return value;
}

}  // namespace

Dataset load_dataset(const std::string& path, const ColumnRoles& roles) {
  if (roles.features.empty())
    throw ValidationError("roles: at least one feature column is required");
  {
    std::unordered_set<std::string> seen;
    for (const auto& name : roles.features)
      if (!seen.insert(name).second)
        throw ValidationError("roles: duplicate feature column '" + name + "'");
    if (seen.count(roles.label) || seen.count(roles.prediction) ||
        roles.label == roles.prediction)
      throw ValidationError("roles: feature, label and prediction columns must be disjoint");
  }

  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset file '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw ValidationError("dataset file '" + path + "' is empty");
  const auto header = split_csv_line(line);
  std::unordered_map<std::string, int> column_of;
  for (std::size_t c = 0; c < header.size(); ++c) column_of.emplace(header[c], static_cast<int>(c));

  auto resolve = [&](const std::string& name) {
    const auto it = column_of.find(name);
    if (it == column_of.end())
      throw ValidationError("column '" + name + "' not found in header of '" + path + "'");
    return it->second;
  };
  std::vector<int> feature_cols;
  for (const auto& name : roles.features) feature_cols.push_back(resolve(name));
  const int label_col = resolve(roles.label);
  const int prediction_col = resolve(roles.prediction);

  std::vector<std::vector<double>> feature_rows;
  std::vector<double> labels, predictions;
  int row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ValidationError("data row " + std::to_string(row) + ": expected " +
                            std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));

    std::vector<double> features(feature_cols.size());
    for (std::size_t j = 0; j < feature_cols.size(); ++j)
      features[j] = parse_cell(cells[static_cast<std::size_t>(feature_cols[j])], row,
                               roles.features[j]);
    const double label =
        parse_cell(cells[static_cast<std::size_t>(label_col)], row, roles.label);
    if (label != 0.0 && label != 1.0)
      throw ValidationError("data row " + std::to_string(row) + ": label value " +
                            cells[static_cast<std::size_t>(label_col)] +
                            " is not binary (expected 0 or 1)");
    const double prediction =
        parse_cell(cells[static_cast<std::size_t>(prediction_col)], row, roles.prediction);
    if (!(prediction >= 0.0 && prediction <= 1.0))
      throw ValidationError("data row " + std::to_string(row) + ": prediction " +
                            cells[static_cast<std::size_t>(prediction_col)] +
                            " outside [0, 1]");

    feature_rows.push_back(std::move(features));
    labels.push_back(label);
    predictions.push_back(prediction);
  }
  if (feature_rows.empty())
    throw ValidationError("dataset file '" + path + "' has a header but no data rows");

  // Predictions must be a function of the input; report both offending rows.
  {
    std::unordered_map<std::string, int> first_seen;
    std::string key;
    for (std::size_t i = 0; i < feature_rows.size(); ++i) {
      key.assign(reinterpret_cast<const char*>(feature_rows[i].data()),
                 feature_rows[i].size() * sizeof(double));
      auto [it, inserted] = first_seen.emplace(key, static_cast<int>(i));
      if (!inserted &&
          predictions[static_cast<std::size_t>(it->second)] != predictions[i])
        throw ValidationError("data rows " + std::to_string(it->second + 1) + " and " +
                              std::to_string(i + 1) +
                              " share a feature vector but carry predictions " +
                              std::to_string(predictions[static_cast<std::size_t>(it->second)]) +
                              " and " + std::to_string(predictions[i]));
    }
  }

  const auto n = static_cast<Eigen::Index>(feature_rows.size());
  const auto d = static_cast<Eigen::Index>(feature_cols.size());
  Eigen::MatrixXd features(n, d);
  Eigen::VectorXd label_vec(n), prediction_vec(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j)
      features(i, j) = feature_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    label_vec[i] = labels[static_cast<std::size_t>(i)];
    prediction_vec[i] = predictions[static_cast<std::size_t>(i)];
  }
  try {
    return make_dataset(std::move(features), std::move(label_vec), std::move(prediction_vec),
                        roles.features);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("dataset '") + path + "': " + e.what());
  }
}

}  // namespace calkit
