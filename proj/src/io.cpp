#include "gipnm/io.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace gipnm {
namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

TwoModeCovariance read_sigma_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("JSON parse error: ") + e.what());
  }
  if (!j.contains("sigma")) {
    throw ValidationError("JSON covariance file must contain field \"sigma\"");
  }
  const auto& rows = j["sigma"];
  if (!rows.is_array() || rows.size() != 4) {
    throw ValidationError("\"sigma\" must be an array of 4 rows");
  }
  Mat4 m;
  for (int r = 0; r < 4; ++r) {
    if (!rows[r].is_array() || rows[r].size() != 4) {
      throw ValidationError("\"sigma\" row " + std::to_string(r) + " must have 4 entries");
    }
    for (int c = 0; c < 4; ++c) {
      if (!rows[r][c].is_number()) {
        throw ValidationError("\"sigma\" entry (" + std::to_string(r) + "," +
                              std::to_string(c) + ") is not a number");
      }
      m(r, c) = rows[r][c].get<double>();
    }
  }
  return TwoModeCovariance(m);
}

TwoModeCovariance read_sigma_csv(const std::string& text) {
  std::vector<double> vals;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    // tolerate trailing newline on the last field
    std::istringstream field(token);
    double v;
    if (!(field >> v)) {
      throw ValidationError("CSV covariance file: non-numeric field '" + token + "'");
    }
    vals.push_back(v);
  }
  if (vals.size() != 16) {
    throw ValidationError("CSV covariance file must hold 16 reals (row-major), got " +
                          std::to_string(vals.size()));
  }
  Mat4 m;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      m(r, c) = vals[static_cast<std::size_t>(4 * r + c)];
    }
  }
  return TwoModeCovariance(m);
}

TwoModeCovariance read_sigma(const std::string& path) {
  const std::string text = slurp(path);
  if (ends_with(path, ".json")) {
    return read_sigma_json(text);
  }
  if (ends_with(path, ".csv")) {
    return read_sigma_csv(text);
  }
  // sniff: JSON starts with '{'
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    return read_sigma_json(text);
  }
  return read_sigma_csv(text);
}

void write_sigma_json(const TwoModeCovariance& sigma, const std::string& path) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 4; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < 4; ++c) {
      row.push_back(sigma.matrix()(r, c));
    }
    rows.push_back(row);
  }
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write file: " + path);
  }
  out << nlohmann::json{{"sigma", rows}}.dump(2) << "\n";
}

void write_sigma_csv(const TwoModeCovariance& sigma, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write file: " + path);
  }
  out << std::setprecision(17);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      out << sigma.matrix()(r, c);
      if (r != 3 || c != 3) {
        out << ",";
      }
    }
  }
  out << "\n";
}

}  // namespace gipnm
