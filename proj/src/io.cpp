#include "distflow/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace distflow::io {

namespace {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, end);
}

}  // namespace

std::string dump_json(const nlohmann::ordered_json& j) {
  return j.dump(2) + "\n";
}

nlohmann::ordered_json coeffs_json(const HermiteCoeffs& c, double p) {
  nlohmann::ordered_json j;
  j["d"] = c.dim();
  j["N"] = c.degree();
  j["order"] = "graded-lex";
  j["p"] = p;
  j["coeffs"] = c.values;
  return j;
}

HermiteCoeffs coeffs_from_json(const nlohmann::json& j) {
  if (j.value("order", "") != std::string("graded-lex")) {
    throw std::invalid_argument("coeffs_from_json: unsupported ordering");
  }
  TruncationScheme scheme(j.at("d").get<int>(), j.at("N").get<int>());
  std::vector<double> values = j.at("coeffs").get<std::vector<double>>();
  return HermiteCoeffs(scheme, std::move(values));
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
}

std::string kernel_csv(const std::vector<EmpiricalKernel>& kernels) {
  std::ostringstream out;
  int d = kernels.empty() ? 0 : kernels.front().d;
  out << "t";
  for (int i = 1; i <= d; ++i) out << ",x_" << i;
  out << ",alive\n";
  for (const auto& k : kernels) {
    for (std::size_t m = 0; m < k.size(); ++m) {
      out << format_double(k.t);
      for (int i = 0; i < d; ++i) {
        out << ',' << format_double(k.samples[m][static_cast<std::size_t>(i)]);
      }
      out << ',' << (k.alive[m] ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

std::string path_csv(const PathResult& path) {
  std::ostringstream out;
  int d = path.states.empty() ? 0 : static_cast<int>(path.states.front().size());
  out << "t";
  for (int i = 1; i <= d; ++i) out << ",z_" << i;
  out << ",alive\n";
  for (std::size_t t = 0; t < path.times.size(); ++t) {
    out << format_double(path.times[t]);
    for (int i = 0; i < d; ++i) out << ',' << format_double(path.states[t][static_cast<std::size_t>(i)]);
    out << ',' << (path.alive[t] ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string table_csv(const std::vector<std::string>& headers,
                      const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < headers.size(); ++i) {
    if (i) out << ',';
    out << headers[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace distflow::io
